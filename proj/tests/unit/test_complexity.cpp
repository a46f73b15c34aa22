#include <cmath>
#include <random>

#include "doctest.h"
#include "stereodecomp/complexity.hpp"

using namespace stereodecomp;

TEST_SUITE("complexity") {
  TEST_CASE("unit base enumerates the geometric series") {
    const auto totals = exhaustive_total(1, 1, 1, 2, 2);
    CHECK(totals.per_level == std::vector<std::uint64_t>{1, 8, 64});
    CHECK(totals.total == 73);
    CHECK(totals.closed_form == 73);
    CHECK(totals.bound == doctest::Approx(64.0 * 8.0 / 7.0));
    CHECK(totals.bound_constant == doctest::Approx(8.0 / 7.0));
    CHECK(totals.bound_holds);

    const auto flat = exhaustive_total(5, 7, 3, 2, 0);
    CHECK(flat.total == 105);
    CHECK(flat.per_level.size() == 1);
  }

  TEST_CASE("direct summation equals the closed form on the full sweep") {
    for (int s = 2; s <= 4; ++s)
      for (int L = 0; L <= 6; ++L) {
        const auto t = exhaustive_total(20, 36, 12, s, L);
        CHECK(t.total == t.closed_form);
        CHECK(t.bound_holds);
        CHECK(t.total <= t.bound);
        if (s == 2) CHECK(t.bound_constant <= 8.0 / 7.0 + 1e-15);
        CHECK(t.bound_constant > 1.0);
      }
  }

  TEST_CASE("oversized inputs raise overflow errors") {
    CHECK_THROWS_AS(exhaustive_total(1u << 30, 1u << 30, 1u << 16, 4, 6), OverflowError);
  }

  TEST_CASE("critical fractions collapse the decomposed total to linear") {
    const int s = 2, L = 2;
    std::vector<double> r;
    for (int l = 1; l <= L; ++l) r.push_back(std::sqrt(1.0 / std::pow(s, 3 * l)));
    const auto d = decomposed_total(1, 1, 1, s, L, r, 1.0);
    CHECK(d.per_level.size() == 3);
    for (double o : d.per_level) CHECK(o == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.total == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(d.linear_bound == doctest::Approx(3.0));
    CHECK(d.condition_all);

    const auto zero = decomposed_total(4, 5, 6, 2, 3, {0.0, 0.0, 0.0}, 1.0);
    CHECK(zero.total == doctest::Approx(120.0));
  }

  TEST_CASE("condition threshold matches the closed form") {
    CHECK(condition_threshold(2, 3, 1.0) == doctest::Approx(0.0441941738).epsilon(1e-7));
    const auto pass = decomposed_total(1, 1, 1, 2, 3, {0.3, 0.1, 0.04}, 1.0);
    CHECK(pass.condition_ok[2]);
    const auto fail = decomposed_total(1, 1, 1, 2, 3, {0.3, 0.1, 0.05}, 1.0);
    CHECK_FALSE(fail.condition_ok[2]);

    std::mt19937 rng(19);
    std::uniform_int_distribution<int> s_dist(2, 4), l_dist(1, 6), c_dist(1, 6);
    std::uniform_real_distribution<double> eps(0.01, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
      const int s = s_dist(rng), l = l_dist(rng), c = c_dist(rng);
      const double threshold = std::sqrt(double(c) / std::pow(double(s), 3.0 * l));
      std::vector<double> r(l, 0.0);
      r[l - 1] = std::min(1.0, threshold * (1.0 - eps(rng)));
      CHECK(decomposed_total(1, 1, 1, s, l, r, c).condition_ok[l - 1]);
      r[l - 1] = std::min(1.0, threshold * (1.0 + eps(rng)));
      if (r[l - 1] > threshold)
        CHECK_FALSE(decomposed_total(1, 1, 1, s, l, r, c).condition_ok[l - 1]);
    }
  }

  TEST_CASE("theorem-2 linearity under the condition") {
    for (int s = 2; s <= 3; ++s)
      for (int L = 1; L <= 4; ++L)
        for (double c : {1.0, 2.0, 5.0}) {
          std::vector<double> r;
          for (int l = 1; l <= L; ++l)
            r.push_back(std::min(1.0, std::sqrt(c / std::pow(double(s), 3.0 * l))));
          const auto d = decomposed_total(7, 5, 3, s, L, r, c);
          CHECK(d.total <= d.linear_bound * (1 + 1e-12));
        }
  }

  TEST_CASE("dense_valid_entries counts the in-frame hypotheses") {
    // width 6, D 3: columns contribute 1+2+3+3+3+3 = 15 per row.
    CHECK(dense_valid_entries(6, 2, 3) == 30);
    CHECK(dense_valid_entries(4, 1, 4) == 10);
    CHECK(dense_valid_entries(4, 3, 8) == 30);  // D capped by width
  }

  TEST_CASE("reconcile accepts exact counters and rejects drift") {
    ComplexityLedger ledger;
    ledger.scale = 2;
    ComplexityLevel dense;
    dense.level = 0;
    dense.width = 6;
    dense.height = 2;
    dense.disparities = 3;
    dense.exhaustive = 36;
    dense.decomposed = 36.0;
    dense.measured = 30;
    ComplexityLevel sparse;
    sparse.level = 1;
    sparse.width = 12;
    sparse.height = 4;
    sparse.disparities = 6;
    sparse.exhaustive = 288;
    sparse.detail_fraction = 0.25;
    sparse.decomposed = 18.0;
    sparse.measured = 60;  // <= |FA| * D = 12 * 6 = 72
    ledger.levels = {dense, sparse};
    ledger.finalize();
    CHECK(ledger.exhaustive_total == 324);
    CHECK(ledger.measured_total == 90);

    auto report = reconcile(ledger);
    CHECK(report.ok);
    CHECK(report.levels[0].expected == 30);
    CHECK(report.levels[1].upper_bound == 72);

    ledger.levels[0].measured = 29;
    CHECK_FALSE(reconcile(ledger).ok);
    ledger.levels[0].measured = 30;
    ledger.levels[1].measured = 73;
    CHECK_FALSE(reconcile(ledger).ok);
  }

  TEST_CASE("growth csv has the pinned header and LF endings") {
    const std::string csv = growth_csv({{128, 0, 4096, 4096.0, 4000, 12.5}});
    CHECK(csv.rfind("resolution,level,O_exhaustive,O_decomposed,measured,wallclock_ms\n", 0) ==
          0);
    CHECK(csv.find("128,0,4096,4096.000000,4000,12.500000\n") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
  }
}
