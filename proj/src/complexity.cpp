#include "stereodecomp/complexity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace stereodecomp {

namespace {

using u128 = unsigned __int128;

std::uint64_t narrow(u128 v, const char* what) {
  if (v > std::numeric_limits<std::uint64_t>::max()) throw OverflowError(what);
  return static_cast<std::uint64_t>(v);
}

u128 pow_u128(std::uint64_t base, int exp) {
  u128 v = 1;
  for (int i = 0; i < exp; ++i) {
    const u128 next = v * base;
    if (base != 0 && next / base != v) throw OverflowError("power overflows 128-bit range");
    v = next;
  }
  return v;
}

}  // namespace

void ComplexityLedger::finalize() {
  exhaustive_total = 0;
  decomposed_total = 0.0;
  measured_total = 0;
  measured_right_total = 0;
  for (const auto& l : levels) {
    exhaustive_total += l.exhaustive;
    decomposed_total += l.decomposed;
    measured_total += l.measured;
    measured_right_total += l.measured_right;
  }
}

ExhaustiveTotals exhaustive_total(std::uint64_t width0, std::uint64_t height0,
                                  std::uint64_t disparities0, int scale, int levels) {
  if (scale < 2) throw InvalidConfig("scale must be >= 2");
  if (levels < 0) throw InvalidConfig("levels must be >= 0");
  const u128 base = u128(width0) * height0 * disparities0;
  ExhaustiveTotals out;

  u128 total = 0;
  for (int l = 0; l <= levels; ++l) {
    const u128 o_l = base * pow_u128(scale, 3 * l);
    out.per_level.push_back(narrow(o_l, "per-level search space overflows"));
    total += o_l;
  }
  out.total = narrow(total, "total search space overflows");

  const u128 s3 = pow_u128(scale, 3);
  const u128 numer = pow_u128(scale, 3 * (levels + 1)) - 1;
  out.closed_form = narrow(base * (numer / (s3 - 1)), "closed form overflows");

  const double s3d = static_cast<double>(s3);
  out.bound_constant = s3d / (s3d - 1.0);
  out.bound = static_cast<double>(out.per_level.back()) * out.bound_constant;
  // total <= base * s^{3L} * s^3/(s^3-1), cross-multiplied so the check is exact.
  out.bound_holds = total * (s3 - 1) <= base * pow_u128(scale, 3 * levels) * s3;
  return out;
}

double condition_threshold(int scale, int level, double condition_constant) {
  return std::sqrt(condition_constant / static_cast<double>(pow_u128(scale, 3 * level)));
}

DecomposedTotals decomposed_total(std::uint64_t width0, std::uint64_t height0,
                                  std::uint64_t disparities0, int scale, int levels,
                                  const std::vector<double>& detail_fractions,
                                  double condition_constant) {
  if (static_cast<int>(detail_fractions.size()) != levels)
    throw InvalidInput("expected one detail fraction per level above the reference");
  for (double r : detail_fractions)
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidInput("detail fractions must lie in [0, 1]");

  const auto exhaustive = exhaustive_total(width0, height0, disparities0, scale, levels);
  DecomposedTotals out;
  out.per_level.push_back(static_cast<double>(exhaustive.per_level[0]));
  out.total = out.per_level[0];
  for (int l = 1; l <= levels; ++l) {
    const double r = detail_fractions[l - 1];
    const double o_hat = static_cast<double>(exhaustive.per_level[l]) * r * r;
    out.per_level.push_back(o_hat);
    out.total += o_hat;
    const bool ok = r <= condition_threshold(scale, l, condition_constant);
    out.condition_ok.push_back(ok);
    out.condition_all = out.condition_all && ok;
  }
  const double base = static_cast<double>(width0) * height0 * disparities0;
  out.linear_bound = base * (1.0 + levels * condition_constant);
  return out;
}

std::uint64_t dense_valid_entries(std::uint64_t width, std::uint64_t height,
                                  std::uint64_t disparities) {
  // Sum over columns of min(D, c+1): D*(W - D + 1) + (D-1)D/2 for D <= W.
  const u128 d = std::min<u128>(disparities, width);
  const u128 per_row = d * (u128(width) - d + 1) + d * (d - 1) / 2;
  return narrow(per_row * height, "valid entry count overflows");
}

ReconcileReport reconcile(const ComplexityLedger& ledger) {
  ReconcileReport report;
  for (const auto& level : ledger.levels) {
    ReconcileLevel row;
    row.level = level.level;
    row.measured = level.measured;
    if (level.level == 0) {
      row.expected = dense_valid_entries(level.width, level.height, level.disparities);
      row.ok = level.measured == row.expected;
    } else {
      // Each detail pixel scores at most D_l hypotheses, so |FA| * D_l is an
      // exact upper bound on the sparse count.
      const double fa = level.detail_fraction * static_cast<double>(level.width * level.height);
      row.upper_bound = static_cast<std::uint64_t>(
          std::llround(fa) * static_cast<long long>(level.disparities));
      row.ok = level.measured <= row.upper_bound;
    }
    row.ratio_vs_exhaustive =
        level.exhaustive > 0 ? static_cast<double>(level.measured) / level.exhaustive : 0.0;
    report.ok = report.ok && row.ok;
    report.levels.push_back(row);
  }
  return report;
}

std::string ledger_text(const ComplexityLedger& ledger) {
  std::ostringstream out;
  out << "scale " << ledger.scale << " condition_C " << ledger.condition_constant << '\n';
  for (const auto& l : ledger.levels) {
    out << "level " << l.level << " dims " << l.width << 'x' << l.height << 'x' << l.disparities
        << " exhaustive " << l.exhaustive << " r " << l.detail_fraction << " decomposed "
        << l.decomposed << " measured " << l.measured;
    if (l.measured_right > 0) out << " measured_right " << l.measured_right;
    if (l.refinement_evaluations > 0) out << " refinement_taps " << l.refinement_evaluations;
    if (l.level > 0) out << " condition " << (l.condition_ok ? "ok" : "violated");
    out << '\n';
  }
  out << "totals exhaustive " << ledger.exhaustive_total << " decomposed "
      << ledger.decomposed_total << " measured " << ledger.measured_total;
  if (ledger.measured_right_total > 0) out << " measured_right " << ledger.measured_right_total;
  out << '\n';
  return out.str();
}

std::string condition_table(const ComplexityLedger& ledger) {
  std::ostringstream out;
  out << "C";
  for (const auto& l : ledger.levels)
    if (l.level > 0) out << "\tlevel" << l.level;
  out << '\n';
  for (int c = 1; c <= 6; ++c) {
    out << c;
    for (const auto& l : ledger.levels) {
      if (l.level == 0) continue;
      const bool ok = l.detail_fraction <= condition_threshold(ledger.scale, l.level, c);
      out << '\t' << (ok ? "ok" : "violated");
    }
    out << '\n';
  }
  return out.str();
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
  std::ostringstream csv;
  csv << "resolution,level,O_exhaustive,O_decomposed,measured,wallclock_ms\n";
  for (const auto& row : rows) {
    csv << row.resolution << ',' << row.level << ',' << row.exhaustive << ',';
    csv.precision(6);
    csv << std::fixed << row.decomposed << ',' << row.measured << ',' << row.wallclock_ms
        << '\n';
    csv.unsetf(std::ios::fixed);
  }
  return csv.str();
}

}  // namespace stereodecomp
