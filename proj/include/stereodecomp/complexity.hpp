#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stereodecomp/grid.hpp"

namespace stereodecomp {

// Search-space accounting for one pipeline run. All counts are numbers of
// matching-score (dot product) evaluations, the unit both theorems use.
struct ComplexityLevel {
  int level = 0;
  std::uint64_t width = 0, height = 0, disparities = 0;
  std::uint64_t exhaustive = 0;      // W * H * D
  double detail_fraction = 0.0;      // r_l (0 for the dense level)
  double decomposed = 0.0;           // exhaustive * r_l^2, or exhaustive at level 0
  std::uint64_t measured = 0;        // left-view score evaluations
  std::uint64_t measured_right = 0;  // right-view evaluations (bidirectional runs)
  // Correlation taps spent by the refinement stage. Refinement is an
  // O(W*H) post-process like upsampling and fusion, so its taps are
  // reported separately and never enter the search-space totals above.
  std::uint64_t refinement_evaluations = 0;
  bool condition_ok = true;          // r_l <= sqrt(C / s^{3l})
  double wallclock_ms = 0.0;         // time spent producing this level
};

struct ComplexityLedger {
  int scale = 2;
  double condition_constant = 1.0;  // C used for the per-level verdicts
  std::vector<ComplexityLevel> levels;
  std::uint64_t exhaustive_total = 0;
  double decomposed_total = 0.0;
  std::uint64_t measured_total = 0;
  std::uint64_t measured_right_total = 0;

  void finalize();  // fills the totals from the per-level rows
};

struct ExhaustiveTotals {
  std::vector<std::uint64_t> per_level;  // base * s^{3l}
  std::uint64_t total = 0;               // geometric sum, exact
  std::uint64_t closed_form = 0;         // base * (s^{3(L+1)} - 1) / (s^3 - 1)
  double bound = 0.0;                    // base * s^{3L} * C
  double bound_constant = 0.0;           // C = s^3 / (s^3 - 1)
  bool bound_holds = false;              // checked in exact integer arithmetic
};

// Search-space size of exhaustive matching over the whole level stack.
ExhaustiveTotals exhaustive_total(std::uint64_t width0, std::uint64_t height0,
                                  std::uint64_t disparities0, int scale, int levels);

struct DecomposedTotals {
  std::vector<double> per_level;        // level 0 dense, then r_l^2-scaled
  double total = 0.0;
  std::vector<bool> condition_ok;       // r_l <= sqrt(C / s^{3l}), levels 1..L
  bool condition_all = true;
  double linear_bound = 0.0;            // base * (1 + L * C)
};

// Search-space size of the decomposed model for given per-level detail
// fractions r[0..L-1] covering levels 1..L.
DecomposedTotals decomposed_total(std::uint64_t width0, std::uint64_t height0,
                                  std::uint64_t disparities0, int scale, int levels,
                                  const std::vector<double>& detail_fractions,
                                  double condition_constant);

// Closed-form threshold of the sparsity condition at one level.
double condition_threshold(int scale, int level, double condition_constant);

struct ReconcileLevel {
  int level = 0;
  std::uint64_t expected = 0;  // exact expectation where one exists (dense level)
  std::uint64_t measured = 0;
  std::uint64_t upper_bound = 0;  // exhaustive * r_spa (sparse levels)
  double ratio_vs_exhaustive = 0.0;
  bool ok = true;
};

struct ReconcileReport {
  std::vector<ReconcileLevel> levels;
  bool ok = true;
};

// Checks the measured counters against the ledger: the dense count must
// equal the valid cost-volume entry count exactly, and each sparse count
// must stay within the exact upper bound |FA_l| * D_l.
ReconcileReport reconcile(const ComplexityLedger& ledger);

// Exact count of in-frame cost-volume entries at a level.
std::uint64_t dense_valid_entries(std::uint64_t width, std::uint64_t height,
                                  std::uint64_t disparities);

struct GrowthRow {
  int resolution = 0;
  int level = 0;
  std::uint64_t exhaustive = 0;
  double decomposed = 0.0;
  std::uint64_t measured = 0;
  double wallclock_ms = 0.0;
};

// CSV with header resolution,level,O_exhaustive,O_decomposed,measured,wallclock_ms
std::string growth_csv(const std::vector<GrowthRow>& rows);

// Human-readable ledger dump: one line per level plus totals.
std::string ledger_text(const ComplexityLedger& ledger);

// Sparsity-condition verdicts of one run's detail fractions for C = 1..6.
std::string condition_table(const ComplexityLedger& ledger);

}  // namespace stereodecomp
