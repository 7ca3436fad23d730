#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graduate/data.hpp"
#include "graduate/summary.hpp"

namespace graduate {

/// Mean squared prediction error over the supplied cells.
double mspe(std::span<const double> observed, std::span<const double> predicted);
/// Mean absolute prediction error over the supplied cells.
double mape(std::span<const double> observed, std::span<const double> predicted);

struct IntervalWidths {
  std::vector<double> per_cell;
  double mean = 0.0;
};
IntervalWidths wci(std::span<const double> upper, std::span<const double> lower);

/// One candidate for comparison: its summary and the surface holding the
/// true values at the held-out cells.
struct ComparisonInput {
  std::string model;
  std::string scenario;
  double percent_missing = 0.0;
  const PredictiveSummary* summary = nullptr;
  const RateSurface* heldout = nullptr;
};

struct ComparisonRow {
  std::string model;
  std::string scenario;
  double percent_missing = 0.0;
  double mspe = 0.0;
  double mape = 0.0;
  double wci = 0.0;
  bool best_mspe = false;
  bool best_mape = false;
  bool best_wci = false;
  int cells = 0;
};

struct ComparisonReport {
  Scale scale = Scale::kLogRate;
  std::vector<ComparisonRow> rows;
  /// Scenarios in which more than one model shares a best value.
  std::vector<std::string> ties;
};

/// Scores each fit by its posterior median at the cells flagged in
/// `cells` (populations x ages, aligned with each held-out surface).
ComparisonReport compare(std::span<const ComparisonInput> fits, const MissingMask& cells,
                         Scale scale = Scale::kLogRate);

void write_report_csv(std::ostream& out, const ComparisonReport& report);
void write_report_table(std::ostream& out, const ComparisonReport& report);

}  // namespace graduate
