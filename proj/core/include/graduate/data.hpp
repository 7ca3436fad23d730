#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace graduate {

using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Inclusive age interval.
struct AgeRange {
  int first = 0;
  int last = 0;

  bool contains(int age) const { return age >= first && age <= last; }
  friend bool operator==(const AgeRange&, const AgeRange&) = default;
};

/// Death counts and exposures for one or more populations on a common,
/// unit-spaced age grid. Matrices are populations x ages.
struct MortalityTable {
  std::vector<std::string> populations;
  std::vector<int> ages;
  Eigen::MatrixXd deaths;
  Eigen::MatrixXd exposure;
  MissingMask missing;

  int population_count() const { return static_cast<int>(populations.size()); }
  int age_count() const { return static_cast<int>(ages.size()); }

  /// Row index of a population; throws DomainError if unknown.
  int population_index(std::string_view id) const;
  /// Column index of an age; throws DomainError if off-grid.
  int age_index(int age) const;

  /// Throws if any structural invariant is violated.
  void validate() const;
};

/// Log central rates y = log(D/E). Missing cells hold NaN.
struct RateSurface {
  std::vector<std::string> populations;
  std::vector<int> ages;
  Eigen::MatrixXd log_rates;
  MissingMask missing;

  int population_count() const { return static_cast<int>(populations.size()); }
  int age_count() const { return static_cast<int>(ages.size()); }
  int missing_count() const { return static_cast<int>(missing.count()); }
  int population_index(std::string_view id) const;
  int age_index(int age) const;
};

struct ColumnSchema {
  std::string population = "population";
  std::string age = "age";
  std::string deaths = "deaths";
  std::string exposure = "exposure";
};

/// Reads a long-format CSV (one row per population-age). Populations are
/// ordered lexicographically so the result does not depend on row order.
/// Zero or empty death counts, and absent (population, age) rows, are
/// marked missing.
MortalityTable load_table(const std::filesystem::path& path,
                          const ColumnSchema& schema = {});
MortalityTable parse_table(std::string_view csv_text,
                           const ColumnSchema& schema = {});

RateSurface central_rates(const MortalityTable& table);

/// q = 1 - exp(-exp(y)), kept inside the open unit interval.
double death_probability(double log_rate);
std::vector<double> death_probabilities(std::span<const double> log_rates);

/// Copy of `table` with the given age ranges of one population marked missing.
MortalityTable mask_ages(const MortalityTable& table, std::string_view population,
                         std::span<const AgeRange> ranges);

/// Fraction of a population's cells that are missing.
double missing_fraction(const MortalityTable& table, std::string_view population);

/// Restricts (and reorders) a table to the given populations.
MortalityTable select_populations(const MortalityTable& table,
                                  std::span<const std::string> ids);

/// Parses "4-10,15-17" or "86+" style age lists. An open upper bound is
/// returned as `open_last`.
std::vector<AgeRange> parse_age_ranges(std::string_view text, int open_last);

/// Named missing-data scenarios (a..f) for a single target population.
std::vector<AgeRange> scenario_ranges(char scenario);

}  // namespace graduate
