#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace graduate {

/// Type-7 (linear interpolation) empirical quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double prob);
double quantile(std::vector<double> values, double prob);

struct QuantileLevels {
  double lower = 0.025;
  double upper = 0.975;
};

/// Mean, median and band per cell (rows x cols).
struct ScaleSummary {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd median;
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
};

/// Per (population, age) summary of log-rate draws on three scales.
/// Quantiles are taken on the log scale and mapped to the other scales, so
/// they commute with the transforms exactly; means are taken per scale.
struct PredictiveSummary {
  std::vector<std::string> populations;
  std::vector<int> ages;
  QuantileLevels levels;
  ScaleSummary log_rate;
  ScaleSummary rate;
  ScaleSummary death_prob;

  int age_index(int age) const;
};

enum class Scale { kLogRate, kRate, kDeathProb };
const char* scale_name(Scale scale);
Scale parse_scale(const std::string& name);
const ScaleSummary& scale_of(const PredictiveSummary& s, Scale scale);

/// Summarizes draws, each a J x n matrix of log-rates.
PredictiveSummary summarize_curves(std::span<const Eigen::MatrixXd> draws,
                                   std::vector<std::string> populations,
                                   std::vector<int> ages, QuantileLevels levels);

/// Ordering, codomain and transform-commutation checks; empty string when
/// all hold, otherwise a description of the first failure.
std::string check_summary(const PredictiveSummary& s);

}  // namespace graduate
