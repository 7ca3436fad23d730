#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graduate/distributions.hpp"
#include "graduate/model.hpp"
#include "graduate/sampler.hpp"
#include "graduate/summary.hpp"

namespace graduate {

enum class Blend { kNone, kLinear };
Blend parse_blend(const std::string& name);
const char* blend_name(Blend blend);

struct ForecastConfig {
  int horizon = 16;
  int terminal_age = 120;
  Blend blend = Blend::kNone;
  /// Discount used beyond the last fitted age; defaults to the schedule's
  /// terminal factor.
  std::optional<double> delta;
  bool block_discount = false;

  void validate(int last_fitted_age) const;
};

/// Log-rate draws beyond the fitted range; each draw is J x horizon.
struct PredictiveDraws {
  std::vector<std::string> populations;
  std::vector<int> ages;
  std::vector<Eigen::MatrixXd> y;
};

double extrapolation_delta(const ForecastConfig& config, const DiscountSchedule& schedule);

/// Propagates every posterior draw forward with discount-implied evolution
/// noise and adds observational noise.
PredictiveDraws extrapolate(const PosteriorDraws& draws, const DlmSpec& spec,
                            const ForecastConfig& config, double delta, RngStream& rng);

/// Moments of y at ages ϑ+1..ϑ+horizon given a fixed terminal state, the
/// terminal filter covariance and V.
struct PredictiveMoments {
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;
};
PredictiveMoments predictive_moments(const Eigen::VectorXd& terminal_state,
                                     const Eigen::MatrixXd& terminal_cov,
                                     const Eigen::MatrixXd& V, const DlmSpec& spec,
                                     double delta, int horizon, bool block_discount);

/// w(x) = (x - ϑ)/(T - ϑ) clamped to [0, 1].
double blend_weight(int age, int last_fitted_age, int terminal_age);

struct BlendResult {
  PredictiveDraws draws;
  std::vector<std::string> warnings;
};

/// Moves each draw toward its across-population mean log-rate, reaching it
/// at the terminal age and staying there beyond.
BlendResult blend_convergence(const PredictiveDraws& draws, int last_fitted_age,
                              const ForecastConfig& config);

/// Summary over fitted ages followed by extrapolated ages. `fitted` draws
/// are J x n and must pair one-to-one with `extended.y`.
PredictiveSummary summarize_predictive(const std::vector<Eigen::MatrixXd>& fitted,
                                       const std::vector<int>& fitted_ages,
                                       const PredictiveDraws& extended, QuantileLevels levels);

struct Crossing {
  int age = 0;
  std::string first;
  std::string second;
};

/// First age > from_age at which the posterior medians of two populations
/// change order relative to the previous age.
std::optional<Crossing> first_crossing(const PredictiveSummary& summary, int from_age);

}  // namespace graduate
