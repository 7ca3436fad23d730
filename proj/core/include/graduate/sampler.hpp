#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graduate/data.hpp"
#include "graduate/distributions.hpp"
#include "graduate/inference.hpp"
#include "graduate/model.hpp"
#include "graduate/summary.hpp"

namespace graduate {

struct GibbsConfig {
  int iterations = 2000;
  int burn_in = 500;
  int thin = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  bool block_discount = false;

  void validate() const;
  /// Stored draws per chain.
  int kept_per_chain() const;
};

struct MissingCell {
  int population = 0;
  int age_index = 0;
};

/// Missing cells ordered by age, then population.
std::vector<MissingCell> missing_cells(const MissingMask& mask);

/// Gibbs output, draw-major. Draws from all chains are concatenated in
/// chain order.
struct PosteriorDraws {
  std::vector<std::string> populations;
  std::vector<int> ages;
  int state_dim = 0;
  std::vector<MissingCell> missing;

  std::vector<Eigen::MatrixXd> theta;          // p x n, ages x1..ϑ
  std::vector<Eigen::MatrixXd> phi;            // J x J precision
  std::vector<Eigen::MatrixXd> v;              // J x J covariance, phi^-1
  std::vector<Eigen::VectorXd> y_miss;         // one value per missing cell
  std::vector<Eigen::MatrixXd> terminal_cov;   // C at the last age of the filter pass
  std::vector<int> chain;
  std::vector<int> iteration;
  GibbsConfig config;

  std::size_t size() const { return theta.size(); }
};

/// Step-1 completion: linear interpolation in log-rate between observed
/// neighbours, constant extension at the ends.
RateSurface initialize_missing(const RateSurface& y);

struct PhiPosterior {
  double shape = 0.0;     // v0 + n/2
  Eigen::MatrixXd rate;   // S0 + SS/2
};

/// Full conditional of Φ given states (columns 1..n of the trajectory
/// align with the columns of y).
PhiPosterior phi_posterior(const StateTrajectory& states, const Eigen::MatrixXd& y,
                           const DlmSpec& spec, const WishartPrior& prior);
Eigen::MatrixXd sample_phi(const StateTrajectory& states, const Eigen::MatrixXd& y,
                           const DlmSpec& spec, const WishartPrior& prior, RngStream& rng);

struct ConditionalNormal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Distribution of the missing coordinates of y_x given the observed ones,
/// the state and V. `missing` flags coordinates; observed values are read
/// from `y`, missing entries of `y` are ignored.
ConditionalNormal missing_conditional(const Eigen::VectorXd& state, const Eigen::MatrixXd& V,
                                      const Eigen::VectorXd& y,
                                      const Eigen::Array<bool, Eigen::Dynamic, 1>& missing,
                                      const Eigen::MatrixXd& F);
/// One draw of the missing coordinates, in index order.
Eigen::VectorXd impute_missing(const Eigen::VectorXd& state, const Eigen::MatrixXd& V,
                               const Eigen::VectorXd& y,
                               const Eigen::Array<bool, Eigen::Dynamic, 1>& missing,
                               const Eigen::MatrixXd& F, RngStream& rng);

PosteriorDraws run_gibbs(const DlmSpec& spec, const RateSurface& y,
                         const DiscountSchedule& schedule, const GibbsConfig& config);

struct MatrixSummary {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd median;
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
};

struct FitSummary {
  /// Bands of F θ (no observational noise).
  PredictiveSummary mean_curve;
  /// Bands of y: F θ + v at observed cells, imputation draws at missing cells.
  PredictiveSummary predictive;
  MatrixSummary states;    // p x n
  MatrixSummary variance;  // J x J, elements of V
};

/// Log-rate mean curve F θ for one draw (J x n).
Eigen::MatrixXd fitted_curve(const PosteriorDraws& draws, const DlmSpec& spec, std::size_t k);

/// Posterior predictive draws of y (J x n each); see FitSummary::predictive.
std::vector<Eigen::MatrixXd> predictive_curves(const PosteriorDraws& draws, const DlmSpec& spec,
                                               RngStream& rng);

FitSummary summarize(const PosteriorDraws& draws, const DlmSpec& spec, QuantileLevels levels,
                     RngStream& rng);

/// Mean of the imputed values per missing cell.
Eigen::VectorXd imputation_mean(const PosteriorDraws& draws);

}  // namespace graduate
