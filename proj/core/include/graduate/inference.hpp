#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graduate/data.hpp"
#include "graduate/distributions.hpp"
#include "graduate/model.hpp"

namespace graduate {

/// Discount factor per (age, block); rows follow the age grid, columns the
/// blocks of DlmSpec::state_blocks().
using DiscountGrid = Eigen::MatrixXd;

DiscountGrid resolve_discounts(const DlmSpec& spec, const DiscountSchedule& schedule,
                               std::span<const int> ages,
                               std::span<const std::string> populations);

struct FilterOptions {
  /// Discount each population block of G C G' separately instead of the
  /// whole matrix, keeping the evolution covariance block-diagonal.
  bool block_discount = false;
};

/// R = P + W for P = G C G'. Equal factors give W = P (1/delta - 1); otherwise
/// W = S P S with S = diag(sqrt(1/delta_b - 1)) per state coordinate.
Eigen::MatrixXd discount_prior_cov(const Eigen::MatrixXd& propagated,
                                   const Eigen::VectorXd& block_deltas,
                                   const std::vector<int>& state_blocks,
                                   bool block_discount);

struct FilterStep {
  int age = 0;
  Eigen::VectorXd delta;  // per block
  Eigen::VectorXd a;
  Eigen::MatrixXd R;
  Eigen::VectorXd f;
  Eigen::MatrixXd Q;
  Eigen::VectorXd m;
  Eigen::MatrixXd C;
};

struct FilterPass {
  Eigen::VectorXd m0;
  Eigen::MatrixXd C0;
  std::vector<FilterStep> steps;

  const Eigen::VectorXd& mean(std::size_t k) const { return k == 0 ? m0 : steps[k - 1].m; }
  const Eigen::MatrixXd& cov(std::size_t k) const { return k == 0 ? C0 : steps[k - 1].C; }
};

/// Column k holds the state at grid position k, where column 0 is the
/// initial age x0 = x1 - 1.
struct StateTrajectory {
  int first_age = 0;
  Eigen::MatrixXd states;

  Eigen::Index length() const { return states.cols(); }
};

struct SmoothedMoments {
  std::vector<Eigen::VectorXd> mean;  // x0..ϑ
  std::vector<Eigen::MatrixXd> cov;
};

/// Kalman filter with discount-implied evolution covariance. `y` is J x n
/// and must be complete.
FilterPass forward_filter(const DlmSpec& spec, const Eigen::MatrixXd& y,
                          std::span<const int> ages, const Eigen::MatrixXd& V,
                          const DiscountGrid& deltas, const FilterOptions& options = {});

FilterPass forward_filter(const DlmSpec& spec, const RateSurface& y, const Eigen::MatrixXd& V,
                          const DiscountSchedule& schedule, const FilterOptions& options = {});

StateTrajectory backward_sample(const FilterPass& pass, const DlmSpec& spec, RngStream& rng);

SmoothedMoments smooth_moments(const FilterPass& pass, const DlmSpec& spec);

}  // namespace graduate
