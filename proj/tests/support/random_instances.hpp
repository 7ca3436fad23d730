#pragma once

#include <random>

#include <Eigen/Dense>

#include "gaussian_oracle.hpp"
#include "graduate/model.hpp"

namespace testing_support {

inline Eigen::MatrixXd random_spd(std::mt19937_64& gen, Eigen::Index dim, double scale = 1.0) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) a(i, k) = z(gen);
  Eigen::MatrixXd m = a * a.transpose() / static_cast<double>(dim) +
                      0.2 * Eigen::MatrixXd::Identity(dim, dim);
  return scale * 0.5 * (m + m.transpose());
}

/// A small random instance paired with the library spec it corresponds to.
struct RandomCase {
  graduate::DlmSpec spec;
  oracle::Instance instance;
  std::vector<int> ages;
};

inline RandomCase random_case(std::mt19937_64& gen, int populations, bool common_term, int n_ages) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> z;
  RandomCase rc;
  rc.spec = common_term ? graduate::build_common_term(populations)
                        : graduate::build_local_linear(populations);
  const auto p = rc.spec.state_dim();
  rc.spec.m0 = Eigen::VectorXd::NullaryExpr(p, [&] { return z(gen); });
  rc.spec.C0 = random_spd(gen, p, 2.0);
  rc.instance.F = rc.spec.F;
  rc.instance.G = rc.spec.G;
  rc.instance.m0 = rc.spec.m0;
  rc.instance.C0 = rc.spec.C0;
  rc.instance.V = random_spd(gen, populations, 0.3);
  rc.instance.y.resize(populations, n_ages);
  for (int t = 0; t < n_ages; ++t) {
    rc.ages.push_back(1 + t);
    rc.instance.delta.push_back(0.6 + 0.4 * unif(gen));
    for (int j = 0; j < populations; ++j) rc.instance.y(j, t) = -5.0 + 0.1 * t + z(gen);
  }
  return rc;
}

inline Eigen::MatrixXd uniform_grid(const RandomCase& rc) {
  Eigen::MatrixXd grid(static_cast<Eigen::Index>(rc.ages.size()), rc.spec.block_count());
  for (Eigen::Index t = 0; t < grid.rows(); ++t)
    grid.row(t).setConstant(rc.instance.delta[static_cast<std::size_t>(t)]);
  return grid;
}

}  // namespace testing_support
