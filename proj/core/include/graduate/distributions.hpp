#pragma once

#include <array>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace graduate {

/// xoshiro256** seeded through splitmix64. Satisfies
/// UniformRandomBitGenerator; `stream(i)` yields disjoint substreams
/// (each 2^128 draws apart) for parallel chains.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 1);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Advances by 2^128 draws.
  void jump();
  /// Copy of the initial state advanced by `index` jumps.
  RngStream stream(std::uint64_t index) const;

  double uniform();
  double normal();
  /// Gamma(shape, scale = 1).
  double gamma(double shape);
  Eigen::VectorXd normal_vector(Eigen::Index n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  std::array<std::uint64_t, 4> origin_{};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct CholeskyResult {
  Eigen::MatrixXd factor;  // lower triangular
  double jitter = 0.0;     // absolute diagonal shift that was needed
};

/// Cholesky of a symmetric PSD matrix, escalating a diagonal jitter
/// (0, 1e-12, 1e-10, 1e-8 times trace/p) until the factorization succeeds.
/// `reference_scale` sets a floor on trace/p for matrices that are pure
/// rounding residue of a larger computation.
CholeskyResult chol_psd(const Eigen::MatrixXd& m, double reference_scale = 0.0);

/// X with M X = B restricted to the column space of the PSD matrix M.
/// Uses Cholesky when M is positive definite, otherwise an eigenvalue
/// pseudo-inverse.
Eigen::MatrixXd psd_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs);

/// Rank-tolerant inverse of an SPD matrix via Cholesky.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RngStream& rng, double reference_scale = 0.0);

/// Standard Wishart W(df, scale): density ∝ det(X)^((df-p-1)/2) exp(-tr(scale^-1 X)/2),
/// mean df * scale.
struct StandardWishart {
  double df = 0.0;
  Eigen::MatrixXd scale;
};

/// Converts the rate form (shape v, rate S) with kernel
/// det(Φ)^(v-(p+1)/2) exp(-tr(S Φ)) into standard form: df = 2v, scale = (2S)^-1.
/// This is the single place where the Wishart convention is fixed.
StandardWishart wishart_from_rate_form(double shape, const Eigen::MatrixXd& rate);

/// E[Φ] under the rate form, v S^-1.
Eigen::MatrixXd wishart_rate_form_mean(double shape, const Eigen::MatrixXd& rate);

/// Bartlett-decomposition draw; requires df > p - 1.
Eigen::MatrixXd wishart_sample(double df, const Eigen::MatrixXd& scale, RngStream& rng);
Eigen::MatrixXd wishart_sample(const StandardWishart& w, RngStream& rng);

}  // namespace graduate
