#include "graduate/inference.hpp"

#include <cmath>

#include "graduate/errors.hpp"

namespace graduate {
namespace {

void require_finite(const Eigen::MatrixXd& y) {
  if (!y.allFinite())
    throw DomainError("forward_filter: observations must be complete (impute missing cells first)");
}

// z such that R z = rhs, restricted to the column space of R. Fails when
// rhs has a component outside it.
Eigen::MatrixXd gain_solve(const Eigen::MatrixXd& R, const Eigen::MatrixXd& rhs, int age) {
  Eigen::MatrixXd z = psd_solve(R, rhs);
  const double resid = (R * z - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (!(resid <= 1e-6 * scale))
    throw NumericalError("backward recursion: state increment inconsistent with a singular "
                         "prior covariance at age " + std::to_string(age));
  return z;
}

}  // namespace

DiscountGrid resolve_discounts(const DlmSpec& spec, const DiscountSchedule& schedule,
                               std::span<const int> ages,
                               std::span<const std::string> populations) {
  if (static_cast<int>(populations.size()) != spec.populations)
    throw DomainError("population count does not match the model");
  DiscountGrid grid(static_cast<Eigen::Index>(ages.size()), spec.block_count());
  for (std::size_t a = 0; a < ages.size(); ++a) {
    for (int j = 0; j < spec.populations; ++j)
      grid(static_cast<Eigen::Index>(a), j) = schedule.at(ages[a], populations[j]);
    if (spec.common_term)
      grid(static_cast<Eigen::Index>(a), spec.populations) = schedule.at(ages[a]);
  }
  return grid;
}

Eigen::MatrixXd discount_prior_cov(const Eigen::MatrixXd& propagated,
                                   const Eigen::VectorXd& block_deltas,
                                   const std::vector<int>& state_blocks,
                                   bool block_discount) {
  const auto p = propagated.rows();
  if (block_discount) {
    Eigen::MatrixXd r = propagated;
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index k = 0; k < p; ++k)
        if (state_blocks[i] == state_blocks[k])
          r(i, k) = propagated(i, k) / block_deltas(state_blocks[i]);
    return r;
  }
  const double first = block_deltas(0);
  if ((block_deltas.array() == first).all()) return propagated / first;
  // Unequal factors: W = S P S with S = diag(sqrt(1/delta - 1)), which stays
  // positive semidefinite and reduces to P/delta when the factors agree.
  Eigen::VectorXd s(p);
  for (Eigen::Index i = 0; i < p; ++i) s(i) = std::sqrt(1.0 / block_deltas(state_blocks[i]) - 1.0);
  return propagated + s.asDiagonal() * propagated * s.asDiagonal();
}

FilterPass forward_filter(const DlmSpec& spec, const Eigen::MatrixXd& y,
                          std::span<const int> ages, const Eigen::MatrixXd& V,
                          const DiscountGrid& deltas, const FilterOptions& options) {
  const auto j = spec.populations;
  const auto n = static_cast<Eigen::Index>(ages.size());
  if (y.rows() != j || y.cols() != n) throw DomainError("forward_filter: y has wrong shape");
  if (V.rows() != j || V.cols() != j) throw DomainError("forward_filter: V has wrong shape");
  if (deltas.rows() != n || deltas.cols() != spec.block_count())
    throw DomainError("forward_filter: discount grid has wrong shape");
  require_finite(y);

  const auto blocks = spec.state_blocks();
  FilterPass pass;
  pass.m0 = spec.m0;
  pass.C0 = spec.C0;
  pass.steps.resize(static_cast<std::size_t>(n));

  const Eigen::VectorXd* m_prev = &pass.m0;
  const Eigen::MatrixXd* c_prev = &pass.C0;
  for (Eigen::Index t = 0; t < n; ++t) {
    auto& s = pass.steps[static_cast<std::size_t>(t)];
    const int age = ages[static_cast<std::size_t>(t)];
    const auto& F = spec.observation(age);
    const auto& G = spec.evolution(age);
    s.age = age;
    s.delta = deltas.row(t).transpose();
    s.a = G * *m_prev;
    const Eigen::MatrixXd propagated = symmetrize(G * *c_prev * G.transpose());
    s.R = symmetrize(discount_prior_cov(propagated, s.delta, blocks, options.block_discount));
    s.f = F * s.a;
    s.Q = symmetrize(F * s.R * F.transpose() + V);
    Eigen::LLT<Eigen::MatrixXd> q_chol(s.Q);
    if (q_chol.info() != Eigen::Success)
      throw NumericalError("forward_filter: one-step forecast covariance is singular at age " +
                           std::to_string(age));
    const Eigen::MatrixXd FR = F * s.R;
    const Eigen::MatrixXd At = q_chol.solve(FR);  // A' = Q^-1 F R
    s.m = s.a + At.transpose() * (y.col(t) - s.f);
    s.C = symmetrize(s.R - FR.transpose() * At);
    m_prev = &s.m;
    c_prev = &s.C;
  }
  return pass;
}

FilterPass forward_filter(const DlmSpec& spec, const RateSurface& y, const Eigen::MatrixXd& V,
                          const DiscountSchedule& schedule, const FilterOptions& options) {
  const auto grid = resolve_discounts(spec, schedule, y.ages, y.populations);
  return forward_filter(spec, y.log_rates, y.ages, V, grid, options);
}

StateTrajectory backward_sample(const FilterPass& pass, const DlmSpec& spec, RngStream& rng) {
  const auto n = pass.steps.size();
  StateTrajectory out;
  out.first_age = n ? pass.steps.front().age - 1 : 0;
  out.states.resize(spec.state_dim(), static_cast<Eigen::Index>(n + 1));
  out.states.col(static_cast<Eigen::Index>(n)) = mvn_sample(pass.mean(n), pass.cov(n), rng);
  for (std::size_t k = n; k-- > 0;) {
    const auto& next = pass.steps[k];
    const auto& G = spec.evolution(next.age);
    const Eigen::MatrixXd GC = G * pass.cov(k);
    const Eigen::VectorXd incr = out.states.col(static_cast<Eigen::Index>(k + 1)) - next.a;
    const Eigen::VectorXd h = pass.mean(k) + GC.transpose() * gain_solve(next.R, incr, next.age);
    const Eigen::MatrixXd H = symmetrize(pass.cov(k) - GC.transpose() * psd_solve(next.R, GC));
    const double ref = pass.cov(k).trace() / static_cast<double>(H.rows());
    out.states.col(static_cast<Eigen::Index>(k)) = mvn_sample(h, H, rng, ref);
  }
  return out;
}

SmoothedMoments smooth_moments(const FilterPass& pass, const DlmSpec& spec) {
  const auto n = pass.steps.size();
  SmoothedMoments out;
  out.mean.resize(n + 1);
  out.cov.resize(n + 1);
  out.mean[n] = pass.mean(n);
  out.cov[n] = pass.cov(n);
  for (std::size_t k = n; k-- > 0;) {
    const auto& next = pass.steps[k];
    const auto& G = spec.evolution(next.age);
    const Eigen::MatrixXd GC = G * pass.cov(k);
    const Eigen::MatrixXd gain = psd_solve(next.R, GC).transpose();  // C G' R^-1
    out.mean[k] = pass.mean(k) + gain * (out.mean[k + 1] - next.a);
    out.cov[k] = symmetrize(pass.cov(k) + gain * (out.cov[k + 1] - next.R) * gain.transpose());
  }
  return out;
}

}  // namespace graduate
