#include "graduate/distributions.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "graduate/errors.hpp"

namespace graduate {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

bool is_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double tol = 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) s = splitmix64(x);
  origin_ = state_;
}

RngStream::result_type RngStream::operator()() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

void RngStream::jump() {
  static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0aba, 0xd5a61266f0c9392c,
                                            0xa9582618e03fc9aa, 0x39abdc4529b1661c};
  std::array<std::uint64_t, 4> acc{};
  for (auto word : kJump) {
    for (int b = 0; b < 64; ++b) {
      if (word & (std::uint64_t{1} << b))
        for (int i = 0; i < 4; ++i) acc[i] ^= state_[i];
      (*this)();
    }
  }
  state_ = acc;
  normal_.reset();
}

RngStream RngStream::stream(std::uint64_t index) const {
  RngStream out(seed_);
  out.state_ = origin_;
  for (std::uint64_t i = 0; i < index; ++i) out.jump();
  out.origin_ = out.state_;
  return out;
}

double RngStream::uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

double RngStream::normal() { return normal_(*this); }

double RngStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(*this);
}

Eigen::VectorXd RngStream::normal_vector(Eigen::Index n) {
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

CholeskyResult chol_psd(const Eigen::MatrixXd& m, double reference_scale) {
  if (!is_symmetric(m)) throw NumericalError("chol_psd: matrix is not symmetric");
  const auto p = m.rows();
  CholeskyResult out;
  if (p == 0) return out;
  if (m.isZero(0.0) || m.cwiseAbs().maxCoeff() <= 1e-12 * reference_scale) {
    out.factor = Eigen::MatrixXd::Zero(p, p);
    return out;
  }
  const double scale = std::max(m.trace() / static_cast<double>(p), 0.0);
  const double base = std::max(scale > 0.0 ? scale : m.cwiseAbs().maxCoeff(), reference_scale);
  for (double rel : {0.0, 1e-12, 1e-10, 1e-8}) {
    const double eps = rel * base;
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    if (!l.allFinite() || (l.diagonal().array() <= 0.0).any()) continue;
    out.factor = std::move(l);
    out.jitter = eps;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  std::ostringstream msg;
  msg << "chol_psd: factorization failed at maximum jitter (eigenvalues in ["
      << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "])";
  throw NumericalError(msg.str());
}

Eigen::MatrixXd psd_solve(const Eigen::MatrixXd& m, const Eigen::MatrixXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    // Reject factorizations whose pivots collapse relative to the diagonal.
    const auto d = llt.matrixLLT().diagonal().array().square();
    if ((d > 1e-12 * m.diagonal().cwiseAbs().maxCoeff()).all()) return llt.solve(rhs);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError("psd_solve: eigensolver failed");
  const auto& vals = eig.eigenvalues();
  const double cutoff = 1e-10 * std::max(vals.cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) > cutoff) inv(i) = 1.0 / vals(i);
  const auto& vecs = eig.eigenvectors();
  return vecs * inv.asDiagonal() * (vecs.transpose() * rhs);
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
  const auto chol = chol_psd(symmetrize(m));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd linv = chol.factor.triangularView<Eigen::Lower>().solve(id);
  return symmetrize(linv.transpose() * linv);
}

Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           RngStream& rng, double reference_scale) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw DomainError("mvn_sample: dimension mismatch");
  const auto chol = chol_psd(cov, reference_scale);
  if (chol.factor.isZero(0.0)) return mean;
  return mean + chol.factor.triangularView<Eigen::Lower>() * rng.normal_vector(mean.size());
}

StandardWishart wishart_from_rate_form(double shape, const Eigen::MatrixXd& rate) {
  StandardWishart w;
  w.df = 2.0 * shape;
  w.scale = spd_inverse(2.0 * rate);
  return w;
}

Eigen::MatrixXd wishart_rate_form_mean(double shape, const Eigen::MatrixXd& rate) {
  const auto w = wishart_from_rate_form(shape, rate);
  return w.df * w.scale;
}

Eigen::MatrixXd wishart_sample(double df, const Eigen::MatrixXd& scale, RngStream& rng) {
  const auto p = scale.rows();
  if (scale.cols() != p || p == 0) throw DomainError("wishart_sample: scale must be square");
  if (!(df > static_cast<double>(p - 1)))
    throw DomainError("wishart_sample: degrees of freedom " + std::to_string(df) +
                      " must exceed p - 1 = " + std::to_string(p - 1));
  const auto chol = chol_psd(scale);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (df - static_cast<double>(i))));
    for (Eigen::Index k = 0; k < i; ++k) a(i, k) = rng.normal();
  }
  const Eigen::MatrixXd la = chol.factor.triangularView<Eigen::Lower>() * a;
  return symmetrize(la * la.transpose());
}

Eigen::MatrixXd wishart_sample(const StandardWishart& w, RngStream& rng) {
  return wishart_sample(w.df, w.scale, rng);
}

}  // namespace graduate
