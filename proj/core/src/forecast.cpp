#include "graduate/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "graduate/errors.hpp"
#include "graduate/inference.hpp"

namespace graduate {

Blend parse_blend(const std::string& name) {
  if (name == "none") return Blend::kNone;
  if (name == "linear") return Blend::kLinear;
  throw ParseError("unknown blend '" + name + "' (expected none or linear)");
}

const char* blend_name(Blend blend) { return blend == Blend::kLinear ? "linear" : "none"; }

void ForecastConfig::validate(int last_fitted_age) const {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (terminal_age < last_fitted_age)
    throw DomainError("terminal age " + std::to_string(terminal_age) +
                      " precedes the last fitted age " + std::to_string(last_fitted_age));
  if (delta && !(*delta > 0.0 && *delta <= 1.0))
    throw DomainError("extrapolation discount must lie in (0, 1]");
}

double extrapolation_delta(const ForecastConfig& config, const DiscountSchedule& schedule) {
  return config.delta ? *config.delta : schedule.terminal_delta();
}

namespace {

Eigen::VectorXd uniform_deltas(const DlmSpec& spec, double delta) {
  return Eigen::VectorXd::Constant(spec.block_count(), delta);
}

}  // namespace

PredictiveDraws extrapolate(const PosteriorDraws& draws, const DlmSpec& spec,
                            const ForecastConfig& config, double delta, RngStream& rng) {
  if (draws.size() == 0) throw DomainError("extrapolate: no posterior draws");
  config.validate(draws.ages.back());
  const int last = draws.ages.back();
  const auto blocks = spec.state_blocks();
  const auto deltas = uniform_deltas(spec, delta);

  PredictiveDraws out;
  out.populations = draws.populations;
  for (int h = 1; h <= config.horizon; ++h) out.ages.push_back(last + h);
  out.y.reserve(draws.size());
  const auto j = spec.populations;
  const Eigen::VectorXd zero_obs = Eigen::VectorXd::Zero(j);
  const Eigen::VectorXd zero_state = Eigen::VectorXd::Zero(spec.state_dim());
  for (std::size_t k = 0; k < draws.size(); ++k) {
    Eigen::VectorXd theta = draws.theta[k].col(draws.theta[k].cols() - 1);
    Eigen::MatrixXd c_star = draws.terminal_cov[k];
    const auto v_chol = chol_psd(draws.v[k]);
    Eigen::MatrixXd y(j, config.horizon);
    for (int h = 0; h < config.horizon; ++h) {
      const auto& G = spec.evolution(last + h + 1);
      const Eigen::MatrixXd propagated = symmetrize(G * c_star * G.transpose());
      Eigen::MatrixXd inflated =
          symmetrize(discount_prior_cov(propagated, deltas, blocks, config.block_discount));
      const Eigen::MatrixXd W = symmetrize(inflated - propagated);
      theta = G * theta + mvn_sample(zero_state, W, rng);
      y.col(h) = spec.observation(last + h + 1) * theta +
                 v_chol.factor.triangularView<Eigen::Lower>() * rng.normal_vector(j);
      c_star = std::move(inflated);
    }
    out.y.push_back(std::move(y));
  }
  return out;
}

PredictiveMoments predictive_moments(const Eigen::VectorXd& terminal_state,
                                     const Eigen::MatrixXd& terminal_cov,
                                     const Eigen::MatrixXd& V, const DlmSpec& spec,
                                     double delta, int horizon, bool block_discount) {
  const auto blocks = spec.state_blocks();
  const auto deltas = uniform_deltas(spec, delta);
  PredictiveMoments out;
  Eigen::VectorXd mean = terminal_state;
  Eigen::MatrixXd state_cov = Eigen::MatrixXd::Zero(spec.state_dim(), spec.state_dim());
  Eigen::MatrixXd c_star = terminal_cov;
  for (int h = 0; h < horizon; ++h) {
    const Eigen::MatrixXd propagated = symmetrize(spec.G * c_star * spec.G.transpose());
    const Eigen::MatrixXd inflated =
        symmetrize(discount_prior_cov(propagated, deltas, blocks, block_discount));
    mean = spec.G * mean;
    state_cov = symmetrize(spec.G * state_cov * spec.G.transpose() + (inflated - propagated));
    c_star = inflated;
    out.mean.push_back(spec.F * mean);
    out.cov.push_back(symmetrize(spec.F * state_cov * spec.F.transpose() + V));
  }
  return out;
}

double blend_weight(int age, int last_fitted_age, int terminal_age) {
  if (age <= last_fitted_age) return 0.0;
  if (terminal_age <= last_fitted_age) return 1.0;
  const double w = static_cast<double>(age - last_fitted_age) /
                   static_cast<double>(terminal_age - last_fitted_age);
  return std::clamp(w, 0.0, 1.0);
}

BlendResult blend_convergence(const PredictiveDraws& draws, int last_fitted_age,
                              const ForecastConfig& config) {
  BlendResult out{draws, {}};
  if (config.blend == Blend::kNone) return out;
  if (draws.populations.size() < 2) {
    out.warnings.push_back("convergence blending needs at least two populations; skipped");
    return out;
  }
  const int max_age = draws.ages.empty() ? last_fitted_age : draws.ages.back();
  if (config.terminal_age < last_fitted_age || config.terminal_age > max_age)
    throw DomainError("terminal age " + std::to_string(config.terminal_age) +
                      " must lie within the extrapolated range " +
                      std::to_string(last_fitted_age) + "-" + std::to_string(max_age));
  for (auto& y : out.draws.y) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      const int age = draws.ages[static_cast<std::size_t>(c)];
      const double avg = y.col(c).mean();
      if (age >= config.terminal_age) {
        y.col(c).setConstant(avg);
        continue;
      }
      const double w = blend_weight(age, last_fitted_age, config.terminal_age);
      y.col(c) = ((1.0 - w) * y.col(c).array() + w * avg).matrix();
    }
  }
  return out;
}

PredictiveSummary summarize_predictive(const std::vector<Eigen::MatrixXd>& fitted,
                                       const std::vector<int>& fitted_ages,
                                       const PredictiveDraws& extended, QuantileLevels levels) {
  if (fitted.size() != extended.y.size())
    throw DomainError("fitted and extrapolated draws are not paired");
  std::vector<int> ages = fitted_ages;
  ages.insert(ages.end(), extended.ages.begin(), extended.ages.end());
  std::vector<Eigen::MatrixXd> joined;
  joined.reserve(fitted.size());
  for (std::size_t k = 0; k < fitted.size(); ++k) {
    Eigen::MatrixXd y(fitted[k].rows(), fitted[k].cols() + extended.y[k].cols());
    y << fitted[k], extended.y[k];
    joined.push_back(std::move(y));
  }
  return summarize_curves(joined, extended.populations, std::move(ages), levels);
}

std::optional<Crossing> first_crossing(const PredictiveSummary& summary, int from_age) {
  const auto& med = summary.log_rate.median;
  std::optional<Crossing> best;
  const int start = std::max(from_age, summary.ages.front());
  for (Eigen::Index i = 0; i < med.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < med.rows(); ++k) {
      for (int age = start + 1; age <= summary.ages.back(); ++age) {
        if (best && age >= best->age) break;
        const auto c = summary.age_index(age);
        const double before = med(i, c - 1) - med(k, c - 1);
        const double now = med(i, c) - med(k, c);
        if (before != 0.0 && (now == 0.0 || (before > 0.0) != (now > 0.0))) {
          best = Crossing{age, summary.populations[i], summary.populations[k]};
          break;
        }
      }
    }
  }
  return best;
}

}  // namespace graduate
