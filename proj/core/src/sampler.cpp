#include "graduate/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "graduate/errors.hpp"

namespace graduate {

void GibbsConfig::validate() const {
  if (iterations < 1) throw DomainError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw DomainError("burn_in must lie in [0, iterations)");
  if (thin < 1) throw DomainError("thin must be at least 1");
  if (chains < 1) throw DomainError("chains must be at least 1");
}

int GibbsConfig::kept_per_chain() const { return (iterations - burn_in + thin - 1) / thin; }

std::vector<MissingCell> missing_cells(const MissingMask& mask) {
  std::vector<MissingCell> cells;
  for (Eigen::Index a = 0; a < mask.cols(); ++a)
    for (Eigen::Index p = 0; p < mask.rows(); ++p)
      if (mask(p, a)) cells.push_back({static_cast<int>(p), static_cast<int>(a)});
  return cells;
}

RateSurface initialize_missing(const RateSurface& y) {
  RateSurface out = y;
  const auto n = y.age_count();
  for (int p = 0; p < y.population_count(); ++p) {
    std::vector<int> observed;
    for (int a = 0; a < n; ++a)
      if (!y.missing(p, a)) observed.push_back(a);
    if (observed.empty())
      throw DomainError("population '" + y.populations[p] + "' has no observed ages");
    std::size_t next = 0;  // first observed index >= a
    for (int a = 0; a < n; ++a) {
      while (next < observed.size() && observed[next] < a) ++next;
      if (!y.missing(p, a)) continue;
      if (next == 0) {
        out.log_rates(p, a) = y.log_rates(p, observed.front());
      } else if (next == observed.size()) {
        out.log_rates(p, a) = y.log_rates(p, observed.back());
      } else {
        const int lo = observed[next - 1];
        const int hi = observed[next];
        const double w = static_cast<double>(a - lo) / (hi - lo);
        out.log_rates(p, a) = (1.0 - w) * y.log_rates(p, lo) + w * y.log_rates(p, hi);
      }
    }
  }
  return out;
}

PhiPosterior phi_posterior(const StateTrajectory& states, const Eigen::MatrixXd& y,
                           const DlmSpec& spec, const WishartPrior& prior) {
  if (states.length() != y.cols() + 1)
    throw DomainError("phi_posterior: states and observations are not aligned");
  const Eigen::MatrixXd resid = y - spec.F * states.states.rightCols(y.cols());
  PhiPosterior post;
  post.shape = prior.v0 + 0.5 * static_cast<double>(y.cols());
  post.rate = symmetrize(prior.S0 + 0.5 * (resid * resid.transpose()));
  return post;
}

Eigen::MatrixXd sample_phi(const StateTrajectory& states, const Eigen::MatrixXd& y,
                           const DlmSpec& spec, const WishartPrior& prior, RngStream& rng) {
  const auto post = phi_posterior(states, y, spec, prior);
  return wishart_sample(wishart_from_rate_form(post.shape, post.rate), rng);
}

ConditionalNormal missing_conditional(const Eigen::VectorXd& state, const Eigen::MatrixXd& V,
                                      const Eigen::VectorXd& y,
                                      const Eigen::Array<bool, Eigen::Dynamic, 1>& missing,
                                      const Eigen::MatrixXd& F) {
  const auto j = F.rows();
  std::vector<Eigen::Index> obs, mis;
  for (Eigen::Index i = 0; i < j; ++i) (missing(i) ? mis : obs).push_back(i);
  if (mis.empty()) throw DomainError("missing_conditional: no missing coordinate");
  const Eigen::VectorXd mu = F * state;

  ConditionalNormal out;
  out.mean = mu(mis);
  out.cov = V(mis, mis);
  if (!obs.empty()) {
    const Eigen::MatrixXd v_oo = V(obs, obs);
    const Eigen::MatrixXd v_om = V(obs, mis);
    const Eigen::VectorXd resid = y(obs) - mu(obs);
    Eigen::LLT<Eigen::MatrixXd> llt(v_oo);
    Eigen::MatrixXd k;  // V_oo^-1 V_om
    if (llt.info() == Eigen::Success) {
      k = llt.solve(v_om);
    } else {
      const auto chol = chol_psd(symmetrize(v_oo));
      k = chol.factor.triangularView<Eigen::Lower>().transpose().solve(
          chol.factor.triangularView<Eigen::Lower>().solve(v_om));
    }
    out.mean += k.transpose() * resid;
    out.cov -= v_om.transpose() * k;
  }
  out.cov = symmetrize(out.cov);
  return out;
}

Eigen::VectorXd impute_missing(const Eigen::VectorXd& state, const Eigen::MatrixXd& V,
                               const Eigen::VectorXd& y,
                               const Eigen::Array<bool, Eigen::Dynamic, 1>& missing,
                               const Eigen::MatrixXd& F, RngStream& rng) {
  const auto cond = missing_conditional(state, V, y, missing, F);
  return mvn_sample(cond.mean, cond.cov, rng);
}

namespace {

void run_chain(const DlmSpec& spec, const RateSurface& y, const DiscountGrid& grid,
               const GibbsConfig& config, int chain, RngStream rng, PosteriorDraws& out) {
  Eigen::MatrixXd current = initialize_missing(y).log_rates;
  const auto n = y.age_count();
  std::vector<Eigen::Index> ages_with_missing;
  for (Eigen::Index a = 0; a < n; ++a)
    if (y.missing.col(a).any()) ages_with_missing.push_back(a);

  const FilterOptions options{config.block_discount};
  Eigen::MatrixXd phi = wishart_rate_form_mean(spec.wishart.v0, spec.wishart.S0);
  Eigen::MatrixXd V = spd_inverse(phi);

  for (int it = 0; it < config.iterations; ++it) {
    try {
      const auto pass = forward_filter(spec, current, y.ages, V, grid, options);
      const auto traj = backward_sample(pass, spec, rng);
      phi = sample_phi(traj, current, spec, spec.wishart, rng);
      V = spd_inverse(phi);
      for (auto a : ages_with_missing) {
        const Eigen::Array<bool, Eigen::Dynamic, 1> mask = y.missing.col(a);
        const Eigen::VectorXd draw =
            impute_missing(traj.states.col(a + 1), V, current.col(a), mask, spec.F, rng);
        Eigen::Index k = 0;
        for (Eigen::Index p = 0; p < mask.size(); ++p)
          if (mask(p)) current(p, a) = draw(k++);
      }
      if (it >= config.burn_in && (it - config.burn_in) % config.thin == 0) {
        out.theta.push_back(traj.states.rightCols(n));
        out.phi.push_back(phi);
        out.v.push_back(V);
        Eigen::VectorXd miss(static_cast<Eigen::Index>(out.missing.size()));
        for (std::size_t c = 0; c < out.missing.size(); ++c)
          miss(static_cast<Eigen::Index>(c)) =
              current(out.missing[c].population, out.missing[c].age_index);
        out.y_miss.push_back(std::move(miss));
        out.terminal_cov.push_back(pass.steps.back().C);
        out.chain.push_back(chain);
        out.iteration.push_back(it);
      }
    } catch (const NumericalError& e) {
      throw NumericalError("chain " + std::to_string(chain) + ", iteration " +
                           std::to_string(it) + ": " + e.what());
    }
  }
}

}  // namespace

PosteriorDraws run_gibbs(const DlmSpec& spec, const RateSurface& y,
                         const DiscountSchedule& schedule, const GibbsConfig& config) {
  config.validate();
  if (y.population_count() != spec.populations)
    throw DomainError("data has " + std::to_string(y.population_count()) +
                      " populations but the model expects " + std::to_string(spec.populations));
  if (y.age_count() < 1) throw DomainError("no ages to fit");
  schedule.check_covers(y.ages.front(), y.ages.back());
  const auto grid = resolve_discounts(spec, schedule, y.ages, y.populations);

  PosteriorDraws proto;
  proto.populations = y.populations;
  proto.ages = y.ages;
  proto.state_dim = spec.state_dim();
  proto.missing = missing_cells(y.missing);
  proto.config = config;

  const RngStream root(config.seed);
  std::vector<PosteriorDraws> per_chain(static_cast<std::size_t>(config.chains), proto);
  if (config.chains == 1) {
    run_chain(spec, y, grid, config, 0, root.stream(0), per_chain[0]);
  } else {
    std::vector<std::exception_ptr> errors(per_chain.size());
    std::vector<std::thread> workers;
    for (int c = 0; c < config.chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          run_chain(spec, y, grid, config, c, root.stream(static_cast<std::uint64_t>(c)),
                    per_chain[static_cast<std::size_t>(c)]);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  PosteriorDraws out = std::move(per_chain[0]);
  for (std::size_t c = 1; c < per_chain.size(); ++c) {
    auto& src = per_chain[c];
    auto append = [](auto& dst, auto& from) {
      dst.insert(dst.end(), std::make_move_iterator(from.begin()),
                 std::make_move_iterator(from.end()));
    };
    append(out.theta, src.theta);
    append(out.phi, src.phi);
    append(out.v, src.v);
    append(out.y_miss, src.y_miss);
    append(out.terminal_cov, src.terminal_cov);
    append(out.chain, src.chain);
    append(out.iteration, src.iteration);
  }
  return out;
}

Eigen::MatrixXd fitted_curve(const PosteriorDraws& draws, const DlmSpec& spec, std::size_t k) {
  return spec.F * draws.theta[k];
}

std::vector<Eigen::MatrixXd> predictive_curves(const PosteriorDraws& draws, const DlmSpec& spec,
                                               RngStream& rng) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(draws.size());
  const auto j = static_cast<Eigen::Index>(draws.populations.size());
  for (std::size_t k = 0; k < draws.size(); ++k) {
    Eigen::MatrixXd y = fitted_curve(draws, spec, k);
    const auto chol = chol_psd(draws.v[k]);
    for (Eigen::Index a = 0; a < y.cols(); ++a)
      y.col(a) += chol.factor.triangularView<Eigen::Lower>() * rng.normal_vector(j);
    for (std::size_t c = 0; c < draws.missing.size(); ++c)
      y(draws.missing[c].population, draws.missing[c].age_index) =
          draws.y_miss[k](static_cast<Eigen::Index>(c));
    out.push_back(std::move(y));
  }
  return out;
}

namespace {

MatrixSummary summarize_matrices(const std::vector<Eigen::MatrixXd>& mats, QuantileLevels levels) {
  const auto rows = mats.front().rows();
  const auto cols = mats.front().cols();
  MatrixSummary s{Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols),
                  Eigen::MatrixXd(rows, cols), Eigen::MatrixXd(rows, cols)};
  std::vector<double> cell(mats.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double sum = 0.0;
      for (std::size_t k = 0; k < mats.size(); ++k) {
        cell[k] = mats[k](r, c);
        sum += cell[k];
      }
      std::sort(cell.begin(), cell.end());
      s.mean(r, c) = sum / static_cast<double>(mats.size());
      s.median(r, c) = sorted_quantile(cell, 0.5);
      s.lower(r, c) = sorted_quantile(cell, levels.lower);
      s.upper(r, c) = sorted_quantile(cell, levels.upper);
    }
  }
  return s;
}

}  // namespace

FitSummary summarize(const PosteriorDraws& draws, const DlmSpec& spec, QuantileLevels levels,
                     RngStream& rng) {
  if (draws.size() == 0) throw DomainError("cannot summarize an empty set of draws");
  FitSummary out;
  std::vector<Eigen::MatrixXd> curves;
  curves.reserve(draws.size());
  for (std::size_t k = 0; k < draws.size(); ++k) curves.push_back(fitted_curve(draws, spec, k));
  out.mean_curve = summarize_curves(curves, draws.populations, draws.ages, levels);
  const auto pred = predictive_curves(draws, spec, rng);
  out.predictive = summarize_curves(pred, draws.populations, draws.ages, levels);
  out.states = summarize_matrices(draws.theta, levels);
  out.variance = summarize_matrices(draws.v, levels);
  return out;
}

Eigen::VectorXd imputation_mean(const PosteriorDraws& draws) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(draws.missing.size()));
  if (draws.size() == 0) return mean;
  for (const auto& v : draws.y_miss) mean += v;
  return mean / static_cast<double>(draws.size());
}

}  // namespace graduate
