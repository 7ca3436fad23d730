#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gaussian_oracle.hpp"
#include "graduate/diagnostics.hpp"
#include "graduate/errors.hpp"
#include "graduate/sampler.hpp"
#include "random_instances.hpp"

using namespace graduate;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RateSurface surface(const Eigen::MatrixXd& y, int first_age = 1) {
  RateSurface s;
  for (Eigen::Index j = 0; j < y.rows(); ++j) s.populations.push_back("P" + std::to_string(j));
  for (Eigen::Index a = 0; a < y.cols(); ++a) s.ages.push_back(first_age + static_cast<int>(a));
  s.log_rates = y;
  s.missing = y.array().isNaN();
  return s;
}

Eigen::MatrixXd linear_data(int j, int n, double noise, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, noise);
  Eigen::MatrixXd y(j, n);
  for (int p = 0; p < j; ++p)
    for (int a = 0; a < n; ++a) y(p, a) = -8.0 + 0.3 * p + 0.08 * a + 0.002 * a * a + z(gen);
  return y;
}

double mc_tolerance(const std::vector<double>& xs, double sigmas) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  const std::vector<std::vector<double>> chains{xs};
  const double ess = std::max(10.0, effective_sample_size(chains));
  return sigmas * std::sqrt(var / ess);
}

}  // namespace

TEST_CASE("missing cells are ordered by age then population") {
  MissingMask m(2, 3);
  m << false, true, true,  //
      true, true, false;
  const auto cells = missing_cells(m);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].age_index == 0);
  CHECK(cells[0].population == 1);
  CHECK(cells[1].age_index == 1);
  CHECK(cells[1].population == 0);
  CHECK(cells[3].age_index == 2);
}

TEST_CASE("initial completion of missing cells") {
  Eigen::MatrixXd y(1, 3);
  y << -8, kNaN, -6;
  CHECK(initialize_missing(surface(y)).log_rates(0, 1) == -7.0);

  Eigen::MatrixXd lead(1, 5);
  lead << kNaN, kNaN, kNaN, -7, -6.5;
  const auto out = initialize_missing(surface(lead));
  for (int a = 0; a < 3; ++a) CHECK(out.log_rates(0, a) == -7.0);

  Eigen::MatrixXd tail(1, 4);
  tail << -7, -6.5, kNaN, kNaN;
  CHECK(initialize_missing(surface(tail)).log_rates(0, 3) == -6.5);

  const Eigen::MatrixXd full = linear_data(2, 5, 0.1, 1);
  CHECK(initialize_missing(surface(full)).log_rates == full);

  Eigen::MatrixXd none = Eigen::MatrixXd::Constant(1, 3, kNaN);
  CHECK_THROWS_AS(initialize_missing(surface(none)), DomainError);
}

TEST_CASE("phi with zero residuals follows the prior-shifted Wishart") {
  auto spec = build_local_linear(2);
  const int n = 6;
  StateTrajectory states;
  states.states = Eigen::MatrixXd::Zero(4, n + 1);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Zero(2, n);
  const auto post = phi_posterior(states, y, spec, spec.wishart);
  CHECK(post.shape == spec.wishart.v0 + 3.0);
  CHECK(post.rate == spec.wishart.S0);

  RngStream rng(8);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += sample_phi(states, y, spec, spec.wishart, rng);
  const Eigen::MatrixXd expect = wishart_rate_form_mean(post.shape, post.rate);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(sum(i, i) / draws - expect(i, i)) < 0.02 * expect(i, i));
  CHECK(std::abs(sum(0, 1) / draws) < 0.02 * expect(0, 0));
}

TEST_CASE("scalar precision follows the conjugate gamma posterior") {
  auto spec = build_local_linear(1);
  spec.wishart = wishart_prior(4.0, 0.5, 1);
  const int n = 10;
  StateTrajectory states;
  states.states = Eigen::MatrixXd::Zero(2, n + 1);
  Eigen::MatrixXd y(1, n);
  for (int a = 0; a < n; ++a) y(0, a) = 0.1 * (a % 3 - 1) + 0.05 * a;
  const double ss = y.squaredNorm();
  const double shape = spec.wishart.v0 + n / 2.0;
  const double rate = spec.wishart.S0(0, 0) + ss / 2.0;

  RngStream rng(21);
  const int draws = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = sample_phi(states, y, spec, spec.wishart, rng)(0, 0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / draws;
  CHECK(mean == doctest::Approx(shape / rate).epsilon(0.02));
  CHECK(sq / draws - mean * mean == doctest::Approx(shape / (rate * rate)).epsilon(0.02));

  RngStream a(4), b(4);
  CHECK(sample_phi(states, y, spec, spec.wishart, a) == sample_phi(states, y, spec, spec.wishart, b));
}

TEST_CASE("imputation: worked conditional-normal example") {
  const auto spec = build_local_linear(2);
  Eigen::MatrixXd V(2, 2);
  V << 1, 0.9, 0.9, 1;
  const Eigen::VectorXd state = Eigen::VectorXd::Zero(4);
  const Eigen::Vector2d y(1.0, kNaN);
  Eigen::Array<bool, Eigen::Dynamic, 1> miss(2);
  miss << false, true;
  const auto cond = missing_conditional(state, V, y, miss, spec.F);
  CHECK(cond.mean(0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(cond.cov(0, 0) == doctest::Approx(0.19).epsilon(1e-14));

  Eigen::MatrixXd diag(2, 2);
  diag << 0.5, 0, 0, 2;
  Eigen::VectorXd s(4);
  s << -3, 0.1, -4, 0.2;
  const auto indep = missing_conditional(s, diag, y, miss, spec.F);
  CHECK(indep.mean(0) == -4.0);
  CHECK(indep.cov(0, 0) == 2.0);
}

TEST_CASE("imputation draws follow the conditional normal for random partitions") {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> coin(0, 1);
  RngStream rng(13);
  for (int rep = 0; rep < 6; ++rep) {
    const int j = 2 + rep % 3;
    const auto spec = build_local_linear(j);
    const Eigen::MatrixXd V = testing_support::random_spd(gen, j);
    std::normal_distribution<double> z;
    const Eigen::VectorXd state = Eigen::VectorXd::NullaryExpr(2 * j, [&] { return z(gen); });
    Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(j, [&] { return z(gen); });
    Eigen::Array<bool, Eigen::Dynamic, 1> miss(j);
    for (int i = 0; i < j; ++i) miss(i) = coin(gen) == 1;
    if (rep == 5) miss.setConstant(true);
    if (!miss.any()) miss(0) = true;

    // independent oracle: condition the joint normal with an explicit inverse
    std::vector<int> mi, ob;
    for (int i = 0; i < j; ++i) (miss(i) ? mi : ob).push_back(i);
    const Eigen::VectorXd mu = spec.F * state;
    Eigen::VectorXd mean = mu(mi);
    Eigen::MatrixXd cov = V(mi, mi);
    if (!ob.empty()) {
      const Eigen::MatrixXd inv = V(ob, ob).inverse();
      mean += V(mi, ob) * inv * (y(ob) - mu(ob));
      cov -= V(mi, ob) * inv * V(ob, mi);
    }
    const auto cond = missing_conditional(state, V, y, miss, spec.F);
    CHECK((cond.mean - mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((cond.cov - cov).cwiseAbs().maxCoeff() < 1e-12);

    const int draws = 100000;
    const auto k = static_cast<Eigen::Index>(mi.size());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(k, k);
    for (int d = 0; d < draws; ++d) {
      const Eigen::VectorXd x = impute_missing(state, V, y, miss, spec.F, rng);
      REQUIRE(x.size() == k);
      sum += x;
      outer += x * x.transpose();
    }
    const Eigen::VectorXd m = sum / draws;
    const Eigen::MatrixXd c = outer / draws - m * m.transpose();
    for (Eigen::Index a = 0; a < k; ++a) {
      CHECK(std::abs(m(a) - mean(a)) < 4.0 * std::sqrt(cov(a, a) / draws));
      for (Eigen::Index b = 0; b < k; ++b) {
        const double se = std::sqrt((cov(a, a) * cov(b, b) + cov(a, b) * cov(a, b)) / draws);
        CHECK(std::abs(c(a, b) - cov(a, b)) < 4.0 * se);
      }
    }
  }
}

TEST_CASE("gibbs bookkeeping") {
  const auto spec = build_local_linear(1);
  const auto y = surface(linear_data(1, 8, 0.05, 2));
  GibbsConfig cfg;
  cfg.iterations = 11;
  cfg.burn_in = 10;
  cfg.thin = 1;
  const auto draws = run_gibbs(spec, y, DiscountSchedule::uniform(0.95, 1, 8), cfg);
  CHECK(draws.size() == 1);
  CHECK(draws.iteration.front() == 10);

  cfg.iterations = 30;
  cfg.burn_in = 10;
  cfg.thin = 3;
  cfg.chains = 2;
  CHECK(cfg.kept_per_chain() == 7);
  const auto many = run_gibbs(spec, y, DiscountSchedule::uniform(0.95, 1, 8), cfg);
  CHECK(many.size() == 14);
  CHECK(many.chain.back() == 1);
  CHECK(many.theta.front().cols() == 8);

  GibbsConfig bad;
  bad.iterations = 10;
  bad.burn_in = 10;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.burn_in = 0;
  bad.thin = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("gibbs is deterministic for a seed") {
  const auto spec = build_common_term(2);
  Eigen::MatrixXd data = linear_data(2, 10, 0.1, 3);
  data(1, 4) = kNaN;
  const auto y = surface(data);
  GibbsConfig cfg;
  cfg.iterations = 40;
  cfg.burn_in = 10;
  cfg.seed = 99;
  const auto sched = DiscountSchedule::uniform(0.9, 1, 10);
  const auto a = run_gibbs(spec, y, sched, cfg);
  const auto b = run_gibbs(spec, y, sched, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.theta[k] == b.theta[k]);
    CHECK(a.v[k] == b.v[k]);
    CHECK(a.y_miss[k] == b.y_miss[k]);
  }
  CHECK(a.y_miss.front().size() == 1);
}

TEST_CASE("imputed cells only replace missing values") {
  const auto spec = build_local_linear(2);
  Eigen::MatrixXd data = linear_data(2, 8, 0.05, 4);
  data(0, 2) = kNaN;
  data(0, 3) = kNaN;
  const auto y = surface(data);
  GibbsConfig cfg;
  cfg.iterations = 60;
  cfg.burn_in = 20;
  const auto draws = run_gibbs(spec, y, DiscountSchedule::uniform(0.9, 1, 8), cfg);
  RngStream rng(1);
  const auto curves = predictive_curves(draws, spec, rng);
  for (std::size_t k = 0; k < draws.size(); ++k) {
    CHECK(curves[k](0, 2) == draws.y_miss[k](0));
    CHECK(curves[k](0, 3) == draws.y_miss[k](1));
  }
  const auto imean = imputation_mean(draws);
  CHECK(imean.size() == 2);
  CHECK(std::isfinite(imean(0)));
}

TEST_CASE("posterior state mean agrees with smoothing at the posterior-mean V") {
  auto spec = build_local_linear(1);
  const int n = 8;
  const auto y = surface(linear_data(1, n, 0.05, 5));
  const auto sched = DiscountSchedule::uniform(0.9, 1, n);
  GibbsConfig cfg;
  cfg.iterations = 5500;
  cfg.burn_in = 500;
  cfg.seed = 2024;
  const auto draws = run_gibbs(spec, y, sched, cfg);
  Eigen::MatrixXd vbar = Eigen::MatrixXd::Zero(1, 1);
  for (const auto& v : draws.v) vbar += v;
  vbar /= static_cast<double>(draws.size());

  const auto pass = forward_filter(spec, y, vbar, sched);
  const auto smooth = smooth_moments(pass, spec);
  for (int a = 0; a < n; ++a) {
    for (int s = 0; s < 2; ++s) {
      std::vector<double> xs;
      for (const auto& th : draws.theta) xs.push_back(th(s, a));
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      CHECK(std::abs(mean - smooth.mean[static_cast<std::size_t>(a + 1)](s)) < mc_tolerance(xs, 3.0));
    }
  }
}

TEST_CASE("independent chains agree") {
  const auto spec = build_local_linear(2);
  Eigen::MatrixXd data = linear_data(2, 10, 0.08, 6);
  data(1, 3) = kNaN;
  const auto y = surface(data);
  const auto sched = DiscountSchedule::uniform(0.9, 1, 10);
  GibbsConfig cfg;
  cfg.iterations = 2200;
  cfg.burn_in = 200;
  cfg.seed = 1;
  const auto a = run_gibbs(spec, y, sched, cfg);
  cfg.seed = 2;
  const auto b = run_gibbs(spec, y, sched, cfg);

  auto check_param = [&](auto&& get) {
    std::vector<double> xa, xb;
    for (std::size_t k = 0; k < a.size(); ++k) xa.push_back(get(a, k));
    for (std::size_t k = 0; k < b.size(); ++k) xb.push_back(get(b, k));
    double ma = 0, mb = 0;
    for (double x : xa) ma += x;
    for (double x : xb) mb += x;
    ma /= static_cast<double>(xa.size());
    mb /= static_cast<double>(xb.size());
    const double ta = mc_tolerance(xa, 1.0), tb = mc_tolerance(xb, 1.0);
    CHECK(std::abs(ma - mb) < 4.0 * std::sqrt(ta * ta + tb * tb));
  };
  for (int s = 0; s < 4; ++s)
    for (int t : {0, 4, 9}) check_param([&](const PosteriorDraws& d, std::size_t k) { return d.theta[k](s, t); });
  check_param([](const PosteriorDraws& d, std::size_t k) { return d.v[k](0, 0); });
  check_param([](const PosteriorDraws& d, std::size_t k) { return d.v[k](0, 1); });
  check_param([](const PosteriorDraws& d, std::size_t k) { return d.y_miss[k](0); });
}

TEST_CASE("summaries of a small fit") {
  const auto spec = build_common_term(2);
  const auto y = surface(linear_data(2, 6, 0.05, 7));
  GibbsConfig cfg;
  cfg.iterations = 200;
  cfg.burn_in = 50;
  cfg.chains = 2;
  const auto draws = run_gibbs(spec, y, DiscountSchedule::uniform(0.9, 1, 6), cfg);
  RngStream rng(3);
  const auto fit = summarize(draws, spec, {}, rng);
  CHECK(check_summary(fit.predictive).empty());
  CHECK(check_summary(fit.mean_curve).empty());
  CHECK(fit.states.mean.rows() == 5);
  CHECK(fit.variance.mean.rows() == 2);
  const auto diag = diagnose(draws, spec);
  CHECK(diag.max_rhat < 1.2);
  CHECK(diag.min_ess > 10.0);
}

TEST_CASE("gibbs input validation") {
  const auto spec = build_local_linear(2);
  const auto y = surface(linear_data(1, 5, 0.05, 8));
  GibbsConfig cfg;
  cfg.iterations = 20;
  cfg.burn_in = 5;
  CHECK_THROWS_AS(run_gibbs(spec, y, DiscountSchedule::uniform(0.9, 1, 5), cfg), DomainError);
  const auto one = build_local_linear(1);
  CHECK_THROWS_AS(run_gibbs(one, y, DiscountSchedule::uniform(0.9, 1, 3), cfg), DomainError);
}
