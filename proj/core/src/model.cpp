#include "graduate/model.hpp"

#include <algorithm>
#include <climits>

#include "graduate/errors.hpp"

namespace graduate {

DiscountSchedule::DiscountSchedule(std::vector<DiscountSegment> segments)
    : segments_(std::move(segments)) {
  for (const auto& s : segments_) {
    if (!(s.delta > 0.0 && s.delta <= 1.0))
      throw DomainError("discount factor " + std::to_string(s.delta) + " is outside (0, 1]");
    if (s.ages.first > s.ages.last) throw DomainError("empty discount segment");
  }
  std::stable_sort(segments_.begin(), segments_.end(), [](const auto& a, const auto& b) {
    if (a.population != b.population) return a.population < b.population;
    return a.ages.first < b.ages.first;
  });
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const auto& prev = segments_[i - 1];
    const auto& cur = segments_[i];
    if (prev.population != cur.population) continue;
    if (cur.ages.first <= prev.ages.last)
      throw DomainError("discount segments overlap at age " + std::to_string(cur.ages.first));
    if (!prev.population && cur.ages.first != prev.ages.last + 1)
      throw DomainError("gap in discount schedule between ages " +
                        std::to_string(prev.ages.last) + " and " +
                        std::to_string(cur.ages.first));
  }
  if (std::none_of(segments_.begin(), segments_.end(),
                   [](const auto& s) { return !s.population; }))
    throw DomainError("discount schedule has no base segments");
}

DiscountSchedule DiscountSchedule::uniform(double delta, int first, int last) {
  return DiscountSchedule({DiscountSegment{{first, last}, delta, std::nullopt}});
}

double DiscountSchedule::at(int age, std::string_view population) const {
  if (!population.empty()) {
    for (const auto& s : segments_)
      if (s.population && *s.population == population && s.ages.contains(age)) return s.delta;
  }
  for (const auto& s : segments_)
    if (!s.population && s.ages.contains(age)) return s.delta;
  throw DomainError("no discount factor covers age " + std::to_string(age));
}

void DiscountSchedule::check_covers(int first, int last) const {
  int lo = INT_MAX;
  int hi = INT_MIN;
  for (const auto& s : segments_) {
    if (s.population) continue;
    lo = std::min(lo, s.ages.first);
    hi = std::max(hi, s.ages.last);
  }
  if (lo > first || hi < last)
    throw DomainError("discount schedule does not cover ages " + std::to_string(first) +
                      "-" + std::to_string(last));
}

double DiscountSchedule::terminal_delta() const {
  const DiscountSegment* best = nullptr;
  for (const auto& s : segments_)
    if (!s.population && (!best || s.ages.last > best->ages.last)) best = &s;
  if (!best) throw DomainError("empty discount schedule");
  return best->delta;
}

double discount_at(const DiscountSchedule& schedule, int age, std::string_view population) {
  return schedule.at(age, population);
}

std::vector<int> DlmSpec::state_blocks() const {
  std::vector<int> blocks;
  blocks.reserve(state_dim());
  for (int j = 0; j < populations; ++j) {
    blocks.push_back(j);
    blocks.push_back(j);
  }
  if (common_term) blocks.push_back(populations);
  return blocks;
}

DlmSpec build_local_linear(int populations) {
  if (populations < 1) throw DomainError("at least one population is required");
  const int p = 2 * populations;
  DlmSpec spec;
  spec.populations = populations;
  spec.common_term = false;
  spec.F = Eigen::MatrixXd::Zero(populations, p);
  spec.G = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < populations; ++j) {
    spec.F(j, 2 * j) = 1.0;
    spec.G(2 * j, 2 * j) = 1.0;
    spec.G(2 * j, 2 * j + 1) = 1.0;
    spec.G(2 * j + 1, 2 * j + 1) = 1.0;
  }
  spec.m0 = Eigen::VectorXd::Zero(p);
  spec.C0 = Eigen::MatrixXd::Identity(p, p) * 100.0;
  spec.wishart = wishart_prior(3.0, 0.01, populations);
  return spec;
}

DlmSpec build_common_term(int populations) {
  if (populations < 1) throw DomainError("at least one population is required");
  const DlmSpec base = build_local_linear(populations);
  const int p = 2 * populations + 1;
  DlmSpec spec;
  spec.populations = populations;
  spec.common_term = true;
  spec.F = Eigen::MatrixXd::Zero(populations, p);
  spec.F.leftCols(p - 1) = base.F;
  spec.F.col(p - 1).setOnes();
  spec.G = Eigen::MatrixXd::Zero(p, p);
  spec.G.topLeftCorner(p - 1, p - 1) = base.G;
  // alpha_x = alpha_{x-1} + sum_j mu_{x-1}^(j)
  for (int j = 0; j < populations; ++j) spec.G(p - 1, 2 * j) = 1.0;
  spec.G(p - 1, p - 1) = 1.0;
  spec.m0 = Eigen::VectorXd::Zero(p);
  spec.C0 = Eigen::MatrixXd::Identity(p, p) * 100.0;
  spec.wishart = wishart_prior(3.0, 0.01, populations);
  return spec;
}

InitialPrior initial_prior(int state_dim, const Eigen::VectorXd& mean, double variance_scale) {
  if (!(variance_scale > 0.0)) throw DomainError("prior variance scale must be positive");
  InitialPrior prior;
  if (mean.size() == 0) {
    prior.mean = Eigen::VectorXd::Zero(state_dim);
  } else if (mean.size() == state_dim) {
    prior.mean = mean;
  } else {
    throw DomainError("prior mean has length " + std::to_string(mean.size()) +
                      ", expected " + std::to_string(state_dim));
  }
  prior.cov = Eigen::MatrixXd::Identity(state_dim, state_dim) * variance_scale;
  return prior;
}

void set_initial_prior(DlmSpec& spec, const InitialPrior& prior) {
  if (prior.mean.size() != spec.state_dim() || prior.cov.rows() != spec.state_dim() ||
      prior.cov.cols() != spec.state_dim())
    throw DomainError("initial prior does not match the state dimension");
  spec.m0 = prior.mean;
  spec.C0 = prior.cov;
}

WishartPrior wishart_prior(double d0, double s0_scale, int populations) {
  if (!(d0 > 2.0)) throw DomainError("d0 must exceed 2 for a positive-definite S0");
  if (!(s0_scale > 0.0)) throw DomainError("s0 scale must be positive");
  if (populations < 1) throw DomainError("at least one population is required");
  WishartPrior prior;
  prior.d0 = d0;
  prior.s0 = Eigen::MatrixXd::Identity(populations, populations) * s0_scale;
  prior.v0 = (d0 + 1.0) / 2.0;
  prior.S0 = 0.5 * ((d0 - 2.0) * prior.s0);
  return prior;
}

}  // namespace graduate
