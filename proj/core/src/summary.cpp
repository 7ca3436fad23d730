#include "graduate/summary.hpp"

#include <algorithm>
#include <cmath>

#include "graduate/data.hpp"
#include "graduate/errors.hpp"

namespace graduate {

double sorted_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double prob) {
  std::sort(values.begin(), values.end());
  return sorted_quantile(values, prob);
}

int PredictiveSummary::age_index(int age) const {
  if (ages.empty() || age < ages.front() || age > ages.back())
    throw DomainError("age " + std::to_string(age) + " not covered by the summary");
  return age - ages.front();
}

const char* scale_name(Scale scale) {
  switch (scale) {
    case Scale::kLogRate: return "log_rate";
    case Scale::kRate: return "rate";
    case Scale::kDeathProb: return "death_prob";
  }
  return "?";
}

Scale parse_scale(const std::string& name) {
  if (name == "log_rate") return Scale::kLogRate;
  if (name == "rate") return Scale::kRate;
  if (name == "death_prob") return Scale::kDeathProb;
  throw ParseError("unknown scale '" + name + "' (expected log_rate, rate or death_prob)");
}

const ScaleSummary& scale_of(const PredictiveSummary& s, Scale scale) {
  switch (scale) {
    case Scale::kLogRate: return s.log_rate;
    case Scale::kRate: return s.rate;
    case Scale::kDeathProb: return s.death_prob;
  }
  return s.log_rate;
}

PredictiveSummary summarize_curves(std::span<const Eigen::MatrixXd> draws,
                                   std::vector<std::string> populations,
                                   std::vector<int> ages, QuantileLevels levels) {
  if (draws.empty()) throw DomainError("cannot summarize an empty set of draws");
  const auto rows = draws.front().rows();
  const auto cols = draws.front().cols();
  for (const auto& d : draws)
    if (d.rows() != rows || d.cols() != cols) throw DomainError("draws are not aligned");
  if (static_cast<Eigen::Index>(populations.size()) != rows ||
      static_cast<Eigen::Index>(ages.size()) != cols)
    throw DomainError("summary labels do not match the draws");
  if (!(levels.lower <= levels.upper)) throw DomainError("lower level exceeds upper level");

  PredictiveSummary out;
  out.populations = std::move(populations);
  out.ages = std::move(ages);
  out.levels = levels;
  for (auto* s : {&out.log_rate, &out.rate, &out.death_prob}) {
    s->mean.resize(rows, cols);
    s->median.resize(rows, cols);
    s->lower.resize(rows, cols);
    s->upper.resize(rows, cols);
  }
  const double n = static_cast<double>(draws.size());
  std::vector<double> cell(draws.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      double sum_y = 0.0, sum_m = 0.0, sum_q = 0.0;
      for (std::size_t k = 0; k < draws.size(); ++k) {
        const double y = draws[k](r, c);
        cell[k] = y;
        sum_y += y;
        sum_m += std::exp(y);
        sum_q += death_probability(y);
      }
      std::sort(cell.begin(), cell.end());
      const double med = sorted_quantile(cell, 0.5);
      const double lo = sorted_quantile(cell, levels.lower);
      const double hi = sorted_quantile(cell, levels.upper);
      out.log_rate.mean(r, c) = sum_y / n;
      out.log_rate.median(r, c) = med;
      out.log_rate.lower(r, c) = lo;
      out.log_rate.upper(r, c) = hi;
      out.rate.mean(r, c) = sum_m / n;
      out.rate.median(r, c) = std::exp(med);
      out.rate.lower(r, c) = std::exp(lo);
      out.rate.upper(r, c) = std::exp(hi);
      out.death_prob.mean(r, c) = sum_q / n;
      out.death_prob.median(r, c) = death_probability(med);
      out.death_prob.lower(r, c) = death_probability(lo);
      out.death_prob.upper(r, c) = death_probability(hi);
    }
  }
  return out;
}

std::string check_summary(const PredictiveSummary& s) {
  for (Eigen::Index r = 0; r < s.log_rate.median.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.log_rate.median.cols(); ++c) {
      const auto where = " at (" + s.populations[r] + ", " + std::to_string(s.ages[c]) + ")";
      for (auto* sc : {&s.log_rate, &s.rate, &s.death_prob})
        if (!(sc->lower(r, c) <= sc->median(r, c) && sc->median(r, c) <= sc->upper(r, c)))
          return "quantiles out of order" + where;
      const double q = s.death_prob.median(r, c);
      if (!(q > 0.0 && q < 1.0)) return "death probability outside (0, 1)" + where;
      if (s.rate.median(r, c) != std::exp(s.log_rate.median(r, c)) ||
          s.death_prob.lower(r, c) != death_probability(s.log_rate.lower(r, c)) ||
          s.death_prob.upper(r, c) != death_probability(s.log_rate.upper(r, c)))
        return "scale transforms do not commute with quantiles" + where;
    }
  }
  return {};
}

}  // namespace graduate
