#include "graduate/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "graduate/errors.hpp"
#include "graduate/sampler.hpp"

namespace graduate {
namespace {

// Splits every chain in half, dropping the middle draw of odd-length chains.
std::vector<std::vector<double>> split_halves(std::span<const std::vector<double>> chains) {
  std::vector<std::vector<double>> out;
  for (const auto& c : chains) {
    const auto half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
    out.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Variances {
  double within = 0.0;
  double pooled = 0.0;  // var+
  std::vector<double> means;
};

Variances variances(const std::vector<std::vector<double>>& split) {
  const auto m = static_cast<double>(split.size());
  const auto n = static_cast<double>(split.front().size());
  Variances v;
  double grand = 0.0;
  for (const auto& c : split) {
    v.means.push_back(mean_of(c));
    grand += v.means.back();
  }
  grand /= m;
  double between = 0.0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    between += (v.means[i] - grand) * (v.means[i] - grand);
    double s2 = 0.0;
    for (double x : split[i]) s2 += (x - v.means[i]) * (x - v.means[i]);
    v.within += s2 / (n - 1.0);
  }
  between *= n / (m - 1.0);
  v.within /= m;
  v.pooled = (n - 1.0) / n * v.within + between / n;
  return v;
}

bool usable(std::span<const std::vector<double>> chains) {
  if (chains.empty()) return false;
  const auto len = chains.front().size();
  for (const auto& c : chains)
    if (c.size() != len) throw DomainError("diagnostics require equal-length chains");
  return len >= 4;
}

}  // namespace

double split_rhat(std::span<const std::vector<double>> chains) {
  if (!usable(chains)) return std::numeric_limits<double>::quiet_NaN();
  const auto v = variances(split_halves(chains));
  if (v.within <= 0.0) return 1.0;
  return std::sqrt(v.pooled / v.within);
}

double effective_sample_size(std::span<const std::vector<double>> chains) {
  if (!usable(chains)) return std::numeric_limits<double>::quiet_NaN();
  const auto split = split_halves(chains);
  const auto m = split.size();
  const auto n = split.front().size();
  const auto v = variances(split);
  const double total = static_cast<double>(m * n);
  if (v.pooled <= 0.0) return total;

  auto rho = [&](std::size_t lag) {
    double acov = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t t = 0; t + lag < n; ++t)
        s += (split[i][t] - v.means[i]) * (split[i][t + lag] - v.means[i]);
      acov += s / static_cast<double>(n);
    }
    acov /= static_cast<double>(m);
    return 1.0 - (v.within - acov) / v.pooled;
  };

  double sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    double pair = rho(lag) + rho(lag + 1);
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);  // initial monotone sequence
    sum += pair;
    prev_pair = pair;
  }
  const double tau = -1.0 + 2.0 * sum;
  return total / std::max(tau, 1.0 / std::log10(total));
}

ChainDiagnostics diagnose(const PosteriorDraws& draws, const DlmSpec& spec) {
  ChainDiagnostics out;
  out.min_ess = std::numeric_limits<double>::infinity();
  if (draws.size() == 0) return out;

  std::map<int, std::vector<std::size_t>> by_chain;
  for (std::size_t k = 0; k < draws.size(); ++k) by_chain[draws.chain[k]].push_back(k);
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const auto& [c, idx] : by_chain) len = std::min(len, idx.size());

  auto check = [&](const std::string& name, auto&& value_of) {
    std::vector<std::vector<double>> chains;
    for (const auto& [c, idx] : by_chain) {
      std::vector<double> seq(len);
      for (std::size_t t = 0; t < len; ++t) seq[t] = value_of(idx[t]);
      chains.push_back(std::move(seq));
    }
    const double r = split_rhat(chains);
    const double e = effective_sample_size(chains);
    if (std::isfinite(r) && r > out.max_rhat) {
      out.max_rhat = r;
      out.worst_rhat_parameter = name;
    }
    if (std::isfinite(e) && e < out.min_ess) {
      out.min_ess = e;
      out.worst_ess_parameter = name;
    }
  };

  const auto j = static_cast<Eigen::Index>(draws.populations.size());
  for (Eigen::Index p = 0; p < j; ++p) {
    for (std::size_t a = 0; a < draws.ages.size(); ++a) {
      const auto col = static_cast<Eigen::Index>(a);
      check("fitted[" + draws.populations[p] + "," + std::to_string(draws.ages[a]) + "]",
            [&](std::size_t k) { return spec.F.row(p).dot(draws.theta[k].col(col)); });
    }
  }
  for (Eigen::Index r = 0; r < j; ++r)
    for (Eigen::Index c = r; c < j; ++c)
      check("V[" + std::to_string(r) + "," + std::to_string(c) + "]",
            [&](std::size_t k) { return draws.v[k](r, c); });
  if (!std::isfinite(out.min_ess)) out.min_ess = 0.0;
  return out;
}

}  // namespace graduate
