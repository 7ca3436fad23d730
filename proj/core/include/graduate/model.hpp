#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graduate/data.hpp"

namespace graduate {

/// One age interval of a discount schedule. Segments without a population
/// form the base schedule; population-tagged segments override it.
struct DiscountSegment {
  AgeRange ages;
  double delta = 1.0;
  std::optional<std::string> population;
};

/// Piecewise-constant discount factors over ages, optionally per population.
class DiscountSchedule {
 public:
  DiscountSchedule() = default;
  explicit DiscountSchedule(std::vector<DiscountSegment> segments);

  /// Single factor over [first, last].
  static DiscountSchedule uniform(double delta, int first, int last);

  /// Factor in force at `age`; a population override wins over the base.
  double at(int age, std::string_view population = {}) const;

  /// Throws DomainError unless the base segments cover [first, last].
  void check_covers(int first, int last) const;

  /// Factor of the base segment with the highest ages.
  double terminal_delta() const;

  const std::vector<DiscountSegment>& segments() const { return segments_; }

 private:
  std::vector<DiscountSegment> segments_;
};

double discount_at(const DiscountSchedule& schedule, int age, std::string_view population = {});

/// Wishart prior on the observational precision, in the rate form
/// density ∝ det(Φ)^(v0 - (J+1)/2) exp(-tr(S0 Φ)).
struct WishartPrior {
  double d0 = 3.0;
  Eigen::MatrixXd s0;
  double v0 = 2.0;
  Eigen::MatrixXd S0;
};

/// The {F, G} pair plus the initial-state prior. State ordering is
/// (mu_1, beta_1, ..., mu_J, beta_J[, alpha]).
struct DlmSpec {
  int populations = 0;
  bool common_term = false;
  Eigen::MatrixXd F;  // J x p
  Eigen::MatrixXd G;  // p x p
  Eigen::VectorXd m0;
  Eigen::MatrixXd C0;
  WishartPrior wishart;

  int state_dim() const { return static_cast<int>(G.rows()); }
  /// Number of discount blocks: one per population plus one for the common term.
  int block_count() const { return populations + (common_term ? 1 : 0); }
  /// Discount block of each state coordinate.
  std::vector<int> state_blocks() const;
  /// Observation and evolution matrices at an age; constant in this model.
  const Eigen::MatrixXd& observation(int /*age*/) const { return F; }
  const Eigen::MatrixXd& evolution(int /*age*/) const { return G; }
};

DlmSpec build_local_linear(int populations);
DlmSpec build_common_term(int populations);

struct InitialPrior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// m0 = mean (zero when empty), C0 = variance_scale * I.
InitialPrior initial_prior(int state_dim, const Eigen::VectorXd& mean, double variance_scale);
void set_initial_prior(DlmSpec& spec, const InitialPrior& prior);

/// v0 = (d0 + 1)/2, S0 = (d0 - 2) s0 / 2 with s0 = s0_scale * I.
WishartPrior wishart_prior(double d0, double s0_scale, int populations);

}  // namespace graduate
