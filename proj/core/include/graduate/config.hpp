#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graduate/model.hpp"
#include "graduate/sampler.hpp"
#include "graduate/summary.hpp"

namespace graduate {

/// Resolved model and sampler settings.
///
/// File format: `key = value` lines, `#` comments, and one `[discount]`
/// section per discount segment:
///
///     populations = M,F
///     common_term = true
///     prior_mean = 0
///     prior_scale = 100
///     d0 = 3
///     s0_scale = 0.01
///     seed = 42
///
///     [discount]
///     ages = 1-5
///     delta = 0.99
///
///     [discount]
///     ages = 86+
///     delta = 0.99
///     population = F        # optional per-population override
struct ModelConfig {
  std::vector<std::string> populations;  // empty: every population in the data
  bool common_term = false;
  std::vector<DiscountSegment> discounts;
  std::vector<double> prior_mean;  // empty, one value (broadcast) or one per state
  double prior_scale = 100.0;
  double d0 = 3.0;
  double s0_scale = 0.01;
  double level = 0.95;
  GibbsConfig gibbs;
  bool seed_given = false;

  QuantileLevels quantile_levels() const;
};

/// Upper bound used for open-ended ranges such as "86+".
inline constexpr int kOpenAge = 100000;

ModelConfig parse_config(std::string_view text);
ModelConfig load_config(const std::filesystem::path& path);
/// Canonical text that parses back to the same configuration.
std::string format_config(const ModelConfig& config);

DlmSpec build_spec(const ModelConfig& config, int populations);
/// Discount schedule; a uniform 0.95 schedule when none is configured.
DiscountSchedule build_schedule(const ModelConfig& config, int first_age, int last_age);

}  // namespace graduate
