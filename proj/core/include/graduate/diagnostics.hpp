#pragma once

#include <span>
#include <string>
#include <vector>

namespace graduate {

struct PosteriorDraws;
struct DlmSpec;

/// Split-chain potential scale reduction for one scalar quantity.
/// `chains` holds equal-length sample sequences.
double split_rhat(std::span<const std::vector<double>> chains);

/// Bulk effective sample size from split chains (Geyer initial positive
/// sequence on the combined autocorrelation).
double effective_sample_size(std::span<const std::vector<double>> chains);

struct ChainDiagnostics {
  double max_rhat = 1.0;
  double min_ess = 0.0;
  std::string worst_rhat_parameter;
  std::string worst_ess_parameter;
};

/// Diagnostics over fitted log-rates per cell and the elements of V.
ChainDiagnostics diagnose(const PosteriorDraws& draws, const DlmSpec& spec);

}  // namespace graduate
