#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "graduate/data.hpp"
#include "graduate/sampler.hpp"
#include "graduate/summary.hpp"

namespace graduate {

/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a, used as a data checksum in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// `population,age,scale,mean,median,lower,upper`, rows ordered by
/// population, age, then scale (log_rate, rate, death_prob).
void write_summary_csv(std::ostream& out, const PredictiveSummary& summary);

/// Inverse of write_summary_csv. Quantile levels are not stored and keep
/// their defaults.
PredictiveSummary read_summary_csv(std::string_view csv_text);

/// `state,age,mean,median,lower,upper`.
void write_states_csv(std::ostream& out, const MatrixSummary& states,
                      const std::vector<int>& ages);
/// `row,col,mean,median,lower,upper`.
void write_variance_csv(std::ostream& out, const MatrixSummary& variance);

/// `population,age,deaths,exposure,log_rate,missing`.
void write_observed_csv(std::ostream& out, const MortalityTable& table);

/// Long format `chain,iteration,age,series,value`.
void write_draws_csv(std::ostream& out, const PosteriorDraws& draws);

/// Binary draw archive. Layout (all integers u64, all reals f64, little-endian):
///   magic "GRDRAW01"
///   header: draws, populations J, ages n, state_dim p, missing cells, first age
///   population names: for each, byte length then UTF-8 bytes
///   missing cells: (population, age_index) pairs
///   per draw: chain, iteration, theta (p x n, column-major), phi (J x J),
///             V (J x J), imputed values, terminal covariance (p x p)
void write_draws_binary(std::ostream& out, const PosteriorDraws& draws);
PosteriorDraws read_draws_binary(std::istream& in);

}  // namespace graduate
