#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace graduate::cli {

/// Flag values shared by the commands that run the sampler. Unset values
/// fall back to the config file, then to built-in defaults.
struct SamplerFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<int> iterations;
  std::optional<int> burn_in;
  std::optional<int> thin;
  bool block_discount = false;
};

struct FitOptions {
  std::string data;
  std::string out;
  SamplerFlags sampler;
  bool draws_csv = false;
};

struct ForecastOptions {
  std::string fit_dir;
  std::string out;  // defaults to the fit directory
  std::optional<std::uint64_t> seed;
  int horizon = 16;
  std::optional<int> terminal_age;
  std::string blend = "none";
  bool block_discount = false;
};

struct SimulateOptions {
  std::string data;
  std::string out;
  SamplerFlags sampler;
  std::string scenario;
  std::string target;
  std::vector<std::string> models{"usual", "common"};
  std::string scale = "log_rate";
};

struct CompareOptions {
  std::vector<std::string> fits;
  std::string data;
  std::string cells;
  std::string target;
  std::string out;
  std::string scale = "log_rate";
};

struct PlotOptions {
  std::string fit_dir;
  std::string out;  // defaults to <fit_dir>/plotdata.csv
  std::string scale = "log_rate";
};

void cmd_fit(const FitOptions& opts);
void cmd_forecast(const ForecastOptions& opts);
void cmd_simulate_missing(const SimulateOptions& opts);
void cmd_compare(const CompareOptions& opts);
void cmd_plotdata(const PlotOptions& opts);

/// Parses the command line and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace graduate::cli
