#include "graduate/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "graduate/config.hpp"
#include "graduate/data.hpp"
#include "graduate/diagnostics.hpp"
#include "graduate/errors.hpp"
#include "graduate/forecast.hpp"
#include "graduate/io.hpp"
#include "graduate/metrics.hpp"
#include "graduate/sampler.hpp"
#include "graduate/text.hpp"

namespace graduate::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;
// Post-processing draws (predictive noise, extrapolation) use streams of a
// root seeded apart from the sampler's.
constexpr std::uint64_t kPostSalt = 0x9e3779b97f4a7c15ULL;

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("GRADUATE_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("GRADUATE_SEED must be a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

/// Config file, then flags; seed falls back to GRADUATE_SEED and the default.
ModelConfig resolve_config(const SamplerFlags& flags) {
  ModelConfig cfg = flags.config ? load_config(*flags.config) : ModelConfig{};
  if (flags.seed) {
    cfg.gibbs.seed = *flags.seed;
  } else if (!cfg.seed_given) {
    cfg.gibbs.seed = env_seed().value_or(kDefaultSeed);
  }
  cfg.seed_given = true;
  if (flags.chains) cfg.gibbs.chains = *flags.chains;
  if (flags.iterations) cfg.gibbs.iterations = *flags.iterations;
  if (flags.burn_in) cfg.gibbs.burn_in = *flags.burn_in;
  if (flags.thin) cfg.gibbs.thin = *flags.thin;
  if (flags.block_discount) cfg.gibbs.block_discount = true;
  cfg.gibbs.validate();
  return cfg;
}

MortalityTable restrict_table(const MortalityTable& table, const ModelConfig& cfg) {
  if (cfg.populations.empty()) return table;
  return select_populations(table, cfg.populations);
}

struct Fit {
  MortalityTable table;
  RateSurface y;
  DlmSpec spec;
  DiscountSchedule schedule;
  PosteriorDraws draws;
  FitSummary summary;
  ChainDiagnostics diagnostics;
};

Fit fit_table(const MortalityTable& table, const ModelConfig& cfg) {
  Fit fit;
  fit.table = table;
  fit.y = central_rates(table);
  fit.spec = build_spec(cfg, table.population_count());
  fit.schedule = build_schedule(cfg, table.ages.front(), table.ages.back());
  fit.draws = run_gibbs(fit.spec, fit.y, fit.schedule, cfg.gibbs);
  RngStream post = RngStream(cfg.gibbs.seed ^ kPostSalt).stream(0);
  fit.summary = summarize(fit.draws, fit.spec, cfg.quantile_levels(), post);
  fit.diagnostics = diagnose(fit.draws, fit.spec);
  return fit;
}

template <typename Writer>
std::string render(Writer&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

json check_entry(const std::string& name, const std::string& failure) {
  return json{{"check", name}, {"passed", failure.empty()}, {"detail", failure}};
}

json invariant_checks(const Fit& fit) {
  json checks = json::array();
  checks.push_back(check_entry("predictive summary ordering and transforms",
                               check_summary(fit.summary.predictive)));
  checks.push_back(check_entry("mean-curve summary ordering and transforms",
                               check_summary(fit.summary.mean_curve)));
  std::string spd;
  for (std::size_t k = 0; k < fit.draws.size() && spd.empty(); ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(fit.draws.v[k]);
    if (llt.info() != Eigen::Success) spd = "V draw " + std::to_string(k) + " is not positive definite";
  }
  checks.push_back(check_entry("observational covariance draws are positive definite", spd));
  std::string finite;
  for (std::size_t k = 0; k < fit.draws.size() && finite.empty(); ++k)
    if (!fit.draws.theta[k].allFinite()) finite = "state draw " + std::to_string(k) + " is not finite";
  checks.push_back(check_entry("state draws are finite", finite));
  return checks;
}

json diagnostics_json(const ChainDiagnostics& d) {
  return json{{"max_split_rhat", d.max_rhat},
              {"min_ess", d.min_ess},
              {"worst_rhat_parameter", d.worst_rhat_parameter},
              {"worst_ess_parameter", d.worst_ess_parameter}};
}

void write_fit_dir(const fs::path& dir, const Fit& fit, const ModelConfig& cfg,
                   const std::string& data_path, const std::string& data_text, bool draws_csv) {
  fs::create_directories(dir);
  write_file_atomic(dir / "summary.csv",
                    render([&](auto& o) { write_summary_csv(o, fit.summary.predictive); }));
  write_file_atomic(dir / "fitted.csv",
                    render([&](auto& o) { write_summary_csv(o, fit.summary.mean_curve); }));
  write_file_atomic(dir / "states.csv",
                    render([&](auto& o) { write_states_csv(o, fit.summary.states, fit.y.ages); }));
  write_file_atomic(dir / "variance.csv",
                    render([&](auto& o) { write_variance_csv(o, fit.summary.variance); }));
  write_file_atomic(dir / "observed.csv",
                    render([&](auto& o) { write_observed_csv(o, fit.table); }));
  write_file_atomic(dir / "draws.bin",
                    render([&](auto& o) { write_draws_binary(o, fit.draws); }));
  if (draws_csv)
    write_file_atomic(dir / "draws.csv", render([&](auto& o) { write_draws_csv(o, fit.draws); }));

  ModelConfig resolved = cfg;
  resolved.populations = fit.table.populations;
  json manifest;
  manifest["tool"] = "graduate";
  manifest["version"] = GRADUATE_VERSION;
  manifest["command"] = "fit";
  manifest["created_utc"] = utc_now();
  manifest["data"] = {{"path", data_path}, {"fnv1a64", hex64(fnv1a64(data_text))}};
  manifest["config"] = format_config(resolved);
  manifest["seed"] = cfg.gibbs.seed;
  manifest["populations"] = fit.table.populations;
  manifest["ages"] = {fit.table.ages.front(), fit.table.ages.back()};
  manifest["state_dim"] = fit.spec.state_dim();
  manifest["draws"] = fit.draws.size();
  manifest["missing_cells"] = fit.draws.missing.size();
  manifest["diagnostics"] = diagnostics_json(fit.diagnostics);
  manifest["checks"] = invariant_checks(fit);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

json read_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  if (!fs::exists(path)) throw ParseError("'" + dir.string() + "' has no manifest.json");
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("malformed manifest.json: " + std::string(e.what()));
  }
}

PosteriorDraws read_draws(const fs::path& dir) {
  const auto path = dir / "draws.bin";
  if (!fs::exists(path)) throw ParseError("'" + dir.string() + "' has no draws.bin");
  std::istringstream in(read_file(path));
  return read_draws_binary(in);
}

struct Scenario {
  std::string population;
  std::vector<AgeRange> ranges;
  std::string label;
};

Scenario parse_scenario(const std::string& text, const std::string& target, int last_age) {
  Scenario s;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    s.population = std::string(text::trim(std::string_view(text).substr(0, colon)));
    s.ranges = parse_age_ranges(std::string_view(text).substr(colon + 1), last_age);
    s.label = text;
  } else if (text.size() == 1) {
    if (target.empty()) throw ParseError("scenario '" + text + "' needs --target");
    s.population = target;
    s.ranges = scenario_ranges(text[0]);
    s.label = text;
  } else if (text.empty()) {
    if (target.empty()) throw ParseError("no scenario given");
    s.population = target;
    s.label = "none";
  } else {
    throw ParseError("scenario must be a letter a-f or 'POPULATION:ranges', got '" + text + "'");
  }
  return s;
}

/// Cells of `table` inside the scenario that are observed in the original data.
MissingMask evaluation_cells(const MortalityTable& table, const Scenario& scenario) {
  MissingMask cells = MissingMask::Constant(table.population_count(), table.age_count(), false);
  const int p = table.population_index(scenario.population);
  for (const auto& r : scenario.ranges)
    for (int a = 0; a < table.age_count(); ++a)
      if (r.contains(table.ages[a]) && !table.missing(p, a)) cells(p, a) = true;
  return cells;
}

std::string fmt(double v) { return text::format_double(v); }

void print_report(const ComparisonReport& report) {
  write_report_table(std::cout, report);
}

}  // namespace

void cmd_fit(const FitOptions& opts) {
  const auto cfg = resolve_config(opts.sampler);
  const auto data_text = read_file(opts.data);
  const auto table = restrict_table(parse_table(data_text), cfg);
  const auto fit = fit_table(table, cfg);
  write_fit_dir(opts.out, fit, cfg, opts.data, data_text, opts.draws_csv);
  std::cout << "fit: " << fit.draws.size() << " draws, " << table.population_count()
            << " population(s), ages " << table.ages.front() << "-" << table.ages.back()
            << ", max split R-hat " << std::setprecision(4) << fit.diagnostics.max_rhat
            << ", min ESS " << std::llround(fit.diagnostics.min_ess) << "\n"
            << "wrote " << opts.out << "\n";
}

void cmd_forecast(const ForecastOptions& opts) {
  const fs::path dir = opts.fit_dir;
  const auto manifest = read_manifest(dir);
  auto cfg = parse_config(manifest.at("config").get<std::string>());
  const auto draws = read_draws(dir);
  const int first = draws.ages.front();
  const int last = draws.ages.back();
  const auto spec = build_spec(cfg, static_cast<int>(draws.populations.size()));
  const auto schedule = build_schedule(cfg, first, last);
  const std::uint64_t seed = opts.seed ? *opts.seed : manifest.at("seed").get<std::uint64_t>();

  ForecastConfig fc;
  fc.horizon = opts.horizon;
  fc.blend = parse_blend(opts.blend);
  fc.terminal_age = opts.terminal_age.value_or(last + opts.horizon);
  fc.block_discount = opts.block_discount || cfg.gibbs.block_discount;
  fc.validate(last);

  const RngStream root(seed ^ kPostSalt);
  RngStream fitted_rng = root.stream(0);
  RngStream ahead_rng = root.stream(1);
  const auto fitted = predictive_curves(draws, spec, fitted_rng);
  const auto ahead = extrapolate(draws, spec, fc, extrapolation_delta(fc, schedule), ahead_rng);
  const auto levels = cfg.quantile_levels();

  const auto unblended = summarize_predictive(fitted, draws.ages, ahead, levels);
  const auto crossing = first_crossing(unblended, last);
  const auto blended = blend_convergence(ahead, last, fc);
  const auto summary = fc.blend == Blend::kNone
                           ? unblended
                           : summarize_predictive(fitted, draws.ages, blended.draws, levels);

  const fs::path out = opts.out.empty() ? dir : fs::path(opts.out);
  fs::create_directories(out);
  write_file_atomic(out / "forecast.csv", render([&](auto& o) { write_summary_csv(o, summary); }));

  json report;
  report["tool"] = "graduate";
  report["version"] = GRADUATE_VERSION;
  report["command"] = "forecast";
  report["created_utc"] = utc_now();
  report["fit_dir"] = dir.string();
  report["seed"] = seed;
  report["horizon"] = fc.horizon;
  report["last_fitted_age"] = last;
  report["terminal_age"] = fc.terminal_age;
  report["blend"] = blend_name(fc.blend);
  report["delta"] = extrapolation_delta(fc, schedule);
  if (crossing) {
    report["unblended_crossing"] = {{"age", crossing->age},
                                    {"populations", {crossing->first, crossing->second}}};
  } else {
    report["unblended_crossing"] = nullptr;
  }
  report["warnings"] = blended.warnings;
  report["checks"] = json::array({check_entry("forecast summary ordering and transforms",
                                              check_summary(summary))});
  write_file_atomic(out / "forecast.json", report.dump(2) + "\n");

  for (const auto& w : blended.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "forecast: ages " << last + 1 << "-" << last + fc.horizon << ", blend "
            << blend_name(fc.blend) << "\n";
  if (crossing) {
    std::cout << "unblended medians cross at age " << crossing->age << " (" << crossing->first
              << " vs " << crossing->second << ")\n";
  } else {
    std::cout << "unblended medians do not cross beyond age " << last << "\n";
  }
}

void cmd_simulate_missing(const SimulateOptions& opts) {
  const auto base = resolve_config(opts.sampler);
  const auto data_text = read_file(opts.data);
  const auto full = restrict_table(parse_table(data_text), base);
  const auto scenario = parse_scenario(opts.scenario, opts.target, full.ages.back());
  const auto cells = evaluation_cells(full, scenario);
  if (cells.count() == 0) throw DomainError("scenario '" + scenario.label + "' holds out no observed cells");
  const auto masked = mask_ages(full, scenario.population, scenario.ranges);
  const auto truth = central_rates(full);
  const double pct = 100.0 * missing_fraction(masked, scenario.population);
  const Scale scale = parse_scale(opts.scale);

  std::vector<Fit> fits;
  std::vector<std::string> labels;
  for (const auto& model : opts.models) {
    ModelConfig cfg = base;
    MortalityTable table = masked;
    if (model == "usual") {
      cfg.common_term = false;
    } else if (model == "common") {
      cfg.common_term = true;
    } else if (model == "univariate") {
      cfg.common_term = false;
      const std::vector<std::string> only{scenario.population};
      table = select_populations(masked, only);
    } else {
      throw ParseError("unknown model '" + model + "' (expected usual, common or univariate)");
    }
    if (cfg.common_term && table.population_count() < 2)
      throw DomainError("the common-term model needs at least two populations");
    fits.push_back(fit_table(table, cfg));
    labels.push_back(model);
  }

  std::vector<ComparisonInput> inputs;
  for (std::size_t i = 0; i < fits.size(); ++i)
    inputs.push_back({labels[i], scenario.label, pct, &fits[i].summary.predictive, &truth});
  const auto report = compare(inputs, cells, scale);

  const fs::path out = opts.out;
  fs::create_directories(out);
  write_file_atomic(out / "report.csv", render([&](auto& o) { write_report_csv(o, report); }));
  write_file_atomic(out / "report.txt", render([&](auto& o) { write_report_table(o, report); }));
  json manifest;
  manifest["tool"] = "graduate";
  manifest["version"] = GRADUATE_VERSION;
  manifest["command"] = "simulate-missing";
  manifest["created_utc"] = utc_now();
  manifest["data"] = {{"path", opts.data}, {"fnv1a64", hex64(fnv1a64(data_text))}};
  manifest["config"] = format_config(base);
  manifest["seed"] = base.gibbs.seed;
  manifest["scenario"] = {{"label", scenario.label},
                          {"population", scenario.population},
                          {"held_out_cells", cells.count()},
                          {"percent_missing", pct}};
  json models = json::array();
  for (std::size_t i = 0; i < fits.size(); ++i)
    models.push_back({{"model", labels[i]},
                      {"populations", fits[i].table.populations},
                      {"diagnostics", diagnostics_json(fits[i].diagnostics)},
                      {"checks", invariant_checks(fits[i])}});
  manifest["models"] = models;
  write_file_atomic(out / "manifest.json", manifest.dump(2) + "\n");
  print_report(report);
}

void cmd_compare(const CompareOptions& opts) {
  if (opts.fits.empty()) throw ParseError("compare needs at least one --fit directory");
  const auto full = parse_table(read_file(opts.data));
  const auto scenario = parse_scenario(opts.cells, opts.target, full.ages.back());
  const auto cells = evaluation_cells(full, scenario);
  const auto truth = central_rates(full);
  const Scale scale = parse_scale(opts.scale);

  std::vector<PredictiveSummary> summaries;
  std::vector<std::string> labels;
  for (const auto& dir : opts.fits) {
    const fs::path path = fs::path(dir) / "summary.csv";
    if (!fs::exists(path)) throw ParseError("'" + dir + "' has no summary.csv");
    summaries.push_back(read_summary_csv(read_file(path)));
    labels.push_back(fs::path(dir).lexically_normal().filename().string());
    if (labels.back().empty()) labels.back() = fs::path(dir).lexically_normal().parent_path().filename().string();
  }
  std::vector<ComparisonInput> inputs;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    // percentage of the scenario population's cells held out
    const double pct = 100.0 * static_cast<double>(cells.count()) / full.age_count();
    inputs.push_back({labels[i], scenario.label, pct, &summaries[i], &truth});
  }
  const auto report = compare(inputs, cells, scale);
  if (!opts.out.empty()) {
    fs::create_directories(opts.out);
    write_file_atomic(fs::path(opts.out) / "report.csv",
                      render([&](auto& o) { write_report_csv(o, report); }));
    write_file_atomic(fs::path(opts.out) / "report.txt",
                      render([&](auto& o) { write_report_table(o, report); }));
  }
  print_report(report);
}

void cmd_plotdata(const PlotOptions& opts) {
  const fs::path dir = opts.fit_dir;
  const Scale scale = parse_scale(opts.scale);
  for (const char* name : {"observed.csv", "fitted.csv", "summary.csv"})
    if (!fs::exists(dir / name))
      throw ParseError("'" + dir.string() + "' is not a fit directory (missing " + name + ")");

  std::ostringstream out;
  out << "series,population,age,value,lower,upper\n";

  {
    const auto text = read_file(dir / "observed.csv");
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto header = text::split_csv_line(line);
    if (header.size() != 6 || header[4] != "log_rate")
      throw SchemaError("unexpected observed.csv header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const auto f = text::split_csv_line(line);
      if (f.size() != 6) throw ParseError("observed.csv: expected 6 fields", line_no);
      if (f[5] == "1" || f[5] == "true") continue;
      const auto y = text::parse_double(f[4]);
      if (!y) throw ParseError("observed.csv: malformed log_rate", line_no);
      double v = *y;
      if (scale == Scale::kRate) v = std::exp(v);
      if (scale == Scale::kDeathProb) v = death_probability(v);
      out << "raw," << f[0] << ',' << f[1] << ',' << fmt(v) << ",,\n";
    }
  }

  auto copy_summary = [&](const fs::path& file, const char* series) {
    const auto text = read_file(file);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (text::trim(line) != "population,age,scale,mean,median,lower,upper")
      throw SchemaError("unexpected header in " + file.filename().string());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const auto f = text::split_csv_line(line);
      if (f.size() != 7) throw ParseError(file.filename().string() + ": expected 7 fields", line_no);
      if (f[2] != scale_name(scale)) continue;
      out << series << ',' << f[0] << ',' << f[1] << ',' << f[4] << ',' << f[5] << ',' << f[6]
          << '\n';
    }
  };
  copy_summary(dir / "fitted.csv", "fitted");
  copy_summary(dir / "summary.csv", "band");
  if (fs::exists(dir / "forecast.csv")) copy_summary(dir / "forecast.csv", "forecast");

  const fs::path target = opts.out.empty() ? dir / "plotdata.csv" : fs::path(opts.out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  write_file_atomic(target, out.str());
  std::cout << "wrote " << target.string() << "\n";
}

namespace {

void add_sampler_flags(CLI::App* cmd, SamplerFlags& f) {
  cmd->add_option("--config", f.config, "Model configuration file");
  cmd->add_option("--seed", f.seed, "Random seed (overrides config and GRADUATE_SEED)");
  cmd->add_option("--chains", f.chains, "Number of parallel chains")->check(CLI::PositiveNumber);
  cmd->add_option("--iterations", f.iterations, "Gibbs iterations per chain")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--burn-in", f.burn_in, "Discarded initial iterations")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--thin", f.thin, "Keep every n-th draw")->check(CLI::PositiveNumber);
  cmd->add_flag("--block-discount", f.block_discount,
                "Discount each population block separately");
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::kParse: return 2;
    case Error::Category::kDomain: return 3;
    case Error::Category::kNumerical: return 4;
  }
  return 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Bayesian graduation of mortality rates with dynamic linear models"};
  app.set_version_flag("--version", std::string(GRADUATE_VERSION));
  app.require_subcommand(1);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model and write summaries, draws and a manifest");
  fit_cmd->add_option("--data", fit.data, "Long-format CSV of deaths and exposures")->required();
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();
  fit_cmd->add_flag("--draws-csv", fit.draws_csv, "Also write draws.csv");
  add_sampler_flags(fit_cmd, fit.sampler);

  ForecastOptions fc;
  auto* fc_cmd = app.add_subcommand("forecast", "Extrapolate a fit beyond its last age");
  fc_cmd->add_option("--fit", fc.fit_dir, "Fit directory")->required();
  fc_cmd->add_option("--out", fc.out, "Output directory (default: the fit directory)");
  fc_cmd->add_option("--seed", fc.seed, "Random seed (default: the fit's seed)");
  fc_cmd->add_option("--horizon", fc.horizon, "Number of ages beyond the last fitted age");
  fc_cmd->add_option("--terminal-age", fc.terminal_age, "Age at which blended curves coincide");
  fc_cmd->add_option("--blend", fc.blend, "none or linear");
  fc_cmd->add_flag("--block-discount", fc.block_discount,
                   "Discount each population block separately");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate-missing", "Hold out ages of one population, refit and compare models");
  sim_cmd->add_option("--data", sim.data, "Long-format CSV of deaths and exposures")->required();
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();
  sim_cmd->add_option("--scenario", sim.scenario, "Preset a-f, or POPULATION:ranges")->required();
  sim_cmd->add_option("--target", sim.target, "Population masked by a preset scenario");
  sim_cmd->add_option("--models", sim.models, "Any of usual, common, univariate")->delimiter(',');
  sim_cmd->add_option("--scale", sim.scale, "Metric scale: log_rate, rate or death_prob");
  add_sampler_flags(sim_cmd, sim.sampler);

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Score existing fits on held-out cells");
  cmp_cmd->add_option("--fit", cmp.fits, "Fit directory (repeatable)")->required();
  cmp_cmd->add_option("--data", cmp.data, "CSV holding the true values")->required();
  cmp_cmd->add_option("--cells", cmp.cells, "Preset a-f, or POPULATION:ranges")->required();
  cmp_cmd->add_option("--target", cmp.target, "Population for a preset");
  cmp_cmd->add_option("--scale", cmp.scale, "Metric scale: log_rate, rate or death_prob");
  cmp_cmd->add_option("--out", cmp.out, "Directory for report.csv and report.txt");

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plotdata", "Export raw points, fitted curves and bands");
  plot_cmd->add_option("--fit", plot.fit_dir, "Fit directory")->required();
  plot_cmd->add_option("--out", plot.out, "Output CSV (default: <fit>/plotdata.csv)");
  plot_cmd->add_option("--scale", plot.scale, "log_rate, rate or death_prob");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*fit_cmd) cmd_fit(fit);
    if (*fc_cmd) cmd_forecast(fc);
    if (*sim_cmd) cmd_simulate_missing(sim);
    if (*cmp_cmd) cmd_compare(cmp);
    if (*plot_cmd) cmd_plotdata(plot);
  } catch (const Error& e) {
    std::cerr << "error: " << e.category_name() << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: parse: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace graduate::cli
