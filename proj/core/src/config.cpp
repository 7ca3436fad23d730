#include "graduate/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "graduate/errors.hpp"
#include "graduate/text.hpp"

namespace graduate {
namespace {

double need_double(std::string_view v, long line, const std::string& key) {
  auto d = text::parse_double(v);
  if (!d) throw ParseError("'" + key + "' expects a number", line);
  return *d;
}

int need_int(std::string_view v, long line, const std::string& key) {
  auto i = text::parse_int(v);
  if (!i) throw ParseError("'" + key + "' expects an integer", line);
  return *i;
}

bool need_bool(std::string_view v, long line, const std::string& key) {
  auto b = text::parse_bool(v);
  if (!b) throw ParseError("'" + key + "' expects true or false", line);
  return *b;
}

std::string format_range(const AgeRange& r) {
  if (r.last >= kOpenAge) return std::to_string(r.first) + "+";
  if (r.first == r.last) return std::to_string(r.first);
  return std::to_string(r.first) + "-" + std::to_string(r.last);
}

}  // namespace

QuantileLevels ModelConfig::quantile_levels() const {
  return {(1.0 - level) / 2.0, 1.0 - (1.0 - level) / 2.0};
}

ModelConfig parse_config(std::string_view input) {
  ModelConfig cfg;
  std::istringstream in{std::string(input)};
  std::string raw;
  long line_no = 0;
  struct Pending {
    std::optional<AgeRange> ages;
    std::optional<double> delta;
    std::optional<std::string> population;
    long line = 0;
  };
  std::optional<Pending> section;
  auto flush = [&] {
    if (!section) return;
    if (!section->ages || !section->delta)
      throw ParseError("[discount] section needs 'ages' and 'delta'", section->line);
    if (!(*section->delta > 0.0 && *section->delta <= 1.0))
      throw DomainError("line " + std::to_string(section->line) + ": discount factor " +
                        text::format_double(*section->delta) + " is outside (0, 1]");
    cfg.discounts.push_back({*section->ages, *section->delta, section->population});
    section.reset();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      flush();
      if (line != "[discount]")
        throw ParseError("unknown section '" + std::string(line) + "'", line_no);
      section = Pending{};
      section->line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = text::lower(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));

    if (section) {
      if (key == "ages") {
        auto ranges = parse_age_ranges(value, kOpenAge);
        if (ranges.size() != 1) throw ParseError("'ages' expects a single range", line_no);
        section->ages = ranges.front();
      } else if (key == "delta") {
        section->delta = need_double(value, line_no, key);
      } else if (key == "population") {
        section->population = std::string(value);
      } else {
        throw ParseError("unknown key '" + key + "' in [discount]", line_no);
      }
      continue;
    }

    if (key == "populations") {
      cfg.populations.clear();
      for (const auto& p : text::split(value, ','))
        if (!text::trim(p).empty()) cfg.populations.emplace_back(text::trim(p));
    } else if (key == "common_term") {
      cfg.common_term = need_bool(value, line_no, key);
    } else if (key == "prior_mean") {
      cfg.prior_mean.clear();
      for (const auto& p : text::split(value, ','))
        cfg.prior_mean.push_back(need_double(p, line_no, key));
    } else if (key == "prior_scale") {
      cfg.prior_scale = need_double(value, line_no, key);
    } else if (key == "d0") {
      cfg.d0 = need_double(value, line_no, key);
    } else if (key == "s0_scale") {
      cfg.s0_scale = need_double(value, line_no, key);
    } else if (key == "level") {
      cfg.level = need_double(value, line_no, key);
      if (!(cfg.level > 0.0 && cfg.level < 1.0))
        throw ParseError("'level' must lie in (0, 1)", line_no);
    } else if (key == "seed") {
      auto s = text::trim(value);
      std::uint64_t seed = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError("'seed' expects a non-negative integer", line_no);
      cfg.gibbs.seed = seed;
      cfg.seed_given = true;
    } else if (key == "iterations") {
      cfg.gibbs.iterations = need_int(value, line_no, key);
    } else if (key == "burn_in") {
      cfg.gibbs.burn_in = need_int(value, line_no, key);
    } else if (key == "thin") {
      cfg.gibbs.thin = need_int(value, line_no, key);
    } else if (key == "chains") {
      cfg.gibbs.chains = need_int(value, line_no, key);
    } else if (key == "block_discount") {
      cfg.gibbs.block_discount = need_bool(value, line_no, key);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  flush();
  return cfg;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ModelConfig& c) {
  std::ostringstream out;
  out << "populations = ";
  for (std::size_t i = 0; i < c.populations.size(); ++i) out << (i ? "," : "") << c.populations[i];
  out << "\ncommon_term = " << (c.common_term ? "true" : "false") << "\nprior_mean = ";
  if (c.prior_mean.empty()) out << 0;
  for (std::size_t i = 0; i < c.prior_mean.size(); ++i)
    out << (i ? "," : "") << text::format_double(c.prior_mean[i]);
  out << "\nprior_scale = " << text::format_double(c.prior_scale)
      << "\nd0 = " << text::format_double(c.d0)
      << "\ns0_scale = " << text::format_double(c.s0_scale)
      << "\nlevel = " << text::format_double(c.level) << "\nseed = " << c.gibbs.seed
      << "\niterations = " << c.gibbs.iterations << "\nburn_in = " << c.gibbs.burn_in
      << "\nthin = " << c.gibbs.thin << "\nchains = " << c.gibbs.chains
      << "\nblock_discount = " << (c.gibbs.block_discount ? "true" : "false") << '\n';
  for (const auto& s : c.discounts) {
    out << "\n[discount]\nages = " << format_range(s.ages)
        << "\ndelta = " << text::format_double(s.delta) << '\n';
    if (s.population) out << "population = " << *s.population << '\n';
  }
  return out.str();
}

DlmSpec build_spec(const ModelConfig& config, int populations) {
  DlmSpec spec = config.common_term ? build_common_term(populations)
                                    : build_local_linear(populations);
  const int p = spec.state_dim();
  Eigen::VectorXd mean;
  if (config.prior_mean.size() == 1) {
    mean = Eigen::VectorXd::Constant(p, config.prior_mean.front());
  } else if (!config.prior_mean.empty()) {
    mean = Eigen::Map<const Eigen::VectorXd>(config.prior_mean.data(),
                                             static_cast<Eigen::Index>(config.prior_mean.size()));
  }
  set_initial_prior(spec, initial_prior(p, mean, config.prior_scale));
  spec.wishart = wishart_prior(config.d0, config.s0_scale, populations);
  return spec;
}

DiscountSchedule build_schedule(const ModelConfig& config, int first_age, int last_age) {
  DiscountSchedule schedule = config.discounts.empty()
                                  ? DiscountSchedule::uniform(0.95, first_age, kOpenAge)
                                  : DiscountSchedule(config.discounts);
  schedule.check_covers(first_age, last_age);
  return schedule;
}

}  // namespace graduate
