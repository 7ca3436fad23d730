#include "graduate/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "graduate/errors.hpp"
#include "graduate/text.hpp"

namespace graduate {
namespace {

int index_of(const std::vector<std::string>& ids, std::string_view id) {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw DomainError("unknown population '" + std::string(id) + "'");
  return static_cast<int>(it - ids.begin());
}

int index_of_age(const std::vector<int>& ages, int age) {
  if (ages.empty() || age < ages.front() || age > ages.back())
    throw DomainError("age " + std::to_string(age) + " is outside the grid");
  return age - ages.front();
}

struct Row {
  double deaths;  // NaN when the field is empty
  double exposure;
  long line;
};

}  // namespace

int MortalityTable::population_index(std::string_view id) const {
  return index_of(populations, id);
}
int MortalityTable::age_index(int age) const { return index_of_age(ages, age); }
int RateSurface::population_index(std::string_view id) const {
  return index_of(populations, id);
}
int RateSurface::age_index(int age) const { return index_of_age(ages, age); }

void MortalityTable::validate() const {
  const auto j = population_count();
  const auto n = age_count();
  if (j == 0 || n == 0) throw DomainError("mortality table is empty");
  for (int i = 1; i < n; ++i)
    if (ages[i] != ages[i - 1] + 1) throw SchemaError("ages are not consecutive integers");
  if (deaths.rows() != j || deaths.cols() != n || exposure.rows() != j ||
      exposure.cols() != n || missing.rows() != j || missing.cols() != n)
    throw DomainError("mortality table dimensions are inconsistent");
  for (int p = 0; p < j; ++p) {
    for (int a = 0; a < n; ++a) {
      if (missing(p, a)) continue;
      if (!(exposure(p, a) > 0.0))
        throw DomainError("non-positive exposure at (" + populations[p] + ", " +
                          std::to_string(ages[a]) + ")");
      if (!(deaths(p, a) > 0.0))
        throw DomainError("non-positive deaths on an observed cell at (" +
                          populations[p] + ", " + std::to_string(ages[a]) + ")");
    }
  }
}

MortalityTable parse_table(std::string_view csv_text, const ColumnSchema& schema) {
  std::istringstream in{std::string(csv_text)};
  std::string line;
  long line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    header = text::split_csv_line(line);
    break;
  }
  if (header.empty()) throw ParseError("missing header row");
  for (auto& h : header) h = std::string(text::trim(h));
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw SchemaError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_pop = column(schema.population);
  const auto c_age = column(schema.age);
  const auto c_deaths = column(schema.deaths);
  const auto c_exposure = column(schema.exposure);
  const auto needed = std::max({c_pop, c_age, c_deaths, c_exposure}) + 1;

  std::map<std::string, std::map<int, Row>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split_csv_line(line);
    if (fields.size() < needed) throw ParseError("too few fields", line_no);
    const std::string pop(text::trim(fields[c_pop]));
    if (pop.empty()) throw ParseError("empty population", line_no);
    const auto age = text::parse_int(fields[c_age]);
    if (!age) throw ParseError("malformed age '" + fields[c_age] + "'", line_no);

    Row row{std::numeric_limits<double>::quiet_NaN(),
            std::numeric_limits<double>::quiet_NaN(), line_no};
    if (!text::trim(fields[c_deaths]).empty()) {
      auto d = text::parse_double(fields[c_deaths]);
      if (!d) throw ParseError("malformed deaths '" + fields[c_deaths] + "'", line_no);
      if (*d < 0.0) throw DomainError("negative deaths on line " + std::to_string(line_no));
      row.deaths = *d;
    }
    if (!text::trim(fields[c_exposure]).empty()) {
      auto e = text::parse_double(fields[c_exposure]);
      if (!e) throw ParseError("malformed exposure '" + fields[c_exposure] + "'", line_no);
      row.exposure = *e;
    }
    const bool observed = std::isfinite(row.deaths) && row.deaths > 0.0;
    if (observed && !(row.exposure > 0.0))
      throw DomainError("non-positive exposure on observed row, line " +
                        std::to_string(line_no));
    if (!rows[pop].emplace(*age, row).second)
      throw ParseError("duplicate row for (" + pop + ", " + std::to_string(*age) + ")",
                       line_no);
  }
  if (rows.empty()) throw ParseError("no data rows");

  std::set<int> all_ages;
  for (const auto& [pop, by_age] : rows)
    for (const auto& [age, row] : by_age) all_ages.insert(age);
  const std::vector<int> ages(all_ages.begin(), all_ages.end());
  for (std::size_t i = 1; i < ages.size(); ++i)
    if (ages[i] != ages[i - 1] + 1)
      throw SchemaError("ages are not consecutive: gap between " +
                        std::to_string(ages[i - 1]) + " and " + std::to_string(ages[i]));

  MortalityTable table;
  table.ages = ages;
  const auto j = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(ages.size());
  table.deaths = Eigen::MatrixXd::Constant(j, n, std::numeric_limits<double>::quiet_NaN());
  table.exposure = table.deaths;
  table.missing = MissingMask::Constant(j, n, true);
  Eigen::Index p = 0;
  for (const auto& [pop, by_age] : rows) {
    table.populations.push_back(pop);
    for (const auto& [age, row] : by_age) {
      const auto a = age - ages.front();
      table.deaths(p, a) = row.deaths;
      table.exposure(p, a) = row.exposure;
      table.missing(p, a) = !(std::isfinite(row.deaths) && row.deaths > 0.0);
    }
    ++p;
  }
  return table;
}

MortalityTable load_table(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open data file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), schema);
}

RateSurface central_rates(const MortalityTable& table) {
  RateSurface out;
  out.populations = table.populations;
  out.ages = table.ages;
  out.missing = table.missing;
  out.log_rates.resize(table.population_count(), table.age_count());
  for (Eigen::Index p = 0; p < out.log_rates.rows(); ++p)
    for (Eigen::Index a = 0; a < out.log_rates.cols(); ++a)
      out.log_rates(p, a) = table.missing(p, a)
                                ? std::numeric_limits<double>::quiet_NaN()
                                : std::log(table.deaths(p, a) / table.exposure(p, a));
  return out;
}

double death_probability(double log_rate) {
  const double q = -std::expm1(-std::exp(log_rate));
  return std::clamp(q, std::numeric_limits<double>::denorm_min(),
                    std::nextafter(1.0, 0.0));
}

std::vector<double> death_probabilities(std::span<const double> log_rates) {
  std::vector<double> out(log_rates.size());
  std::transform(log_rates.begin(), log_rates.end(), out.begin(), death_probability);
  return out;
}

MortalityTable mask_ages(const MortalityTable& table, std::string_view population,
                         std::span<const AgeRange> ranges) {
  const int p = table.population_index(population);
  MortalityTable out = table;
  for (const auto& r : ranges) {
    if (r.first > r.last || r.first < table.ages.front() || r.last > table.ages.back())
      throw DomainError("age range " + std::to_string(r.first) + "-" +
                        std::to_string(r.last) + " is outside the grid");
    for (int age = r.first; age <= r.last; ++age) out.missing(p, table.age_index(age)) = true;
  }
  return out;
}

double missing_fraction(const MortalityTable& table, std::string_view population) {
  const int p = table.population_index(population);
  return static_cast<double>(table.missing.row(p).count()) / table.age_count();
}

MortalityTable select_populations(const MortalityTable& table,
                                  std::span<const std::string> ids) {
  if (ids.empty()) throw DomainError("no populations selected");
  MortalityTable out;
  out.ages = table.ages;
  const auto n = table.age_count();
  const auto j = static_cast<Eigen::Index>(ids.size());
  out.deaths.resize(j, n);
  out.exposure.resize(j, n);
  out.missing.resize(j, n);
  for (Eigen::Index k = 0; k < j; ++k) {
    const int p = table.population_index(ids[k]);
    out.populations.push_back(ids[k]);
    out.deaths.row(k) = table.deaths.row(p);
    out.exposure.row(k) = table.exposure.row(p);
    out.missing.row(k) = table.missing.row(p);
  }
  return out;
}

std::vector<AgeRange> parse_age_ranges(std::string_view text_in, int open_last) {
  std::vector<AgeRange> out;
  for (const auto& raw : text::split(text_in, ',')) {
    const auto item = text::trim(raw);
    if (item.empty()) continue;
    AgeRange r;
    if (item.back() == '+') {
      auto first = text::parse_int(item.substr(0, item.size() - 1));
      if (!first) throw ParseError("malformed age range '" + std::string(item) + "'");
      r = {*first, open_last};
    } else if (auto dash = item.find('-'); dash != std::string_view::npos) {
      auto first = text::parse_int(item.substr(0, dash));
      auto last = text::parse_int(item.substr(dash + 1));
      if (!first || !last) throw ParseError("malformed age range '" + std::string(item) + "'");
      r = {*first, *last};
    } else {
      auto age = text::parse_int(item);
      if (!age) throw ParseError("malformed age range '" + std::string(item) + "'");
      r = {*age, *age};
    }
    if (r.first > r.last) throw DomainError("empty age range '" + std::string(item) + "'");
    out.push_back(r);
  }
  return out;
}

std::vector<AgeRange> scenario_ranges(char scenario) {
  switch (scenario) {
    case 'a': return {{4, 8}};
    case 'b': return {{4, 10}, {15, 17}};
    case 'c': return {{3, 16}};
    case 'd': return {{1, 25}};
    case 'e': return {{1, 16}, {23, 41}};
    case 'f': return {{1, 45}};
    default:
      throw DomainError(std::string("unknown missing-data scenario '") + scenario + "'");
  }
}

}  // namespace graduate
