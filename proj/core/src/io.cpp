#include "graduate/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "graduate/errors.hpp"
#include "graduate/text.hpp"

namespace graduate {
namespace {

constexpr std::array<char, 8> kMagic = {'G', 'R', 'D', 'R', 'A', 'W', '0', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("draw archive is truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) put_f64(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = get_f64(in);
  return m;
}

std::string fmt(double v) { return text::format_double(v); }

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DomainError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return s;
}

void write_summary_csv(std::ostream& out, const PredictiveSummary& s) {
  out << "population,age,scale,mean,median,lower,upper\n";
  for (std::size_t p = 0; p < s.populations.size(); ++p) {
    for (std::size_t a = 0; a < s.ages.size(); ++a) {
      for (Scale scale : {Scale::kLogRate, Scale::kRate, Scale::kDeathProb}) {
        const auto& sc = scale_of(s, scale);
        const auto r = static_cast<Eigen::Index>(p);
        const auto c = static_cast<Eigen::Index>(a);
        out << s.populations[p] << ',' << s.ages[a] << ',' << scale_name(scale) << ','
            << fmt(sc.mean(r, c)) << ',' << fmt(sc.median(r, c)) << ',' << fmt(sc.lower(r, c))
            << ',' << fmt(sc.upper(r, c)) << '\n';
      }
    }
  }
}

PredictiveSummary read_summary_csv(std::string_view csv_text) {
  struct Cell {
    std::array<double, 4> v{};
  };
  std::vector<std::string> pops;
  std::map<std::string, std::map<int, std::array<Cell, 3>>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos <= csv_text.size()) {
    const auto end = std::min(csv_text.find('\n', pos), csv_text.size());
    const auto line = text::trim(csv_text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (header) {
      if (line != "population,age,scale,mean,median,lower,upper")
        throw SchemaError("unexpected summary header '" + std::string(line) + "'");
      header = false;
      continue;
    }
    const auto f = text::split_csv_line(line);
    if (f.size() != 7) throw ParseError("expected 7 fields", line_no);
    const auto age = text::parse_int(f[1]);
    if (!age) throw ParseError("malformed age '" + f[1] + "'", line_no);
    Scale scale{};
    try {
      scale = parse_scale(f[2]);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    Cell cell;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = f[3 + k] == "NA" ? std::optional<double>(std::nan(""))
                                      : text::parse_double(f[3 + k]);
      if (!v) throw ParseError("malformed number '" + f[3 + k] + "'", line_no);
      cell.v[k] = *v;
    }
    if (!rows.count(f[0])) pops.push_back(f[0]);
    rows[f[0]][*age][static_cast<std::size_t>(scale)] = cell;
  }
  if (header) throw ParseError("summary is empty");
  if (pops.empty()) throw ParseError("summary has no rows");

  PredictiveSummary s;
  s.populations = pops;
  for (const auto& [age, _] : rows[pops.front()]) s.ages.push_back(age);
  for (std::size_t i = 1; i < s.ages.size(); ++i)
    if (s.ages[i] != s.ages[i - 1] + 1) throw SchemaError("summary ages are not consecutive");
  const auto j = static_cast<Eigen::Index>(pops.size());
  const auto n = static_cast<Eigen::Index>(s.ages.size());
  for (ScaleSummary* sc : {&s.log_rate, &s.rate, &s.death_prob}) {
    sc->mean.resize(j, n);
    sc->median.resize(j, n);
    sc->lower.resize(j, n);
    sc->upper.resize(j, n);
  }
  for (Eigen::Index p = 0; p < j; ++p) {
    const auto& by_age = rows[pops[static_cast<std::size_t>(p)]];
    if (by_age.size() != s.ages.size())
      throw SchemaError("population '" + pops[static_cast<std::size_t>(p)] +
                        "' covers a different age range");
    Eigen::Index c = 0;
    for (const auto& [age, cells] : by_age) {
      if (age != s.ages[static_cast<std::size_t>(c)])
        throw SchemaError("populations cover different ages");
      ScaleSummary* scales[] = {&s.log_rate, &s.rate, &s.death_prob};
      for (std::size_t k = 0; k < 3; ++k) {
        auto& sc = *scales[k];
        const auto& v = cells[k].v;
        sc.mean(p, c) = v[0];
        sc.median(p, c) = v[1];
        sc.lower(p, c) = v[2];
        sc.upper(p, c) = v[3];
      }
      ++c;
    }
  }
  return s;
}

void write_states_csv(std::ostream& out, const MatrixSummary& states,
                      const std::vector<int>& ages) {
  out << "state,age,mean,median,lower,upper\n";
  for (Eigen::Index k = 0; k < states.mean.rows(); ++k)
    for (Eigen::Index a = 0; a < states.mean.cols(); ++a)
      out << k << ',' << ages[static_cast<std::size_t>(a)] << ',' << fmt(states.mean(k, a))
          << ',' << fmt(states.median(k, a)) << ',' << fmt(states.lower(k, a)) << ','
          << fmt(states.upper(k, a)) << '\n';
}

void write_variance_csv(std::ostream& out, const MatrixSummary& v) {
  out << "row,col,mean,median,lower,upper\n";
  for (Eigen::Index r = 0; r < v.mean.rows(); ++r)
    for (Eigen::Index c = 0; c < v.mean.cols(); ++c)
      out << r << ',' << c << ',' << fmt(v.mean(r, c)) << ',' << fmt(v.median(r, c)) << ','
          << fmt(v.lower(r, c)) << ',' << fmt(v.upper(r, c)) << '\n';
}

void write_observed_csv(std::ostream& out, const MortalityTable& table) {
  out << "population,age,deaths,exposure,log_rate,missing\n";
  const auto rates = central_rates(table);
  for (int p = 0; p < table.population_count(); ++p)
    for (int a = 0; a < table.age_count(); ++a)
      out << table.populations[static_cast<std::size_t>(p)] << ','
          << table.ages[static_cast<std::size_t>(a)] << ',' << fmt(table.deaths(p, a)) << ','
          << fmt(table.exposure(p, a)) << ',' << fmt(rates.log_rates(p, a)) << ','
          << (table.missing(p, a) ? 1 : 0) << '\n';
}

void write_draws_csv(std::ostream& out, const PosteriorDraws& d) {
  out << "chain,iteration,age,series,value\n";
  const auto j = static_cast<Eigen::Index>(d.populations.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    const std::string prefix = std::to_string(d.chain[k]) + ',' + std::to_string(d.iteration[k]) + ',';
    for (Eigen::Index a = 0; a < d.theta[k].cols(); ++a)
      for (Eigen::Index s = 0; s < d.theta[k].rows(); ++s)
        out << prefix << d.ages[static_cast<std::size_t>(a)] << ",theta[" << s << "],"
            << fmt(d.theta[k](s, a)) << '\n';
    for (Eigen::Index r = 0; r < j; ++r)
      for (Eigen::Index c = r; c < j; ++c)
        out << prefix << ",V[" << r << ';' << c << "]," << fmt(d.v[k](r, c)) << '\n';
    for (std::size_t m = 0; m < d.missing.size(); ++m)
      out << prefix << d.ages[static_cast<std::size_t>(d.missing[m].age_index)] << ",y_miss["
          << d.populations[static_cast<std::size_t>(d.missing[m].population)] << "],"
          << fmt(d.y_miss[k](static_cast<Eigen::Index>(m))) << '\n';
  }
}

void write_draws_binary(std::ostream& out, const PosteriorDraws& d) {
  out.write(kMagic.data(), kMagic.size());
  const auto j = d.populations.size();
  put_u64(out, d.size());
  put_u64(out, j);
  put_u64(out, d.ages.size());
  put_u64(out, static_cast<std::uint64_t>(d.state_dim));
  put_u64(out, d.missing.size());
  put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(d.ages.empty() ? 0 : d.ages.front())));
  for (const auto& name : d.populations) {
    put_u64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (const auto& m : d.missing) {
    put_u64(out, static_cast<std::uint64_t>(m.population));
    put_u64(out, static_cast<std::uint64_t>(m.age_index));
  }
  for (std::size_t k = 0; k < d.size(); ++k) {
    put_f64(out, d.chain[k]);
    put_f64(out, d.iteration[k]);
    put_matrix(out, d.theta[k]);
    put_matrix(out, d.phi[k]);
    put_matrix(out, d.v[k]);
    put_matrix(out, d.y_miss[k]);
    put_matrix(out, d.terminal_cov[k]);
  }
}

PosteriorDraws read_draws_binary(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw ParseError("not a draw archive (bad magic)");
  PosteriorDraws d;
  const auto count = get_u64(in);
  const auto j = static_cast<Eigen::Index>(get_u64(in));
  const auto n = static_cast<Eigen::Index>(get_u64(in));
  const auto p = static_cast<Eigen::Index>(get_u64(in));
  const auto n_missing = get_u64(in);
  const auto first_age = static_cast<int>(static_cast<std::int64_t>(get_u64(in)));
  if (j <= 0 || n <= 0 || p <= 0 || j > 4096 || p > 8193 || n_missing > static_cast<std::uint64_t>(j * n))
    throw ParseError("draw archive header is inconsistent");
  d.state_dim = static_cast<int>(p);
  for (Eigen::Index a = 0; a < n; ++a) d.ages.push_back(first_age + static_cast<int>(a));
  for (Eigen::Index i = 0; i < j; ++i) {
    const auto len = get_u64(in);
    if (len > 4096) throw ParseError("draw archive population name is too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(len)))
      throw ParseError("draw archive is truncated");
    d.populations.push_back(std::move(name));
  }
  for (std::uint64_t m = 0; m < n_missing; ++m) {
    MissingCell cell;
    cell.population = static_cast<int>(get_u64(in));
    cell.age_index = static_cast<int>(get_u64(in));
    d.missing.push_back(cell);
  }
  for (std::uint64_t k = 0; k < count; ++k) {
    d.chain.push_back(static_cast<int>(get_f64(in)));
    d.iteration.push_back(static_cast<int>(get_f64(in)));
    d.theta.push_back(get_matrix(in, p, n));
    d.phi.push_back(get_matrix(in, j, j));
    d.v.push_back(get_matrix(in, j, j));
    d.y_miss.push_back(get_matrix(in, static_cast<Eigen::Index>(n_missing), 1));
    d.terminal_cov.push_back(get_matrix(in, p, p));
  }
  return d;
}

}  // namespace graduate
