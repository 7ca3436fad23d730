#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "graduate/config.hpp"
#include "graduate/errors.hpp"
#include "graduate/io.hpp"

using namespace graduate;
namespace fs = std::filesystem;

TEST_CASE("configuration parsing") {
  const auto cfg = parse_config(R"(# comment
populations = M, F
common_term = true
prior_mean = -4
prior_scale = 10
d0 = 4
s0_scale = 0.5
level = 0.9
iterations = 300
burn_in = 100
thin = 2
chains = 2
seed = 42

[discount]
ages = 1-5
delta = 0.99

[discount]
ages = 6+
delta = 0.8

[discount]
ages = 10-20
delta = 0.7
population = F   # override
)");
  CHECK(cfg.populations == std::vector<std::string>{"M", "F"});
  CHECK(cfg.common_term);
  CHECK(cfg.prior_mean == std::vector<double>{-4.0});
  CHECK(cfg.prior_scale == 10.0);
  CHECK(cfg.gibbs.iterations == 300);
  CHECK(cfg.gibbs.thin == 2);
  CHECK(cfg.gibbs.seed == 42);
  CHECK(cfg.seed_given);
  REQUIRE(cfg.discounts.size() == 3);
  CHECK(cfg.discounts[1].ages.last == kOpenAge);
  CHECK(cfg.discounts[2].population == std::optional<std::string>("F"));
  CHECK(cfg.quantile_levels().lower == doctest::Approx(0.05));

  const auto spec = build_spec(cfg, 2);
  CHECK(spec.state_dim() == 5);
  CHECK(spec.m0 == Eigen::VectorXd::Constant(5, -4.0));
  CHECK(spec.C0 == Eigen::MatrixXd::Identity(5, 5) * 10.0);
  CHECK(spec.wishart.v0 == 2.5);

  const auto sched = build_schedule(cfg, 1, 104);
  CHECK(sched.at(15, "F") == 0.7);
  CHECK(sched.at(15, "M") == 0.8);
  CHECK(sched.at(104) == 0.8);
}

TEST_CASE("canonical text round-trips") {
  const auto cfg = parse_config("populations = A\n[discount]\nages = 1-50\ndelta = 0.9\n");
  const auto text = format_config(cfg);
  const auto again = parse_config(text);
  CHECK(format_config(again) == text);
  CHECK(again.discounts.size() == 1);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("iterations = many\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[discount]\ndelta = 0.9\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[discount]\nages = 1-5\ndelta = 2\n"), DomainError);
  CHECK_THROWS_AS(load_config("/nonexistent/model.cfg"), ParseError);
  try {
    parse_config("common_term = true\n\nnonsense\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  const auto cfg = parse_config("[discount]\nages = 1-10\ndelta = 0.9\n");
  CHECK_THROWS_AS(build_schedule(cfg, 1, 20), DomainError);
  const auto uniform = build_schedule(parse_config(""), 1, 20);
  CHECK(uniform.at(20) == 0.95);
}

namespace {

PosteriorDraws random_draws(std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  auto rnd = [&](Eigen::Index r, Eigen::Index c) {
    return Eigen::MatrixXd(Eigen::MatrixXd::NullaryExpr(r, c, [&] { return z(gen); }));
  };
  PosteriorDraws d;
  d.populations = {"Male", "Female 2012"};
  d.ages = {3, 4, 5, 6};
  d.state_dim = 5;
  d.missing = {{1, 0}, {1, 2}};
  for (int k = 0; k < 7; ++k) {
    d.theta.push_back(rnd(5, 4));
    d.phi.push_back(rnd(2, 2));
    d.v.push_back(rnd(2, 2));
    d.y_miss.push_back(rnd(2, 1));
    d.terminal_cov.push_back(rnd(5, 5));
    d.chain.push_back(k % 2);
    d.iteration.push_back(100 + k);
  }
  return d;
}

}  // namespace

TEST_CASE("binary draws round-trip exactly") {
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 5; ++rep) {
    const auto d = random_draws(gen);
    std::stringstream buf;
    write_draws_binary(buf, d);
    const auto back = read_draws_binary(buf);
    CHECK(back.populations == d.populations);
    CHECK(back.ages == d.ages);
    CHECK(back.state_dim == d.state_dim);
    REQUIRE(back.size() == d.size());
    REQUIRE(back.missing.size() == 2);
    CHECK(back.missing[1].age_index == 2);
    for (std::size_t k = 0; k < d.size(); ++k) {
      CHECK(back.theta[k] == d.theta[k]);
      CHECK(back.phi[k] == d.phi[k]);
      CHECK(back.v[k] == d.v[k]);
      CHECK(back.y_miss[k] == d.y_miss[k]);
      CHECK(back.terminal_cov[k] == d.terminal_cov[k]);
      CHECK(back.chain[k] == d.chain[k]);
      CHECK(back.iteration[k] == d.iteration[k]);
    }
  }
  std::stringstream junk("NOTDRAWSxxxxxxxx");
  CHECK_THROWS_AS(read_draws_binary(junk), ParseError);
  std::mt19937_64 g2(2);
  std::stringstream cut;
  write_draws_binary(cut, random_draws(g2));
  std::stringstream truncated(cut.str().substr(0, cut.str().size() - 9));
  CHECK_THROWS_AS(read_draws_binary(truncated), ParseError);
}

TEST_CASE("atomic writes and checksums") {
  const auto dir = fs::temp_directory_path() / "graduate_io_test";
  fs::create_directories(dir);
  const auto file = dir / "out.txt";
  write_file_atomic(file, "first");
  write_file_atomic(file, "second");
  CHECK(read_file(file) == "second");
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().filename() == "out.txt");
  fs::remove_all(dir);
  CHECK_THROWS_AS(read_file(dir / "missing"), ParseError);

  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
}

TEST_CASE("summary csv layout") {
  std::vector<Eigen::MatrixXd> draws(3, Eigen::MatrixXd::Constant(2, 2, std::log(0.01)));
  const auto s = summarize_curves(draws, {"A", "B"}, {7, 8}, {});
  std::ostringstream out;
  write_summary_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "population,age,scale,mean,median,lower,upper");
  std::getline(in, line);
  CHECK(line.rfind("A,7,log_rate,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("A,7,rate,0.01", 0) == 0);
  int rows = 2;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12);
}

TEST_CASE("summary csv reads back") {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> z(-3.0, 0.5);
  std::vector<Eigen::MatrixXd> draws(20, Eigen::MatrixXd(2, 3));
  for (auto& m : draws) m = m.unaryExpr([&](double) { return z(gen); });
  const auto s = summarize_curves(draws, {"B", "A"}, {10, 11, 12}, {});
  std::ostringstream out;
  write_summary_csv(out, s);
  const auto back = read_summary_csv(out.str());
  CHECK(back.populations == s.populations);
  CHECK(back.ages == s.ages);
  CHECK(back.log_rate.median == s.log_rate.median);
  CHECK(back.death_prob.upper == s.death_prob.upper);
  CHECK(back.rate.mean == s.rate.mean);
  CHECK_THROWS_AS(read_summary_csv(""), ParseError);
  CHECK_THROWS_AS(read_summary_csv("a,b\n"), SchemaError);
}
