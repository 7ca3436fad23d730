#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "graduate/data.hpp"
#include "graduate/errors.hpp"

using namespace graduate;

namespace {

std::string two_population_csv(int last_age) {
  std::ostringstream out;
  out << "population,age,deaths,exposure\n";
  for (const char* pop : {"M", "F"})
    for (int age = 1; age <= last_age; ++age)
      out << pop << ',' << age << ',' << 3299 + age << ',' << 350000 - 1000 * age << '\n';
  return out.str();
}

}  // namespace

TEST_CASE("two populations over ages 1..104") {
  const auto table = parse_table(two_population_csv(104));
  CHECK(table.population_count() == 2);
  CHECK(table.ages.front() == 1);
  CHECK(table.ages.back() == 104);
  CHECK(table.populations == std::vector<std::string>{"F", "M"});
  CHECK_FALSE(table.missing.any());
}

TEST_CASE("row order does not change the table") {
  const auto a = parse_table("population,age,deaths,exposure\nA,1,1,10\nA,2,2,10\nB,1,3,10\nB,2,4,10\n");
  const auto b = parse_table("population,age,deaths,exposure\nB,2,4,10\nA,2,2,10\nB,1,3,10\nA,1,1,10\n");
  CHECK(a.populations == b.populations);
  CHECK(a.deaths == b.deaths);
  CHECK(a.exposure == b.exposure);
}

TEST_CASE("single population fully observed") {
  const auto t = parse_table("population,age,deaths,exposure\nX,1,5,100\nX,2,6,100\nX,3,7,100\n");
  CHECK(t.age_count() == 3);
  CHECK_FALSE(t.missing.any());
}

TEST_CASE("zero deaths, empty deaths and absent rows are missing") {
  std::string csv = "population,age,deaths,exposure\nQ,4,5,100\n";
  for (int age = 1; age <= 9; ++age) {
    if (age == 4) continue;
    csv += "P," + std::to_string(age) + "," + (age == 7 ? "0" : age == 8 ? "" : "5") + ",100\n";
  }
  const auto t = parse_table(csv);
  CHECK(t.missing(0, t.age_index(7)));
  CHECK(t.missing(0, t.age_index(8)));
  CHECK(t.missing(0, t.age_index(4)));
  CHECK(t.missing.count() == 3 + 8);
  CHECK_FALSE(t.missing(t.population_index("Q"), t.age_index(4)));
  const auto y = central_rates(t);
  CHECK(std::isnan(y.log_rates(0, y.age_index(7))));
  CHECK(t.population_index("P") == 0);
}

TEST_CASE("custom column names") {
  ColumnSchema schema{"sex", "x", "d", "e"};
  const auto t = parse_table("x,sex,e,d\n1,M,100,4\n2,M,100,5\n", schema);
  CHECK(t.deaths(0, 1) == 5.0);
  CHECK(t.exposure(0, 0) == 100.0);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse_table("population,age,deaths\nA,1,2\n"), SchemaError);
  CHECK_THROWS_AS(parse_table("population,age,deaths,exposure\nA,1,2,10\nA,3,2,10\n"), SchemaError);
  CHECK_THROWS_AS(parse_table("population,age,deaths,exposure\nA,1,2,10\nA,1,2,10\n"), ParseError);
  CHECK_THROWS_AS(parse_table("population,age,deaths,exposure\nA,x,2,10\n"), ParseError);
  CHECK_THROWS_AS(parse_table("population,age,deaths,exposure\nA,1,2,0\n"), DomainError);
  CHECK_THROWS_AS(load_table("/nonexistent/table.csv"), ParseError);
  try {
    parse_table("population,age,deaths,exposure\nA,1,2,10\nA,1,2,10\n");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("central rates") {
  const auto t = parse_table(
      "population,age,deaths,exposure\nA,1,10,1000\nA,2,7,7\nA,3,50,200\n");
  const auto y = central_rates(t);
  CHECK(y.log_rates(0, 0) == doctest::Approx(-4.60517).epsilon(1e-6));
  CHECK(y.log_rates(0, 1) == 0.0);
  CHECK(y.log_rates(0, 2) == doctest::Approx(std::log(0.25)));
}

TEST_CASE("death probability transform") {
  CHECK(death_probability(std::log(std::log(2.0))) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(death_probability(-std::numeric_limits<double>::infinity()) >= 0.0);
  CHECK(death_probability(-800.0) < 1e-300);
  CHECK(death_probability(std::log(0.01)) == doctest::Approx(0.0099502).epsilon(1e-6));
  CHECK(death_probability(5.0) < 1.0);
  const std::vector<double> ys{std::log(0.01), std::log(std::log(2.0))};
  const auto qs = death_probabilities(ys);
  CHECK(qs[1] == doctest::Approx(0.5));
}

TEST_CASE("masking ages") {
  const auto table = parse_table(two_population_csv(104));
  const std::vector<AgeRange> a{{4, 8}};
  const auto masked = mask_ages(table, "F", a);
  CHECK(missing_fraction(masked, "F") == doctest::Approx(5.0 / 104));
  CHECK(missing_fraction(masked, "M") == 0.0);
  const std::vector<AgeRange> f{{1, 45}};
  CHECK(missing_fraction(mask_ages(table, "F", f), "F") == doctest::Approx(0.43).epsilon(0.01));
  const auto same = mask_ages(table, "F", {});
  CHECK((same.missing == table.missing).all());
  const std::vector<AgeRange> off{{100, 110}};
  CHECK_THROWS_AS(mask_ages(table, "F", off), DomainError);
  CHECK_THROWS_AS(mask_ages(table, "Z", a), DomainError);
}

TEST_CASE("selecting populations reorders rows") {
  const auto table = parse_table(two_population_csv(5));
  const std::vector<std::string> ids{"M", "F"};
  const auto sel = select_populations(table, ids);
  CHECK(sel.populations == ids);
  CHECK(sel.deaths.row(0) == table.deaths.row(table.population_index("M")));
}

TEST_CASE("age range lists and scenarios") {
  const auto r = parse_age_ranges("4-10,15-17", 104);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == AgeRange{4, 10});
  CHECK(r[1] == AgeRange{15, 17});
  CHECK(parse_age_ranges("86+", 104).front() == AgeRange{86, 104});
  CHECK(parse_age_ranges("7", 104).front() == AgeRange{7, 7});
  CHECK_THROWS_AS(parse_age_ranges("9-3", 104), DomainError);
  CHECK_THROWS_AS(parse_age_ranges("a-b", 104), ParseError);
  CHECK(scenario_ranges('c') == std::vector<AgeRange>{{3, 16}});
  CHECK(scenario_ranges('e') == std::vector<AgeRange>{{1, 16}, {23, 41}});
  CHECK_THROWS_AS(scenario_ranges('z'), DomainError);
}
