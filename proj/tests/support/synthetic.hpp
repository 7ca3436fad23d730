#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace testing_support {

/// Log central rate with an infant term, an accident hump and Gompertz
/// senescence. `shift` moves the senescent curve along the age axis.
inline double shaped_log_rate(int age, double shift, double hump) {
  const double x = static_cast<double>(age);
  const double infant = 0.004 * std::exp(-1.2 * x);
  const double accident = hump * std::exp(-0.5 * std::pow((x - 22.0) / 6.0, 2));
  const double senescent = 2.5e-5 * std::exp(0.095 * (x + shift));
  return std::log(infant + accident + senescent + 8e-5);
}

inline double exposure_at(int age) {
  return 350000.0 * std::exp(-std::pow(age / 85.0, 6)) + 50.0;
}

struct SyntheticPopulation {
  std::string name;
  std::vector<double> log_rate;  // one per age
};

/// Long-format CSV with Poisson deaths drawn around the given rates.
inline std::string poisson_csv(const std::vector<SyntheticPopulation>& pops, int first_age,
                               std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::ostringstream out;
  out << "population,age,deaths,exposure\n";
  for (const auto& p : pops) {
    for (std::size_t i = 0; i < p.log_rate.size(); ++i) {
      const int age = first_age + static_cast<int>(i);
      const double e = exposure_at(age);
      std::poisson_distribution<long> deaths(std::exp(p.log_rate[i]) * e);
      long d = deaths(gen);
      if (d == 0) d = 1;
      out << p.name << ',' << age << ',' << d << ',' << e << '\n';
    }
  }
  return out.str();
}

/// Long-format CSV whose log central rates equal `y` exactly (J x n), with
/// a unit exposure scale chosen so deaths stay positive.
inline std::string exact_csv(const std::vector<std::string>& names, const Eigen::MatrixXd& y,
                             int first_age) {
  std::ostringstream out;
  out.precision(17);
  out << "population,age,deaths,exposure\n";
  for (Eigen::Index j = 0; j < y.rows(); ++j)
    for (Eigen::Index a = 0; a < y.cols(); ++a)
      out << names[static_cast<std::size_t>(j)] << ',' << first_age + a << ','
          << std::exp(y(j, a)) * 1e6 << ",1000000\n";
  return out.str();
}

inline std::vector<SyntheticPopulation> two_sexes(int first_age, int last_age) {
  std::vector<SyntheticPopulation> pops{{"M", {}}, {"F", {}}};
  for (int age = first_age; age <= last_age; ++age) {
    pops[0].log_rate.push_back(shaped_log_rate(age, 4.0, 8e-4));
    pops[1].log_rate.push_back(shaped_log_rate(age, 0.0, 2.5e-4));
  }
  return pops;
}

}  // namespace testing_support
