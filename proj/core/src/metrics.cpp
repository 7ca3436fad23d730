#include "graduate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "graduate/errors.hpp"
#include "graduate/text.hpp"

namespace graduate {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("metric inputs differ in length");
  if (a == 0) throw DomainError("metric inputs are empty");
}

double transform(double log_rate, Scale scale) {
  switch (scale) {
    case Scale::kLogRate: return log_rate;
    case Scale::kRate: return std::exp(log_rate);
    case Scale::kDeathProb: return death_probability(log_rate);
  }
  return log_rate;
}

}  // namespace

double mspe(std::span<const double> observed, std::span<const double> predicted) {
  require_same_length(observed.size(), predicted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - predicted[i];
    sum += d * d;
  }
  return sum / static_cast<double>(observed.size());
}

double mape(std::span<const double> observed, std::span<const double> predicted) {
  require_same_length(observed.size(), predicted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) sum += std::abs(observed[i] - predicted[i]);
  return sum / static_cast<double>(observed.size());
}

IntervalWidths wci(std::span<const double> upper, std::span<const double> lower) {
  require_same_length(upper.size(), lower.size());
  IntervalWidths out;
  out.per_cell.reserve(upper.size());
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (upper[i] < lower[i])
      throw DomainError("interval upper bound below lower bound at cell " + std::to_string(i));
    out.per_cell.push_back(upper[i] - lower[i]);
  }
  double sum = 0.0;
  for (double w : out.per_cell) sum += w;
  out.mean = sum / static_cast<double>(out.per_cell.size());
  return out;
}

ComparisonReport compare(std::span<const ComparisonInput> fits, const MissingMask& cells,
                         Scale scale) {
  ComparisonReport report;
  report.scale = scale;
  if (fits.empty()) throw DomainError("nothing to compare");
  if (cells.count() == 0) throw DomainError("no held-out cells to evaluate");

  for (const auto& fit : fits) {
    if (!fit.summary || !fit.heldout) throw DomainError("comparison input is incomplete");
    const auto& held = *fit.heldout;
    if (cells.rows() != held.population_count() || cells.cols() != held.age_count())
      throw DomainError("evaluation mask does not match the held-out surface");
    const auto& sc = scale_of(*fit.summary, scale);
    std::vector<double> truth, median, upper, lower;
    for (Eigen::Index p = 0; p < cells.rows(); ++p) {
      for (Eigen::Index a = 0; a < cells.cols(); ++a) {
        if (!cells(p, a)) continue;
        const auto& pop = held.populations[static_cast<std::size_t>(p)];
        const int age = held.ages[static_cast<std::size_t>(a)];
        const auto it = std::find(fit.summary->populations.begin(),
                                  fit.summary->populations.end(), pop);
        if (it == fit.summary->populations.end() || age < fit.summary->ages.front() ||
            age > fit.summary->ages.back())
          throw DomainError("fit '" + fit.model + "' does not cover cell (" + pop + ", " +
                            std::to_string(age) + ")");
        const auto r = it - fit.summary->populations.begin();
        const auto c = fit.summary->age_index(age);
        const double y = held.log_rates(p, a);
        if (!std::isfinite(y))
          throw DomainError("held-out value missing at (" + pop + ", " + std::to_string(age) + ")");
        truth.push_back(transform(y, scale));
        median.push_back(sc.median(r, c));
        upper.push_back(sc.upper(r, c));
        lower.push_back(sc.lower(r, c));
      }
    }
    ComparisonRow row;
    row.model = fit.model;
    row.scenario = fit.scenario;
    row.percent_missing = fit.percent_missing;
    row.mspe = mspe(truth, median);
    row.mape = mape(truth, median);
    row.wci = wci(upper, lower).mean;
    row.cells = static_cast<int>(truth.size());
    report.rows.push_back(row);
  }

  std::map<std::string, std::vector<std::size_t>> by_scenario;
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    by_scenario[report.rows[i].scenario].push_back(i);
  for (const auto& [scenario, idx] : by_scenario) {
    bool tie = false;
    auto flag = [&](double ComparisonRow::*metric, bool ComparisonRow::*best) {
      double lo = report.rows[idx.front()].*metric;
      for (auto i : idx) lo = std::min(lo, report.rows[i].*metric);
      int winners = 0;
      for (auto i : idx) {
        if (report.rows[i].*metric == lo) {
          report.rows[i].*best = true;
          ++winners;
        }
      }
      if (winners > 1) tie = true;
    };
    flag(&ComparisonRow::mspe, &ComparisonRow::best_mspe);
    flag(&ComparisonRow::mape, &ComparisonRow::best_mape);
    flag(&ComparisonRow::wci, &ComparisonRow::best_wci);
    if (tie && idx.size() > 1) report.ties.push_back(scenario);
  }
  return report;
}

void write_report_csv(std::ostream& out, const ComparisonReport& report) {
  out << "model,scenario,percent_missing,scale,cells,mspe,mape,wci,best_mspe,best_mape,best_wci\n";
  for (const auto& r : report.rows) {
    out << r.model << ',' << r.scenario << ',' << text::format_double(r.percent_missing) << ','
        << scale_name(report.scale) << ',' << r.cells << ',' << text::format_double(r.mspe)
        << ',' << text::format_double(r.mape) << ',' << text::format_double(r.wci) << ','
        << r.best_mspe << ',' << r.best_mape << ',' << r.best_wci << '\n';
  }
}

void write_report_table(std::ostream& out, const ComparisonReport& report) {
  auto cell = [](double v, bool best) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(5) << v << (best ? "*" : " ");
    return s.str();
  };
  out << "Scale: " << scale_name(report.scale) << " (* = best in scenario)\n";
  out << std::left << std::setw(22) << "model" << std::setw(10) << "scenario" << std::setw(11)
      << "% missing" << std::setw(7) << "cells" << std::setw(12) << "mspe" << std::setw(12)
      << "mape" << std::setw(12) << "wci" << '\n';
  for (const auto& r : report.rows) {
    std::ostringstream pct;
    pct << std::fixed << std::setprecision(1) << r.percent_missing;
    out << std::left << std::setw(22) << r.model << std::setw(10) << r.scenario << std::setw(11)
        << pct.str() << std::setw(7) << r.cells << std::setw(12) << cell(r.mspe, r.best_mspe)
        << std::setw(12) << cell(r.mape, r.best_mape) << std::setw(12) << cell(r.wci, r.best_wci)
        << '\n';
  }
  for (const auto& s : report.ties) out << "tie in scenario " << s << '\n';
}

}  // namespace graduate
