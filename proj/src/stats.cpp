#include "privrec/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "privrec/error.hpp"

namespace privrec {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UndefinedStatisticError("pearson: series lengths differ");
  if (x.size() < 3) throw UndefinedStatisticError("pearson: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedStatisticError("pearson: constant series has no correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz), valid for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw UndefinedStatisticError("incomplete beta: continued fraction did not converge");
}

// I_x(a,b) given both x and 1 - x, so callers can pass an accurately formed
// complement.
double incomplete_beta(double a, double b, double x, double one_minus_x) {
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(one_minus_x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw UndefinedStatisticError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw UndefinedStatisticError("incomplete beta: x outside [0,1]");
  return incomplete_beta(a, b, x, 1.0 - x);
}

double p_value(double r, std::size_t n) {
  if (n < 3) throw UndefinedStatisticError("p-value: need n >= 3");
  if (!(std::abs(r) <= 1.0)) throw UndefinedStatisticError("p-value: |r| > 1");
  if (r == 0.0) return 1.0;
  if (std::abs(r) == 1.0) return 0.0;
  // With t^2 = r^2 (n-2) / (1-r^2), the two-tailed tail mass of Student's t
  // is I_{df/(df+t^2)}(df/2, 1/2) and df/(df+t^2) reduces to 1 - r^2.
  const double df = static_cast<double>(n - 2);
  const double r2 = r * r;
  const double x = (1.0 - r) * (1.0 + r);
  return std::clamp(incomplete_beta(df / 2.0, 0.5, x, r2), 0.0, 1.0);
}

std::string_view significance_stars(double p) {
  if (p <= 0.01) return "**";
  if (p <= 0.05) return "*";
  return "";
}

namespace {

std::vector<double> scores_of(const Dataset& dataset, const SettingsSchema& schema) {
  std::vector<double> scores;
  scores.reserve(dataset.size());
  for (const auto& r : dataset.records) scores.push_back(total_score(r.choices, schema));
  return scores;
}

bool is_constant(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace

std::vector<CorrelationResult> correlation_report(const Dataset& dataset, const SettingsSchema& schema) {
  if (dataset.empty()) throw UndefinedStatisticError("correlation report of an empty dataset");
  if (dataset.size() < 3) throw UndefinedStatisticError("correlation report needs at least 3 records");

  const auto scores = scores_of(dataset, schema);
  const bool flat_scores = is_constant(scores);

  std::vector<CorrelationResult> out;
  for (std::string_view name : coded_attribute_names()) {
    CorrelationResult row;
    row.attribute = std::string(name);
    row.n = dataset.size();
    std::vector<double> values;
    values.reserve(dataset.size());
    for (const auto& r : dataset.records) values.push_back(coded_attribute_value(r.coded, name));
    if (!flat_scores && !is_constant(values)) {
      row.r = pearson(values, scores);
      row.p = p_value(*row.r, row.n);
    }
    out.push_back(std::move(row));
  }
  return out;
}

GroupingAttribute parse_grouping(std::string_view name) {
  if (name == "age" || name == "age_decade") return GroupingAttribute::age;
  if (name == "concern") return GroupingAttribute::concern;
  throw ValidationError("attribute", "cannot group by '" + std::string(name) + "'");
}

GroupMeansReport group_means(const Dataset& dataset, const SettingsSchema& schema, GroupingAttribute attribute) {
  if (dataset.empty()) throw UndefinedStatisticError("group means of an empty dataset");

  struct Acc {
    std::size_t count = 0;
    double sum = 0.0;
  };
  std::map<int, Acc> groups;
  for (const auto& r : dataset.records) {
    const int key = attribute == GroupingAttribute::age ? r.coded.age_decade : r.coded.concern;
    auto& g = groups[key];
    g.count++;
    g.sum += total_score(r.choices, schema);
  }

  bool merged = false;
  if (attribute == GroupingAttribute::age) {
    auto oldest = groups.find(70);
    if (oldest != groups.end() && oldest->second.count < kMinAgeGroupSize) {
      auto& target = groups[60];
      target.count += oldest->second.count;
      target.sum += oldest->second.sum;
      groups.erase(oldest);
      merged = true;
    }
  }

  GroupMeansReport report;
  report.attribute = attribute;
  for (const auto& [key, acc] : groups) {
    std::string label;
    if (attribute == GroupingAttribute::concern) label = std::to_string(key);
    else if (key == 60 && merged) label = "55+";
    else label = std::string(kAgeGroups.at(static_cast<std::size_t>(key / 10 - 2)));
    report.groups.push_back({std::move(label), acc.count, acc.sum / static_cast<double>(acc.count)});
  }
  return report;
}

AnalysisReport analyze(const Dataset& dataset, const SettingsSchema& schema) {
  AnalysisReport report;
  report.correlations = correlation_report(dataset, schema);
  report.distribution = score_distribution(dataset, schema);
  report.by_age = group_means(dataset, schema, GroupingAttribute::age);
  report.by_concern = group_means(dataset, schema, GroupingAttribute::concern);
  return report;
}

namespace {

nlohmann::json groups_to_json(const GroupMeansReport& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : g.groups) rows.push_back({{"label", row.label}, {"count", row.count}, {"mean_score", row.mean_score}});
  return rows;
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

nlohmann::json analysis_to_json(const AnalysisReport& report) {
  nlohmann::json correlations = nlohmann::json::array();
  for (const auto& c : report.correlations) {
    if (c.skipped()) {
      correlations.push_back({{"attribute", c.attribute}, {"n", c.n}, {"skipped", true}});
    } else {
      correlations.push_back({{"attribute", c.attribute},
                              {"n", c.n},
                              {"r", *c.r},
                              {"p", *c.p},
                              {"stars", significance_stars(*c.p)}});
    }
  }
  return {{"correlations", std::move(correlations)},
          {"distribution", distribution_to_json(report.distribution)},
          {"group_means", {{"age", groups_to_json(report.by_age)}, {"concern", groups_to_json(report.by_concern)}}}};
}

std::string analysis_to_text(const AnalysisReport& report) {
  const auto& d = report.distribution;
  std::string out;
  out += format("Privacy score distribution (n=%zu)\n", d.n);
  out += format("  mean    %6.2f\n  stddev  %6.2f\n  median  %6.2f\n\n", d.mean, d.stddev, d.median);

  out += "Correlation with privacy score\n";
  out += format("  %-18s %7s  %-11s %6s\n", "attribute", "r", "p", "n");
  for (const auto& c : report.correlations) {
    if (c.skipped()) {
      out += format("  %-18s %7s  %-11s %6zu\n", c.attribute.c_str(), "-", "skipped", c.n);
    } else {
      const std::string p = format("%.2e", *c.p) + std::string(significance_stars(*c.p));
      out += format("  %-18s %7.3f  %-11s %6zu\n", c.attribute.c_str(), *c.r, p.c_str(), c.n);
    }
  }
  out += "  * p <= 0.05, ** p <= 0.01\n";

  auto groups = [&](const char* title, const GroupMeansReport& g) {
    out += format("\n%s\n", title);
    for (const auto& row : g.groups) out += format("  %-6s n=%-5zu %6.2f\n", row.label.c_str(), row.count, row.mean_score);
  };
  groups("Mean score by age group", report.by_age);
  groups("Mean score by privacy concern", report.by_concern);

  out += "\nScore histogram\n";
  for (std::size_t i = 0; i < d.histogram.size(); ++i) {
    const double lo = static_cast<double>(i) * ScoreDistribution::kBinWidth;
    out += format("  [%4.1f, %4.1f%c %5zu\n", lo, lo + ScoreDistribution::kBinWidth,
                  i + 1 == d.histogram.size() ? ']' : ')', d.histogram[i]);
  }
  return out;
}

}  // namespace privrec
