#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "privrec/privacy_scoring.hpp"
#include "privrec/respondent_store.hpp"
#include "privrec/settings_schema.hpp"

namespace privrec {

/// Pearson product-moment correlation. Throws UndefinedStatisticError for
/// mismatched lengths, fewer than 3 points or a constant series.
double pearson(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed p-value of H0: rho = 0 via t = r sqrt((n-2)/(1-r^2)) on n-2
/// degrees of freedom. Exactly 1 at r = 0 and exactly 0 at |r| = 1.
double p_value(double r, std::size_t n);

/// "**" for p <= 0.01, "*" for p <= 0.05, "" otherwise.
std::string_view significance_stars(double p);

struct CorrelationResult {
  std::string attribute;
  std::size_t n = 0;
  // Absent when the attribute is constant over the dataset.
  std::optional<double> r;
  std::optional<double> p;

  bool skipped() const noexcept { return !r.has_value(); }
};

/// One row per coded attribute (coded_attribute_names() order) correlated
/// against each record's total privacy score.
std::vector<CorrelationResult> correlation_report(const Dataset& dataset, const SettingsSchema& schema);

enum class GroupingAttribute { age, concern };
GroupingAttribute parse_grouping(std::string_view name);

struct GroupMean {
  std::string label;
  std::size_t count = 0;
  double mean_score = 0.0;
};

struct GroupMeansReport {
  GroupingAttribute attribute = GroupingAttribute::age;
  std::vector<GroupMean> groups;  // ascending by attribute value
};

/// Mean total score per distinct attribute value. For age, the 70 group is
/// folded into the 60 group (labelled "55+") when it has fewer than
/// kMinAgeGroupSize records.
GroupMeansReport group_means(const Dataset& dataset, const SettingsSchema& schema, GroupingAttribute attribute);
inline constexpr std::size_t kMinAgeGroupSize = 5;

/// Full analysis of a dataset: correlations, score distribution and group
/// means. The document and the text rendering are what the CLI and the
/// HTTP service both emit.
struct AnalysisReport {
  std::vector<CorrelationResult> correlations;
  ScoreDistribution distribution;
  GroupMeansReport by_age;
  GroupMeansReport by_concern;
};

AnalysisReport analyze(const Dataset& dataset, const SettingsSchema& schema);
nlohmann::json analysis_to_json(const AnalysisReport& report);
std::string analysis_to_text(const AnalysisReport& report);

}  // namespace privrec
