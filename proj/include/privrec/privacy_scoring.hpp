#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "privrec/settings_schema.hpp"

namespace privrec {

struct Dataset;

/// A complete settings configuration stored as one choice ordinal per
/// schema setting, in schema order.
struct ChoiceVector {
  std::vector<int> ordinals;

  bool operator==(const ChoiceVector&) const = default;
};

/// Setting id -> choice id, the form used in documents.
using ChoiceMap = std::map<std::string, std::string>;

/// Resolves ids against the schema. Throws ValidationError naming the
/// setting for a missing setting, unknown setting or unknown choice.
ChoiceVector resolve_choices(const ChoiceMap& choices, const SettingsSchema& schema);
ChoiceMap choice_ids(const ChoiceVector& choices, const SettingsSchema& schema);
/// Throws ValidationError if `choices` does not fit `schema`.
void check_choices(const ChoiceVector& choices, const SettingsSchema& schema);

/// Sum over settings of weight x grade of the chosen option, in [0, 10].
double total_score(const ChoiceVector& choices, const SettingsSchema& schema);
double total_score(const ChoiceMap& choices, const SettingsSchema& schema);

enum class ColorBand { red, orange, yellow, green };

/// Quartile bands: >= 0.75 green, >= 0.5 yellow, >= 0.25 orange, else red.
ColorBand color_band(double grade);
std::string_view to_string(ColorBand band);

struct ScoreDistribution {
  static constexpr double kBinWidth = 0.5;
  static constexpr std::size_t kBins = 20;  // [0,0.5), ..., [9.5,10]

  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1); 0 for a single value
  double median = 0.0;
  std::vector<std::size_t> histogram;
};

ScoreDistribution score_distribution(std::span<const double> scores);
ScoreDistribution score_distribution(const Dataset& dataset, const SettingsSchema& schema);

nlohmann::json distribution_to_json(const ScoreDistribution& dist);

}  // namespace privrec
