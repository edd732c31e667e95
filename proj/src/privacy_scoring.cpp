#include "privrec/privacy_scoring.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "privrec/error.hpp"
#include "privrec/respondent_store.hpp"

namespace privrec {

ChoiceVector resolve_choices(const ChoiceMap& choices, const SettingsSchema& schema) {
  for (const auto& [setting_id, choice_id] : choices) {
    if (!schema.index_of(setting_id)) throw ValidationError(setting_id, "unknown setting");
  }
  ChoiceVector out;
  out.ordinals.reserve(schema.size());
  for (const auto& setting : schema.settings()) {
    auto it = choices.find(setting.id);
    if (it == choices.end()) throw ValidationError(setting.id, "missing setting");
    auto ordinal = setting.ordinal_of(it->second);
    if (!ordinal) throw ValidationError(setting.id, "unknown choice '" + it->second + "'");
    out.ordinals.push_back(static_cast<int>(*ordinal));
  }
  return out;
}

void check_choices(const ChoiceVector& choices, const SettingsSchema& schema) {
  if (choices.ordinals.size() != schema.size()) {
    throw ValidationError("choices", "expected " + std::to_string(schema.size()) + " settings, got " +
                                         std::to_string(choices.ordinals.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const int o = choices.ordinals[i];
    if (o < 0 || static_cast<std::size_t>(o) >= schema.at(i).choice_count()) {
      throw ValidationError(schema.at(i).id, "choice ordinal " + std::to_string(o) + " out of range");
    }
  }
}

ChoiceMap choice_ids(const ChoiceVector& choices, const SettingsSchema& schema) {
  check_choices(choices, schema);
  ChoiceMap out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out.emplace(schema.at(i).id, schema.at(i).choices[static_cast<std::size_t>(choices.ordinals[i])].id);
  }
  return out;
}

double total_score(const ChoiceVector& choices, const SettingsSchema& schema) {
  check_choices(choices, schema);
  double weighted = 0.0, total_weight = 0.0;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& s = schema.at(i);
    weighted += s.weight * s.choices[static_cast<std::size_t>(choices.ordinals[i])].grade;
    total_weight += s.weight;
  }
  // Weights sum to 10 only up to rounding; dividing by the same sum makes
  // the all-most-private configuration exactly 10.
  return std::clamp(SettingsSchema::kMaxScore * (weighted / total_weight), 0.0, SettingsSchema::kMaxScore);
}

double total_score(const ChoiceMap& choices, const SettingsSchema& schema) {
  return total_score(resolve_choices(choices, schema), schema);
}

ColorBand color_band(double grade) {
  if (!(grade >= 0.0 && grade <= 1.0)) throw ValidationError("grade", "out of range [0,1]");
  if (grade >= 0.75) return ColorBand::green;
  if (grade >= 0.5) return ColorBand::yellow;
  if (grade >= 0.25) return ColorBand::orange;
  return ColorBand::red;
}

std::string_view to_string(ColorBand band) {
  switch (band) {
    case ColorBand::red: return "red";
    case ColorBand::orange: return "orange";
    case ColorBand::yellow: return "yellow";
    case ColorBand::green: return "green";
  }
  return "?";
}

ScoreDistribution score_distribution(std::span<const double> scores) {
  if (scores.empty()) throw UndefinedStatisticError("score distribution of an empty dataset");

  ScoreDistribution d;
  d.n = scores.size();
  d.histogram.assign(ScoreDistribution::kBins, 0);

  double sum = 0.0;
  for (double s : scores) sum += s;
  d.mean = sum / static_cast<double>(d.n);

  double ss = 0.0;
  for (double s : scores) ss += (s - d.mean) * (s - d.mean);
  d.stddev = d.n > 1 ? std::sqrt(ss / static_cast<double>(d.n - 1)) : 0.0;

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = d.n / 2;
  d.median = d.n % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;

  for (double s : scores) {
    auto bin = static_cast<std::size_t>(std::floor(s / ScoreDistribution::kBinWidth));
    d.histogram[std::min(bin, ScoreDistribution::kBins - 1)]++;
  }
  return d;
}

ScoreDistribution score_distribution(const Dataset& dataset, const SettingsSchema& schema) {
  std::vector<double> scores;
  scores.reserve(dataset.records.size());
  for (const auto& r : dataset.records) scores.push_back(total_score(r.choices, schema));
  return score_distribution(scores);
}

nlohmann::json distribution_to_json(const ScoreDistribution& d) {
  nlohmann::json bins = nlohmann::json::array();
  for (std::size_t i = 0; i < d.histogram.size(); ++i) {
    bins.push_back({{"lower", static_cast<double>(i) * ScoreDistribution::kBinWidth}, {"count", d.histogram[i]}});
  }
  return {{"n", d.n}, {"mean", d.mean}, {"stddev", d.stddev}, {"median", d.median}, {"histogram", std::move(bins)}};
}

}  // namespace privrec
