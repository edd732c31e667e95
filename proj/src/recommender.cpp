#include "privrec/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "privrec/error.hpp"

namespace privrec {

std::string_view to_string(RecommendationMode mode) {
  return mode == RecommendationMode::knn ? "knn" : "popular";
}

RecommendationMode parse_mode(std::string_view text) {
  if (text == "knn") return RecommendationMode::knn;
  if (text == "popular") return RecommendationMode::popular;
  throw ValidationError("mode", "expected knn or popular, got '" + std::string(text) + "'");
}

ChoiceVector Recommendation::choices() const {
  ChoiceVector out;
  for (const auto& s : settings) out.ordinals.push_back(static_cast<int>(s.ordinal));
  return out;
}

double distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.components.size() != b.components.size() || a.normalized != b.normalized) {
    throw ValidationError("features", "feature vector layouts differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i) {
    const double diff = a.components[i] - b.components[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

Recommendation make_recommendation(RecommendationMode mode, const ChoiceVector& choices,
                                   const SettingsSchema& schema) {
  check_choices(choices, schema);
  Recommendation rec;
  rec.mode = mode;
  rec.settings.reserve(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& setting = schema.at(i);
    const auto ordinal = static_cast<std::size_t>(choices.ordinals[i]);
    const auto& choice = choice_by_ordinal(setting, ordinal);
    rec.settings.push_back({setting.id, choice.id, ordinal, choice.grade, color_band(choice.grade)});
  }
  rec.total_score = total_score(choices, schema);
  return rec;
}

namespace {

// Round-half-away-from-zero of sum / count for nonnegative integer sums,
// computed exactly in integers.
int rounded_mean(long long sum, long long count) { return static_cast<int>((2 * sum + count) / (2 * count)); }

}  // namespace

Recommendation knn_recommend(const FeatureVector& query, const Dataset& dataset, const KnnConfig& config,
                             const SettingsSchema& schema) {
  if (config.k == 0) throw ValidationError("k", "must be at least 1");

  struct Candidate {
    double dist;
    const RespondentRecord* record;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    if (r.satisfaction() <= config.satisfaction_threshold) continue;
    candidates.push_back({distance(query, build_feature_vector(r.coded, config.normalization)), &r});
  }
  if (candidates.size() < config.k) throw InsufficientDataError(candidates.size(), config.k);

  auto closer = [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.record->id < b.record->id;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(config.k),
                    candidates.end(), closer);
  candidates.resize(config.k);

  ChoiceVector chosen;
  chosen.ordinals.resize(schema.size());
  for (std::size_t s = 0; s < schema.size(); ++s) {
    long long sum = 0;
    for (const auto& c : candidates) sum += c.record->choices.ordinals.at(s);
    chosen.ordinals[s] = rounded_mean(sum, static_cast<long long>(config.k));
  }

  auto rec = make_recommendation(RecommendationMode::knn, chosen, schema);
  rec.neighbor_ids.reserve(config.k);
  for (const auto& c : candidates) rec.neighbor_ids.push_back(c.record->id);
  return rec;
}

Recommendation popular_recommend(const Dataset& dataset, const SettingsSchema& schema) {
  if (dataset.empty()) throw InsufficientDataError(0, 1);

  ChoiceVector chosen;
  chosen.ordinals.resize(schema.size());
  for (std::size_t s = 0; s < schema.size(); ++s) {
    std::vector<std::size_t> counts(schema.at(s).choice_count(), 0);
    for (const auto& r : dataset.records) counts.at(static_cast<std::size_t>(r.choices.ordinals.at(s)))++;
    // Scan from the most private option so equal counts keep the higher grade.
    std::size_t best = counts.size() - 1;
    for (std::size_t o = counts.size(); o-- > 0;) {
      if (counts[o] > counts[best]) best = o;
    }
    chosen.ordinals[s] = static_cast<int>(best);
  }
  return make_recommendation(RecommendationMode::popular, chosen, schema);
}

nlohmann::json recommendation_to_json(const Recommendation& rec, const SettingsSchema& schema,
                                      bool include_neighbors) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rec.settings.size(); ++i) {
    const auto& s = rec.settings[i];
    const auto& setting = schema.at(i);
    rows.push_back({{"setting_id", s.setting_id},
                    {"setting_label", setting.label},
                    {"choice_id", s.choice_id},
                    {"choice_label", setting.choices.at(s.ordinal).label},
                    {"grade", s.grade},
                    {"color", to_string(s.color)}});
  }
  nlohmann::json doc = {{"mode", to_string(rec.mode)},
                        {"schema_version", schema.version()},
                        {"settings", std::move(rows)},
                        {"total_score", rec.total_score}};
  if (include_neighbors) doc["neighbor_ids"] = rec.neighbor_ids;
  return doc;
}

}  // namespace privrec
