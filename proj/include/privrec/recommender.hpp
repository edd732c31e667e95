#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "privrec/attribute_coding.hpp"
#include "privrec/privacy_scoring.hpp"
#include "privrec/respondent_store.hpp"
#include "privrec/settings_schema.hpp"

namespace privrec {

struct KnnConfig {
  std::size_t k = 18;
  int satisfaction_threshold = 0;
  NormalizationSpec normalization{};
};

enum class RecommendationMode { knn, popular };
std::string_view to_string(RecommendationMode mode);
RecommendationMode parse_mode(std::string_view text);

struct RecommendedSetting {
  std::string setting_id;
  std::string choice_id;
  std::size_t ordinal = 0;
  double grade = 0.0;
  ColorBand color = ColorBand::red;

  bool operator==(const RecommendedSetting&) const = default;
};

struct Recommendation {
  RecommendationMode mode = RecommendationMode::knn;
  std::vector<RecommendedSetting> settings;  // schema order
  std::vector<std::string> neighbor_ids;     // knn only, nearest first
  double total_score = 0.0;

  ChoiceVector choices() const;
  bool operator==(const Recommendation&) const = default;
};

/// Euclidean distance; throws ValidationError when the layouts differ.
double distance(const FeatureVector& a, const FeatureVector& b);

/// Nearest-neighbour recommendation:
///   1. drop records with satisfaction <= config.satisfaction_threshold;
///   2. take the k records closest to `query` (ties by ascending id);
///   3. per setting, average the neighbours' choice ordinals and round half
///      away from zero;
///   4. map the ordinal back to the schema choice.
/// Throws InsufficientDataError when fewer than k records survive step 1.
Recommendation knn_recommend(const FeatureVector& query, const Dataset& dataset, const KnnConfig& config,
                             const SettingsSchema& schema);

/// Per setting, the most frequently chosen option over the whole dataset
/// (unfiltered); ties go to the more private option.
Recommendation popular_recommend(const Dataset& dataset, const SettingsSchema& schema);

/// Fills grade, color and total score for a set of chosen ordinals.
Recommendation make_recommendation(RecommendationMode mode, const ChoiceVector& choices,
                                   const SettingsSchema& schema);

/// Client-facing document. Neighbour ids are only included on request.
nlohmann::json recommendation_to_json(const Recommendation& rec, const SettingsSchema& schema,
                                      bool include_neighbors = false);

}  // namespace privrec
