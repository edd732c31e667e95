#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace privrec {

// ---------------------------------------------------------------------------
// Closed vocabularies of the survey.

inline constexpr std::array<std::string_view, 6> kAgeGroups = {"18-24", "25-34", "35-44",
                                                                "45-54", "55-64", "65+"};
inline constexpr std::array<std::string_view, 2> kGenders = {"male", "female"};
inline constexpr std::array<std::string_view, 5> kEthnicities = {"white", "black", "asian", "hispanic",
                                                                 "other"};
inline constexpr std::array<std::string_view, 5> kMaritalStatuses = {"single", "in_relationship", "married",
                                                                     "divorced", "widowed"};

inline constexpr int kLikertMin = 0;  // concern, satisfaction
inline constexpr int kLikertMax = 4;
inline constexpr int kItemMin = 1;  // Mini-IPIP answers
inline constexpr int kItemMax = 5;
inline constexpr int kTraitMin = 4;
inline constexpr int kTraitMax = 20;

/// Landmark decade of an age group: 18-24 -> 20, 25-34 -> 30, ..., 65+ -> 70.
int code_age(std::string_view age_group);
/// female -> 1, male -> 0.
int code_gender(std::string_view gender);
/// 0/1 vector with a single 1 at the category's position in `vocabulary`.
std::vector<int> one_hot(std::string_view category, std::span<const std::string_view> vocabulary);

/// Sum of four 1..5 item answers, reverse-keyed items scored as 6 - v.
int score_trait(const std::array<int, 4>& items, const std::array<bool, 4>& reversed);

// ---------------------------------------------------------------------------
// Mini-IPIP questionnaire.

enum class Trait { openness, conscientiousness, extraversion, agreeableness, neuroticism };
inline constexpr std::array<Trait, 5> kTraits = {Trait::openness, Trait::conscientiousness, Trait::extraversion,
                                                 Trait::agreeableness, Trait::neuroticism};
std::string_view trait_name(Trait trait);

struct TraitScores {
  int openness = kTraitMin;
  int conscientiousness = kTraitMin;
  int extraversion = kTraitMin;
  int agreeableness = kTraitMin;
  int neuroticism = kTraitMin;

  int get(Trait trait) const noexcept;
  int& get(Trait trait) noexcept;
  bool operator==(const TraitScores&) const = default;
};

struct QuestionnaireItem {
  std::string id;
  std::string prompt;
  Trait trait = Trait::openness;
  bool reverse = false;
};

/// Item catalogue and keying; drives prompts and trait scoring. Exactly four
/// items per trait.
class Questionnaire {
 public:
  static Questionnaire from_json(const nlohmann::json& doc);
  /// Bundled standard-key questionnaire (data/questionnaire.json).
  static const Questionnaire& standard();

  const std::string& version() const noexcept { return version_; }
  const std::vector<QuestionnaireItem>& items() const noexcept { return items_; }
  std::array<const QuestionnaireItem*, 4> items_for(Trait trait) const;
  const QuestionnaireItem* find(std::string_view item_id) const noexcept;
  /// The full document, as served to clients.
  const nlohmann::json& document() const noexcept;

 private:
  std::string version_;
  std::vector<QuestionnaireItem> items_;
  std::shared_ptr<const nlohmann::json> document_;
};

// ---------------------------------------------------------------------------
// Intake and coded attributes.

/// Answers as submitted. Every field is optional here so that validation can
/// report each missing or malformed answer by name.
struct RawIntake {
  std::optional<std::string> age_group;
  std::optional<std::string> gender;
  std::optional<std::string> ethnicity;
  std::optional<std::string> marital_status;
  std::map<std::string, int> ipip;  // item id -> 1..5
  std::optional<int> concern;
  std::optional<int> satisfaction;

  bool operator==(const RawIntake&) const = default;
};

/// Reads the intake document; wrongly typed fields raise IntakeError.
RawIntake intake_from_json(const nlohmann::json& doc);
nlohmann::json intake_to_json(const RawIntake& intake);

struct CodedAttributes {
  int age_decade = 20;
  int gender_female = 0;
  std::vector<int> ethnicity_onehot;
  std::vector<int> marital_onehot;
  TraitScores traits;
  int concern = 0;
  std::optional<int> satisfaction;

  std::size_t ethnicity_index() const;
  bool operator==(const CodedAttributes&) const = default;
};

/// Full survey intake: all demographics, all 20 items, concern. Throws
/// IntakeError listing every invalid field.
CodedAttributes code_survey_intake(const RawIntake& intake,
                                   const Questionnaire& questionnaire = Questionnaire::standard());

/// The attributes the recommender matches on.
struct FeatureInputs {
  int age_decade = 20;
  std::size_t ethnicity_index = 0;
  int concern = 0;
  int neuroticism = kTraitMin;

  bool operator==(const FeatureInputs&) const = default;
};

FeatureInputs feature_inputs(const CodedAttributes& coded);

/// Names of the scalar coded attributes, in report order: the five traits,
/// age, female, one indicator per ethnicity (other -> "other_ethnicity"),
/// concern.
std::span<const std::string_view> coded_attribute_names();
bool is_coded_attribute(std::string_view name) noexcept;
/// Value of a named attribute; throws ValidationError for unknown names.
double coded_attribute_value(const CodedAttributes& coded, std::string_view name);

/// Seven-question recommendation intake: age group, ethnicity, concern and
/// the four neuroticism items. Throws IntakeError.
FeatureInputs code_recommendation_intake(const RawIntake& intake,
                                         const Questionnaire& questionnaire = Questionnaire::standard());

// ---------------------------------------------------------------------------
// Feature vectors.

/// Min-max bounds used when normalization is enabled.
struct NormalizationSpec {
  bool enabled = true;

  static constexpr double kAgeMin = 20.0, kAgeMax = 70.0;
  static constexpr double kConcernMin = 0.0, kConcernMax = 4.0;
  static constexpr double kNeuroticismMin = 4.0, kNeuroticismMax = 20.0;
};

/// Layout: [age, white, black, asian, hispanic, other, concern, neuroticism].
struct FeatureVector {
  static constexpr std::size_t kDimension = 1 + kEthnicities.size() + 2;

  std::vector<double> components;
  bool normalized = true;

  bool operator==(const FeatureVector&) const = default;
};

std::span<const std::string_view> feature_layout();

FeatureVector build_feature_vector(const FeatureInputs& inputs, NormalizationSpec norm = {});
FeatureVector build_feature_vector(const CodedAttributes& coded, NormalizationSpec norm = {});

}  // namespace privrec
