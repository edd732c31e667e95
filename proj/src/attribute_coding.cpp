#include "privrec/attribute_coding.hpp"

#include <algorithm>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bundled_data.hpp"
#include "privrec/error.hpp"

namespace privrec {

using nlohmann::json;

namespace {

template <std::size_t N>
std::optional<std::size_t> index_in(const std::array<std::string_view, N>& vocab, std::string_view value) {
  auto it = std::find(vocab.begin(), vocab.end(), value);
  if (it == vocab.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vocab.begin());
}

}  // namespace

int code_age(std::string_view age_group) {
  auto idx = index_in(kAgeGroups, age_group);
  if (!idx) throw ValidationError("age_group", "unknown age group '" + std::string(age_group) + "'");
  return 20 + 10 * static_cast<int>(*idx);
}

int code_gender(std::string_view gender) {
  if (gender == "female") return 1;
  if (gender == "male") return 0;
  throw ValidationError("gender", "unknown gender '" + std::string(gender) + "'");
}

std::vector<int> one_hot(std::string_view category, std::span<const std::string_view> vocabulary) {
  std::vector<int> out(vocabulary.size(), 0);
  auto it = std::find(vocabulary.begin(), vocabulary.end(), category);
  if (it == vocabulary.end()) throw ValidationError("category", "'" + std::string(category) + "' not in vocabulary");
  out[static_cast<std::size_t>(it - vocabulary.begin())] = 1;
  return out;
}

int score_trait(const std::array<int, 4>& items, const std::array<bool, 4>& reversed) {
  int total = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const int v = items[i];
    if (v < kItemMin || v > kItemMax) {
      throw ValidationError("item", "answer " + std::to_string(v) + " outside 1..5");
    }
    total += reversed[i] ? (kItemMax + kItemMin - v) : v;
  }
  return total;
}

std::string_view trait_name(Trait trait) {
  switch (trait) {
    case Trait::openness: return "openness";
    case Trait::conscientiousness: return "conscientiousness";
    case Trait::extraversion: return "extraversion";
    case Trait::agreeableness: return "agreeableness";
    case Trait::neuroticism: return "neuroticism";
  }
  return "?";
}

int TraitScores::get(Trait trait) const noexcept { return const_cast<TraitScores*>(this)->get(trait); }

int& TraitScores::get(Trait trait) noexcept {
  switch (trait) {
    case Trait::openness: return openness;
    case Trait::conscientiousness: return conscientiousness;
    case Trait::extraversion: return extraversion;
    case Trait::agreeableness: return agreeableness;
    case Trait::neuroticism: break;
  }
  return neuroticism;
}

// ---------------------------------------------------------------------------

Questionnaire Questionnaire::from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array()) {
    throw ParseError("questionnaire: missing 'items' array");
  }
  Questionnaire q;
  q.version_ = doc.value("version", "");
  std::unordered_set<std::string> ids;
  std::array<int, 5> per_trait{};
  for (const auto& node : doc["items"]) {
    QuestionnaireItem item;
    try {
      item.id = node.at("id").get<std::string>();
      item.prompt = node.value("prompt", "");
      item.reverse = node.value("reverse", false);
      const auto trait = node.at("trait").get<std::string>();
      auto it = std::find_if(kTraits.begin(), kTraits.end(), [&](Trait t) { return trait_name(t) == trait; });
      if (it == kTraits.end()) throw ValidationError(item.id, "unknown trait '" + trait + "'");
      item.trait = *it;
    } catch (const json::exception& e) {
      throw ParseError(std::string("questionnaire item: ") + e.what());
    }
    if (!ids.insert(item.id).second) throw ValidationError(item.id, "duplicate item id");
    ++per_trait[static_cast<std::size_t>(item.trait)];
    q.items_.push_back(std::move(item));
  }
  for (Trait t : kTraits) {
    if (per_trait[static_cast<std::size_t>(t)] != 4) {
      throw ValidationError(std::string(trait_name(t)), "questionnaire needs exactly 4 items per trait");
    }
  }
  q.document_ = std::make_shared<const json>(doc);
  return q;
}

const Questionnaire& Questionnaire::standard() {
  static const Questionnaire q = from_json(json::parse(bundled::kQuestionnaire));
  return q;
}

std::array<const QuestionnaireItem*, 4> Questionnaire::items_for(Trait trait) const {
  std::array<const QuestionnaireItem*, 4> out{};
  std::size_t n = 0;
  for (const auto& item : items_) {
    if (item.trait == trait) out[n++] = &item;
  }
  return out;
}

const QuestionnaireItem* Questionnaire::find(std::string_view item_id) const noexcept {
  for (const auto& item : items_) {
    if (item.id == item_id) return &item;
  }
  return nullptr;
}

const json& Questionnaire::document() const noexcept {
  static const json empty = json::object();
  return document_ ? *document_ : empty;
}

// ---------------------------------------------------------------------------

RawIntake intake_from_json(const json& doc) {
  if (!doc.is_object()) throw IntakeError("intake", "must be an object");
  RawIntake intake;
  std::vector<FieldError> errors;

  auto read_string = [&](const char* key, std::optional<std::string>& out) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return;
    if (!it->is_string()) {
      errors.push_back({key, "must be a string"});
      return;
    }
    out = it->get<std::string>();
  };
  auto read_int = [&](const char* key, std::optional<int>& out) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return;
    if (!it->is_number_integer()) {
      errors.push_back({key, "must be an integer"});
      return;
    }
    out = it->get<int>();
  };

  read_string("age_group", intake.age_group);
  read_string("gender", intake.gender);
  read_string("ethnicity", intake.ethnicity);
  read_string("marital_status", intake.marital_status);
  read_int("concern", intake.concern);
  read_int("satisfaction", intake.satisfaction);

  if (auto it = doc.find("ipip"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) {
      errors.push_back({"ipip", "must be an object of item id -> answer"});
    } else {
      for (const auto& [key, value] : it->items()) {
        if (!value.is_number_integer()) {
          errors.push_back({key, "must be an integer"});
          continue;
        }
        intake.ipip[key] = value.get<int>();
      }
    }
  }
  if (!errors.empty()) throw IntakeError(std::move(errors));
  return intake;
}

json intake_to_json(const RawIntake& intake) {
  json doc = json::object();
  if (intake.age_group) doc["age_group"] = *intake.age_group;
  if (intake.gender) doc["gender"] = *intake.gender;
  if (intake.ethnicity) doc["ethnicity"] = *intake.ethnicity;
  if (intake.marital_status) doc["marital_status"] = *intake.marital_status;
  if (intake.concern) doc["concern"] = *intake.concern;
  if (intake.satisfaction) doc["satisfaction"] = *intake.satisfaction;
  json items = json::object();
  for (const auto& [k, v] : intake.ipip) items[k] = v;
  doc["ipip"] = std::move(items);
  return doc;
}

std::size_t CodedAttributes::ethnicity_index() const {
  auto it = std::find(ethnicity_onehot.begin(), ethnicity_onehot.end(), 1);
  if (it == ethnicity_onehot.end()) throw ValidationError("ethnicity", "one-hot vector has no set position");
  return static_cast<std::size_t>(it - ethnicity_onehot.begin());
}

namespace {

class IntakeValidator {
 public:
  IntakeValidator(const RawIntake& intake, const Questionnaire& q) : intake_(intake), q_(q) {}

  template <std::size_t N>
  std::size_t category(const char* field, const std::optional<std::string>& value,
                       const std::array<std::string_view, N>& vocab) {
    if (!value) {
      missing(field);
      return 0;
    }
    auto idx = index_in(vocab, *value);
    if (!idx) {
      errors_.push_back({field, "unknown value '" + *value + "'"});
      return 0;
    }
    return *idx;
  }

  int likert(const char* field, const std::optional<int>& value, bool required) {
    if (!value) {
      if (required) missing(field);
      return kLikertMin;
    }
    if (*value < kLikertMin || *value > kLikertMax) {
      errors_.push_back({field, std::string(field) + " out of range 0..4"});
      return kLikertMin;
    }
    return *value;
  }

  void reject_unknown_items() {
    for (const auto& [id, v] : intake_.ipip) {
      if (!q_.find(id)) errors_.push_back({id, "unknown questionnaire item"});
    }
  }

  int trait(Trait t) {
    std::array<int, 4> answers{};
    std::array<bool, 4> reversed{};
    bool complete = true;
    const auto items = q_.items_for(t);
    for (std::size_t i = 0; i < items.size(); ++i) {
      reversed[i] = items[i]->reverse;
      auto it = intake_.ipip.find(items[i]->id);
      if (it == intake_.ipip.end()) {
        missing(items[i]->id);
        complete = false;
      } else if (it->second < kItemMin || it->second > kItemMax) {
        errors_.push_back({items[i]->id, "answer out of range 1..5"});
        complete = false;
      } else {
        answers[i] = it->second;
      }
    }
    return complete ? score_trait(answers, reversed) : kTraitMin;
  }

  void finish() {
    if (!errors_.empty()) throw IntakeError(std::move(errors_));
  }

 private:
  void missing(std::string field) { errors_.push_back({std::move(field), "required"}); }

  const RawIntake& intake_;
  const Questionnaire& q_;
  std::vector<FieldError> errors_;
};

}  // namespace

CodedAttributes code_survey_intake(const RawIntake& intake, const Questionnaire& questionnaire) {
  IntakeValidator v(intake, questionnaire);
  CodedAttributes coded;
  coded.age_decade = 20 + 10 * static_cast<int>(v.category("age_group", intake.age_group, kAgeGroups));
  coded.gender_female = static_cast<int>(v.category("gender", intake.gender, kGenders));
  const auto eth = v.category("ethnicity", intake.ethnicity, kEthnicities);
  const auto mar = v.category("marital_status", intake.marital_status, kMaritalStatuses);
  coded.ethnicity_onehot = one_hot(kEthnicities[eth], kEthnicities);
  coded.marital_onehot = one_hot(kMaritalStatuses[mar], kMaritalStatuses);
  v.reject_unknown_items();
  for (Trait t : kTraits) coded.traits.get(t) = v.trait(t);
  coded.concern = v.likert("concern", intake.concern, true);
  if (intake.satisfaction) coded.satisfaction = v.likert("satisfaction", intake.satisfaction, false);
  v.finish();
  return coded;
}

FeatureInputs feature_inputs(const CodedAttributes& coded) {
  return FeatureInputs{coded.age_decade, coded.ethnicity_index(), coded.concern, coded.traits.neuroticism};
}

std::span<const std::string_view> coded_attribute_names() {
  static constexpr std::array<std::string_view, 13> names = {
      "openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism", "age",    "female",
      "white",    "black",             "asian",        "hispanic",      "other_ethnicity", "concern"};
  return names;
}

bool is_coded_attribute(std::string_view name) noexcept {
  const auto names = coded_attribute_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

double coded_attribute_value(const CodedAttributes& coded, std::string_view name) {
  for (Trait t : kTraits) {
    if (trait_name(t) == name) return coded.traits.get(t);
  }
  if (name == "age") return coded.age_decade;
  if (name == "female") return coded.gender_female;
  if (name == "concern") return coded.concern;
  for (std::size_t i = 0; i < kEthnicities.size(); ++i) {
    const bool match = kEthnicities[i] == "other" ? name == "other_ethnicity" : name == kEthnicities[i];
    if (match) return coded.ethnicity_onehot.at(i);
  }
  throw ValidationError(std::string(name), "unknown coded attribute");
}

FeatureInputs code_recommendation_intake(const RawIntake& intake, const Questionnaire& questionnaire) {
  IntakeValidator v(intake, questionnaire);
  FeatureInputs in;
  in.age_decade = 20 + 10 * static_cast<int>(v.category("age_group", intake.age_group, kAgeGroups));
  in.ethnicity_index = v.category("ethnicity", intake.ethnicity, kEthnicities);
  in.concern = v.likert("concern", intake.concern, true);
  v.reject_unknown_items();
  in.neuroticism = v.trait(Trait::neuroticism);
  v.finish();
  return in;
}

// ---------------------------------------------------------------------------

std::span<const std::string_view> feature_layout() {
  static constexpr std::array<std::string_view, FeatureVector::kDimension> layout = {
      "age", "white", "black", "asian", "hispanic", "other", "concern", "neuroticism"};
  return layout;
}

FeatureVector build_feature_vector(const FeatureInputs& in, NormalizationSpec norm) {
  using N = NormalizationSpec;
  if (in.ethnicity_index >= kEthnicities.size()) throw ValidationError("ethnicity", "index out of range");
  if (in.age_decade < N::kAgeMin || in.age_decade > N::kAgeMax || in.age_decade % 10 != 0) {
    throw ValidationError("age", "age decade " + std::to_string(in.age_decade) + " not in {20,...,70}");
  }
  if (in.concern < kLikertMin || in.concern > kLikertMax) throw ValidationError("concern", "out of range 0..4");
  if (in.neuroticism < kTraitMin || in.neuroticism > kTraitMax) {
    throw ValidationError("neuroticism", "out of range 4..20");
  }

  auto scale = [&](double v, double lo, double hi) { return norm.enabled ? (v - lo) / (hi - lo) : v; };

  FeatureVector fv;
  fv.normalized = norm.enabled;
  fv.components.reserve(FeatureVector::kDimension);
  fv.components.push_back(scale(in.age_decade, N::kAgeMin, N::kAgeMax));
  for (std::size_t i = 0; i < kEthnicities.size(); ++i) fv.components.push_back(i == in.ethnicity_index ? 1.0 : 0.0);
  fv.components.push_back(scale(in.concern, N::kConcernMin, N::kConcernMax));
  fv.components.push_back(scale(in.neuroticism, N::kNeuroticismMin, N::kNeuroticismMax));
  return fv;
}

FeatureVector build_feature_vector(const CodedAttributes& coded, NormalizationSpec norm) {
  return build_feature_vector(feature_inputs(coded), norm);
}

}  // namespace privrec
