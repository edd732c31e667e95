#include "privrec/settings_schema.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "bundled_data.hpp"
#include "privrec/error.hpp"

namespace privrec {

using nlohmann::json;

std::optional<std::size_t> SettingDefinition::ordinal_of(std::string_view choice_id) const noexcept {
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (choices[i].id == choice_id) return i;
  }
  return std::nullopt;
}

const SettingChoice& choice_by_ordinal(const SettingDefinition& setting, std::size_t ordinal) {
  if (ordinal >= setting.choices.size()) {
    throw std::out_of_range("setting '" + setting.id + "': ordinal " + std::to_string(ordinal) +
                            " outside [0, " + std::to_string(setting.choices.size()) + ")");
  }
  return setting.choices[ordinal];
}

namespace {

void validate_setting(const SettingDefinition& s) {
  if (s.id.empty()) throw ValidationError("settings", "setting with empty id");
  if (s.choices.size() < 2) throw ValidationError(s.id, "needs at least 2 choices");
  if (!std::isfinite(s.weight) || s.weight < 0.0) throw ValidationError(s.id, "weight must be a nonnegative finite number");

  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < s.choices.size(); ++i) {
    const auto& c = s.choices[i];
    if (c.id.empty()) throw ValidationError(s.id, "choice with empty id");
    if (!ids.insert(c.id).second) throw ValidationError(s.id, "duplicate choice id '" + c.id + "'");
    if (!(c.grade >= 0.0 && c.grade <= 1.0)) {
      throw ValidationError(s.id, "grade of choice '" + c.id + "' out of range [0,1]");
    }
    if (i > 0 && !(c.grade > s.choices[i - 1].grade)) {
      throw ValidationError(s.id, "choice grades must be strictly increasing");
    }
  }
  if (s.choices.front().grade != 0.0) throw ValidationError(s.id, "least private choice must have grade 0");
  if (s.choices.back().grade != 1.0) throw ValidationError(s.id, "most private choice must have grade 1");
}

}  // namespace

SettingsSchema::SettingsSchema(std::string version, std::vector<SettingDefinition> settings)
    : version_(std::move(version)), settings_(std::move(settings)) {
  if (version_.empty()) throw ValidationError("version", "must not be empty");
  if (settings_.empty()) throw ValidationError("settings", "schema has no settings");

  std::unordered_set<std::string> ids;
  double weight_sum = 0.0;
  for (const auto& s : settings_) {
    validate_setting(s);
    if (!ids.insert(s.id).second) throw ValidationError(s.id, "duplicate setting id");
    weight_sum += s.weight;
  }
  if (std::abs(weight_sum - kMaxScore) > kWeightTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sum to " << weight_sum << ", expected 10";
    throw ValidationError("weights", msg.str());
  }
}

std::optional<std::size_t> SettingsSchema::index_of(std::string_view setting_id) const noexcept {
  for (std::size_t i = 0; i < settings_.size(); ++i) {
    if (settings_[i].id == setting_id) return i;
  }
  return std::nullopt;
}

namespace {

std::string required_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

SettingDefinition parse_setting(const json& node, std::size_t index) {
  const std::string where = "settings[" + std::to_string(index) + "]";
  if (!node.is_object()) throw ParseError(where + ": expected an object");

  SettingDefinition s;
  s.id = required_string(node, "id", where);
  s.label = node.value("label", s.id);

  auto choices = node.find("choices");
  if (choices == node.end() || !choices->is_array()) throw ParseError(s.id + ": missing 'choices' array");

  std::size_t with_grade = 0;
  for (const auto& c : *choices) {
    if (!c.is_object()) throw ParseError(s.id + ": choice must be an object");
    SettingChoice choice;
    choice.id = required_string(c, "id", s.id);
    choice.label = c.value("label", choice.id);
    if (auto g = c.find("grade"); g != c.end()) {
      if (!g->is_number()) throw ParseError(s.id + ": grade of '" + choice.id + "' is not a number");
      choice.grade = g->get<double>();
      ++with_grade;
    }
    s.choices.push_back(std::move(choice));
  }

  if (with_grade == 0 && s.choices.size() >= 2) {
    const double span = static_cast<double>(s.choices.size() - 1);
    for (std::size_t i = 0; i < s.choices.size(); ++i) s.choices[i].grade = static_cast<double>(i) / span;
  } else if (with_grade != s.choices.size()) {
    throw ValidationError(s.id, "grades must be given for all choices or none");
  }
  return s;
}

}  // namespace

SettingsSchema schema_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("schema document must be an object");
  const std::string version = required_string(doc, "version", "schema");
  auto nodes = doc.find("settings");
  if (nodes == doc.end() || !nodes->is_array()) throw ParseError("schema: missing 'settings' array");

  std::vector<SettingDefinition> settings;
  std::size_t with_weight = 0;
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    const auto& node = (*nodes)[i];
    settings.push_back(parse_setting(node, i));
    if (auto w = node.find("weight"); w != node.end()) {
      if (!w->is_number()) throw ParseError(settings.back().id + ": weight is not a number");
      settings.back().weight = w->get<double>();
      ++with_weight;
    }
  }

  if (with_weight == 0 && !settings.empty()) {
    const double uniform = SettingsSchema::kMaxScore / static_cast<double>(settings.size());
    for (auto& s : settings) s.weight = uniform;
  } else if (with_weight != settings.size()) {
    throw ValidationError("weights", "must be given for all settings or none");
  }
  return SettingsSchema(version, std::move(settings));
}

SettingsSchema load_schema(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  return schema_from_json(doc);
}

SettingsSchema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema file '" + path + "'");
  return load_schema(in);
}

json schema_to_json(const SettingsSchema& schema) {
  json settings = json::array();
  for (const auto& s : schema.settings()) {
    json choices = json::array();
    for (const auto& c : s.choices) choices.push_back({{"id", c.id}, {"label", c.label}, {"grade", c.grade}});
    settings.push_back({{"id", s.id}, {"label", s.label}, {"weight", s.weight}, {"choices", std::move(choices)}});
  }
  return {{"version", schema.version()}, {"settings", std::move(settings)}};
}

std::string emit_schema(const SettingsSchema& schema) { return schema_to_json(schema).dump(2); }

std::string_view default_schema_document() { return bundled::kDefaultSchema; }

const SettingsSchema& default_schema() {
  static const SettingsSchema schema = schema_from_json(json::parse(bundled::kDefaultSchema));
  return schema;
}

}  // namespace privrec
