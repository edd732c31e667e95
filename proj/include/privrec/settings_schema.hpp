#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace privrec {

/// One selectable option of a setting. `grade` is its privacy grade in
/// [0,1], 1 being the most private option the setting offers.
struct SettingChoice {
  std::string id;
  std::string label;
  double grade = 0.0;

  bool operator==(const SettingChoice&) const = default;
};

/// A privacy setting. Choices are ordered by strictly increasing grade, so
/// a choice's position (its ordinal) is its privacy rank: 0 is the least
/// private option, size()-1 the most private.
struct SettingDefinition {
  std::string id;
  std::string label;
  std::vector<SettingChoice> choices;
  double weight = 0.0;

  std::size_t choice_count() const noexcept { return choices.size(); }
  std::optional<std::size_t> ordinal_of(std::string_view choice_id) const noexcept;

  bool operator==(const SettingDefinition&) const = default;
};

/// Choice at privacy rank `ordinal`. Throws std::out_of_range when the
/// ordinal is not in [0, choice_count()).
const SettingChoice& choice_by_ordinal(const SettingDefinition& setting, std::size_t ordinal);

/// Immutable catalogue of settings whose weights sum to 10.
class SettingsSchema {
 public:
  static constexpr double kMaxScore = 10.0;
  static constexpr double kWeightTolerance = 1e-9;

  /// Validates every invariant; throws ValidationError naming the
  /// offending setting (or "weights"/"settings"/"version").
  SettingsSchema(std::string version, std::vector<SettingDefinition> settings);

  const std::string& version() const noexcept { return version_; }
  const std::vector<SettingDefinition>& settings() const noexcept { return settings_; }
  std::size_t size() const noexcept { return settings_.size(); }
  const SettingDefinition& at(std::size_t index) const { return settings_.at(index); }

  std::optional<std::size_t> index_of(std::string_view setting_id) const noexcept;

  bool operator==(const SettingsSchema&) const = default;

 private:
  std::string version_;
  std::vector<SettingDefinition> settings_;
};

/// Parses a schema document. Grades may be omitted on every choice of a
/// setting (evenly spaced by rank); weights may be omitted on every
/// setting (uniform 10/N). Throws ParseError or ValidationError.
SettingsSchema load_schema(std::istream& source);
SettingsSchema load_schema_file(const std::string& path);
SettingsSchema schema_from_json(const nlohmann::json& doc);

/// Canonical document with every grade and weight spelled out.
nlohmann::json schema_to_json(const SettingsSchema& schema);
std::string emit_schema(const SettingsSchema& schema);

/// The bundled 18-setting schema (data/default_schema.json, compiled in).
const SettingsSchema& default_schema();
std::string_view default_schema_document();

}  // namespace privrec
