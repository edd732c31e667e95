#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "privrec/respondent_store.hpp"

namespace privrec {

/// Biases every record's privacy propensity by `direction * strength`
/// standard deviations per standard deviation of `attribute`.
struct PlantedEffect {
  std::string attribute;  // one of coded_attribute_names()
  int direction = 1;      // +1 or -1
  double strength = 0.0;  // >= 0

  bool operator==(const PlantedEffect&) const = default;
};

struct SynthConfig {
  static constexpr double kMaxStrength = 3.0;

  std::uint64_t seed = 42;
  std::size_t n = 451;
  double dissatisfied_fraction = 0.155;  // share of records with satisfaction 0
  std::vector<PlantedEffect> planted_effects;

  /// Calibrated reference effects: neuroticism +, age -, white -, asian +,
  /// concern + (concern tuned toward r = 0.27).
  static SynthConfig reference(std::uint64_t seed = 42, std::size_t n = 451);
};

/// Calibrated strength used for `attr:dir:calibrated`; 0 for attributes
/// without a calibrated value.
double calibrated_strength(std::string_view attribute);

/// Parses "attribute:+|-:strength" where strength is a number or
/// "calibrated". Throws ValidationError.
PlantedEffect parse_planted_effect(std::string_view spec);

struct SynthResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

/// Deterministic in `config.seed` on every platform: draws come from
/// std::mt19937_64 (whose output sequence the standard fixes) through
/// in-house uniform, normal and categorical transforms rather than the
/// implementation-defined std:: distributions.
SynthResult synth_generate(const SynthConfig& config, const SettingsSchema& schema);

}  // namespace privrec
