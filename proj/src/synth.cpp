#include "privrec/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <random>
#include <span>

#include "privrec/error.hpp"

namespace privrec {

namespace {

// Survey sample marginals for age group and gender.
constexpr std::array<double, 6> kAgeShares = {0.273, 0.501, 0.144, 0.047, 0.031, 0.004};
constexpr double kFemaleShare = 0.377;
// Not reported in the source survey; plausible US crowd-worker mix.
constexpr std::array<double, 5> kEthnicityShares = {0.78, 0.07, 0.08, 0.05, 0.02};
constexpr std::array<double, 5> kMaritalShares = {0.40, 0.20, 0.32, 0.07, 0.01};
constexpr std::array<double, 5> kConcernShares = {0.06, 0.16, 0.32, 0.28, 0.18};
constexpr std::array<double, 4> kSatisfiedShares = {0.12, 0.25, 0.43, 0.20};  // levels 1..4

// Item model: answer = round(3 +/- kItemLoading * latent + kItemNoise * e).
constexpr double kItemLoading = 0.9;
constexpr double kItemNoise = 0.7;

// Choice model in grade space: g = base + kPropensityScale * z + kSettingNoise * e,
// z = planted bias + standard normal, base ~ kBaseGrade +/- kBaseSpread / 2.
constexpr double kBaseGrade = 0.36;
constexpr double kBaseSpread = 0.20;
constexpr double kPropensityScale = 0.145;
constexpr double kSettingNoise = 0.25;

struct Calibration {
  std::string_view attribute;
  double strength;
};
constexpr std::array<Calibration, 5> kCalibrated = {{
    {"neuroticism", 0.25},
    {"age", 0.25},
    {"white", 0.13},
    {"asian", 0.15},
    {"concern", 0.33},
}};

class SynthRandom {
 public:
  explicit SynthRandom(std::uint64_t seed) : engine_(seed) {}

  // 53-bit uniform on [0,1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Irwin-Hall(12) - 6: mean 0, variance 1, built from additions only so
  // results do not depend on the platform's libm.
  double normal() {
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) sum += uniform();
    return sum - 6.0;
  }

  std::size_t below(std::size_t n) { return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(n)), n - 1); }

  std::size_t categorical(std::span<const double> shares) {
    double total = 0.0;
    for (double s : shares) total += s;
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < shares.size(); ++i) {
      if (u < shares[i]) return i;
      u -= shares[i];
    }
    return shares.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

int clamp_round(double v, int lo, int hi) { return std::clamp(static_cast<int>(std::lround(v)), lo, hi); }

std::string record_id(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  return "r" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

}  // namespace

SynthConfig SynthConfig::reference(std::uint64_t seed, std::size_t n) {
  SynthConfig c;
  c.seed = seed;
  c.n = n;
  c.planted_effects = {{"neuroticism", +1, calibrated_strength("neuroticism")},
                       {"age", -1, calibrated_strength("age")},
                       {"white", -1, calibrated_strength("white")},
                       {"asian", +1, calibrated_strength("asian")},
                       {"concern", +1, calibrated_strength("concern")}};
  return c;
}

double calibrated_strength(std::string_view attribute) {
  for (const auto& c : kCalibrated) {
    if (c.attribute == attribute) return c.strength;
  }
  return 0.0;
}

PlantedEffect parse_planted_effect(std::string_view spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
  if (second == std::string_view::npos || spec.find(':', second + 1) != std::string_view::npos) {
    throw ValidationError("plant", "expected attribute:+|-:strength, got '" + std::string(spec) + "'");
  }
  PlantedEffect e;
  e.attribute = std::string(spec.substr(0, first));
  const auto dir = spec.substr(first + 1, second - first - 1);
  const auto strength = spec.substr(second + 1);

  if (!is_coded_attribute(e.attribute)) throw ValidationError("plant", "unknown attribute '" + e.attribute + "'");
  if (dir == "+") e.direction = 1;
  else if (dir == "-") e.direction = -1;
  else throw ValidationError("plant", "direction must be + or -, got '" + std::string(dir) + "'");

  if (strength == "calibrated") {
    e.strength = calibrated_strength(e.attribute);
    if (e.strength == 0.0) throw ValidationError("plant", "no calibrated strength for '" + e.attribute + "'");
    return e;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(strength.data(), strength.data() + strength.size(), value);
  if (ec != std::errc() || ptr != strength.data() + strength.size() || !std::isfinite(value) || value < 0.0) {
    throw ValidationError("plant", "strength in '" + std::string(spec) +
                                       "' must be a nonnegative number or 'calibrated'");
  }
  e.strength = value;
  return e;
}

SynthResult synth_generate(const SynthConfig& config, const SettingsSchema& schema) {
  if (!(config.dissatisfied_fraction >= 0.0 && config.dissatisfied_fraction <= 1.0)) {
    throw ValidationError("dissatisfied_fraction", "must be in [0,1]");
  }
  SynthResult result;
  std::vector<PlantedEffect> effects;
  for (auto e : config.planted_effects) {
    if (!is_coded_attribute(e.attribute)) throw ValidationError("plant", "unknown attribute '" + e.attribute + "'");
    if (e.direction != 1 && e.direction != -1) throw ValidationError("plant", "direction must be +1 or -1");
    if (!(e.strength >= 0.0)) throw ValidationError("plant", "strength must be nonnegative");
    if (e.strength > SynthConfig::kMaxStrength) {
      result.warnings.push_back("strength " + std::to_string(e.strength) + " for '" + e.attribute +
                                "' clamped to " + std::to_string(SynthConfig::kMaxStrength));
      e.strength = SynthConfig::kMaxStrength;
    }
    effects.push_back(std::move(e));
  }

  SynthRandom rng(config.seed);
  const std::size_t n = config.n;
  const auto& questionnaire = Questionnaire::standard();

  std::vector<double> base(schema.size());
  for (auto& b : base) b = kBaseGrade + kBaseSpread * (rng.uniform() - 0.5);

  Dataset& d = result.dataset;
  d.schema_version = schema.version();
  d.provenance = {Provenance::Kind::synthetic, config.seed};
  d.records.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    auto& r = d.records[i];
    r.id = record_id(i);
    auto& c = r.coded;
    c.age_decade = 20 + 10 * static_cast<int>(rng.categorical(kAgeShares));
    c.gender_female = rng.uniform() < kFemaleShare ? 1 : 0;
    c.ethnicity_onehot = one_hot(kEthnicities[rng.categorical(kEthnicityShares)], kEthnicities);
    c.marital_onehot = one_hot(kMaritalStatuses[rng.categorical(kMaritalShares)], kMaritalStatuses);
    for (Trait t : kTraits) {
      const double latent = rng.normal();
      std::array<int, 4> answers{};
      std::array<bool, 4> reversed{};
      const auto items = questionnaire.items_for(t);
      for (std::size_t k = 0; k < items.size(); ++k) {
        reversed[k] = items[k]->reverse;
        const double signed_latent = reversed[k] ? -latent : latent;
        answers[k] = clamp_round(3.0 + kItemLoading * signed_latent + kItemNoise * rng.normal(), kItemMin, kItemMax);
      }
      c.traits.get(t) = score_trait(answers, reversed);
    }
    c.concern = static_cast<int>(rng.categorical(kConcernShares));
  }

  // Exact quota of dissatisfied records, placed by a seeded shuffle.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto dissatisfied = static_cast<std::size_t>(std::llround(config.dissatisfied_fraction * static_cast<double>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    auto& rec = d.records[order[k]];
    rec.coded.satisfaction = k < dissatisfied ? 0 : 1 + static_cast<int>(rng.categorical(kSatisfiedShares));
  }

  // Planted bias: sum of standardized attribute values times signed strength.
  std::vector<double> bias(n, 0.0);
  for (const auto& e : effects) {
    if (n < 2 || e.strength == 0.0) continue;
    std::vector<double> values(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = coded_attribute_value(d.records[i].coded, e.attribute);
      mean += values[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
      result.warnings.push_back("attribute '" + e.attribute + "' is constant; effect not planted");
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) bias[i] += e.direction * e.strength * (values[i] - mean) / sd;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double z = bias[i] + rng.normal();
    auto& ordinals = d.records[i].choices.ordinals;
    ordinals.resize(schema.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
      const int top = static_cast<int>(schema.at(s).choice_count()) - 1;
      const double grade = base[s] + kPropensityScale * z + kSettingNoise * rng.normal();
      ordinals[s] = clamp_round(grade * top, 0, top);
    }
  }
  return result;
}

}  // namespace privrec
