#include "privrec/respondent_store.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "privrec/error.hpp"
#include "privrec/io.hpp"

namespace privrec {

using nlohmann::json;

namespace {

bool is_one_hot(const std::vector<int>& v, std::size_t size) {
  return v.size() == size && std::count(v.begin(), v.end(), 1) == 1 && std::count(v.begin(), v.end(), 0) + 1 == static_cast<long>(size);
}

}  // namespace

void validate_record(const RespondentRecord& r, const SettingsSchema& schema) {
  auto fail = [&](const std::string& reason) { throw ValidationError(r.id.empty() ? "record" : r.id, reason); };
  if (r.id.empty()) fail("empty id");
  const auto& c = r.coded;
  if (c.age_decade < 20 || c.age_decade > 70 || c.age_decade % 10 != 0) fail("age decade out of range");
  if (c.gender_female != 0 && c.gender_female != 1) fail("gender code must be 0 or 1");
  if (!is_one_hot(c.ethnicity_onehot, kEthnicities.size())) fail("ethnicity is not one-hot");
  if (!is_one_hot(c.marital_onehot, kMaritalStatuses.size())) fail("marital status is not one-hot");
  for (Trait t : kTraits) {
    const int v = c.traits.get(t);
    if (v < kTraitMin || v > kTraitMax) fail(std::string(trait_name(t)) + " out of range 4..20");
  }
  if (c.concern < kLikertMin || c.concern > kLikertMax) fail("concern out of range 0..4");
  if (!c.satisfaction) fail("satisfaction missing");
  if (*c.satisfaction < kLikertMin || *c.satisfaction > kLikertMax) fail("satisfaction out of range 0..4");
  try {
    check_choices(r.choices, schema);
  } catch (const ValidationError& e) {
    fail(e.what());
  }
}

void validate_dataset(const Dataset& dataset, const SettingsSchema& schema) {
  if (dataset.schema_version != schema.version()) {
    throw ValidationError("schema_version", "dataset built for '" + dataset.schema_version + "', schema is '" +
                                                schema.version() + "'");
  }
  std::unordered_set<std::string> ids;
  for (const auto& r : dataset.records) {
    validate_record(r, schema);
    if (!ids.insert(r.id).second) throw ValidationError(r.id, "duplicate id");
  }
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// RFC 4180 fields on a single line: quoted fields may contain commas and
// doubled quotes but not line breaks.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(const std::string& v) {
  if (v.find_first_of(",\"") == std::string::npos) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  return out + "\"";
}

std::optional<int> parse_int(const std::string& text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

constexpr std::string_view kSettingPrefix = "setting_";

}  // namespace

std::vector<std::string> csv_columns(const SettingsSchema& schema, const Questionnaire& questionnaire) {
  std::vector<std::string> cols = {"id", "age_group", "gender", "ethnicity", "marital_status"};
  for (const auto& item : questionnaire.items()) cols.push_back(item.id);
  cols.push_back("concern");
  cols.push_back("satisfaction");
  for (const auto& s : schema.settings()) cols.push_back(std::string(kSettingPrefix) + s.id);
  return cols;
}

IngestResult ingest_csv(std::istream& source, const SettingsSchema& schema, const Questionnaire& questionnaire) {
  if (!source) throw ParseError("unreadable CSV source");
  const auto columns = csv_columns(schema, questionnaire);

  std::string line;
  if (!std::getline(source, line)) throw ParseError("CSV source is empty; header required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header != columns) {
    std::string detail;
    for (std::size_t i = 0; i < std::max(header.size(), columns.size()); ++i) {
      const std::string got = i < header.size() ? header[i] : "<none>";
      const std::string want = i < columns.size() ? columns[i] : "<none>";
      if (got != want) {
        detail = "column " + std::to_string(i + 1) + " is '" + got + "', expected '" + want + "'";
        break;
      }
    }
    throw ParseError("CSV header mismatch: " + detail);
  }

  const std::size_t n_items = questionnaire.items().size();
  const std::size_t first_setting = 5 + n_items + 2;

  IngestResult result;
  result.dataset.schema_version = schema.version();
  result.dataset.provenance = {Provenance::Kind::ingested, std::nullopt};
  std::unordered_set<std::string> seen;

  std::size_t row = 0;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    auto reject = [&](std::string reason) { result.errors.push_back({row, std::move(reason)}); };

    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const ParseError& e) {
      reject(e.what());
      continue;
    }
    if (f.size() != columns.size()) {
      reject("expected " + std::to_string(columns.size()) + " fields, got " + std::to_string(f.size()));
      continue;
    }

    RespondentRecord rec;
    rec.id = f[0];
    if (rec.id.empty()) {
      reject("empty id");
      continue;
    }

    RawIntake raw;
    std::vector<FieldError> errors;
    auto opt_string = [](const std::string& v) { return v.empty() ? std::nullopt : std::optional<std::string>(v); };
    raw.age_group = opt_string(f[1]);
    raw.gender = opt_string(f[2]);
    raw.ethnicity = opt_string(f[3]);
    raw.marital_status = opt_string(f[4]);
    auto read_int = [&](std::size_t col, std::optional<int>& out) {
      if (f[col].empty()) return;
      if (auto v = parse_int(f[col])) out = *v;
      else errors.push_back({columns[col], "not an integer"});
    };
    for (std::size_t i = 0; i < n_items; ++i) {
      std::optional<int> v;
      read_int(5 + i, v);
      if (v) raw.ipip[columns[5 + i]] = *v;
    }
    read_int(5 + n_items, raw.concern);
    read_int(6 + n_items, raw.satisfaction);
    if (!raw.satisfaction && f[6 + n_items].empty()) errors.push_back({"satisfaction", "required"});

    try {
      if (!errors.empty()) throw IntakeError(std::move(errors));
      rec.coded = code_survey_intake(raw, questionnaire);
    } catch (const IntakeError& e) {
      std::string reason;
      for (const auto& fe : e.errors()) reason += (reason.empty() ? "" : "; ") + fe.field + ": " + fe.message;
      reject(reason);
      continue;
    }

    ChoiceMap choices;
    for (std::size_t i = 0; i < schema.size(); ++i) choices[schema.at(i).id] = f[first_setting + i];
    try {
      rec.choices = resolve_choices(choices, schema);
    } catch (const ValidationError& e) {
      reject(std::string("setting_") + e.what());
      continue;
    }

    if (!seen.insert(rec.id).second) {
      reject("duplicate id '" + rec.id + "'");
      continue;
    }
    result.dataset.records.push_back(std::move(rec));
  }
  return result;
}

void write_csv(std::ostream& sink, const Dataset& dataset, const SettingsSchema& schema,
               const Questionnaire& questionnaire) {
  const auto columns = csv_columns(schema, questionnaire);
  for (std::size_t i = 0; i < columns.size(); ++i) sink << (i ? "," : "") << columns[i];
  sink << '\n';

  for (const auto& r : dataset.records) {
    const auto& c = r.coded;
    sink << csv_escape(r.id) << ',' << kAgeGroups[static_cast<std::size_t>(c.age_decade / 10 - 2)] << ','
         << kGenders[static_cast<std::size_t>(c.gender_female)] << ',' << kEthnicities[c.ethnicity_index()] << ',';
    const auto marital = std::find(c.marital_onehot.begin(), c.marital_onehot.end(), 1) - c.marital_onehot.begin();
    sink << kMaritalStatuses[static_cast<std::size_t>(marital)];

    // Synthetic and ingested records only keep trait sums, so item answers
    // are re-expanded: any four answers with the right keyed sum reproduce
    // the same coded attributes.
    std::map<std::string, int> answers;
    for (Trait t : kTraits) {
      int remaining = c.traits.get(t) - kTraitMin;  // keyed points above the floor
      for (const auto* item : questionnaire.items_for(t)) {
        const int keyed = 1 + std::min(remaining, 4);
        remaining -= keyed - 1;
        answers[item->id] = item->reverse ? 6 - keyed : keyed;
      }
    }
    for (const auto& item : questionnaire.items()) sink << ',' << answers[item.id];
    sink << ',' << c.concern << ',' << r.satisfaction();
    for (std::size_t i = 0; i < schema.size(); ++i) {
      sink << ',' << csv_escape(schema.at(i).choices[static_cast<std::size_t>(r.choices.ordinals[i])].id);
    }
    sink << '\n';
  }
}

// ---------------------------------------------------------------------------

Dataset filter_satisfied(const Dataset& dataset, int threshold) {
  if (threshold < kLikertMin || threshold > kLikertMax) {
    throw ValidationError("threshold", "satisfaction threshold must be in 0..4");
  }
  Dataset out;
  out.schema_version = dataset.schema_version;
  out.provenance = dataset.provenance;
  std::copy_if(dataset.records.begin(), dataset.records.end(), std::back_inserter(out.records),
               [threshold](const RespondentRecord& r) { return r.satisfaction() > threshold; });
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

constexpr std::string_view kSnapshotFormat = "privrec-snapshot";

json record_to_json(const RespondentRecord& r) {
  const auto& c = r.coded;
  const auto marital = std::find(c.marital_onehot.begin(), c.marital_onehot.end(), 1) - c.marital_onehot.begin();
  json traits = json::array();
  for (Trait t : kTraits) traits.push_back(c.traits.get(t));
  return json{{"id", r.id},
              {"age", c.age_decade},
              {"female", c.gender_female},
              {"ethnicity", kEthnicities[c.ethnicity_index()]},
              {"marital", kMaritalStatuses[static_cast<std::size_t>(marital)]},
              {"traits", std::move(traits)},
              {"concern", c.concern},
              {"satisfaction", r.satisfaction()},
              {"choices", r.choices.ordinals}};
}

RespondentRecord record_from_json(const json& node) {
  RespondentRecord r;
  r.id = node.at("id").get<std::string>();
  auto& c = r.coded;
  c.age_decade = node.at("age").get<int>();
  c.gender_female = node.at("female").get<int>();
  const auto eth = node.at("ethnicity").get<std::string>();
  const auto mar = node.at("marital").get<std::string>();
  try {
    c.ethnicity_onehot = one_hot(eth, kEthnicities);
    c.marital_onehot = one_hot(mar, kMaritalStatuses);
  } catch (const ValidationError& e) {
    throw ValidationError(r.id, e.what());
  }
  const auto traits = node.at("traits").get<std::vector<int>>();
  if (traits.size() != kTraits.size()) throw ValidationError(r.id, "expected 5 trait scores");
  for (std::size_t i = 0; i < kTraits.size(); ++i) c.traits.get(kTraits[i]) = traits[i];
  c.concern = node.at("concern").get<int>();
  c.satisfaction = node.at("satisfaction").get<int>();
  r.choices.ordinals = node.at("choices").get<std::vector<int>>();
  return r;
}

std::string_view kind_name(Provenance::Kind kind) {
  return kind == Provenance::Kind::synthetic ? "synthetic" : "ingested";
}

}  // namespace

std::string snapshot_document(const Dataset& dataset) {
  json provenance = {{"kind", kind_name(dataset.provenance.kind)}};
  if (dataset.provenance.seed) provenance["seed"] = *dataset.provenance.seed;

  // One record per line keeps snapshots diffable.
  std::string out = "{\n";
  out += "  \"format\": " + json(kSnapshotFormat).dump() + ",\n";
  out += "  \"format_version\": " + std::to_string(kSnapshotFormatVersion) + ",\n";
  out += "  \"schema_version\": " + json(dataset.schema_version).dump() + ",\n";
  out += "  \"provenance\": " + provenance.dump() + ",\n";
  out += "  \"records\": [";
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += record_to_json(dataset.records[i]).dump();
  }
  out += dataset.records.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

void save_snapshot(const Dataset& dataset, std::ostream& sink) { sink << snapshot_document(dataset); }

Dataset load_snapshot(std::istream& source, const SettingsSchema& schema) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corrupt snapshot: ") + e.what());
  }

  Dataset d;
  try {
    if (doc.at("format").get<std::string>() != kSnapshotFormat) throw ParseError("not a snapshot document");
    const int version = doc.at("format_version").get<int>();
    if (version != kSnapshotFormatVersion) {
      throw ValidationError("format_version", "unsupported snapshot format " + std::to_string(version));
    }
    d.schema_version = doc.at("schema_version").get<std::string>();
    if (d.schema_version != schema.version()) {
      throw ValidationError("schema_version", "snapshot built for '" + d.schema_version + "', active schema is '" +
                                                  schema.version() + "'");
    }
    const auto& prov = doc.at("provenance");
    const auto kind = prov.at("kind").get<std::string>();
    if (kind == "synthetic") d.provenance.kind = Provenance::Kind::synthetic;
    else if (kind == "ingested") d.provenance.kind = Provenance::Kind::ingested;
    else throw ParseError("unknown provenance kind '" + kind + "'");
    if (prov.contains("seed")) d.provenance.seed = prov.at("seed").get<std::uint64_t>();
    for (const auto& node : doc.at("records")) d.records.push_back(record_from_json(node));
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt snapshot: ") + e.what());
  }
  validate_dataset(d, schema);
  return d;
}

Dataset load_snapshot_file(const std::string& path, const SettingsSchema& schema) {
  std::istringstream in(read_file(path));
  return load_snapshot(in, schema);
}

}  // namespace privrec
