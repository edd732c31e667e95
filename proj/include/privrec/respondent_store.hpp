#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "privrec/attribute_coding.hpp"
#include "privrec/privacy_scoring.hpp"
#include "privrec/settings_schema.hpp"

namespace privrec {

/// One survey respondent. `coded.satisfaction` is always present on a
/// stored record.
struct RespondentRecord {
  std::string id;
  CodedAttributes coded;
  ChoiceVector choices;

  int satisfaction() const { return coded.satisfaction.value_or(0); }
  bool operator==(const RespondentRecord&) const = default;
};

struct Provenance {
  enum class Kind { ingested, synthetic };
  Kind kind = Kind::ingested;
  std::optional<std::uint64_t> seed;  // synthetic only

  bool operator==(const Provenance&) const = default;
};

struct Dataset {
  std::vector<RespondentRecord> records;
  std::string schema_version;
  Provenance provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  bool operator==(const Dataset&) const = default;
};

/// Checks every record invariant against `schema` plus id uniqueness.
/// Throws ValidationError naming the record id.
void validate_dataset(const Dataset& dataset, const SettingsSchema& schema);
void validate_record(const RespondentRecord& record, const SettingsSchema& schema);

// ---------------------------------------------------------------------------
// CSV ingestion

struct RowError {
  std::size_t row = 0;  // 1-based data row (the header is not counted)
  std::string reason;
};

struct IngestResult {
  Dataset dataset;
  std::vector<RowError> errors;
};

/// Column header the ingester requires: id, age_group, gender, ethnicity,
/// marital_status, ipip_q1..ipip_q20, concern, satisfaction, then
/// setting_<id> for every schema setting in schema order.
std::vector<std::string> csv_columns(const SettingsSchema& schema,
                                     const Questionnaire& questionnaire = Questionnaire::standard());

/// Valid rows become records in input order; invalid rows are reported and
/// skipped. Throws ParseError on a header mismatch or unreadable input.
IngestResult ingest_csv(std::istream& source, const SettingsSchema& schema,
                        const Questionnaire& questionnaire = Questionnaire::standard());

/// Writes `dataset` in the ingest layout.
void write_csv(std::ostream& sink, const Dataset& dataset, const SettingsSchema& schema,
               const Questionnaire& questionnaire = Questionnaire::standard());

// ---------------------------------------------------------------------------

/// Keeps records whose satisfaction is strictly above `threshold` (0..4).
Dataset filter_satisfied(const Dataset& dataset, int threshold = 0);

// ---------------------------------------------------------------------------
// Snapshots

inline constexpr int kSnapshotFormatVersion = 1;

void save_snapshot(const Dataset& dataset, std::ostream& sink);
std::string snapshot_document(const Dataset& dataset);
/// Throws ParseError for a corrupt payload and ValidationError when the
/// snapshot was built against a different schema version.
Dataset load_snapshot(std::istream& source, const SettingsSchema& schema);
Dataset load_snapshot_file(const std::string& path, const SettingsSchema& schema);

}  // namespace privrec
