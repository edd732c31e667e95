#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "privrec/error.hpp"
#include "privrec/respondent_store.hpp"
#include "privrec/synth.hpp"
#include "test_support.hpp"

using namespace privrec;

namespace {

Dataset small_dataset(std::size_t n, std::uint64_t seed = 3) {
  SynthConfig c;
  c.seed = seed;
  c.n = n;
  return synth_generate(c, default_schema()).dataset;
}

std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  write_csv(out, d, default_schema());
  return out.str();
}

IngestResult ingest(const std::string& text) {
  std::istringstream in(text);
  return ingest_csv(in, default_schema());
}

// Replaces field `column` (0-based) of data row `row` (1-based).
std::string with_field(const std::string& csv, std::size_t row, std::size_t column, const std::string& value) {
  std::istringstream in(csv);
  std::string line, out;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    if (i == row) {
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      f[column] = value;
      line.clear();
      for (std::size_t j = 0; j < f.size(); ++j) line += (j ? "," : "") + f[j];
    }
    out += line + "\n";
  }
  return out;
}

constexpr std::size_t kConcernColumn = 25;

}  // namespace

TEST(Ingest, ValidRowsBecomeRecords) {
  const auto d = small_dataset(3);
  const auto result = ingest(to_csv(d));
  EXPECT_TRUE(result.errors.empty());
  ASSERT_EQ(result.dataset.size(), 3u);
  EXPECT_EQ(result.dataset.provenance.kind, Provenance::Kind::ingested);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(result.dataset.records[i], d.records[i]);
}

TEST(Ingest, CsvRoundTripPreservesEveryRecord) {
  const auto d = small_dataset(200, 17);
  const auto result = ingest(to_csv(d));
  EXPECT_TRUE(result.errors.empty());
  EXPECT_EQ(result.dataset.records, d.records);
}

TEST(Ingest, OutOfRangeConcernIsRejected) {
  ASSERT_EQ(csv_columns(default_schema())[kConcernColumn], "concern");
  const auto csv = with_field(to_csv(small_dataset(1)), 1, kConcernColumn, "9");
  const auto result = ingest(csv);
  EXPECT_EQ(result.dataset.size(), 0u);
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_EQ(result.errors[0].row, 1u);
  EXPECT_NE(result.errors[0].reason.find("concern out of range"), std::string::npos) << result.errors[0].reason;
}

TEST(Ingest, DuplicateIdRejectsSecondRow) {
  const auto csv = with_field(to_csv(small_dataset(2)), 2, 0, "r000001");
  const auto result = ingest(csv);
  ASSERT_EQ(result.dataset.size(), 1u);
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_EQ(result.errors[0].row, 2u);
  EXPECT_NE(result.errors[0].reason.find("duplicate id"), std::string::npos);
}

TEST(Ingest, RowErrorsKeepOrderAndOtherRows) {
  auto csv = to_csv(small_dataset(5));
  csv = with_field(csv, 2, 1, "12-17");
  csv = with_field(csv, 4, csv_columns(default_schema()).size() - 1, "sometimes");
  const auto result = ingest(csv);
  ASSERT_EQ(result.dataset.size(), 3u);
  EXPECT_EQ(result.dataset.records[0].id, "r000001");
  EXPECT_EQ(result.dataset.records[1].id, "r000003");
  EXPECT_EQ(result.dataset.records[2].id, "r000005");
  ASSERT_EQ(result.errors.size(), 2u);
  EXPECT_EQ(result.errors[0].row, 2u);
  EXPECT_NE(result.errors[0].reason.find("age_group"), std::string::npos);
  EXPECT_EQ(result.errors[1].row, 4u);
  EXPECT_NE(result.errors[1].reason.find("contact_info"), std::string::npos);
}

TEST(Ingest, HeaderMismatchIsFatal) {
  auto csv = to_csv(small_dataset(1));
  csv.replace(0, 2, "ID");
  EXPECT_THROW(ingest(csv), ParseError);
  EXPECT_THROW(ingest(""), ParseError);
}

TEST(Ingest, QuotedFields) {
  auto csv = to_csv(small_dataset(1));
  const auto pos = csv.find("\nr000001,");
  csv.replace(pos + 1, 7, "\"r,0\"\"1\"");
  const auto result = ingest(csv);
  ASSERT_EQ(result.dataset.size(), 1u);
  EXPECT_EQ(result.dataset.records[0].id, "r,0\"1");
}

TEST(FilterSatisfied, Examples) {
  std::vector<RespondentRecord> records;
  for (int i = 0; i < 1000; ++i) {
    records.push_back(testutil::make_record("id" + std::to_string(1000 + i), 20, 0, 1, 10,
                                           std::vector<int>(18, 1), i < 155 ? 0 : 1 + i % 4));
  }
  const auto d = testutil::make_dataset(records);
  EXPECT_EQ(filter_satisfied(d).size(), 845u);

  const auto satisfied = filter_satisfied(d);
  EXPECT_EQ(filter_satisfied(satisfied), satisfied);

  for (const auto& r : filter_satisfied(d, 4).records) EXPECT_EQ(r.satisfaction(), 4);
  EXPECT_THROW(filter_satisfied(d, 5), ValidationError);
}

TEST(FilterSatisfied, IdempotentAndMonotoneInThreshold) {
  const auto d = small_dataset(300, 5);
  for (int t = 0; t <= 4; ++t) {
    const auto once = filter_satisfied(d, t);
    EXPECT_EQ(filter_satisfied(once, t), once);
    if (t < 4) {
      const auto higher = filter_satisfied(d, t + 1);
      // subset, order preserved
      std::size_t j = 0;
      for (const auto& r : once.records) {
        if (j < higher.size() && higher.records[j] == r) ++j;
      }
      EXPECT_EQ(j, higher.size());
    }
  }
}

TEST(Snapshot, RoundTripReferenceSizedDataset) {
  const auto d = synth_generate(SynthConfig::reference(), default_schema()).dataset;
  std::stringstream buf;
  save_snapshot(d, buf);
  EXPECT_EQ(load_snapshot(buf, default_schema()), d);
}

TEST(Snapshot, EmptyDatasetRoundTrip) {
  const auto d = testutil::make_dataset({});
  std::stringstream buf;
  save_snapshot(d, buf);
  const auto back = load_snapshot(buf, default_schema());
  EXPECT_TRUE(back.empty());
  EXPECT_EQ(back, d);
}

TEST(Snapshot, WrongSchemaVersionIsRejected) {
  std::stringstream buf;
  save_snapshot(small_dataset(4), buf);
  try {
    load_snapshot(buf, testutil::two_setting_schema());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.subject(), "schema_version");
  }
}

TEST(Snapshot, CorruptPayloadIsRejected) {
  auto text = snapshot_document(small_dataset(4));
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_snapshot(truncated, default_schema()), ParseError);

  const auto pos = text.find("\"choices\":[");
  text.replace(pos, 11, "\"choices\":[9,");
  std::istringstream bad_ordinal(text);
  EXPECT_THROW(load_snapshot(bad_ordinal, default_schema()), ValidationError);
}

TEST(Snapshot, RandomDatasetsRoundTrip) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RespondentRecord> records;
    const int n = std::uniform_int_distribution<int>(0, 60)(rng);
    for (int i = 0; i < n; ++i) records.push_back(testutil::random_record(rng, "x" + std::to_string(i), default_schema()));
    auto d = testutil::make_dataset(records);
    if (trial % 2) d.provenance = {Provenance::Kind::synthetic, rng()};
    std::stringstream buf;
    save_snapshot(d, buf);
    EXPECT_EQ(load_snapshot(buf, default_schema()), d);
  }
}

TEST(Dataset, ValidationRejectsDuplicatesAndBadRecords) {
  auto r = testutil::make_record("a", 20, 0, 1, 10, std::vector<int>(18, 0));
  EXPECT_THROW(validate_dataset(testutil::make_dataset({r, r}), default_schema()), ValidationError);
  auto bad = r;
  bad.coded.concern = 7;
  EXPECT_THROW(validate_record(bad, default_schema()), ValidationError);
  bad = r;
  bad.coded.satisfaction.reset();
  EXPECT_THROW(validate_record(bad, default_schema()), ValidationError);
  bad = r;
  bad.choices.ordinals.pop_back();
  EXPECT_THROW(validate_record(bad, default_schema()), ValidationError);
}
