#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "privrec/error.hpp"
#include "privrec/stats.hpp"
#include "test_support.hpp"

using namespace privrec;

TEST(Pearson, Examples) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  EXPECT_NEAR(pearson(x, std::vector<double>{2, 4, 6, 8, 10}), 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0, 1e-15);
  EXPECT_NEAR(pearson(x, std::vector<double>{1, 3, 2, 5, 4}), 0.8, 1e-12);
}

TEST(Pearson, UndefinedInputs) {
  const std::vector<double> x = {1, 2, 3};
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), UndefinedStatisticError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), UndefinedStatisticError);
  EXPECT_THROW(pearson(x, std::vector<double>{4, 4, 4}), UndefinedStatisticError);
}

TEST(Pearson, SymmetricAndAffineInvariant) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(40), y(40), ax(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = N(rng);
      y[i] = 0.3 * x[i] + N(rng);
    }
    const double a = 0.1 + std::abs(N(rng)) * 5, b = N(rng) * 100;
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = a * x[i] + b;
    const double r = pearson(x, y);
    EXPECT_NEAR(pearson(y, x), r, 1e-12);
    EXPECT_NEAR(pearson(ax, y), r, 1e-9);
    for (auto& v : ax) v = -v;
    EXPECT_NEAR(pearson(ax, y), -r, 1e-9);
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(PValue, Endpoints) {
  EXPECT_EQ(p_value(0.0, 10), 1.0);
  EXPECT_EQ(p_value(1.0, 10), 0.0);
  EXPECT_EQ(p_value(-1.0, 451), 0.0);
}

TEST(PValue, MatchesQuadratureOracle) {
  EXPECT_NEAR(p_value(0.5, 10), static_cast<double>(oracle::t_two_tailed_quadrature(0.5, 10)), 1e-10);
  const double p = p_value(0.27, 451);
  EXPECT_GT(p, 1e-9);
  EXPECT_LT(p, 1e-8);
  EXPECT_NEAR(p / static_cast<double>(oracle::t_two_tailed_quadrature(0.27, 451)), 1.0, 1e-8);
}

TEST(PValue, AgreesWithOracleAcrossGrid) {
  for (std::size_t n : {5u, 12u, 30u, 100u, 451u}) {
    for (double r : {0.01, 0.1, 0.3, 0.6, 0.9}) {
      const double expected = static_cast<double>(oracle::t_two_tailed_quadrature(r, n));
      EXPECT_NEAR(p_value(r, n), expected, 1e-10 + 1e-8 * expected) << "r=" << r << " n=" << n;
    }
  }
}

TEST(PValue, SymmetricAndMonotone) {
  for (std::size_t n : {4u, 20u, 451u}) {
    double prev = 1.0;
    for (int i = 1; i < 100; ++i) {
      const double r = i / 100.0;
      const double p = p_value(r, n);
      EXPECT_EQ(p_value(-r, n), p);
      EXPECT_LE(p, prev);
      EXPECT_GE(p, 0.0);
      prev = p;
    }
  }
  // Larger samples make the same r more significant.
  EXPECT_LT(p_value(0.2, 200), p_value(0.2, 50));
}

TEST(PValue, IncompleteBetaKnownValues) {
  EXPECT_NEAR(regularized_incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(regularized_incomplete_beta(2, 3, 0.4), 0.5248, 1e-12);
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(significance_stars(0.001), "**");
  EXPECT_EQ(significance_stars(0.01), "**");
  EXPECT_EQ(significance_stars(0.03), "*");
  EXPECT_EQ(significance_stars(0.2), "");
}

TEST(CorrelationReport, IdenticalRecordsSkipEverything) {
  std::vector<RespondentRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(testutil::make_record("s" + std::to_string(i), 30, 0, 2, 10, std::vector<int>(18, 2)));
  const auto rows = correlation_report(testutil::make_dataset(records), default_schema());
  ASSERT_EQ(rows.size(), coded_attribute_names().size());
  for (const auto& row : rows) {
    EXPECT_TRUE(row.skipped()) << row.attribute;
    EXPECT_EQ(row.n, 10u);
  }
}

TEST(CorrelationReport, ConstantAttributeSkippedOthersComputed) {
  std::mt19937_64 rng(6);
  std::vector<RespondentRecord> records;
  for (int i = 0; i < 30; ++i) {
    auto r = testutil::random_record(rng, "v" + std::to_string(i), default_schema());
    r.coded.gender_female = 1;
    records.push_back(r);
  }
  for (const auto& row : correlation_report(testutil::make_dataset(records), default_schema())) {
    if (row.attribute == "female") EXPECT_TRUE(row.skipped());
    if (row.attribute == "concern") {
      ASSERT_FALSE(row.skipped());
      EXPECT_EQ(*row.p, p_value(*row.r, 30));
    }
  }
}

TEST(CorrelationReport, TooFewRecords) {
  EXPECT_THROW(correlation_report(testutil::make_dataset({}), default_schema()), UndefinedStatisticError);
  std::mt19937_64 rng(1);
  const auto two = testutil::make_dataset({testutil::random_record(rng, "a", default_schema()),
                                          testutil::random_record(rng, "b", default_schema())});
  EXPECT_THROW(correlation_report(two, default_schema()), UndefinedStatisticError);
}

TEST(GroupMeans, SmallOldestAgeGroupMergesIntoPrevious) {
  std::vector<RespondentRecord> records;
  auto add = [&](int age, int ordinal, int count) {
    for (int i = 0; i < count; ++i)
      records.push_back(testutil::make_record("g" + std::to_string(records.size()), age, 0, 1, 10,
                                             std::vector<int>(18, ordinal)));
  };
  add(20, 0, 3);
  add(60, 3, 4);
  add(70, 0, 2);
  const auto report = group_means(testutil::make_dataset(records), default_schema(), GroupingAttribute::age);
  ASSERT_EQ(report.groups.size(), 2u);
  EXPECT_EQ(report.groups[0].label, "18-24");
  EXPECT_EQ(report.groups[0].mean_score, 0.0);
  EXPECT_EQ(report.groups[1].label, "55+");
  EXPECT_EQ(report.groups[1].count, 6u);
  EXPECT_NEAR(report.groups[1].mean_score, 10.0 * 4 / 6, 1e-12);

  add(70, 0, 3);
  const auto big = group_means(testutil::make_dataset(records), default_schema(), GroupingAttribute::age);
  ASSERT_EQ(big.groups.size(), 3u);
  EXPECT_EQ(big.groups[1].label, "55-64");
  EXPECT_EQ(big.groups[2].label, "65+");
}

TEST(GroupMeans, ByConcern) {
  std::vector<RespondentRecord> records;
  for (int c = 0; c <= 4; ++c)
    records.push_back(testutil::make_record("k" + std::to_string(c), 30, 0, c, 10, std::vector<int>(18, c % 4)));
  const auto report = group_means(testutil::make_dataset(records), default_schema(), parse_grouping("concern"));
  ASSERT_EQ(report.groups.size(), 5u);
  EXPECT_EQ(report.groups[4].label, "4");
  EXPECT_EQ(report.groups[4].mean_score, 0.0);
  EXPECT_THROW(parse_grouping("height"), ValidationError);
}

TEST(Analysis, DocumentShape) {
  std::mt19937_64 rng(9);
  std::vector<RespondentRecord> records;
  for (int i = 0; i < 40; ++i) records.push_back(testutil::random_record(rng, "d" + std::to_string(i), default_schema()));
  const auto report = analyze(testutil::make_dataset(records), default_schema());
  const auto doc = analysis_to_json(report);
  EXPECT_EQ(doc.at("correlations").size(), coded_attribute_names().size());
  EXPECT_EQ(doc.at("distribution").at("n"), 40);
  EXPECT_TRUE(doc.at("group_means").contains("age"));
  EXPECT_TRUE(doc.at("group_means").contains("concern"));
  const auto text = analysis_to_text(report);
  EXPECT_NE(text.find("neuroticism"), std::string::npos);
}
