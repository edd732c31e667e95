#pragma once

#include <array>
#include <cstddef>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "privrec/recommender.hpp"

namespace privrec {

/// The four evaluation questions, each answered on a 0..4 Likert scale.
inline constexpr std::array<std::string_view, 4> kFeedbackQuestions = {"appropriate", "private", "intend_use",
                                                                       "prefer_tool"};

struct FeedbackRecord {
  std::string session_id;
  RecommendationMode mode = RecommendationMode::knn;
  std::array<int, 4> ratings{};  // kFeedbackQuestions order
  std::optional<std::string> comment;

  bool operator==(const FeedbackRecord&) const = default;
};

nlohmann::json feedback_to_json(const FeedbackRecord& record);
/// Throws IntakeError naming each bad field (missing or out-of-range rating).
FeedbackRecord feedback_from_json(const nlohmann::json& doc);

/// Feedback keyed by session; a resubmission replaces the earlier record.
/// Backed by an append-only JSON-lines file when a path is given: every
/// put() appends one line and loading keeps the last line per session.
/// Writers are serialized; readers see a consistent set of records.
class FeedbackStore {
 public:
  FeedbackStore() = default;
  /// Loads `path` if it exists. Throws ParseError on a corrupt line.
  explicit FeedbackStore(std::string path);

  void put(FeedbackRecord record);
  /// Records in order of each session's first submission.
  std::vector<FeedbackRecord> records() const;
  std::size_t size() const;

  /// Reads a store file without opening it for writing. Throws Error if the
  /// file is missing.
  static std::vector<FeedbackRecord> read(const std::string& path);

 private:
  std::string path_;
  mutable std::shared_mutex mutex_;
  std::vector<FeedbackRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct QuestionTally {
  std::size_t n = 0;
  std::size_t high = 0;  // rating >= 3
  std::size_t low = 0;   // rating <= 1
  double high_fraction() const noexcept { return n ? static_cast<double>(high) / static_cast<double>(n) : 0.0; }
  double low_fraction() const noexcept { return n ? static_cast<double>(low) / static_cast<double>(n) : 0.0; }
};

struct ModeTally {
  RecommendationMode mode = RecommendationMode::knn;
  std::size_t n = 0;
  std::array<QuestionTally, 4> questions{};
};

struct EvalSummary {
  std::array<ModeTally, 2> modes{ModeTally{RecommendationMode::knn}, ModeTally{RecommendationMode::popular}};
};

EvalSummary eval_summary(std::span<const FeedbackRecord> records);
nlohmann::json eval_summary_to_json(const EvalSummary& summary);
std::string eval_summary_to_text(const EvalSummary& summary);

}  // namespace privrec
