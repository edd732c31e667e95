#include "privrec/evaluation.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "privrec/error.hpp"

namespace privrec {

using nlohmann::json;

json feedback_to_json(const FeedbackRecord& record) {
  json ratings = json::object();
  for (std::size_t i = 0; i < kFeedbackQuestions.size(); ++i) ratings[std::string(kFeedbackQuestions[i])] = record.ratings[i];
  json doc = {{"session_id", record.session_id}, {"mode", to_string(record.mode)}, {"ratings", std::move(ratings)}};
  if (record.comment) doc["comment"] = *record.comment;
  return doc;
}

FeedbackRecord feedback_from_json(const json& doc) {
  if (!doc.is_object()) throw IntakeError("feedback", "must be an object");
  std::vector<FieldError> errors;
  FeedbackRecord rec;

  if (auto it = doc.find("session_id"); it != doc.end() && it->is_string()) rec.session_id = it->get<std::string>();
  else errors.push_back({"session_id", "required"});

  if (auto it = doc.find("mode"); it != doc.end() && !it->is_null()) {
    try {
      rec.mode = parse_mode(it->is_string() ? it->get<std::string>() : std::string());
    } catch (const ValidationError&) {
      errors.push_back({"mode", "expected knn or popular"});
    }
  }

  auto ratings = doc.find("ratings");
  if (ratings == doc.end() || !ratings->is_object()) {
    errors.push_back({"ratings", "required"});
  } else {
    for (std::size_t i = 0; i < kFeedbackQuestions.size(); ++i) {
      const std::string key(kFeedbackQuestions[i]);
      auto r = ratings->find(key);
      if (r == ratings->end() || !r->is_number_integer()) {
        errors.push_back({key, "rating required"});
        continue;
      }
      const int v = r->get<int>();
      if (v < kLikertMin || v > kLikertMax) {
        errors.push_back({key, "rating out of range 0..4"});
        continue;
      }
      rec.ratings[i] = v;
    }
  }

  if (auto it = doc.find("comment"); it != doc.end() && !it->is_null()) {
    if (it->is_string()) rec.comment = it->get<std::string>();
    else errors.push_back({"comment", "must be a string"});
  }
  if (!errors.empty()) throw IntakeError(std::move(errors));
  return rec;
}

// ---------------------------------------------------------------------------

FeedbackStore::FeedbackStore(std::string path) : path_(std::move(path)) {
  if (!path_.empty() && std::filesystem::exists(path_)) {
    for (auto& r : read(path_)) {
      auto [it, inserted] = index_.try_emplace(r.session_id, records_.size());
      if (inserted) records_.push_back(std::move(r));
      else records_[it->second] = std::move(r);
    }
  }
}

std::vector<FeedbackRecord> FeedbackStore::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feedback store '" + path + "'");
  std::vector<FeedbackRecord> out;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    FeedbackRecord rec;
    try {
      const auto doc = json::parse(line);
      if (!doc.contains("mode")) throw ParseError("missing mode");
      rec = feedback_from_json(doc);
    } catch (const std::exception& e) {
      throw ParseError("feedback store line " + std::to_string(line_no) + ": " + e.what());
    }
    auto [it, inserted] = index.try_emplace(rec.session_id, out.size());
    if (inserted) out.push_back(std::move(rec));
    else out[it->second] = std::move(rec);
  }
  return out;
}

void FeedbackStore::put(FeedbackRecord record) {
  std::unique_lock lock(mutex_);
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app);
    out << feedback_to_json(record).dump() << '\n';
    out.flush();
    if (!out) throw Error("cannot append to feedback store '" + path_ + "'");
  }
  auto [it, inserted] = index_.try_emplace(record.session_id, records_.size());
  if (inserted) records_.push_back(std::move(record));
  else records_[it->second] = std::move(record);
}

std::vector<FeedbackRecord> FeedbackStore::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::size_t FeedbackStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

// ---------------------------------------------------------------------------

EvalSummary eval_summary(std::span<const FeedbackRecord> records) {
  EvalSummary s;
  for (const auto& r : records) {
    auto& m = s.modes[r.mode == RecommendationMode::knn ? 0 : 1];
    m.n++;
    for (std::size_t q = 0; q < r.ratings.size(); ++q) {
      auto& t = m.questions[q];
      t.n++;
      if (r.ratings[q] >= 3) t.high++;
      if (r.ratings[q] <= 1) t.low++;
    }
  }
  return s;
}

json eval_summary_to_json(const EvalSummary& summary) {
  json modes = json::array();
  for (const auto& m : summary.modes) {
    json questions = json::array();
    for (std::size_t q = 0; q < m.questions.size(); ++q) {
      const auto& t = m.questions[q];
      questions.push_back({{"question", kFeedbackQuestions[q]},
                           {"n", t.n},
                           {"high", t.high},
                           {"low", t.low},
                           {"high_fraction", t.high_fraction()},
                           {"low_fraction", t.low_fraction()}});
    }
    modes.push_back({{"mode", to_string(m.mode)}, {"n", m.n}, {"questions", std::move(questions)}});
  }
  return {{"modes", std::move(modes)}};
}

std::string eval_summary_to_text(const EvalSummary& summary) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %-12s %5s %9s %9s\n", "mode", "question", "n", ">=3", "<=1");
  out += buf;
  for (const auto& m : summary.modes) {
    for (std::size_t q = 0; q < m.questions.size(); ++q) {
      const auto& t = m.questions[q];
      std::snprintf(buf, sizeof buf, "%-8s %-12s %5zu %8.1f%% %8.1f%%\n", std::string(to_string(m.mode)).c_str(),
                    std::string(kFeedbackQuestions[q]).c_str(), t.n, 100.0 * t.high_fraction(),
                    100.0 * t.low_fraction());
      out += buf;
    }
  }
  return out;
}

}  // namespace privrec
