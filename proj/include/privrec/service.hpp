#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json_fwd.hpp>

#include "privrec/evaluation.hpp"
#include "privrec/recommender.hpp"
#include "privrec/respondent_store.hpp"
#include "privrec/settings_schema.hpp"

namespace privrec {

struct ServiceConfig {
  std::shared_ptr<const SettingsSchema> schema;  // null: schema endpoints answer 500
  std::shared_ptr<const Dataset> dataset;        // null: data endpoints answer 409
  std::optional<std::uint64_t> seed;             // A/B assignment; random_device when absent
  KnnConfig knn{};
  std::string feedback_path;  // empty: feedback kept in memory only
  std::function<void(std::string_view)> log;
};

struct SessionAssignment {
  std::string session_id;
  RecommendationMode mode = RecommendationMode::knn;
  std::chrono::system_clock::time_point created_at;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Request handling for the HTTP API, independent of any transport.
///
///   GET  /api/health         liveness
///   GET  /api/schema         active settings schema
///   GET  /api/questionnaire  intake questionnaire
///   POST /api/session        new session with a randomly assigned mode
///   POST /api/recommend      {session_id, intake} -> recommendation
///   POST /api/feedback       {session_id, ratings, comment?}
///   GET  /api/stats          analysis document of the active dataset
///   GET  /api/eval           per-mode feedback summary
///
/// Every request works on the dataset snapshot current when it started;
/// swap_dataset() never affects a request already in flight.
class Service {
 public:
  explicit Service(ServiceConfig config);

  HttpResponse handle(const HttpRequest& request);

  SessionAssignment create_session();
  std::optional<SessionAssignment> session(std::string_view session_id) const;

  void swap_dataset(std::shared_ptr<const Dataset> dataset);
  std::shared_ptr<const Dataset> dataset() const;

  const FeedbackStore& feedback() const noexcept { return feedback_; }

 private:
  struct SessionState {
    SessionAssignment assignment;
    bool recommended = false;
  };

  HttpResponse get_schema() const;
  HttpResponse get_questionnaire() const;
  HttpResponse post_session();
  HttpResponse post_recommend(const std::string& body);
  HttpResponse post_feedback(const std::string& body);
  HttpResponse get_stats() const;
  HttpResponse get_eval() const;
  void log(std::string_view message) const;

  ServiceConfig config_;

  mutable std::mutex dataset_mutex_;
  std::shared_ptr<const Dataset> dataset_;

  mutable std::mutex session_mutex_;
  std::mt19937_64 rng_;
  std::unordered_map<std::string, SessionState> sessions_;

  FeedbackStore feedback_;
};

/// Rendering shared by every document the CLI and the service emit.
std::string render_document(const nlohmann::json& doc);

}  // namespace privrec
