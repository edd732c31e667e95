#include "privrec/service.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "privrec/error.hpp"
#include "privrec/stats.hpp"

namespace privrec {

using nlohmann::json;

std::string render_document(const json& doc) { return doc.dump(2) + "\n"; }

namespace {

HttpResponse ok(const json& doc) { return {200, render_document(doc)}; }

HttpResponse error_response(int status, std::string_view message, const std::vector<FieldError>& fields = {}) {
  json doc = {{"error", message}};
  if (!fields.empty()) {
    json list = json::array();
    for (const auto& f : fields) list.push_back({{"field", f.field}, {"message", f.message}});
    doc["fields"] = std::move(list);
  }
  return {status, render_document(doc)};
}

std::optional<json> parse_body(const std::string& body) {
  auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  return doc;
}

std::string hex_id(std::uint64_t hi, std::uint64_t lo) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      dataset_(config_.dataset),
      rng_(config_.seed ? *config_.seed : std::random_device{}()),
      feedback_(config_.feedback_path) {}

void Service::log(std::string_view message) const {
  if (config_.log) config_.log(message);
}

void Service::swap_dataset(std::shared_ptr<const Dataset> dataset) {
  std::lock_guard lock(dataset_mutex_);
  dataset_ = std::move(dataset);
}

std::shared_ptr<const Dataset> Service::dataset() const {
  std::lock_guard lock(dataset_mutex_);
  return dataset_;
}

SessionAssignment Service::create_session() {
  std::lock_guard lock(session_mutex_);
  SessionAssignment a;
  a.mode = (rng_() >> 63) ? RecommendationMode::popular : RecommendationMode::knn;
  do {
    const auto hi = rng_();
    a.session_id = hex_id(hi, rng_());
  } while (sessions_.count(a.session_id));
  a.created_at = std::chrono::system_clock::now();
  sessions_.emplace(a.session_id, SessionState{a, false});
  return a;
}

std::optional<SessionAssignment> Service::session(std::string_view session_id) const {
  std::lock_guard lock(session_mutex_);
  auto it = sessions_.find(std::string(session_id));
  if (it == sessions_.end()) return std::nullopt;
  return it->second.assignment;
}

HttpResponse Service::handle(const HttpRequest& request) {
  try {
    const auto& m = request.method;
    const auto& p = request.path;
    if (m == "GET" && p == "/api/health") return ok({{"status", "ok"}});
    if (m == "GET" && p == "/api/schema") return get_schema();
    if (m == "GET" && p == "/api/questionnaire") return get_questionnaire();
    if (m == "POST" && p == "/api/session") return post_session();
    if (m == "POST" && p == "/api/recommend") return post_recommend(request.body);
    if (m == "POST" && p == "/api/feedback") return post_feedback(request.body);
    if (m == "GET" && p == "/api/stats") return get_stats();
    if (m == "GET" && p == "/api/eval") return get_eval();
    return error_response(404, "no route for " + m + " " + p);
  } catch (const std::exception& e) {
    log(std::string("internal error: ") + e.what());
    return error_response(500, "internal error");
  }
}

HttpResponse Service::get_schema() const {
  if (!config_.schema) return error_response(500, "no settings schema configured");
  return ok(schema_to_json(*config_.schema));
}

HttpResponse Service::get_questionnaire() const { return ok(Questionnaire::standard().document()); }

HttpResponse Service::post_session() {
  const auto a = create_session();
  const auto created =
      std::chrono::duration_cast<std::chrono::milliseconds>(a.created_at.time_since_epoch()).count();
  return ok({{"session_id", a.session_id}, {"mode", to_string(a.mode)}, {"created_at_ms", created}});
}

HttpResponse Service::post_recommend(const std::string& body) {
  if (!config_.schema) return error_response(500, "no settings schema configured");
  const auto doc = parse_body(body);
  if (!doc) return error_response(400, "request body must be a JSON object");

  auto sid = doc->find("session_id");
  if (sid == doc->end() || !sid->is_string()) return error_response(400, "invalid request", {{"session_id", "required"}});
  const auto assignment = session(sid->get<std::string>());
  if (!assignment) return error_response(404, "unknown session");

  auto intake_node = doc->find("intake");
  if (intake_node == doc->end()) return error_response(400, "invalid intake", {{"intake", "required"}});
  FeatureInputs inputs;
  try {
    inputs = code_recommendation_intake(intake_from_json(*intake_node));
  } catch (const IntakeError& e) {
    return error_response(400, "invalid intake", e.errors());
  }

  const auto snapshot = dataset();
  if (!snapshot) return error_response(409, "no dataset loaded");

  Recommendation rec;
  try {
    if (assignment->mode == RecommendationMode::knn) {
      rec = knn_recommend(build_feature_vector(inputs, config_.knn.normalization), *snapshot, config_.knn,
                          *config_.schema);
      std::string ids;
      for (const auto& id : rec.neighbor_ids) ids += (ids.empty() ? "" : ",") + id;
      log("session " + assignment->session_id + " knn neighbors: " + ids);
    } else {
      rec = popular_recommend(*snapshot, *config_.schema);
    }
  } catch (const InsufficientDataError& e) {
    return error_response(409, e.what());
  }

  {
    std::lock_guard lock(session_mutex_);
    sessions_[assignment->session_id].recommended = true;
  }
  return ok(recommendation_to_json(rec, *config_.schema, false));
}

HttpResponse Service::post_feedback(const std::string& body) {
  const auto doc = parse_body(body);
  if (!doc) return error_response(400, "request body must be a JSON object");

  FeedbackRecord rec;
  try {
    rec = feedback_from_json(*doc);
  } catch (const IntakeError& e) {
    return error_response(400, "invalid feedback", e.errors());
  }

  bool recommended = false;
  std::optional<SessionAssignment> assignment;
  {
    std::lock_guard lock(session_mutex_);
    if (auto it = sessions_.find(rec.session_id); it != sessions_.end()) {
      assignment = it->second.assignment;
      recommended = it->second.recommended;
    }
  }
  if (!assignment) return error_response(404, "unknown session");
  if (doc->contains("mode") && rec.mode != assignment->mode) {
    return error_response(400, "invalid feedback", {{"mode", "does not match the session's assignment"}});
  }
  if (!recommended) return error_response(409, "session has not received a recommendation");

  rec.mode = assignment->mode;
  feedback_.put(rec);
  return ok({{"status", "stored"}, {"session_id", rec.session_id}});
}

HttpResponse Service::get_stats() const {
  if (!config_.schema) return error_response(500, "no settings schema configured");
  const auto snapshot = dataset();
  if (!snapshot || snapshot->empty()) return error_response(409, "no dataset loaded");
  try {
    return ok(analysis_to_json(analyze(*snapshot, *config_.schema)));
  } catch (const UndefinedStatisticError& e) {
    return error_response(409, e.what());
  }
}

HttpResponse Service::get_eval() const {
  const auto records = feedback_.records();
  return ok(eval_summary_to_json(eval_summary(records)));
}

}  // namespace privrec
