#include "privrec/cli.hpp"

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "privrec/error.hpp"
#include "privrec/evaluation.hpp"
#include "privrec/http_server.hpp"
#include "privrec/io.hpp"
#include "privrec/recommender.hpp"
#include "privrec/service.hpp"
#include "privrec/stats.hpp"
#include "privrec/synth.hpp"

namespace privrec {

using nlohmann::json;

namespace {

SettingsSchema schema_or_default(const std::string& path) {
  return path.empty() ? default_schema() : load_schema_file(path);
}

json read_json_file(const std::string& path) {
  const auto text = read_file(path);
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
  return doc;
}

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) out << content;
  else write_file_atomically(out_path, content);
}

struct Options {
  std::string schema;

  // synth
  std::uint64_t seed = 42;
  std::size_t n = 451;
  double dissatisfied = 0.155;
  std::vector<std::string> plants;
  bool reference = false;
  std::string out;

  // ingest
  std::string csv;
  bool strict = false;

  // analyze / recommend / serve
  std::string data;
  std::string format = "text";
  std::string mode = "knn";
  std::string intake;
  std::size_t k = 18;
  int threshold = 0;
  bool show_neighbors = false;

  // score
  std::string choices;

  // serve
  std::string host = "0.0.0.0";
  int port = 8080;
  std::optional<std::uint64_t> serve_seed;
  std::string feedback;
};

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  const auto schema = schema_or_default(o.schema);
  SynthConfig config = o.reference ? SynthConfig::reference(o.seed, o.n) : SynthConfig{};
  config.seed = o.seed;
  config.n = o.n;
  config.dissatisfied_fraction = o.dissatisfied;
  for (const auto& spec : o.plants) config.planted_effects.push_back(parse_planted_effect(spec));

  const auto result = synth_generate(config, schema);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  write_file_atomically(o.out, snapshot_document(result.dataset));

  const auto retained = filter_satisfied(result.dataset).size();
  char line[160];
  std::snprintf(line, sizeof line, "wrote %zu records to %s; %zu retained after default satisfaction filter (%.1f%%)\n",
                result.dataset.size(), o.out.c_str(), retained,
                result.dataset.empty() ? 0.0 : 100.0 * static_cast<double>(retained) / static_cast<double>(result.dataset.size()));
  out << line;
  return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  const auto schema = schema_or_default(o.schema);
  std::istringstream in(read_file(o.csv));
  const auto result = ingest_csv(in, schema);
  for (const auto& e : result.errors) err << "row " << e.row << ": " << e.reason << '\n';
  if (o.strict && !result.errors.empty()) {
    err << result.errors.size() << " invalid rows; nothing written\n";
    return kExitUserError;
  }
  write_file_atomically(o.out, snapshot_document(result.dataset));
  out << "ingested " << result.dataset.size() << " records, rejected " << result.errors.size() << " rows\n";
  return kExitOk;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream&) {
  const auto schema = schema_or_default(o.schema);
  const auto dataset = load_snapshot_file(o.data, schema);
  const auto report = analyze(dataset, schema);
  emit(o.format == "doc" ? render_document(analysis_to_json(report)) : analysis_to_text(report), o.out, out);
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream&) {
  const auto schema = schema_or_default(o.schema);
  const auto doc = read_json_file(o.choices);
  const json& node = doc.contains("choices") ? doc.at("choices") : doc;
  if (!node.is_object()) throw ParseError("choices document must map setting ids to choice ids");
  ChoiceMap choices;
  for (const auto& [key, value] : node.items()) {
    if (!value.is_string()) throw ValidationError(key, "choice id must be a string");
    choices[key] = value.get<std::string>();
  }
  char line[32];
  std::snprintf(line, sizeof line, "%.2f\n", total_score(choices, schema));
  out << line;
  return kExitOk;
}

int cmd_recommend(const Options& o, std::ostream& out, std::ostream& err) {
  const auto schema = schema_or_default(o.schema);
  const auto dataset = load_snapshot_file(o.data, schema);
  const auto mode = parse_mode(o.mode);
  const auto doc = read_json_file(o.intake);
  const auto inputs = code_recommendation_intake(intake_from_json(doc.contains("intake") ? doc.at("intake") : doc));

  KnnConfig config;
  config.k = o.k;
  config.satisfaction_threshold = o.threshold;
  Recommendation rec;
  try {
    rec = mode == RecommendationMode::knn
              ? knn_recommend(build_feature_vector(inputs, config.normalization), dataset, config, schema)
              : popular_recommend(dataset, schema);
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  }
  emit(render_document(recommendation_to_json(rec, schema, o.show_neighbors)), o.out, out);
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  ServiceConfig config;
  config.schema = std::make_shared<const SettingsSchema>(schema_or_default(o.schema));
  if (!o.data.empty()) config.dataset = std::make_shared<const Dataset>(load_snapshot_file(o.data, *config.schema));
  config.seed = o.serve_seed;
  config.knn.k = o.k;
  config.knn.satisfaction_threshold = o.threshold;
  config.feedback_path = o.feedback;
  config.log = [&err](std::string_view msg) { err << msg << '\n'; };

  // SIGINT/SIGTERM are consumed by a dedicated thread so shutdown happens
  // outside signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  struct MaskRestore {
    sigset_t mask;
    ~MaskRestore() { pthread_sigmask(SIG_SETMASK, &mask, nullptr); }
  } restore{previous};

  Service service(std::move(config));
  HttpServer server(service);
  const int port = server.bind(o.host, o.port);
  out << "serving on " << o.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  out << "shut down" << std::endl;
  return kExitOk;
}

int cmd_eval_report(const Options& o, std::ostream& out, std::ostream&) {
  const auto records = FeedbackStore::read(o.feedback);
  const auto summary = eval_summary(records);
  emit(o.format == "doc" ? render_document(eval_summary_to_json(summary)) : eval_summary_to_text(summary), o.out,
       out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Privacy settings scoring, recommendation and analysis"};
  app.require_subcommand(1, 1);
  Options o;

  auto schema_opt = [&](CLI::App* sub) {
    sub->add_option("--schema", o.schema, "Settings schema file (default: bundled 18-setting schema)");
  };

  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic respondent snapshot");
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--n", o.n, "Number of records")->capture_default_str();
  synth->add_option("--dissatisfied", o.dissatisfied, "Fraction of records with satisfaction 0")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth->add_option("--plant", o.plants, "Planted effect attr:+|-:strength (strength may be 'calibrated')");
  synth->add_flag("--reference", o.reference, "Plant the calibrated reference effects");
  synth->add_option("--out", o.out, "Snapshot file to write")->required();
  schema_opt(synth);

  auto* ingest = app.add_subcommand("ingest", "Ingest a survey CSV export into a snapshot");
  ingest->add_option("--csv", o.csv, "CSV file")->required();
  ingest->add_option("--out", o.out, "Snapshot file to write")->required();
  ingest->add_flag("--strict", o.strict, "Fail when any row is invalid");
  schema_opt(ingest);

  auto* analyze_cmd = app.add_subcommand("analyze", "Correlation report and score distribution");
  analyze_cmd->add_option("--data", o.data, "Snapshot file")->required();
  analyze_cmd->add_option("--format", o.format, "text or doc")->check(CLI::IsMember({"text", "doc"}))->capture_default_str();
  analyze_cmd->add_option("--out", o.out, "Write to file instead of stdout");
  schema_opt(analyze_cmd);

  auto* score = app.add_subcommand("score", "Privacy score of a settings configuration");
  score->add_option("--choices", o.choices, "Choices document")->required();
  schema_opt(score);

  auto* recommend = app.add_subcommand("recommend", "Recommend settings for an intake");
  recommend->add_option("--data", o.data, "Snapshot file")->required();
  recommend->add_option("--mode", o.mode, "knn or popular")->check(CLI::IsMember({"knn", "popular"}))->capture_default_str();
  recommend->add_option("--intake", o.intake, "Intake document")->required();
  recommend->add_option("--k", o.k, "Neighbour count")->check(CLI::PositiveNumber)->capture_default_str();
  recommend->add_option("--threshold", o.threshold, "Drop records with satisfaction <= threshold")
      ->check(CLI::Range(0, 4))
      ->capture_default_str();
  recommend->add_flag("--show-neighbors", o.show_neighbors, "Include neighbour ids in the output");
  recommend->add_option("--out", o.out, "Write to file instead of stdout");
  schema_opt(recommend);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", o.host)->capture_default_str();
  serve->add_option("--port", o.port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--data", o.data, "Snapshot file");
  serve->add_option("--seed", o.serve_seed, "Seed for session mode assignment");
  serve->add_option("--feedback", o.feedback, "Feedback store (JSON lines); in-memory when omitted");
  serve->add_option("--k", o.k, "Neighbour count")->check(CLI::PositiveNumber)->capture_default_str();
  serve->add_option("--threshold", o.threshold)->check(CLI::Range(0, 4))->capture_default_str();
  schema_opt(serve);

  auto* eval = app.add_subcommand("eval-report", "Per-mode summary of collected feedback");
  eval->add_option("--feedback", o.feedback, "Feedback store")->required();
  eval->add_option("--format", o.format, "text or doc")->check(CLI::IsMember({"text", "doc"}))->capture_default_str();
  eval->add_option("--out", o.out, "Write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (*synth) return cmd_synth(o, out, err);
    if (*ingest) return cmd_ingest(o, out, err);
    if (*analyze_cmd) return cmd_analyze(o, out, err);
    if (*score) return cmd_score(o, out, err);
    if (*recommend) return cmd_recommend(o, out, err);
    if (*serve) return cmd_serve(o, out, err);
    if (*eval) return cmd_eval_report(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace privrec
