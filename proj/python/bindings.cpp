#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "privrec/attribute_coding.hpp"
#include "privrec/error.hpp"
#include "privrec/privacy_scoring.hpp"
#include "privrec/recommender.hpp"
#include "privrec/respondent_store.hpp"
#include "privrec/settings_schema.hpp"
#include "privrec/stats.hpp"
#include "privrec/synth.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace privrec;

// Documents cross the boundary as JSON text; the Python package decodes them.

namespace {

SettingsSchema schema_from(const std::optional<std::string>& text) {
  if (!text) return default_schema();
  std::istringstream in(*text);
  return load_schema(in);
}

Dataset dataset_from(const std::string& snapshot, const SettingsSchema& schema) {
  std::istringstream in(snapshot);
  return load_snapshot(in, schema);
}

json parse(const std::string& text) {
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("not valid JSON");
  return doc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "privrec native core";

  auto base = py::register_exception<Error>(m, "PrivrecError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

  m.def("default_schema", [] { return emit_schema(default_schema()); });

  m.def(
      "score",
      [](const std::string& choices, const std::optional<std::string>& schema_text) {
        const auto schema = schema_from(schema_text);
        const auto doc = parse(choices);
        if (!doc.is_object()) throw ParseError("choices must map setting ids to choice ids");
        ChoiceMap map;
        for (const auto& [k, v] : doc.items()) {
          if (!v.is_string()) throw ValidationError(k, "choice id must be a string");
          map[k] = v.get<std::string>();
        }
        return total_score(map, schema);
      },
      py::arg("choices"), py::arg("schema") = py::none());

  m.def(
      "synth",
      [](std::uint64_t seed, std::size_t n, bool reference, double dissatisfied, const std::vector<std::string>& plants,
         const std::optional<std::string>& schema_text) {
        const auto schema = schema_from(schema_text);
        SynthConfig c = reference ? SynthConfig::reference(seed, n) : SynthConfig{};
        c.seed = seed;
        c.n = n;
        c.dissatisfied_fraction = dissatisfied;
        for (const auto& p : plants) c.planted_effects.push_back(parse_planted_effect(p));
        auto result = synth_generate(c, schema);
        return py::make_tuple(snapshot_document(result.dataset), result.warnings);
      },
      py::arg("seed") = 42, py::arg("n") = 451, py::arg("reference") = false, py::arg("dissatisfied") = 0.155,
      py::arg("plants") = std::vector<std::string>{}, py::arg("schema") = py::none());

  m.def(
      "ingest_csv",
      [](const std::string& text, const std::optional<std::string>& schema_text) {
        const auto schema = schema_from(schema_text);
        std::istringstream in(text);
        const auto result = ingest_csv(in, schema);
        std::vector<std::pair<std::size_t, std::string>> errors;
        for (const auto& e : result.errors) errors.emplace_back(e.row, e.reason);
        return py::make_tuple(snapshot_document(result.dataset), errors);
      },
      py::arg("text"), py::arg("schema") = py::none());

  m.def(
      "filter_satisfied",
      [](const std::string& snapshot, int threshold, const std::optional<std::string>& schema_text) {
        return snapshot_document(filter_satisfied(dataset_from(snapshot, schema_from(schema_text)), threshold));
      },
      py::arg("snapshot"), py::arg("threshold") = 0, py::arg("schema") = py::none());

  m.def(
      "recommend",
      [](const std::string& snapshot, const std::string& intake, const std::string& mode, std::size_t k, int threshold,
         bool show_neighbors, const std::optional<std::string>& schema_text) {
        const auto schema = schema_from(schema_text);
        const auto dataset = dataset_from(snapshot, schema);
        const auto inputs = code_recommendation_intake(intake_from_json(parse(intake)));
        KnnConfig cfg;
        cfg.k = k;
        cfg.satisfaction_threshold = threshold;
        const auto rec = parse_mode(mode) == RecommendationMode::knn
                             ? knn_recommend(build_feature_vector(inputs), dataset, cfg, schema)
                             : popular_recommend(dataset, schema);
        return recommendation_to_json(rec, schema, show_neighbors).dump();
      },
      py::arg("snapshot"), py::arg("intake"), py::arg("mode") = "knn", py::arg("k") = 18, py::arg("threshold") = 0,
      py::arg("show_neighbors") = false, py::arg("schema") = py::none());

  m.def(
      "analyze",
      [](const std::string& snapshot, const std::optional<std::string>& schema_text) {
        const auto schema = schema_from(schema_text);
        return analysis_to_json(analyze(dataset_from(snapshot, schema), schema)).dump();
      },
      py::arg("snapshot"), py::arg("schema") = py::none());

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("p_value", &p_value, py::arg("r"), py::arg("n"));
}
