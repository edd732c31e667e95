// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "privrec/cli.hpp"
#include "privrec/io.hpp"
#include "privrec/privacy_scoring.hpp"
#include "privrec/recommender.hpp"
#include "privrec/service.hpp"
#include "privrec/stats.hpp"
#include "privrec/synth.hpp"
#include "test_support.hpp"

using namespace privrec;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail.clear();
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const Dataset& reference() {
  static const Dataset d = load_snapshot_file(testutil::data_path(testutil::kReferenceFixture), default_schema());
  return d;
}

Outcome scoring_bounds() {
  Outcome o;
  const auto& schema = default_schema();
  ChoiceVector hi, lo;
  for (const auto& s : schema.settings()) {
    hi.ordinals.push_back(static_cast<int>(s.choice_count()) - 1);
    lo.ordinals.push_back(0);
  }
  const double top = total_score(hi, schema), bottom = total_score(lo, schema);
  o.check(std::abs(top - 10.0) <= 1e-9, "most private scored " + fmt("%.12f", top));
  o.check(std::abs(bottom) <= 1e-9, "least private scored " + fmt("%.12f", bottom));
  o.detail = o.ok ? "max " + fmt("%.1f", top) + ", min " + fmt("%.1f", bottom) : o.detail;
  return o;
}

Outcome knn_oracle() {
  Outcome o;
  const auto& d = reference();
  std::mt19937_64 rng(20240601);
  int matched = 0;
  for (int q = 0; q < 100; ++q) {
    const auto in = testutil::random_query(rng);
    const auto got = knn_recommend(build_feature_vector(in), d, KnnConfig{}, default_schema()).choices().ordinals;
    const auto want =
        oracle::knn(oracle::features(in.age_decade, in.ethnicity_index, in.concern, in.neuroticism), d, 18, 0);
    if (got == want) ++matched;
  }
  o.check(matched == 100, std::to_string(100 - matched) + " queries disagree");
  if (o.ok) o.detail = "100/100 queries match";
  return o;
}

Outcome p_value_fidelity() {
  Outcome o;
  const double p = p_value(0.27, 451);
  const double want = static_cast<double>(oracle::t_two_tailed_quadrature(0.27, 451));
  const double p2 = p_value(0.5, 10);
  const double want2 = static_cast<double>(oracle::t_two_tailed_quadrature(0.5, 10));
  o.check(p >= 1e-9 && p <= 1e-8, "p(0.27,451)=" + fmt("%.3e", p) + " outside [1e-9,1e-8]");
  o.check(std::abs(p - want) <= 1e-10, "differs from quadrature by " + fmt("%.2e", std::abs(p - want)));
  o.check(std::abs(p2 - want2) <= 1e-10, "p(0.5,10) differs from quadrature by " + fmt("%.2e", std::abs(p2 - want2)));
  for (std::size_t n : {3u, 10u, 451u, 100000u}) o.check(p_value(0.0, n) == 1.0, "p(0," + std::to_string(n) + ") != 1");
  if (o.ok) o.detail = "p(0.27,451)=" + fmt("%.3e", p) + ", |err|=" + fmt("%.1e", std::abs(p - want));
  return o;
}

Outcome sign_recovery() {
  Outcome o;
  const auto d = synth_generate(SynthConfig::reference(42, 451), default_schema()).dataset;
  const auto rows = correlation_report(d, default_schema());
  const std::vector<std::pair<std::string, int>> expected = {
      {"neuroticism", 1}, {"age", -1}, {"white", -1}, {"asian", 1}, {"concern", 1}};
  std::string summary;
  for (const auto& [attr, sign] : expected) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const CorrelationResult& r) { return r.attribute == attr; });
    if (it == rows.end() || it->skipped()) {
      o.check(false, attr + " missing");
      continue;
    }
    o.check((*it->r > 0 ? 1 : -1) == sign, attr + " has the wrong sign");
    o.check(*it->p < 0.05, attr + " p=" + fmt("%.3g", *it->p));
    if (attr == "concern") o.check(std::abs(*it->r - 0.27) <= 0.10, "concern r=" + fmt("%.3f", *it->r));
    summary += (summary.empty() ? "" : " ") + attr + "=" + fmt("%+.3f", *it->r);
  }
  if (o.ok) o.detail = summary;
  return o;
}

Outcome filter_retention() {
  Outcome o;
  SynthConfig c;
  c.n = 1000;
  c.dissatisfied_fraction = 0.155;
  const auto d = synth_generate(c, default_schema()).dataset;
  const double kept = static_cast<double>(filter_satisfied(d).size()) / static_cast<double>(d.size());
  o.check(std::abs(kept - 0.845) <= 0.005, "retained " + fmt("%.2f%%", 100 * kept));
  const auto ref = reference();
  if (o.ok) {
    o.detail = "retained " + fmt("%.1f%%", 100 * kept) + " of 1000; " + std::to_string(filter_satisfied(ref).size()) +
               " of 451 in the reference snapshot";
  }
  return o;
}

ServiceConfig service_config(std::uint64_t seed) {
  ServiceConfig c;
  c.schema = std::make_shared<const SettingsSchema>(default_schema());
  c.dataset = std::make_shared<const Dataset>(reference());
  c.seed = seed;
  return c;
}

json sample_intake() { return json::parse(read_file(testutil::data_path("examples/intake.json"))); }

Outcome popular_static() {
  Outcome o;
  Service s(service_config(9));
  auto other = sample_intake();
  other["age_group"] = "65+";
  other["ethnicity"] = "white";
  other["concern"] = 0;
  other["ipip"] = {{"ipip_q4", 1}, {"ipip_q9", 5}, {"ipip_q14", 1}, {"ipip_q19", 5}};
  std::vector<std::string> bodies;
  for (const auto& intake : {sample_intake(), other}) {
    SessionAssignment a;
    do a = s.create_session();
    while (a.mode != RecommendationMode::popular);
    const auto r = s.handle({"POST", "/api/recommend", json{{"session_id", a.session_id}, {"intake", intake}}.dump()});
    o.check(r.status == 200, "status " + std::to_string(r.status));
    bodies.push_back(r.body);
  }
  o.check(bodies[0] == bodies[1], "bodies differ");
  if (o.ok) o.detail = "two intakes, identical " + std::to_string(bodies[0].size()) + "-byte bodies";
  return o;
}

Outcome property_suites() {
  Outcome o;
  const auto& schema = default_schema();
  std::mt19937_64 rng(777);
  int cases = 0;

  // scoring: raising one ordinal never lowers the score, and the change equals weight * grade delta
  for (int t = 0; t < 500; ++t, ++cases) {
    auto r = testutil::random_record(rng, "s", schema);
    const auto s = std::uniform_int_distribution<std::size_t>(0, schema.size() - 1)(rng);
    const auto& def = schema.at(s);
    const int from = r.choices.ordinals[s];
    if (from + 1 >= static_cast<int>(def.choice_count())) continue;
    const double before = total_score(r.choices, schema);
    r.choices.ordinals[s] = from + 1;
    const double delta = total_score(r.choices, schema) - before;
    o.check(delta >= 0.0, "score decreased");
    o.check(std::abs(delta - def.weight * (def.choices[from + 1].grade - def.choices[from].grade)) < 1e-9,
            "score not linear in grades");
  }

  // kNN: permutation invariance and containment in the neighbours' range
  const auto& ref = reference();
  for (int t = 0; t < 20; ++t, ++cases) {
    const auto q = build_feature_vector(testutil::random_query(rng));
    const auto rec = knn_recommend(q, ref, KnnConfig{}, schema);
    auto shuffled = ref;
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
    o.check(knn_recommend(q, shuffled, KnnConfig{}, schema) == rec, "kNN depends on record order");
    const auto chosen = rec.choices().ordinals;
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      int lo = 99, hi = -1;
      for (const auto& id : rec.neighbor_ids) {
        const auto& r = *std::find_if(ref.records.begin(), ref.records.end(), [&](const auto& x) { return x.id == id; });
        lo = std::min(lo, r.choices.ordinals[s]);
        hi = std::max(hi, r.choices.ordinals[s]);
      }
      o.check(chosen[s] >= lo && chosen[s] <= hi, "kNN choice outside neighbour range");
    }
  }

  // filter: idempotent and monotone in the threshold
  for (int t = 0; t <= 4; ++t, ++cases) {
    const auto once = filter_satisfied(ref, t);
    o.check(filter_satisfied(once, t) == once, "filter not idempotent");
    if (t < 4) o.check(filter_satisfied(ref, t + 1).size() <= once.size(), "filter not monotone");
  }

  // round-trips
  {
    std::stringstream buf;
    save_snapshot(ref, buf);
    o.check(load_snapshot(buf, schema) == ref, "snapshot round-trip");
    std::istringstream in(emit_schema(schema));
    o.check(schema_to_json(load_schema(in)) == schema_to_json(schema), "schema round-trip");
    cases += 2;
  }

  // A/B balance
  {
    Service s(service_config(31337));
    int popular = 0;
    for (int i = 0; i < 10000; ++i) popular += s.create_session().mode == RecommendationMode::popular;
    o.check(std::abs(popular / 10000.0 - 0.5) <= 0.02, "popular share " + fmt("%.4f", popular / 10000.0));
    ++cases;
  }

  // CLI and service emit identical documents
  {
    Service s(service_config(4));
    const auto stats = s.handle({"GET", "/api/stats", ""}).body;
    const auto data = testutil::data_path(testutil::kReferenceFixture);
    const auto intake_path = testutil::data_path("examples/intake.json");
    std::ostringstream out, err;
    const char* analyze_argv[] = {"privrec", "analyze", "--data", data.c_str(), "--format", "doc"};
    run_cli(6, analyze_argv, out, err);
    o.check(out.str() == stats, "analyze differs from /api/stats");

    SessionAssignment a;
    do a = s.create_session();
    while (a.mode != RecommendationMode::knn);
    const auto rec =
        s.handle({"POST", "/api/recommend", json{{"session_id", a.session_id}, {"intake", sample_intake()}}.dump()});
    std::ostringstream out2;
    const char* rec_argv[] = {"privrec", "recommend", "--data", data.c_str(), "--intake", intake_path.c_str()};
    run_cli(6, rec_argv, out2, err);
    o.check(out2.str() == rec.body, "recommend differs from /api/recommend");
    cases += 2;
  }

  if (o.ok) o.detail = std::to_string(cases) + " cases";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"scoring bounds", 1.0, scoring_bounds},
      {"kNN oracle equivalence", 5.0, knn_oracle},
      {"p-value fidelity", 1.0, p_value_fidelity},
      {"correlation sign recovery", 2.0, sign_recovery},
      {"filter retention", 1.0, filter_retention},
      {"popular-mode staticness", 5.0, popular_static},
      {"property suites", 60.0, property_suites},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.budget_s) {
      o.ok = false;
      o.detail += " (over " + fmt("%.0f", c.budget_s) + " s budget)";
    }
    failures += !o.ok;
    std::printf("%s  %-28s %7.3fs  %s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), secs, o.detail.c_str());
  }
  std::printf("%d/%zu passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures ? 1 : 0;
}
