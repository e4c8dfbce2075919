#include <doctest.h>

#include <filesystem>

#include "regmod/errors.hpp"
#include "regmod/generators.hpp"
#include "regmod/moduli.hpp"
#include "regmod/scenario.hpp"
#include "support.hpp"

using namespace regmod;

namespace {

const std::filesystem::path kScenarios = REGMOD_SCENARIO_DIR;

Json scenario(const std::string& name) { return read_json_file(kScenarios / name); }

// grid-linear is the only family without usable defaults.
Json default_params(const std::string& family) { return family == "grid-linear" ? Json{{"a", 2}} : Json::object(); }

}  // namespace

TEST_CASE("generators are deterministic under the seed") {
  for (const std::string& family : generator_families()) {
    const Json a = instance_to_json(generate({family, default_params(family), 7}));
    const Json b = instance_to_json(generate({family, default_params(family), 7}));
    CHECK_MESSAGE(a.dump() == b.dump(), family);
  }
  CHECK(instance_to_json(generate({"random-metric", Json::object(), 1})).dump() !=
        instance_to_json(generate({"random-metric", Json::object(), 2})).dump());
  CHECK_THROWS_AS(generate({"no-such-family", Json::object(), 0}), InputError);
}

TEST_CASE("instances survive a JSON round trip") {
  for (const std::string& family : generator_families()) {
    const Json j = instance_to_json(generate({family, default_params(family), 3}));
    CHECK_MESSAGE(instance_to_json(instance_from_json(j)).dump() == j.dump(), family);
  }
}

TEST_CASE("malformed instances are input errors") {
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"spaces": {"X": {"labels": [0, 1], "dist": [[0, 1], [2, 0]]}}})")),
                  InputError);
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"maps": {"F": {"dom": "nope", "cod": "nope", "pairs": []}}})")),
                  InputError);
}

TEST_CASE("grid-linear oracle matches the brute-force moduli") {
  for (int a = 1; a <= 3; ++a) {
    const Instance inst = generate({"grid-linear", {{"a", a}, {"n", 6}}, 0});
    const SetMap& f = inst.map("F");
    const Json& o = inst.meta["oracle"];
    const double r = 6.0, rc = 6.0 * a, eps = 6.0;
    const ScaleWindow w{r, rc, eps, std::nullopt};
    CHECK(lip_at_scale(f, {0, 0}, w).value.value() == doctest::Approx(double(o["lip"])));
    CHECK(reg_at_scale(f, {0, 0}, w).value.value() == doctest::Approx(double(o["reg"])));
  }
}

TEST_CASE("tangency instance fails the metric inequality for moderate tau") {
  const Instance inst = generate({"tangency-adversarial", {{"theta", 0.05}}, 0});
  const double worst = inst.meta["oracle"]["worst_ratio"];
  CHECK(worst == doctest::Approx(20.025).epsilon(1e-3));
  for (double tau : {2.0, 10.0}) {
    const AuditReport r = run_audit(inst, "metric_inequality_audit", {{"r", 0.5}, {"tau", tau}, {"grid_step", 0.05}});
    CHECK(r.verdict == Verdict::fail);
  }
}

TEST_CASE("run_audit maps failed hypotheses and bad input") {
  const Instance inst = generate({"grid-linear", {{"a", 2}, {"n", 5}}, 0});
  CHECK_THROWS_AS(run_audit(inst, "no_such_audit", Json::object()), InputError);
  CHECK_THROWS_AS(run_audit(inst, "reg_at_scale", {{"map", "missing"}, {"r_dom", 1}, {"r_cod", 1}, {"eps", 1}}),
                  InputError);
  const AuditReport r = run_audit(inst, "reg_at_scale", {{"r_dom", 5}, {"r_cod", 9}, {"eps", 5}, {"oracle", 0.5}});
  CHECK(r.passed());
}

TEST_CASE("shipped scenarios meet their expectations") {
  for (const char* name : {"mainresult_pass.json", "grid_linear_oracle.json", "tangency_expected_fail.json"}) {
    const auto out = std::filesystem::temp_directory_path() / "regmod_lab_test";
    const ScenarioResult res = run_scenario(scenario(name), kScenarios, RunOptions{std::nullopt, out, false});
    CHECK_MESSAGE(res.exit_code() == 0, name);
    for (const AuditOutcome& o : res.outcomes) CHECK_MESSAGE(o.matched(), o.audit);
  }
  const ScenarioResult t = run_scenario(scenario("tangency_expected_fail.json"), kScenarios);
  CHECK(t.outcomes.front().report.verdict == Verdict::fail);
}

TEST_CASE("a corrupt metric is rejected as input") {
  CHECK_THROWS_AS(run_scenario(scenario("corrupt_metric.json"), kScenarios), InputError);
}

TEST_CASE("an expectation that does not hold gives exit code 1") {
  Json s = scenario("tangency_expected_fail.json");
  s["audits"][0]["expect"] = "pass";
  CHECK(run_scenario(s, kScenarios).exit_code() == 1);
}

TEST_CASE("sweeping the codomain radius gives a monotone reg") {
  const Json s = scenario("sweep_doubling.json");
  const std::vector<double> values{1, 2, 4, 8, 16};
  const std::vector<SweepRow> rows = sweep(s, kScenarios, "r_cod", values);
  REQUIRE(rows.size() == values.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].param_value == values[i]);
    CHECK(rows[i].report.value.value() >= rows[i - 1].report.value.value() - 1e-12);
  }
}

TEST_CASE("sweeping rho0 inputs recomputes the closed form") {
  const Json s = scenario("sweep_doubling.json");
  const std::vector<SweepRow> rows = sweep(s, kScenarios, "eta", {0.25, 0.5, 1.0});
  REQUIRE(rows.size() == 3);
  for (const SweepRow& row : rows) {
    CHECK(row.audit == "rho0");
    CHECK(row.report.value.value() == doctest::Approx(rho0({1.0, 0.5, 1.0, row.param_value})));
  }
  const std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("param_value,audit,r_dom,r_cod,eps,value,verdict,constants\n", 0) == 0);
  CHECK(sweep_to_json(rows).size() == 3);
}

TEST_CASE("sweep edge cases") {
  const Json s = scenario("sweep_doubling.json");
  const std::vector<SweepRow> none = sweep(s, kScenarios, "r_cod", {});
  CHECK(none.empty());
  CHECK(sweep_to_csv(none) == "param_value,audit,r_dom,r_cod,eps,value,verdict,constants\n");
  CHECK_THROWS_AS(sweep(s, kScenarios, "no_such_key", {1.0}), InputError);
}

TEST_CASE("format_number") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}
