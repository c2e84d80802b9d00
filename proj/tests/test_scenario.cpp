#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "loqs/scenario.hpp"

using namespace loqs;

TEST_CASE("ideal truth-table builtin reproduces the exact gate") {
  ScenarioResult r = run_scenario(builtin_scenario("cswap-ideal-truth-table"));
  CHECK(r.report.f_zzz.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.report.f_zzz.sigma == 0.0);
  CHECK(r.report.coherence.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.report.f_process.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.report.verdict == EntanglementClass::RequiresGenuineTripartite);
  for (const auto& [input, p] : r.success_per_input)
    CHECK(p == doctest::Approx(1.0 / 162.0).epsilon(1e-9));
  CHECK(r.warnings.empty());
}

TEST_CASE("scenario JSON round-trips; malformed configs are rejected") {
  Scenario s = builtin_scenario("cswap-measured-noise");
  Scenario back = Scenario::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(back.source.epsilon == s.source.epsilon);
  CHECK(back.shots == s.shots);
  CHECK(back.subtraction == s.subtraction);

  CHECK_THROWS_AS(Scenario::from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(Scenario::from_json(R"({"schema_version": 2})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      Scenario::from_json(R"({"schema_version": 1, "typo_field": 3})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      Scenario::from_json(
          R"({"schema_version": 1, "source": {"epsilno": 0.1}})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      Scenario::from_json(R"({"schema_version": 1, "shots": "all"})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      Scenario::from_json(R"({"schema_version": 1, "shots": -5})"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      Scenario::from_json(R"({"schema_version": 1, "subtraction": 1})"),
      std::invalid_argument);
  // "exact" spelling of exact mode.
  Scenario exact = Scenario::from_json(
      R"({"schema_version": 1, "shots": "exact"})");
  CHECK(exact.shots == 0);
}

TEST_CASE("unknown references are rejected") {
  CHECK_THROWS_AS(builtin_scenario("cswap-unknown"), std::invalid_argument);
  Scenario s;
  s.source.component_overrides["ppbs_a9_rh"] = 0.5;
  CHECK_THROWS_AS(run_scenario(s), std::invalid_argument);
  CHECK_THROWS_AS(sweep(builtin_scenario("cswap-ideal-truth-table"),
                        "pump_power", {0.1}),
                  std::invalid_argument);
}

TEST_CASE("measured-noise builtin lands in the reported bands") {
  Scenario s = builtin_scenario("cswap-measured-noise");
  CHECK(scenario_contamination(s) == doctest::Approx(0.10).epsilon(0.02));
  ScenarioResult r = run_scenario(s);
  CHECK(r.report.f_zzz.value > 0.75);
  CHECK(r.report.f_zzz.value < 0.95);
  CHECK(r.report.coherence.value > 0.5);
  CHECK(r.report.coherence.value < 0.9);
  CHECK(std::abs(r.report.f_process.value - 0.77) < 0.18);
  CHECK(r.report.verdict == EntanglementClass::RequiresGenuineTripartite);

  Scenario no_sub = s;
  no_sub.subtraction = false;
  ScenarioResult r2 = run_scenario(no_sub);
  CHECK(r2.report.f_process.value < r.report.f_process.value);
}

TEST_CASE("epsilon calibration hits the builtin operating point") {
  Scenario s = builtin_scenario("cswap-measured-noise");
  double eps = calibrate_epsilon_for_contamination(s, 0.10);
  CHECK(eps == doctest::Approx(s.source.epsilon).epsilon(0.01));
  Scenario probe = s;
  probe.source.epsilon = eps;
  CHECK(scenario_contamination(probe) == doctest::Approx(0.10).epsilon(1e-6));
}

TEST_CASE("exact mode yields zero statistical error everywhere") {
  Scenario s = builtin_scenario("cswap-measured-noise");
  ScenarioResult r = run_scenario(s);
  CHECK(r.report.f_zzz.sigma == 0.0);
  CHECK(r.report.coherence.sigma == 0.0);
  CHECK(r.report.f_process.sigma == 0.0);
  CHECK(r.counts.empty());
  CHECK(r.truth.sigmas.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampled runs are deterministic and close to exact mode") {
  Scenario s = builtin_scenario("cswap-measured-noise");
  s.shots = 50000;
  s.seed = 41;
  ScenarioResult a = run_scenario(s);
  ScenarioResult b = run_scenario(s);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.counts_csv() == b.counts_csv());
  CHECK(!a.counts.empty());
  CHECK(a.report.f_zzz.sigma > 0.0);

  ScenarioResult exact = run_scenario(builtin_scenario("cswap-measured-noise"));
  CHECK(a.report.f_zzz.value ==
        doctest::Approx(exact.report.f_zzz.value).epsilon(0.05));
  CHECK(a.report.coherence.value ==
        doctest::Approx(exact.report.coherence.value).epsilon(0.15));

  // Blocked acquisition runs are serialized alongside the total run.
  bool blocked_seen = false;
  for (const CountRecord& rec : a.counts)
    if (rec.setting_id.find("|blocked-") != std::string::npos)
      blocked_seen = true;
  CHECK(blocked_seen);
  std::vector<CountRecord> parsed = count_records_from_csv(a.counts_csv());
  CHECK(parsed.size() == a.counts.size());
}

TEST_CASE("statistical error shrinks as 1/sqrt(shots)") {
  Scenario s = builtin_scenario("cswap-measured-noise");
  s.seed = 11;
  s.shots = 10000;
  double sig1 = run_scenario(s).report.f_zzz.sigma;
  s.shots = 160000;
  double sig2 = run_scenario(s).report.f_zzz.sigma;
  CHECK(sig1 / sig2 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("sweeps: pump monotonicity, overlap monotonicity, parallelism") {
  Scenario s = builtin_scenario("cswap-ideal-truth-table");
  s.subtraction = false;
  auto eps_rows = sweep(s, "epsilon", {0.0, 0.1, 0.2, 0.3});
  for (size_t i = 1; i < eps_rows.size(); ++i)
    CHECK(eps_rows[i].result.report.f_zzz.value <=
          eps_rows[i - 1].result.report.f_zzz.value + 1e-9);

  auto ov_rows = sweep(s, "overlap", {1.0, 0.95, 0.9, 0.8});
  for (size_t i = 1; i < ov_rows.size(); ++i)
    CHECK(ov_rows[i].result.report.coherence.value <=
          ov_rows[i - 1].result.report.coherence.value + 1e-9);

  // Parallel sweep execution returns byte-identical rows.
  Scenario noisy = builtin_scenario("cswap-measured-noise");
  noisy.shots = 20000;
  auto serial = sweep(noisy, "epsilon", {0.1, 0.2, 0.3}, 1);
  auto parallel = sweep(noisy, "epsilon", {0.1, 0.2, 0.3}, 3);
  CHECK(sweep_table_csv("epsilon", serial) ==
        sweep_table_csv("epsilon", parallel));
  for (size_t i = 0; i < serial.size(); ++i)
    CHECK(serial[i].result.to_json() == parallel[i].result.to_json());
}

TEST_CASE("validation report passes on a fresh build") {
  ValidationReport rep = validate_builtins();
  CHECK(rep.ok);
  CHECK(rep.text.find("FAIL") == std::string::npos);
  // The measured-reflectivity check is informational, not a failure.
  CHECK(rep.text.find("REPORT") != std::string::npos);
  CHECK(rep.text.find("measured") != std::string::npos);
}

TEST_CASE("builtin names are stable and resolvable") {
  auto names = builtin_scenario_names();
  CHECK(names.size() == 3);
  for (const std::string& name : names)
    CHECK(builtin_scenario(name).name == name);
}
