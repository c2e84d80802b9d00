#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "loqs/metrics.hpp"
#include "loqs/scenario.hpp"
#include "loqs/sources.hpp"
#include "loqs/tomography.hpp"

namespace fs = std::filesystem;
using namespace loqs;

namespace {

constexpr int kExitConfigError = 2;

/// Writes through a temporary file and renames, so partially written output
/// never appears under the final name.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::int64_t parse_shots(const std::string& text) {
  if (text == "exact") return 0;
  size_t used = 0;
  std::int64_t shots = std::stoll(text, &used);
  if (used != text.size() || shots < 0)
    throw CLI::ValidationError("--shots", "expected a count >= 0 or 'exact'");
  return shots;
}

/// A scenario reference is a built-in name or a path to a scenario file.
Scenario load_scenario(const std::string& ref) {
  auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), ref) != names.end())
    return builtin_scenario(ref);
  return Scenario::load(ref);
}

struct CommonOpts {
  std::string scenario_ref;
  std::string shots_text;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool no_subtraction = false;
  std::string out_dir;
  std::string format = "text";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool scenario_required) {
  auto* sc = cmd->add_option("--scenario", o.scenario_ref,
                             "built-in scenario name or scenario JSON file");
  if (scenario_required) sc->required();
  cmd->add_option("--shots", o.shots_text,
                  "events per analyzer setting, or 'exact'");
  cmd->add_option("--seed", o.seed, "sampling seed")
      ->trigger_on_parse()
      ->each([&](const std::string&) { o.seed_set = true; });
  cmd->add_flag("--no-subtraction", o.no_subtraction,
                "skip the single-source blocked-run correction");
  cmd->add_option("--out", o.out_dir, "directory for result artifacts");
  cmd->add_option("--format", o.format, "stdout format")
      ->check(CLI::IsMember({"csv", "json", "text"}));
}

Scenario apply_common(const CommonOpts& o) {
  Scenario s = load_scenario(o.scenario_ref);
  if (!o.shots_text.empty()) s.shots = parse_shots(o.shots_text);
  if (o.seed_set) s.seed = o.seed;
  if (o.no_subtraction) s.subtraction = false;
  return s;
}

void emit(const CommonOpts& o, const ScenarioResult& r) {
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    fs::path dir(o.out_dir);
    write_atomic(dir / "result.json", r.to_json());
    write_atomic(dir / "report.txt", r.to_text());
    write_atomic(dir / "counts.csv", r.counts_csv());
  }
  if (o.format == "json")
    std::cout << r.to_json() << '\n';
  else if (o.format == "csv")
    std::cout << r.counts_csv();
  else
    std::cout << r.to_text();
}

int cmd_run(const CommonOpts& o) {
  ScenarioResult r = run_scenario(apply_common(o));
  emit(o, r);
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& parameter,
              const std::vector<double>& values, int jobs) {
  Scenario base = apply_common(o);
  auto rows = sweep(base, parameter, values, jobs);
  std::string table = sweep_table_csv(parameter, rows);
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    fs::path dir(o.out_dir);
    write_atomic(dir / "sweep.csv", table);
    for (size_t i = 0; i < rows.size(); ++i)
      write_atomic(dir / ("point-" + std::to_string(i) + ".json"),
                   rows[i].result.to_json());
  }
  if (o.format == "json") {
    std::cout << "[\n";
    for (size_t i = 0; i < rows.size(); ++i)
      std::cout << rows[i].result.to_json()
                << (i + 1 < rows.size() ? ",\n" : "\n");
    std::cout << "]\n";
  } else {
    std::cout << table;
  }
  return 0;
}

int cmd_validate() {
  ValidationReport rep = validate_builtins();
  std::cout << rep.text;
  return rep.ok ? 0 : 1;
}

int cmd_list() {
  std::cout << "built-in scenarios:\n";
  for (const std::string& name : builtin_scenario_names())
    std::cout << "  " << name << '\n';
  std::cout << "built-in circuits:\n";
  for (const char* name : {"cswap-simplified", "cswap-full", "ppbs-cnot"})
    std::cout << "  " << name << '\n';
  return 0;
}

int cmd_tomography(double fidelity, const std::string& shots_text,
                   std::uint64_t seed, const std::string& out_dir,
                   const std::string& format) {
  std::int64_t shots = shots_text.empty() ? 1000000 : parse_shots(shots_text);
  Eigen::Matrix4cd rho = imperfect_entangled_pair(fidelity);
  TomographyDataset data = simulate_tomography(rho, shots, seed);
  Eigen::Matrix4cd est = project_psd(reconstruct_linear(data));
  Eigen::Vector4cd bell;
  bell << std::sqrt(0.5), 0, 0, std::sqrt(0.5);
  double fid = state_fidelity(est, bell);
  double conc = concurrence(est);

  std::string csv = count_records_to_csv(data.to_records());
  std::ostringstream text;
  text.setf(std::ios::fixed);
  text.precision(4);
  text << "target fidelity = " << fidelity << '\n'
       << "reconstructed fidelity = " << fid << '\n'
       << "reconstructed concurrence = " << conc << '\n'
       << "model concurrence = " << werner_concurrence(fidelity) << '\n';
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    write_atomic(dir / "tomography_counts.csv", csv);
    write_atomic(dir / "tomography.txt", text.str());
  }
  if (format == "csv") {
    std::cout << csv;
  } else if (format == "json") {
    std::cout << "{\n  \"target_fidelity\": " << fidelity
              << ",\n  \"reconstructed_fidelity\": " << fid
              << ",\n  \"reconstructed_concurrence\": " << conc
              << ",\n  \"model_concurrence\": " << werner_concurrence(fidelity)
              << "\n}\n";
  } else {
    std::cout << text.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear-optics gate simulator and analysis runner"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario");
  add_common(run_cmd, run_opts, true);

  CommonOpts sweep_opts;
  std::string sweep_param;
  std::vector<double> sweep_values;
  int sweep_jobs = 1;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "re-run a scenario over parameter values");
  add_common(sweep_cmd, sweep_opts, true);
  sweep_cmd->add_option("--param", sweep_param, "parameter to vary")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "parameter values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel sweep workers")
      ->check(CLI::PositiveNumber);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "self-check the built-in circuits");

  CLI::App* list_cmd =
      app.add_subcommand("list", "enumerate built-in scenarios and circuits");

  double tomo_fidelity = 0.962;
  std::string tomo_shots, tomo_out, tomo_format = "text";
  std::uint64_t tomo_seed = 0;
  CLI::App* tomo_cmd = app.add_subcommand(
      "tomography", "simulate and reconstruct the entangled control pair");
  tomo_cmd->add_option("--fidelity", tomo_fidelity,
                       "target Werner-state fidelity");
  tomo_cmd->add_option("--shots", tomo_shots,
                       "events per basis setting, or 'exact'");
  tomo_cmd->add_option("--seed", tomo_seed, "sampling seed");
  tomo_cmd->add_option("--out", tomo_out, "directory for result artifacts");
  tomo_cmd->add_option("--format", tomo_format, "stdout format")
      ->check(CLI::IsMember({"csv", "json", "text"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_opts, sweep_param, sweep_values, sweep_jobs);
    if (validate_cmd->parsed()) return cmd_validate();
    if (list_cmd->parsed()) return cmd_list();
    if (tomo_cmd->parsed())
      return cmd_tomography(tomo_fidelity, tomo_shots, tomo_seed, tomo_out,
                            tomo_format);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
