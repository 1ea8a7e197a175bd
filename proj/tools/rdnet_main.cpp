// rdnet command line: analyze, simulate, equilibrium, ladder, report.
// Exit codes: 0 success or hypotheses verified, 2 not verified, 1 error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rdnet/config.hpp"
#include "rdnet/ladder.hpp"
#include "rdnet/pipeline.hpp"
#include "rdnet/reaction_dsl.hpp"
#include "rdnet/report.hpp"
#include "rdnet/structural.hpp"

namespace fs = std::filesystem;
using namespace rdnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotVerified = 2;

void print_header(std::ostream& os, const std::vector<std::string>& header) {
  for (const auto& h : header) os << "# " << h << "\n";
}

std::optional<RationalMatrix> hint_matrix(const NetworkFile& file) {
  if (!file.intermediate_hint) return std::nullopt;
  return file.intermediate_hint->rows;
}

StructuralReport analyze_file(const NetworkFile& file, int n, int samples) {
  AnalyzeOptions opts;
  opts.n = n;
  opts.entropy.samples = samples;
  const int hint_r = file.intermediate_hint ? file.intermediate_hint->r : 0;
  return analyze(file.network, opts, hint_matrix(file), hint_r);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

int cmd_analyze(const std::string& network, int n, int samples, const std::string& json_out, bool json_stdout) {
  const std::string text = read_text_file(network);
  const NetworkFile file = parse_network_file(text);
  const StructuralReport rep = analyze_file(file, n, samples);
  nlohmann::json j = to_json(rep, file.network);
  j["config_hash"] = fnv1a_hex(text);
  j["seed"] = 0;
  if (json_stdout) {
    std::cout << j.dump(2) << "\n";
  } else {
    print_header(std::cout, output_header(fnv1a_hex(text), 0));
    std::cout << to_text(rep, file.network);
  }
  if (!json_out.empty()) write_json(json_out, j);
  return rep.verified ? kExitOk : kExitNotVerified;
}

int cmd_simulate(const std::string& config, const std::string& output, std::optional<std::uint64_t> seed,
                 std::optional<double> horizon) {
  RunConfig cfg = load_run_config(config);
  if (seed) cfg.seed = *seed;
  if (horizon) cfg.horizon = *horizon;
  if (!output.empty()) cfg.output = output;
  if (seed || horizon) cfg.text += "\n#override seed=" + std::to_string(cfg.seed) + " horizon=" + std::to_string(cfg.horizon);
  const NetworkFile file = parse_network_file(cfg.network_text);
  const SimulationOutput out = run_simulation(cfg, file.network, cfg.output / "snapshots");
  write_simulation_outputs(cfg.output, out, cfg);

  StructuralReport rep = analyze_file(file, cfg.grid.dim, EntropyOptions{}.samples);
  nlohmann::json analysis = to_json(rep, file.network);
  analysis["config_hash"] = out.config_hash;
  analysis["seed"] = cfg.seed;
  write_json(cfg.output / "analysis.json", analysis);

  print_header(std::cout, output_header(out.config_hash, cfg.seed));
  std::cout << to_text(out.summary);
  std::cout << "outputs written to " << cfg.output.string() << "\n";
  return kExitOk;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(std::stod(item));
  return out;
}

int cmd_equilibrium(const std::string& config, const std::string& totals) {
  const RunConfig cfg = load_run_config(config);
  const NetworkFile file = parse_network_file(cfg.network_text);
  EquilibriumResult eq;
  if (totals.empty()) {
    eq = equilibrium_for_config(cfg, file.network);
  } else {
    eq = solve_equilibrium(file.network, conservation_basis(file.network), parse_list(totals));
  }
  print_header(std::cout, output_header(config_hash(cfg), cfg.seed));
  std::cout << std::setprecision(12) << "u_inf = (";
  for (std::size_t i = 0; i < eq.u_inf.size(); ++i) std::cout << (i ? ", " : "") << eq.u_inf[i];
  std::cout << ")\nresidual = " << eq.residual << "\n";
  return kExitOk;
}

int cmd_ladder(int n, double r, double p0) {
  const LadderResult res = ladder({n, r, p0});
  std::ostringstream os;
  os << std::setprecision(6);
  for (std::size_t i = 0; i < res.sequence.size(); ++i) os << (i ? ", " : "") << res.sequence[i];
  os << ", " << to_string(res.verdict);
  if (res.terminal()) os << " N0=" << res.N0;
  std::cout << os.str() << "\n";
  return kExitOk;
}

int cmd_report(const std::string& dir) {
  const fs::path run(dir);
  if (!fs::is_directory(run)) throw Error("run directory not found: " + dir);
  nlohmann::json merged;
  bool any = false;
  for (const char* name : {"analysis.json", "summary.json"}) {
    const fs::path p = run / name;
    if (!fs::exists(p)) continue;
    const nlohmann::json part = nlohmann::json::parse(read_text_file(p));
    for (const auto& [key, value] : part.items()) merged[key] = value;
    any = true;
  }
  if (!any) throw Error("no analysis.json or summary.json in " + dir);
  merged["schema"] = kReportSchema;
  write_json(run / "report.json", merged);
  std::cout << merged.dump(2) << "\n";
  const auto verified = merged.find("verified");
  return verified == merged.end() || verified->get<bool>() ? kExitOk : kExitNotVerified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdnet: structural checks and simulation of mass-action reaction-diffusion systems"};
  app.set_version_flag("--version", std::string("rdnet ") + version());
  app.require_subcommand(1);

  std::string network, config, output, json_out, totals, run_dir;
  int n = 2, samples = EntropyOptions{}.samples;
  bool json_stdout = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "Check the structural hypotheses of a network file");
  analyze_cmd->add_option("network", network, "Network file")->required();
  analyze_cmd->add_option("--n", n, "Spatial dimension")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--samples", samples, "Entropy sample points")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--json-out", json_out, "Write the rdnet-report/1 document to this file");
  analyze_cmd->add_flag("--json", json_stdout, "Print JSON instead of text");

  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a configured simulation");
  sim_cmd->add_option("config", config, "Run config file")->required();
  sim_cmd->add_option("--output", output, "Output directory (overrides the config)");
  sim_cmd->add_option("--seed", seed, "Seed (overrides the config)");
  sim_cmd->add_option("--horizon", horizon, "Horizon (overrides the config)");

  auto* eq_cmd = app.add_subcommand("equilibrium", "Solve for the positive equilibrium");
  eq_cmd->add_option("config", config, "Run config file")->required();
  eq_cmd->add_option("--totals", totals, "Comma-separated conservation totals (default: from the initial data)");

  double r = 2.0, p0 = 2.1;
  auto* ladder_cmd = app.add_subcommand("ladder", "Print the bootstrap exponent sequence");
  ladder_cmd->add_option("--n", n, "Spatial dimension")->required();
  ladder_cmd->add_option("--r", r, "Intermediate-sum degree")->required();
  ladder_cmd->add_option("--p0", p0, "Starting exponent")->required();

  auto* report_cmd = app.add_subcommand("report", "Merge analysis and simulation outputs of a run directory");
  report_cmd->add_option("dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(network, n, samples, json_out, json_stdout);
    if (*sim_cmd) return cmd_simulate(config, output, seed, horizon);
    if (*eq_cmd) return cmd_equilibrium(config, totals);
    if (*ladder_cmd) return cmd_ladder(n, r, p0);
    if (*report_cmd) return cmd_report(run_dir);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
