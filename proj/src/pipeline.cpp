#include "rdnet/pipeline.hpp"

#include <algorithm>
#include <fstream>

namespace rdnet {

namespace {

std::optional<std::vector<double>> conservation_weights(const ReactionNetwork& net) {
  const auto cert = find_mass_control(compile_rhs(net));
  if (cert.cls != MassClass::Conservation) return std::nullopt;
  std::vector<double> alpha;
  for (const auto& a : cert.alpha) alpha.push_back(a.get_d());
  return alpha;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<std::string> output_header(const std::string& config_hash, std::uint64_t seed) {
  return {std::string("rdnet ") + version(), "config_hash " + config_hash, "seed " + std::to_string(seed)};
}

EquilibriumResult equilibrium_for_config(const RunConfig& cfg, const ReactionNetwork& net) {
  const SimState init = init_state(cfg.grid, profiles_for(cfg, net), cfg.seed);
  const RationalMatrix basis = conservation_basis(net);
  return solve_equilibrium(net, basis, conservation_totals(basis, init));
}

SimulationOutput run_simulation(const RunConfig& cfg, const ReactionNetwork& net,
                                const std::optional<std::filesystem::path>& snapshot_dir) {
  if (!(cfg.horizon > 0)) throw PreconditionError("horizon must be positive (empty trace)");
  SimulationOutput out;
  out.config_hash = config_hash(cfg);
  SimState state = init_state(cfg.grid, profiles_for(cfg, net), cfg.seed);

  TraceOptions topt;
  topt.cadence = cfg.cadence;
  topt.dist_p = cfg.dist_p;
  topt.powers = cfg.powers;
  if (cfg.entropy_auto) {
    EntropyOptions eopt;
    eopt.samples = 0;  // only the equilibrium is needed here
    const auto cert = check_entropy_dissipation(net, eopt);
    if (cert.converged) topt.z = cert.z;
  }
  std::optional<EquilibriumResult> eq;
  if (cfg.equilibrium) {
    const RationalMatrix basis = conservation_basis(net);
    const auto totals = conservation_totals(basis, state);
    if (std::all_of(totals.begin(), totals.end(), [](double t) { return t > 0; })) {
      try {
        eq = solve_equilibrium(net, basis, totals);
        topt.u_inf = eq->u_inf;
      } catch (const Error&) {
      }
    }
  }

  std::size_t sample_index = 0;
  Observer observer;
  if (snapshot_dir && cfg.snapshot_every > 0) {
    std::filesystem::create_directories(*snapshot_dir);
    observer = [&](const SimState& st, const TraceSample&) {
      if (sample_index++ % static_cast<std::size_t>(cfg.snapshot_every) != 0) return;
      for (std::size_t i = 0; i < st.species(); ++i) {
        const auto name = net.species[i] + "_" + std::to_string(sample_index - 1) + ".field";
        std::ofstream f(*snapshot_dir / name);
        if (!f) throw Error("cannot write snapshot " + name);
        write_snapshot(f, st, i, net.species[i]);
      }
    };
  }
  out.trace = advance(state, net, cfg.step, cfg.horizon, topt, observer);
  out.final_state = std::move(state);
  out.summary = summarize_simulation(out.trace, conservation_weights(net), eq, cfg.t_start_fraction * cfg.horizon);
  return out;
}

void write_simulation_outputs(const std::filesystem::path& dir, const SimulationOutput& out, const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  const auto header = output_header(out.config_hash, cfg.seed);
  {
    std::ofstream csv(dir / "trace.csv", std::ios::binary);
    if (!csv) throw Error("cannot write " + (dir / "trace.csv").string());
    write_trace_csv(csv, out.trace, header);
  }
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", "rdnet"}, {"version", version()}};
  j["config_hash"] = out.config_hash;
  j["seed"] = cfg.seed;
  j["simulation"] = to_json(out.summary);
  write_file(dir / "summary.json", j.dump(2) + "\n");
  std::string text;
  for (const auto& h : header) text += "# " + h + "\n";
  write_file(dir / "summary.txt", text + to_text(out.summary));
}

}  // namespace rdnet
