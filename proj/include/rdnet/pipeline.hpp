#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdnet/config.hpp"
#include "rdnet/diagnostics.hpp"
#include "rdnet/reaction_dsl.hpp"
#include "rdnet/report.hpp"
#include "rdnet/structural.hpp"

namespace rdnet {

struct SimulationOutput {
  SimTrace trace;
  SimulationSummary summary;
  SimState final_state;
  std::string config_hash;
};

/// Output header lines: tool version, config hash and seed.
std::vector<std::string> output_header(const std::string& config_hash, std::uint64_t seed);

/// Runs a configured simulation. Conservation weights come from the mass
/// certificate, the entropy reference from the complex-balance search
/// (entropy = auto), and the equilibrium from the conservation totals of the
/// initial state (equilibrium = auto). When snapshot_dir is set, field
/// snapshots are written every cfg.snapshot_every samples.
SimulationOutput run_simulation(const RunConfig& cfg, const ReactionNetwork& net,
                                const std::optional<std::filesystem::path>& snapshot_dir = std::nullopt);

/// Writes trace.csv, summary.json and summary.txt into dir.
void write_simulation_outputs(const std::filesystem::path& dir, const SimulationOutput& out,
                              const RunConfig& cfg);

/// Equilibrium for the conservation totals of the configured initial state.
EquilibriumResult equilibrium_for_config(const RunConfig& cfg, const ReactionNetwork& net);

}  // namespace rdnet
