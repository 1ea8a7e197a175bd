#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdnet/diagnostics.hpp"
#include "rdnet/netmodel.hpp"
#include "rdnet/pde.hpp"
#include "rdnet/structural.hpp"

namespace rdnet {

inline constexpr const char* kReportSchema = "rdnet-report/1";

const char* version();

/// Post-run checks computed from a trace.
struct SimulationSummary {
  double horizon = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t samples = 0;
  bool valid = true;
  std::size_t clip_events = 0;
  double clipped_mass = 0.0;
  double initial_mass = 0.0;
  /// Conservation weights and the largest relative drift of sum alpha_i int u_i.
  std::optional<std::vector<double>> alpha;
  double mass_drift = 0.0;
  /// Entropy reference and the largest relative sample-to-sample increase.
  std::vector<double> z;
  double entropy_max_uptick = 0.0;
  std::vector<double> final_sup;
  /// Per species, over the raw sup-norm series.
  std::vector<PlateauCheck> plateau;
  /// Per species, L2 norms over unit windows.
  std::vector<std::vector<double>> cylinder_l2;
  std::optional<EquilibriumResult> equilibrium;
  std::optional<DecayFit> decay_l1;
  std::optional<DecayFit> decay_lp;
  std::vector<std::string> notes;
};

/// alpha: conservation weights (used only for the drift); t_start: absolute
/// start time of the decay fits.
SimulationSummary summarize_simulation(const SimTrace& trace, const std::optional<std::vector<double>>& alpha,
                                       const std::optional<EquilibriumResult>& eq, double t_start);

nlohmann::json to_json(const StructuralReport& rep, const ReactionNetwork& net);
nlohmann::json to_json(const SimulationSummary& s);

std::string to_text(const StructuralReport& rep, const ReactionNetwork& net);
std::string to_text(const SimulationSummary& s);

}  // namespace rdnet
