#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rdnet/error.hpp"
#include "rdnet/grid.hpp"
#include "rdnet/netmodel.hpp"

namespace rdnet {

struct SimState {
  Grid grid;
  double t = 0.0;
  /// fields[i][cell]
  std::vector<std::vector<double>> fields;

  std::size_t species() const { return fields.size(); }
};

/// Initial datum for one species.
struct Profile {
  enum class Kind { Constant, Cosine, Random, Function };
  Kind kind = Kind::Constant;
  /// Constant: value a. Cosine: a + b cos(pi x / Lx) (times cos(pi y / Ly) in 2D).
  /// Random: independent uniform samples in [a, b].
  double a = 0.0;
  double b = 0.0;
  std::function<double(double, double)> fn;

  static Profile constant(double value);
  static Profile cosine(double mean, double amplitude);
  static Profile random(double lo, double hi);
  static Profile function(std::function<double(double, double)> fn);
};

class NegativeInitialData : public Error {
 public:
  NegativeInitialData(std::size_t species, std::size_t cell, double value);
  std::size_t species;
  std::size_t cell;
};

class PositivityFailure : public Error {
 public:
  PositivityFailure(double t, std::size_t species, std::size_t cell);
  double t;
  std::size_t species;
  std::size_t cell;
};

class BlowupDetected : public Error {
 public:
  BlowupDetected(double t, std::size_t species, std::size_t cell, double value);
  double t;
  std::size_t species;
  std::size_t cell;
  double value;
};

inline constexpr double kBlowupThreshold = 1e30;
inline constexpr int kMaxPositivityRetries = 20;

/// Samples the profiles at cell centres. Random profiles draw from a
/// generator seeded with seed + species index, visiting cells in storage order.
SimState init_state(const Grid& grid, const std::vector<Profile>& profiles, std::uint64_t seed = 0);

enum class StepMode { Splitting, Imex };
enum class PositivityMode { ClipReport, RejectRetry };
const char* to_string(StepMode m);
const char* to_string(PositivityMode m);

struct StepControl {
  double dt = 1e-2;
  StepMode mode = StepMode::Splitting;
  int reaction_substeps = 4;
  PositivityMode positivity = PositivityMode::ClipReport;

  void validate() const;
};

struct PositivityEvent {
  double t;
  std::size_t cell;
  std::size_t species;
  double deficit;
};

struct PositivityLog {
  static constexpr std::size_t kMaxStoredEvents = 1000;
  /// The first kMaxStoredEvents events; `count` counts all of them.
  std::vector<PositivityEvent> events;
  std::size_t count = 0;
  /// Sum of clipped deficits weighted by cell volume.
  double clipped_mass = 0.0;
};

/// Backward-Euler diffusion: (I - dt d_i L) u_i_new = u_i for every species.
SimState diffusion_step(const SimState& state, const ReactionNetwork& net, double dt);

/// Per-cell integration of u' = f(u) over dt with ctrl.reaction_substeps RK4
/// sub-steps. Does not advance state.t.
SimState reaction_step(const SimState& state, const PolyVec& f, double dt, const StepControl& ctrl,
                       PositivityLog* log = nullptr);

struct TraceOptions {
  /// Time between recorded samples (rounded to a multiple of the step).
  double cadence = 0.1;
  /// Entropy reference state; empty means all ones.
  std::vector<double> z;
  /// Equilibrium for the distance columns; empty leaves them NaN.
  std::vector<double> u_inf;
  double dist_p = 2.0;
  /// Exponents p >= 1 for which the spatial integrals of u_i^p are kept.
  std::vector<double> powers{1.0, 2.0};
  bool keep_fields = false;
};

struct TraceSample {
  double t = 0.0;
  std::vector<double> sup;       // per species
  std::vector<double> integral;  // per species
  double entropy = 0.0;
  double dist_l1 = 0.0;
  double dist_lp = 0.0;
  /// power_integrals[k][i] = integral of u_i^{powers[k]}
  std::vector<std::vector<double>> power_integrals;
  std::vector<std::vector<double>> fields;
};

struct SimTrace {
  Grid grid;
  std::vector<std::string> species;
  TraceOptions options;
  std::vector<TraceSample> samples;
  PositivityLog positivity;
  double initial_mass = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;
  /// False when clipped mass exceeds 1e-6 of the initial mass.
  bool valid = true;
};

/// Builds one trace sample from a state.
TraceSample make_sample(const SimState& state, const TraceOptions& options);

using Observer = std::function<void(const SimState&, const TraceSample&)>;

/// Marches state to t_end. The step is shortened uniformly so that an
/// integer number of steps reaches t_end. Splitting mode uses Strang
/// composition (half reaction, diffusion, half reaction); IMEX mode solves
/// (I - dt D L) u_new = u + dt f(u). Errors raised during the march carry the
/// simulation time in their message.
SimTrace advance(SimState& state, const ReactionNetwork& net, const StepControl& ctrl, double t_end,
                 const TraceOptions& options = {}, const Observer& observer = {});

/// Text snapshot: header "rdnet-field/1", grid metadata, then one line per
/// grid row with 17 significant digits.
void write_snapshot(std::ostream& out, const SimState& state, std::size_t species, const std::string& name);

/// Applies RDNET_THREADS (if set) to the OpenMP runtime. Returns the thread
/// count in effect.
int configure_threads();

}  // namespace rdnet
