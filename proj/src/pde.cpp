#include "rdnet/pde.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "rdnet/diagnostics.hpp"

namespace rdnet {

namespace {

std::string describe(const char* what, double t, std::size_t species, std::size_t cell) {
  std::ostringstream os;
  os << what << " at t=" << std::setprecision(10) << t << " (species " << species << ", cell " << cell << ")";
  return os.str();
}

}  // namespace

NegativeInitialData::NegativeInitialData(std::size_t s, std::size_t c, double value)
    : Error(describe("negative initial datum", 0.0, s, c) + ": " + std::to_string(value)), species(s), cell(c) {}

PositivityFailure::PositivityFailure(double time, std::size_t s, std::size_t c)
    : Error(describe("positivity lost after retries", time, s, c)), t(time), species(s), cell(c) {}

BlowupDetected::BlowupDetected(double time, std::size_t s, std::size_t c, double v)
    : Error(describe("blow-up detected", time, s, c) + ": value " + std::to_string(v)),
      t(time),
      species(s),
      cell(c),
      value(v) {}

Profile Profile::constant(double value) { return Profile{Kind::Constant, value, 0.0, {}}; }
Profile Profile::cosine(double mean, double amplitude) { return Profile{Kind::Cosine, mean, amplitude, {}}; }
Profile Profile::random(double lo, double hi) { return Profile{Kind::Random, lo, hi, {}}; }
Profile Profile::function(std::function<double(double, double)> fn) {
  return Profile{Kind::Function, 0.0, 0.0, std::move(fn)};
}

const char* to_string(StepMode m) { return m == StepMode::Imex ? "imex" : "splitting"; }
const char* to_string(PositivityMode m) { return m == PositivityMode::RejectRetry ? "reject_retry" : "clip_report"; }

void StepControl::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
  if (reaction_substeps < 1) throw PreconditionError("reaction_substeps must be at least 1");
}

int configure_threads() {
  if (const char* env = std::getenv("RDNET_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
}

SimState init_state(const Grid& grid, const std::vector<Profile>& profiles, std::uint64_t seed) {
  grid.validate();
  SimState st{grid, 0.0, {}};
  const std::size_t cells = grid.size();
  const int nx = grid.cells[0];
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    const Profile& p = profiles[s];
    std::vector<double> field(cells);
    std::mt19937_64 rng(seed + s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 0; c < cells; ++c) {
      const int i = static_cast<int>(c % static_cast<std::size_t>(nx));
      const int j = static_cast<int>(c / static_cast<std::size_t>(nx));
      const double x = grid.center(0, i);
      const double y = grid.dim == 2 ? grid.center(1, j) : 0.0;
      double v = 0.0;
      switch (p.kind) {
        case Profile::Kind::Constant: v = p.a; break;
        case Profile::Kind::Cosine: {
          double shape = std::cos(std::numbers::pi * x / grid.lengths[0]);
          if (grid.dim == 2) shape *= std::cos(std::numbers::pi * y / grid.lengths[1]);
          v = p.a + p.b * shape;
          break;
        }
        case Profile::Kind::Random: v = p.a + (p.b - p.a) * unit(rng); break;
        case Profile::Kind::Function: v = p.fn(x, y); break;
      }
      if (!(v >= 0) || !std::isfinite(v)) throw NegativeInitialData(s, c, v);
      field[c] = v;
    }
    st.fields.push_back(std::move(field));
  }
  return st;
}

SimState diffusion_step(const SimState& state, const ReactionNetwork& net, double dt) {
  if (!(dt > 0)) throw PreconditionError("dt must be positive");
  if (state.species() != net.species_count()) throw DimensionMismatch("state and network species differ");
  SimState out = state;
  const auto d = net.diffusion_values();
  for (std::size_t i = 0; i < out.species(); ++i) {
    ImplicitDiffusion solver(state.grid, dt * d[i]);
    solver.solve(out.fields[i], out.fields[i]);
  }
  return out;
}

namespace {

enum class CellStatus : unsigned char { Ok, Negative, Failed };

/// Per-thread workspace for the per-cell ODE integration.
struct OdeWork {
  const CompiledPolyVec* f;
  std::size_t m;
  std::vector<double> k1, k2, k3, k4, tmp, scratch;

  OdeWork(const CompiledPolyVec& rhs, std::size_t species)
      : f(&rhs), m(species), k1(m), k2(m), k3(m), k4(m), tmp(m), scratch(rhs.monomial_count()) {}

  void rk4(double* u, double h) {
    f->evaluate(u, k1.data(), scratch.data());
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    f->evaluate(tmp.data(), k2.data(), scratch.data());
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    f->evaluate(tmp.data(), k3.data(), scratch.data());
    for (std::size_t i = 0; i < m; ++i) tmp[i] = u[i] + h * k3[i];
    f->evaluate(tmp.data(), k4.data(), scratch.data());
    for (std::size_t i = 0; i < m; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  /// Reject-and-retry integration over h; returns the species that stayed
  /// negative after the last permitted halving, or m on success.
  std::size_t retry(double* u, double h, int depth) {
    std::vector<double> saved(u, u + m);
    rk4(u, h);
    std::size_t neg = m;
    for (std::size_t i = 0; i < m; ++i)
      if (u[i] < 0) {
        neg = i;
        break;
      }
    if (neg == m) return m;
    if (depth == kMaxPositivityRetries) return neg;
    std::copy(saved.begin(), saved.end(), u);
    if (std::size_t r = retry(u, 0.5 * h, depth + 1); r != m) return r;
    return retry(u, 0.5 * h, depth + 1);
  }
};

/// Integrates every cell; deficits[c * m + i] receives clipped amounts.
void integrate_cells(std::vector<std::vector<double>>& fields, const CompiledPolyVec& f, double dt,
                     const StepControl& ctrl, std::vector<double>& deficits, std::vector<CellStatus>& status,
                     std::vector<std::size_t>& failed_species) {
  const std::size_t m = fields.size();
  const std::size_t cells = m ? fields[0].size() : 0;
  const double h = dt / ctrl.reaction_substeps;
  const bool clip = ctrl.positivity == PositivityMode::ClipReport;
#pragma omp parallel
  {
    OdeWork work(f, m);
    std::vector<double> u(m);
#pragma omp for schedule(static)
    for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(cells); ++cc) {
      const auto c = static_cast<std::size_t>(cc);
      for (std::size_t i = 0; i < m; ++i) u[i] = fields[i][c];
      for (int s = 0; s < ctrl.reaction_substeps; ++s) {
        if (clip) {
          work.rk4(u.data(), h);
          for (std::size_t i = 0; i < m; ++i)
            if (u[i] < 0) {
              deficits[c * m + i] -= u[i];
              u[i] = 0.0;
              status[c] = CellStatus::Negative;
            }
        } else if (std::size_t bad = work.retry(u.data(), h, 0); bad != m) {
          status[c] = CellStatus::Failed;
          failed_species[c] = bad;
          break;
        }
      }
      for (std::size_t i = 0; i < m; ++i) fields[i][c] = u[i];
    }
  }
}

void record_clips(const std::vector<double>& deficits, const std::vector<CellStatus>& status, std::size_t m,
                  double t, double volume, PositivityLog* log) {
  if (!log) return;
  for (std::size_t c = 0; c < status.size(); ++c) {
    if (status[c] != CellStatus::Negative) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = deficits[c * m + i];
      if (d <= 0) continue;
      if (log->events.size() < PositivityLog::kMaxStoredEvents) log->events.push_back({t, c, i, d});
      ++log->count;
      log->clipped_mass += d * volume;
    }
  }
}

void reaction_in_place(SimState& st, const CompiledPolyVec& f, double dt, const StepControl& ctrl, PositivityLog* log) {
  const std::size_t m = st.species();
  if (m == 0 || f.is_zero()) return;
  const std::size_t cells = st.fields[0].size();
  std::vector<double> deficits(cells * m, 0.0);
  std::vector<CellStatus> status(cells, CellStatus::Ok);
  std::vector<std::size_t> failed(cells, 0);
  integrate_cells(st.fields, f, dt, ctrl, deficits, status, failed);
  for (std::size_t c = 0; c < cells; ++c)
    if (status[c] == CellStatus::Failed) throw PositivityFailure(st.t, failed[c], c);
  record_clips(deficits, status, m, st.t, st.grid.cell_volume(), log);
}

void check_blowup(const SimState& st) {
  for (std::size_t i = 0; i < st.species(); ++i)
    for (std::size_t c = 0; c < st.fields[i].size(); ++c) {
      const double v = st.fields[i][c];
      if (!std::isfinite(v) || v > kBlowupThreshold) throw BlowupDetected(st.t, i, c, v);
    }
}

}  // namespace

SimState reaction_step(const SimState& state, const PolyVec& f, double dt, const StepControl& ctrl,
                       PositivityLog* log) {
  if (!(dt > 0)) throw PreconditionError("dt must be positive");
  ctrl.validate();
  if (f.size() != state.species()) throw DimensionMismatch("vector field and state species differ");
  SimState out = state;
  reaction_in_place(out, CompiledPolyVec(f), dt, ctrl, log);
  check_blowup(out);
  return out;
}

TraceSample make_sample(const SimState& st, const TraceOptions& options) {
  const std::size_t m = st.species();
  const double vol = st.grid.cell_volume();
  const bool have_eq = !options.u_inf.empty();
  if (!options.z.empty() && options.z.size() != m) throw DimensionMismatch("entropy reference has wrong length");
  if (have_eq && options.u_inf.size() != m) throw DimensionMismatch("equilibrium has wrong length");
  TraceSample s;
  s.t = st.t;
  s.sup.assign(m, 0.0);
  s.integral.assign(m, 0.0);
  s.power_integrals.assign(options.powers.size(), std::vector<double>(m, 0.0));
  double l1 = 0.0, lp = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double z = options.z.empty() ? 1.0 : options.z[i];
    double sup = 0.0, sum = 0.0, ent = 0.0;
    for (double v : st.fields[i]) {
      sup = std::max(sup, v);
      sum += v;
      ent += entropy_density(v, z);
      if (have_eq) {
        const double d = std::abs(v - options.u_inf[i]);
        l1 += d * vol;
        lp += std::pow(d, options.dist_p) * vol;
      }
    }
    for (std::size_t k = 0; k < options.powers.size(); ++k) {
      double acc = 0.0;
      for (double v : st.fields[i]) acc += std::pow(v, options.powers[k]);
      s.power_integrals[k][i] = acc * vol;
    }
    s.sup[i] = sup;
    s.integral[i] = sum * vol;
    s.entropy += ent * vol;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.dist_l1 = have_eq ? l1 : nan;
  s.dist_lp = have_eq ? std::pow(lp, 1.0 / options.dist_p) : nan;
  if (options.keep_fields) s.fields = st.fields;
  return s;
}

namespace {

struct Stepper {
  const SimState& ref;
  const ReactionNetwork& net;
  CompiledPolyVec f;
  StepControl ctrl;
  std::vector<double> d;
  /// levels[k][i]: solver for species i with step h / 2^k
  std::vector<std::vector<ImplicitDiffusion>> levels;
  double h;

  const std::vector<ImplicitDiffusion>& solvers(int level) {
    while (static_cast<int>(levels.size()) <= level) {
      const double hk = h / std::ldexp(1.0, static_cast<int>(levels.size()));
      std::vector<ImplicitDiffusion> set;
      for (double di : d) set.emplace_back(ref.grid, hk * di);
      levels.push_back(std::move(set));
    }
    return levels[static_cast<std::size_t>(level)];
  }

  void diffuse(SimState& st, int level) {
    const auto& s = solvers(level);
    for (std::size_t i = 0; i < st.species(); ++i) s[i].solve(st.fields[i], st.fields[i]);
  }

  void strang(SimState& st, PositivityLog& log) {
    reaction_in_place(st, f, 0.5 * h, ctrl, &log);
    diffuse(st, 0);
    reaction_in_place(st, f, 0.5 * h, ctrl, &log);
  }

  void imex(SimState& st, PositivityLog& log, int level) {
    const double hk = h / std::ldexp(1.0, level);
    const std::size_t m = st.species();
    const std::size_t cells = m ? st.fields[0].size() : 0;
    std::vector<std::vector<double>> next = st.fields;
    std::vector<double> deficits(cells * m, 0.0);
    std::vector<CellStatus> status(cells, CellStatus::Ok);
    std::vector<std::size_t> negative(cells, 0);
#pragma omp parallel
    {
      std::vector<double> u(m), fu(m), scratch(f.monomial_count());
#pragma omp for schedule(static)
      for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(cells); ++cc) {
        const auto c = static_cast<std::size_t>(cc);
        for (std::size_t i = 0; i < m; ++i) u[i] = st.fields[i][c];
        f.evaluate(u.data(), fu.data(), scratch.data());
        for (std::size_t i = 0; i < m; ++i) {
          double v = u[i] + hk * fu[i];
          if (v < 0) {
            if (status[c] == CellStatus::Ok) negative[c] = i;
            status[c] = CellStatus::Negative;
            deficits[c * m + i] = -v;
            v = 0.0;
          }
          next[i][c] = v;
        }
      }
    }
    const bool any_negative = std::any_of(status.begin(), status.end(), [](CellStatus s) { return s != CellStatus::Ok; });
    if (any_negative && ctrl.positivity == PositivityMode::RejectRetry) {
      if (level == kMaxPositivityRetries) {
        const auto c = static_cast<std::size_t>(
            std::find(status.begin(), status.end(), CellStatus::Negative) - status.begin());
        throw PositivityFailure(st.t, negative[c], c);
      }
      const double t0 = st.t;
      imex(st, log, level + 1);
      st.t = t0 + 0.5 * hk;
      imex(st, log, level + 1);
      st.t = t0;
      return;
    }
    if (any_negative) record_clips(deficits, status, m, st.t, st.grid.cell_volume(), &log);
    st.fields = std::move(next);
    diffuse(st, level);
  }
};

}  // namespace

SimTrace advance(SimState& state, const ReactionNetwork& net, const StepControl& ctrl, double t_end,
                 const TraceOptions& options, const Observer& observer) {
  ctrl.validate();
  net.validate();
  state.grid.validate();
  if (state.species() != net.species_count()) throw DimensionMismatch("state and network species differ");
  if (!(t_end > state.t)) throw PreconditionError("t_end must exceed the current time");
  if (!(options.cadence > 0)) throw PreconditionError("cadence must be positive");
  for (double p : options.powers)
    if (!(p >= 1)) throw PreconditionError("trace powers must be at least 1");
  configure_threads();

  const double t0 = state.t;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((t_end - t0) / ctrl.dt - 1e-9)));
  const double h = (t_end - t0) / static_cast<double>(steps);
  const auto stride = static_cast<std::size_t>(std::max(1L, std::lround(options.cadence / h)));

  Stepper stepper{state, net, CompiledPolyVec(compile_rhs(net)), ctrl, net.diffusion_values(), {}, h};
  SimTrace trace;
  trace.grid = state.grid;
  trace.species = net.species;
  trace.options = options;
  trace.dt = h;
  trace.steps = steps;
  for (const auto& field : state.fields) {
    double s = 0.0;
    for (double v : field) s += v;
    trace.initial_mass += s * state.grid.cell_volume();
  }

  auto record = [&] {
    trace.samples.push_back(make_sample(state, options));
    if (observer) observer(state, trace.samples.back());
  };
  record();
  for (std::size_t k = 1; k <= steps; ++k) {
    try {
      if (ctrl.mode == StepMode::Splitting)
        stepper.strang(state, trace.positivity);
      else
        stepper.imex(state, trace.positivity, 0);
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << "t=" << std::setprecision(10) << state.t << ": " << e.what();
      throw ConvergenceError(os.str());
    }
    state.t = t0 + static_cast<double>(k) * h;
    check_blowup(state);
    if (k % stride == 0 || k == steps) record();
  }
  trace.valid = trace.positivity.clipped_mass <= 1e-6 * trace.initial_mass;
  return trace;
}

void write_snapshot(std::ostream& out, const SimState& state, std::size_t species, const std::string& name) {
  if (species >= state.species()) throw DimensionMismatch("snapshot: species index out of range");
  const Grid& g = state.grid;
  out << "rdnet-field/1\n";
  out << std::setprecision(17);
  out << "species " << name << "\n";
  out << "t " << state.t << "\n";
  out << "dim " << g.dim << "\n";
  out << "lengths " << g.lengths[0];
  if (g.dim == 2) out << " " << g.lengths[1];
  out << "\ncells " << g.cells[0];
  if (g.dim == 2) out << " " << g.cells[1];
  out << "\n";
  const std::size_t nx = static_cast<std::size_t>(g.cells[0]);
  const std::size_t ny = g.dim == 2 ? static_cast<std::size_t>(g.cells[1]) : 1;
  const auto& field = state.fields[species];
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) out << (i ? " " : "") << field[j * nx + i];
    out << "\n";
  }
}

}  // namespace rdnet
