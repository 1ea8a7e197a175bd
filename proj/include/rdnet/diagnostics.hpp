#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rdnet/linalg.hpp"
#include "rdnet/netmodel.hpp"
#include "rdnet/pde.hpp"

namespace rdnet {

struct CylinderWindow {
  double tau = 0.0;
  double length = 1.0;
};

/// (sum over samples in [tau, tau + length) of integral u_i^p times the
/// sample interval)^(1/p), each sample weighted by the time until the next
/// sample or the window end. p = infinity gives the maximum over the window.
/// The integrals of u_i^p come from the trace's stored powers or, failing
/// that, from stored fields.
double lp_cylinder_norm(const SimTrace& trace, std::size_t species, double p, const CylinderWindow& w);

/// Norms over consecutive windows tau = t0, t0 + length, ... lying inside
/// the trace.
std::vector<double> cylinder_norm_series(const SimTrace& trace, std::size_t species, double p, double length = 1.0);

/// Cumulative maximum of the per-sample sup norm of one species.
std::vector<double> running_sup_norm(const SimTrace& trace, std::size_t species);

struct PlateauCheck {
  double early_max = 0.0;  // over the first three quarters of the time span
  double late_max = 0.0;   // over the last quarter
  bool plateau = false;    // late_max <= early_max + tol
};

PlateauCheck check_plateau(const std::vector<double>& t, const std::vector<double>& values, double tol = 1e-6);

/// Rows span the left null space of the stoichiometric matrix.
RationalMatrix conservation_basis(const ReactionNetwork& net);

/// basis * (spatial mean of u).
std::vector<double> conservation_totals(const RationalMatrix& basis, const SimState& state);

struct EquilibriumResult {
  std::vector<double> u_inf;
  /// max(||f(u_inf)||_inf, ||C u_inf - totals||_inf)
  double residual = 0.0;
  std::vector<double> conserved_values;
  int iterations = 0;
};

inline constexpr int kMaxEquilibriumIterations = 500;

/// Damped Newton in log coordinates on [independent rows of f = 0;
/// C u = totals], started at the uniform point best matching the totals.
/// Requires strictly positive totals and rank(N) + rows(C) = m.
EquilibriumResult solve_equilibrium(const ReactionNetwork& net, const RationalMatrix& conserved,
                                    const std::vector<double>& totals, double tol = 1e-10);

struct DecayFit {
  double lambda = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double p = 1.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinDecaySamples = 10;
inline constexpr double kDecayUnderflow = 1e-14;

/// Least-squares fit of log y = log C - lambda t over samples with t >= t_start.
/// The window ends at the first y below 1e-14 or at the first y that does not
/// decrease, whichever comes first.
DecayFit fit_decay_series(const std::vector<double>& t, const std::vector<double>& y, double t_start, double p = 1.0);

/// Fit of the distance ||u(t) - u_inf||_{L^p} from the trace. Uses the stored
/// distance columns when u_inf and p match the trace options, else stored fields.
DecayFit fit_decay(const SimTrace& trace, const std::vector<double>& u_inf, double p, double t_start);

/// sum_i integral (u_i log(u_i/z_i) - u_i + z_i), with 0 log 0 = 0.
std::vector<double> entropy_series(const SimTrace& trace, const std::vector<double>& z);

/// sum_i alpha_i integral u_i.
std::vector<double> mass_series(const SimTrace& trace, const std::vector<double>& alpha);

/// Entropy density h(u) = u log(u/z) - u + z.
double entropy_density(double u, double z);

std::vector<double> sample_times(const SimTrace& trace);

/// Columns t, species, sup_norm, l1_mass, entropy, dist_l1_to_eq,
/// dist_lp_to_eq; one row per (sample, species). Header lines are written
/// first, each prefixed with "# ".
void write_trace_csv(std::ostream& out, const SimTrace& trace, const std::vector<std::string>& header = {});

}  // namespace rdnet
