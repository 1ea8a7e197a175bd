#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdnet/grid.hpp"
#include "rdnet/linalg.hpp"
#include "rdnet/netmodel.hpp"

namespace rdnet {

// --- quasipositivity --------------------------------------------------------

struct QuasipositivityResult {
  bool holds = true;
  /// First violation found: component index and the offending monomial.
  std::optional<std::pair<std::size_t, Monomial>> witness;
};

/// f_i >= 0 on the face u_i = 0 of the orthant. For polynomials this holds
/// iff every negative monomial of f_i contains u_i.
QuasipositivityResult check_quasipositivity(const PolyVec& f);

// --- linear mass control ----------------------------------------------------

enum class MassClass { Conservation, Dissipation, Control, None };
const char* to_string(MassClass c);

/// Weights alpha (normalised to alpha_i >= 1) and constant K certifying
/// sum_i alpha_i f_i <= K (1 + sum_i alpha_i u_i) in the tightest class.
struct MassControlCert {
  std::vector<Rational> alpha;
  Rational K;
  MassClass cls = MassClass::None;
};

/// Solves the conservation, dissipation and control LPs in that order and
/// returns the first feasible class. Among feasible weights the one with the
/// smallest sum is reported.
MassControlCert find_mass_control(const PolyVec& f);

/// Exact re-check of the certificate's class and K.
bool verify_mass_control(const PolyVec& f, const MassControlCert& cert);

// --- entropy / complex balance ----------------------------------------------

struct EntropyOptions {
  double tol = 1e-10;
  int max_newton_iterations = 200;
  int samples = 10000;
  double sample_low = 1e-3;
  double sample_high = 1e3;
};

struct EntropyCert {
  std::vector<double> z;
  /// Maximal complex-balance defect at z.
  double residual = 0.0;
  bool converged = false;
  /// false when z is the unit vector (plain u log u - u + 1 entropy).
  bool shifted = false;
  bool dissipative = false;
  int samples_checked = 0;
  /// Largest normalised value of sum_i log(u_i/z_i) f_i(u) seen in sampling.
  double max_sampled = 0.0;
  std::optional<std::vector<double>> violation;
};

/// Searches a complex-balanced equilibrium z > 0 by damped Gauss-Newton in
/// log coordinates starting at z = 1. When found, the entropy inequality
/// sum_i log(u_i/z_i) f_i(u) <= 0 is confirmed on a Halton sample of log-uniform
/// points. A sample counts as a violation when the sum exceeds
/// tol * (1 + sum_i |log(u_i/z_i) f_i(u)|), which makes the check insensitive
/// to rounding at large concentrations.
EntropyCert check_entropy_dissipation(const ReactionNetwork& net, const EntropyOptions& options = {});

/// Re-runs the sampling test for an explicit z (independent of the search).
bool verify_entropy_dissipation(const ReactionNetwork& net, const std::vector<double>& z,
                                const EntropyOptions& options, std::optional<std::vector<double>>* witness = nullptr);

/// Complex-balance defect at z: max over complexes of |outflow - inflow|.
double complex_balance_defect(const ReactionNetwork& net, const std::vector<double>& z);

// --- intermediate sums ------------------------------------------------------

/// Lower-triangular A in permuted coordinates: row k combines
/// f_{ordering[0]}, ..., f_{ordering[k]} with weights A[k][0..k].
struct IntermediateSumCert {
  std::vector<std::size_t> ordering;
  RationalMatrix A;
  int r = 1;
};

struct IntermediateSearchStats {
  std::size_t lps_solved = 0;
  std::size_t constraints_total = 0;
};

inline constexpr std::size_t kMaxIntermediateConstraints = 1000000;

/// Smallest r in 1..r_max admitting an ordering and matrix such that every
/// monomial of degree > r in every row sum has a non-positive coefficient.
/// Orderings are grown prefix by prefix with backtracking; failing
/// (prefix set, next species) pairs are memoised.
std::optional<IntermediateSumCert> find_intermediate_sum(const PolyVec& f, int r_max,
                                                         IntermediateSearchStats* stats = nullptr);

/// Same search restricted to exactly one r.
std::optional<IntermediateSumCert> find_intermediate_sum_at(const PolyVec& f, int r,
                                                            IntermediateSearchStats* stats = nullptr);

bool verify_intermediate_sum(const PolyVec& f, const IntermediateSumCert& cert);

/// Row polynomials sum_{j<=k} A[k][j] f_{ordering[j]}.
std::vector<Polynomial> intermediate_rows(const PolyVec& f, const IntermediateSumCert& cert);

// --- maximal regularity constant -------------------------------------------

struct MaxRegOptions {
  double window = 1.0;
  int time_steps = 16;
  int dictionary_size = 64;
  std::uint64_t seed = 20240601;
  double rel_tol = 1e-6;
};

struct MaxRegEstimate {
  double value = 0.0;
  /// Always true: the estimate never exceeds the discrete constant.
  bool lower_bound = true;
  /// 1/m, reported for p' = 2 only.
  std::optional<double> analytic_bound;
  int iterations = 0;
};

/// Discrete analogue of the maximal-regularity constant
/// sup ||Laplacian phi||_{p'} / ||theta||_{p'} where phi solves the forward heat
/// problem phi_t - m Laplacian phi = theta, phi(0) = 0 on the grid over one
/// window, discretised by backward Euler in time. For p' = 2 this is the
/// operator norm, found by power iteration on T^T T; for p' < 2 the maximum of
/// the ratio over a fixed dictionary of random nonnegative theta.
MaxRegEstimate estimate_maxreg_constant(double m_diff, double p_prime, const Grid& grid, int steps,
                                        const MaxRegOptions& options = {});

/// The discrete solution operator theta -> Laplacian phi and its adjoint, as
/// used by the estimator. Fields are stored time-major: step n occupies
/// [n * cells, (n + 1) * cells).
class HeatSolutionOperator {
 public:
  HeatSolutionOperator(const Grid& grid, double m_diff, double window, int time_steps);
  std::size_t size() const { return cells_ * static_cast<std::size_t>(steps_); }
  void apply(std::span<const double> theta, std::span<double> out) const;
  void apply_adjoint(std::span<const double> y, std::span<double> out) const;
  /// Solution phi itself (without the Laplacian).
  void solve(std::span<const double> theta, std::span<double> phi) const;
  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::size_t cells_;
  int steps_;
  double dt_;
  ImplicitDiffusion solver_;
};

// --- quasi-uniform criterion -----------------------------------------------

struct QuasiUniformQuery {
  int n = 2;
  int r = 1;
  double dmin = 1.0;
  double dmax = 1.0;
  double p_prime = 2.0;
  /// Lower-bound estimate of C_{(dmin+dmax)/2, p'}; ignored for p' = 2, where
  /// the analytic bound 1/m is used.
  double C_estimate = 0.0;
};

enum class Verdict { Holds, Fails, Inconclusive };
const char* to_string(Verdict v);

struct QuasiUniformResult {
  Verdict verdict = Verdict::Inconclusive;
  /// 1 - C (B - A) / 2; +infinity for equal diffusion.
  double margin = 0.0;
  std::string route;
};

/// Requires p = p'/(p'-1) > (n+2)(r-1)/2. The boundary case p' = 2 with
/// p = (n+2)(r-1)/2 is accepted when the p' = 2 bound holds strictly, since
/// the strict inequality persists for p' slightly below 2.
QuasiUniformResult check_quasi_uniform(const QuasiUniformQuery& q);

// --- aggregate report -------------------------------------------------------

struct AnalyzeOptions {
  int n = 2;
  int r_max = 0;  // 0: use the largest monomial degree
  EntropyOptions entropy;
  MaxRegOptions maxreg;
  /// Grid used to estimate C_{m,p'} for p' < 2.
  int maxreg_cells = 16;
  /// p0 = threshold + delta when the quasi-uniform route needs p > threshold.
  double p_delta = 0.1;
};

struct HintCheck {
  IntermediateSumCert cert;
  bool valid = false;
};

struct StructuralReport {
  std::size_t species = 0;
  bool quasipositive = true;
  std::optional<std::pair<std::size_t, Monomial>> quasipositivity_witness;
  MassControlCert mass;
  std::optional<EntropyCert> entropy;
  std::optional<IntermediateSumCert> intermediate;
  std::optional<HintCheck> hint;
  int growth = 0;
  std::optional<QuasiUniformResult> quasi_uniform;
  /// Lyapunov hypothesis satisfied by the mass or the entropy certificate.
  bool lyapunov = false;
  /// K = 0 in the Lyapunov inequality, i.e. uniform-in-time bounds follow.
  bool uniform_in_time = false;
  int n = 2;
  bool two_dimensional_route = false;
  bool quasi_uniform_route = false;
  bool verified = false;
  std::string verdict;
};

StructuralReport analyze(const ReactionNetwork& net, const AnalyzeOptions& options = {},
                         const std::optional<RationalMatrix>& hint_matrix = std::nullopt, int hint_r = 0);

}  // namespace rdnet
