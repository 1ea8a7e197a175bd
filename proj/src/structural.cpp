#include "rdnet/structural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include "rdnet/error.hpp"
#include "rdnet/lp.hpp"

namespace rdnet {

QuasipositivityResult check_quasipositivity(const PolyVec& f) {
  for (std::size_t i = 0; i < f.size(); ++i)
    for (const auto& [m, c] : f.components[i].terms())
      if (c < 0 && m.exponent(i) == 0) return {false, std::make_pair(i, m)};
  return {};
}

const char* to_string(MassClass c) {
  switch (c) {
    case MassClass::Conservation: return "conservation";
    case MassClass::Dissipation: return "dissipation";
    case MassClass::Control: return "control";
    case MassClass::None: return "none";
  }
  return "none";
}

namespace {

/// For every monomial appearing in f, its coefficient in each component.
std::map<Monomial, std::vector<Rational>, GradedLex> coefficient_table(const PolyVec& f) {
  std::map<Monomial, std::vector<Rational>, GradedLex> table;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (const auto& [m, c] : f.components[i].terms()) {
      auto [it, inserted] = table.try_emplace(m, std::vector<Rational>(f.size()));
      it->second[i] = c;
    }
  return table;
}

Polynomial weighted_sum(const PolyVec& f, const std::vector<Rational>& alpha) {
  Polynomial s(f.species);
  for (std::size_t i = 0; i < f.size(); ++i) s += alpha[i] * f.components[i];
  return s;
}

/// Smallest K with c_0 <= K and c_i <= K alpha_i for the degree <= 1 part.
Rational control_constant(const Polynomial& s, const std::vector<Rational>& alpha) {
  Rational k = 0;
  for (const auto& [m, c] : s.terms()) {
    if (m.degree() == 0) {
      k = std::max(k, c);
    } else if (m.degree() == 1) {
      for (std::size_t i = 0; i < m.species(); ++i)
        if (m.exponent(i) == 1) k = std::max(k, Rational(c / alpha[i]));
    }
  }
  return k;
}

std::optional<std::vector<Rational>> solve_weights(const PolyVec& f, MassClass cls) {
  const std::size_t m = f.size();
  LinearProgram lp;
  lp.variables = m;
  lp.lower_bounds.assign(m, Rational(1));
  lp.objective.assign(m, Rational(1));
  for (const auto& [mono, coeffs] : coefficient_table(f)) {
    if (cls == MassClass::Control && mono.degree() < 2) continue;
    lp.constraints.push_back({coeffs, cls == MassClass::Conservation ? Relation::Equal : Relation::LessEqual, Rational(0)});
  }
  auto sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  return sol.x;
}

}  // namespace

MassControlCert find_mass_control(const PolyVec& f) {
  for (MassClass cls : {MassClass::Conservation, MassClass::Dissipation, MassClass::Control}) {
    auto alpha = solve_weights(f, cls);
    if (!alpha) continue;
    MassControlCert cert{*alpha, Rational(0), cls};
    if (cls == MassClass::Control) cert.K = control_constant(weighted_sum(f, cert.alpha), cert.alpha);
    return cert;
  }
  return MassControlCert{{}, Rational(0), MassClass::None};
}

bool verify_mass_control(const PolyVec& f, const MassControlCert& cert) {
  if (cert.cls == MassClass::None) return true;
  if (cert.alpha.size() != f.size()) throw DimensionMismatch("alpha length differs from species count");
  for (const auto& a : cert.alpha)
    if (a < 1) return false;
  const Polynomial s = weighted_sum(f, cert.alpha);
  switch (cert.cls) {
    case MassClass::Conservation:
      return s.is_zero();
    case MassClass::Dissipation:
      return std::all_of(s.terms().begin(), s.terms().end(), [](const auto& t) { return t.second <= 0; });
    case MassClass::Control:
      for (const auto& [m, c] : s.terms()) {
        if (m.degree() >= 2 && c > 0) return false;
        if (m.degree() == 0 && c > cert.K) return false;
        if (m.degree() == 1)
          for (std::size_t i = 0; i < m.species(); ++i)
            if (m.exponent(i) == 1 && c > cert.K * cert.alpha[i]) return false;
      }
      return cert.K >= 0;
    case MassClass::None:
      break;
  }
  return true;
}

// --- intermediate sums ------------------------------------------------------

namespace {

class IntermediateSearch {
 public:
  IntermediateSearch(const PolyVec& f, int r, IntermediateSearchStats* stats)
      : f_(f), r_(r), m_(f.size()), stats_(stats) {}

  std::optional<IntermediateSumCert> run() {
    if (m_ > 62) throw ResourceError("intermediate-sum search supports at most 62 species");
    IntermediateSumCert cert;
    cert.r = r_;
    if (extend(0, cert)) return cert;
    return std::nullopt;
  }

 private:
  std::optional<std::vector<Rational>> row_lp(const std::vector<std::size_t>& prefix) {
    const std::size_t k = prefix.size();
    std::map<Monomial, std::vector<Rational>, GradedLex> table;
    for (std::size_t j = 0; j < k; ++j)
      for (const auto& [mono, c] : f_.components[prefix[j]].terms()) {
        if (mono.degree() <= r_) continue;
        auto [it, inserted] = table.try_emplace(mono, std::vector<Rational>(k));
        it->second[j] = c;
      }
    LinearProgram lp;
    lp.variables = k;
    lp.lower_bounds.assign(k, Rational(0));
    lp.lower_bounds.back() = 1;
    lp.objective.assign(k, Rational(1));
    for (auto& [mono, coeffs] : table) lp.constraints.push_back({std::move(coeffs), Relation::LessEqual, Rational(0)});
    total_constraints_ += lp.constraints.size();
    if (stats_) {
      stats_->lps_solved += 1;
      stats_->constraints_total += lp.constraints.size();
    }
    if (total_constraints_ > kMaxIntermediateConstraints)
      throw ResourceError("intermediate-sum search exceeded " + std::to_string(kMaxIntermediateConstraints) +
                          " LP constraints");
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    return sol.x;
  }

  bool extend(std::uint64_t mask, IntermediateSumCert& cert) {
    if (cert.ordering.size() == m_) return true;
    if (dead_.contains(mask)) return false;
    for (std::size_t s = 0; s < m_; ++s) {
      if (mask & (std::uint64_t{1} << s)) continue;
      const std::uint64_t next = mask | (std::uint64_t{1} << s);
      if (dead_.contains(next) || row_infeasible_.contains({next, s})) continue;
      cert.ordering.push_back(s);
      if (auto row = row_lp(cert.ordering)) {
        cert.A.push_back(*row);
        if (extend(next, cert)) return true;
        cert.A.pop_back();
      } else {
        // The row LP depends on the prefix set and on which species carries
        // the unit diagonal, not on the order of the earlier species.
        row_infeasible_.insert({next, s});
      }
      cert.ordering.pop_back();
    }
    dead_.insert(mask);
    return false;
  }

  const PolyVec& f_;
  int r_;
  std::size_t m_;
  IntermediateSearchStats* stats_;
  std::size_t total_constraints_ = 0;
  std::unordered_set<std::uint64_t> dead_;
  std::set<std::pair<std::uint64_t, std::size_t>> row_infeasible_;
};

}  // namespace

std::optional<IntermediateSumCert> find_intermediate_sum_at(const PolyVec& f, int r, IntermediateSearchStats* stats) {
  if (r < 1) throw PreconditionError("r must be at least 1");
  return IntermediateSearch(f, r, stats).run();
}

std::optional<IntermediateSumCert> find_intermediate_sum(const PolyVec& f, int r_max, IntermediateSearchStats* stats) {
  if (r_max < 1) throw PreconditionError("r_max must be at least 1");
  for (int r = 1; r <= r_max; ++r)
    if (auto cert = find_intermediate_sum_at(f, r, stats)) return cert;
  return std::nullopt;
}

std::vector<Polynomial> intermediate_rows(const PolyVec& f, const IntermediateSumCert& cert) {
  const std::size_t m = f.size();
  if (cert.ordering.size() != m || cert.A.size() != m) throw DimensionMismatch("certificate size differs from species count");
  std::vector<Polynomial> rows;
  for (std::size_t k = 0; k < m; ++k) {
    if (cert.A[k].size() < k + 1) throw DimensionMismatch("certificate row too short");
    Polynomial row(f.species);
    for (std::size_t j = 0; j <= k; ++j) row += cert.A[k][j] * f.components[cert.ordering.at(j)];
    rows.push_back(std::move(row));
  }
  return rows;
}

bool verify_intermediate_sum(const PolyVec& f, const IntermediateSumCert& cert) {
  const std::size_t m = f.size();
  if (cert.ordering.size() != m || cert.A.size() != m) throw DimensionMismatch("certificate size differs from species count");
  std::vector<std::size_t> sorted = cert.ordering;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < m; ++i)
    if (sorted[i] != i) return false;
  if (cert.r < 1) return false;
  for (std::size_t k = 0; k < m; ++k) {
    if (cert.A[k].size() < k + 1) return false;
    for (std::size_t j = 0; j < cert.A[k].size(); ++j) {
      if (cert.A[k][j] < 0) return false;
      if (j > k && cert.A[k][j] != 0) return false;
    }
    if (cert.A[k][k] < 1) return false;
  }
  for (const auto& row : intermediate_rows(f, cert))
    for (const auto& [mono, c] : row.terms())
      if (mono.degree() > cert.r && c > 0) return false;
  return true;
}

// --- quasi-uniform ----------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

QuasiUniformResult check_quasi_uniform(const QuasiUniformQuery& q) {
  if (q.n < 1) throw PreconditionError("spatial dimension must be at least 1");
  if (q.r < 1) throw PreconditionError("r must be at least 1");
  if (!(q.dmin > 0) || !(q.dmin <= q.dmax)) throw PreconditionError("need 0 < dmin <= dmax");
  if (!(q.p_prime > 1.0) || q.p_prime > 2.0) throw PreconditionError("p' must lie in (1, 2]");
  const double A = q.dmin, B = q.dmax, mid = 0.5 * (A + B);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  if (B == A) return {Verdict::Holds, kInf, "equal diffusion coefficients"};
  const double energy_bound = (B - A) / (2.0 * mid);  // (1/m) (B - A) / 2
  if (q.r == 1) return {Verdict::Holds, 1.0 - energy_bound, "r = 1: p' = 2 energy bound, every p > 0 admissible"};

  const double p = q.p_prime / (q.p_prime - 1.0);
  const double threshold = 0.5 * (q.n + 2) * (q.r - 1);
  const bool boundary = std::abs(p - threshold) <= 1e-12 * std::max(1.0, threshold);
  if (p < threshold && !boundary)
    throw PreconditionError("p = " + std::to_string(p) + " must exceed (n+2)(r-1)/2 = " + std::to_string(threshold));
  if (q.p_prime == 2.0) {
    const double margin = 1.0 - energy_bound;
    if (margin <= 0) return {Verdict::Fails, margin, "p' = 2 energy bound"};
    return {Verdict::Holds, margin,
            boundary ? "p' = 2 energy bound, strict margin extends to some p' < 2 with p > (n+2)(r-1)/2"
                     : "p' = 2 energy bound"};
  }
  if (boundary) throw PreconditionError("p must strictly exceed (n+2)(r-1)/2 when p' < 2");
  const double lower = q.C_estimate * (B - A) / 2.0;
  if (lower >= 1.0) return {Verdict::Fails, 1.0 - lower, "certified lower bound on C violates the criterion"};
  return {Verdict::Inconclusive, 1.0 - lower, "only a lower bound on C is available for p' < 2"};
}

// --- analyze ----------------------------------------------------------------

StructuralReport analyze(const ReactionNetwork& net, const AnalyzeOptions& options,
                         const std::optional<RationalMatrix>& hint_matrix, int hint_r) {
  StructuralReport rep;
  const PolyVec f = compile_rhs(net);
  const std::size_t m = f.size();
  rep.species = m;
  rep.n = options.n;

  const auto qp = check_quasipositivity(f);
  rep.quasipositive = qp.holds;
  rep.quasipositivity_witness = qp.witness;
  rep.mass = find_mass_control(f);
  rep.entropy = check_entropy_dissipation(net, options.entropy);
  rep.growth = growth_degree(f);

  int max_deg = 1;
  for (const auto& p : f.components) max_deg = std::max(max_deg, p.max_degree());
  rep.intermediate = find_intermediate_sum(f, options.r_max > 0 ? options.r_max : max_deg);

  if (hint_matrix) {
    HintCheck hc;
    hc.cert.r = hint_r;
    hc.cert.A = *hint_matrix;
    for (std::size_t i = 0; i < m; ++i) hc.cert.ordering.push_back(i);
    hc.valid = verify_intermediate_sum(f, hc.cert);
    rep.hint = std::move(hc);
  }

  const bool entropy_ok = rep.entropy && rep.entropy->dissipative;
  rep.lyapunov = rep.mass.cls != MassClass::None || entropy_ok;
  rep.uniform_in_time = rep.mass.cls == MassClass::Conservation || rep.mass.cls == MassClass::Dissipation || entropy_ok;

  if (rep.intermediate) {
    const int r = rep.intermediate->r;
    rep.two_dimensional_route = options.n == 2 && r <= 2;
    QuasiUniformQuery q;
    q.n = options.n;
    q.r = r;
    if (m > 0) {
      const auto d = net.diffusion_values();
      q.dmin = *std::min_element(d.begin(), d.end());
      q.dmax = *std::max_element(d.begin(), d.end());
    }
    const double threshold = 0.5 * (options.n + 2) * (r - 1);
    if (r == 1 || q.dmin == q.dmax || threshold <= 2.0) {
      q.p_prime = 2.0;
    } else {
      const double p = threshold + options.p_delta;
      q.p_prime = p / (p - 1.0);
      Grid grid = options.n >= 2 ? Grid::rectangle(1.0, 1.0, options.maxreg_cells, options.maxreg_cells)
                                 : Grid::line(1.0, options.maxreg_cells);
      q.C_estimate = estimate_maxreg_constant(0.5 * (q.dmin + q.dmax), q.p_prime, grid, 1000, options.maxreg).value;
    }
    rep.quasi_uniform = check_quasi_uniform(q);
    rep.quasi_uniform_route = rep.quasi_uniform->verdict == Verdict::Holds;
  }

  const bool base = rep.quasipositive && rep.lyapunov;
  rep.verified = base && (rep.two_dimensional_route || rep.quasi_uniform_route);
  if (!rep.quasipositive) {
    rep.verdict = "not verified: quasipositivity fails";
  } else if (!rep.lyapunov) {
    rep.verdict = "not verified: no linear mass control or entropy certificate";
  } else if (!rep.intermediate) {
    rep.verdict = "not verified: no intermediate-sum certificate";
  } else if (rep.intermediate->r == 1 && rep.quasi_uniform_route) {
    rep.verdict = "global existence in all dimensions (r = 1, quasi-uniform criterion always satisfied)";
  } else if (rep.two_dimensional_route) {
    rep.verdict = "global existence for n = 2 via the quadratic intermediate-sum route";
  } else if (rep.quasi_uniform_route) {
    rep.verdict = "global existence for n = " + std::to_string(options.n) + " via the quasi-uniform diffusion criterion";
  } else {
    rep.verdict = "not verified: quasi-uniform criterion " + std::string(to_string(rep.quasi_uniform->verdict));
  }
  if (rep.verified)
    rep.verdict += rep.uniform_in_time ? "; bounded uniformly in time" : "; uniform-in-time bound not covered (K > 0)";
  return rep;
}

}  // namespace rdnet
