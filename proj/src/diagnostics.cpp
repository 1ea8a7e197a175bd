#include "rdnet/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "rdnet/error.hpp"

namespace rdnet {

namespace {

double time_tol(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

bool same_vector(const std::vector<double>& a, const std::vector<double>& b, std::size_t m) {
  auto at = [m](const std::vector<double>& v, std::size_t i) { return v.empty() ? 1.0 : (v.size() == m ? v[i] : NAN); };
  for (std::size_t i = 0; i < m; ++i)
    if (!(at(a, i) == at(b, i))) return false;
  return true;
}

/// Integral of |u_i|^p at sample k, from stored powers or fields.
double power_integral(const SimTrace& trace, std::size_t k, std::size_t species, double p) {
  const auto& powers = trace.options.powers;
  for (std::size_t j = 0; j < powers.size(); ++j)
    if (std::abs(powers[j] - p) <= 1e-12) return trace.samples[k].power_integrals[j][species];
  const auto& fields = trace.samples[k].fields;
  if (fields.empty())
    throw PreconditionError("trace keeps neither the power " + std::to_string(p) + " nor the fields");
  double acc = 0.0;
  for (double v : fields[species]) acc += std::pow(v, p);
  return acc * trace.grid.cell_volume();
}

void require_species(const SimTrace& trace, std::size_t species) {
  if (trace.samples.empty()) throw PreconditionError("empty trace");
  if (species >= trace.species.size()) throw DimensionMismatch("species index out of range");
}

}  // namespace

double entropy_density(double u, double z) {
  if (u <= 0.0) return z;
  // z * phi(y) with y = u/z - 1 and phi(y) = (1 + y) log(1 + y) - y
  const double y = u / z - 1.0;
  if (std::abs(y) < 1e-2) {
    double term = y * y, sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += (k % 2 == 0 ? term : -term) / (k * (k - 1.0));
      term *= y;
    }
    return z * sum;
  }
  return z * ((1.0 + y) * std::log1p(y) - y);
}

std::vector<double> sample_times(const SimTrace& trace) {
  std::vector<double> t;
  t.reserve(trace.samples.size());
  for (const auto& s : trace.samples) t.push_back(s.t);
  return t;
}

double lp_cylinder_norm(const SimTrace& trace, std::size_t species, double p, const CylinderWindow& w) {
  require_species(trace, species);
  if (!(p >= 1.0)) throw PreconditionError("p must be at least 1");
  if (!(w.length > 0)) throw PreconditionError("window length must be positive");
  const double t0 = trace.samples.front().t, t1 = trace.samples.back().t;
  const double end = w.tau + w.length;
  if (w.tau < t0 - time_tol(t0) || end > t1 + time_tol(t1))
    throw PreconditionError("cylinder window lies outside the trace");
  const bool inf = std::isinf(p);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < trace.samples.size(); ++k) {
    const double lo = std::max(trace.samples[k].t, w.tau);
    const double hi = std::min(trace.samples[k + 1].t, end);
    const double weight = hi - lo;
    if (weight <= time_tol(hi)) continue;
    if (inf)
      acc = std::max(acc, trace.samples[k].sup[species]);
    else
      acc += weight * power_integral(trace, k, species, p);
  }
  return inf ? acc : std::pow(acc, 1.0 / p);
}

std::vector<double> cylinder_norm_series(const SimTrace& trace, std::size_t species, double p, double length) {
  require_species(trace, species);
  if (!(length > 0)) throw PreconditionError("window length must be positive");
  const double t0 = trace.samples.front().t, t1 = trace.samples.back().t;
  std::vector<double> out;
  for (int j = 0;; ++j) {
    const double tau = t0 + j * length;
    if (tau + length > t1 + time_tol(t1)) break;
    out.push_back(lp_cylinder_norm(trace, species, p, {tau, length}));
  }
  return out;
}

std::vector<double> running_sup_norm(const SimTrace& trace, std::size_t species) {
  require_species(trace, species);
  std::vector<double> out;
  double best = 0.0;
  for (const auto& s : trace.samples) {
    best = std::max(best, s.sup[species]);
    out.push_back(best);
  }
  return out;
}

PlateauCheck check_plateau(const std::vector<double>& t, const std::vector<double>& values, double tol) {
  if (t.size() != values.size() || t.empty()) throw DimensionMismatch("plateau: series lengths differ or are empty");
  const double cut = t.front() + 0.75 * (t.back() - t.front());
  PlateauCheck pc;
  pc.early_max = -std::numeric_limits<double>::infinity();
  pc.late_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.size(); ++k) {
    double& slot = t[k] < cut ? pc.early_max : pc.late_max;
    slot = std::max(slot, values[k]);
  }
  pc.plateau = pc.late_max <= pc.early_max + tol;
  return pc;
}

RationalMatrix conservation_basis(const ReactionNetwork& net) {
  return left_nullspace(stoichiometric_matrix(net), net.reactions.size());
}

std::vector<double> conservation_totals(const RationalMatrix& basis, const SimState& state) {
  std::vector<double> means(state.species(), 0.0);
  for (std::size_t i = 0; i < state.species(); ++i) {
    double s = 0.0;
    for (double v : state.fields[i]) s += v;
    means[i] = s / static_cast<double>(state.fields[i].size());
  }
  std::vector<double> totals;
  for (const auto& row : basis) {
    if (row.size() != means.size()) throw DimensionMismatch("conservation row length differs from species count");
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i].get_d() * means[i];
    totals.push_back(s);
  }
  return totals;
}

EquilibriumResult solve_equilibrium(const ReactionNetwork& net, const RationalMatrix& conserved,
                                    const std::vector<double>& totals, double tol) {
  const std::size_t m = net.species_count();
  if (conserved.size() != totals.size()) throw DimensionMismatch("one total per conservation row is required");
  for (double t : totals)
    if (!(t > 0)) throw PreconditionError("conservation totals must be strictly positive");
  for (const auto& row : conserved)
    if (row.size() != m) throw DimensionMismatch("conservation row length differs from species count");
  const auto rows = independent_rows(stoichiometric_matrix(net));
  if (rows.size() + conserved.size() != m)
    throw PreconditionError("independent equations plus conservation laws must equal the species count");

  const PolyVec f = compile_rhs(net);
  const PolyMatrix jac = jacobian(f);
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd C(static_cast<Eigen::Index>(conserved.size()), n);
  for (std::size_t k = 0; k < conserved.size(); ++k)
    for (std::size_t i = 0; i < m; ++i) C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = conserved[k][i].get_d();
  const Eigen::Map<const Eigen::VectorXd> T(totals.data(), static_cast<Eigen::Index>(totals.size()));

  auto system = [&](const Eigen::VectorXd& x, Eigen::MatrixXd* J) {
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = std::exp(x[static_cast<Eigen::Index>(i)]);
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), n);
    Eigen::VectorXd F(n);
    for (std::size_t r = 0; r < rows.size(); ++r) F[static_cast<Eigen::Index>(r)] = f[rows[r]].evaluate(u);
    F.tail(C.rows()) = C * uv - T;
    if (J) {
      J->resize(n, n);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t j = 0; j < m; ++j)
          (*J)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = jac[rows[r]][j].evaluate(u) * u[j];
      J->bottomRows(C.rows()) = C * uv.asDiagonal();
    }
    return F;
  };
  auto full_residual = [&](const Eigen::VectorXd& x) {
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = std::exp(x[static_cast<Eigen::Index>(i)]);
    double res = 0.0;
    for (double v : eval_rhs(f, u)) res = std::max(res, std::abs(v));
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), n);
    if (C.rows() > 0) res = std::max(res, (C * uv - T).cwiseAbs().maxCoeff());
    return res;
  };

  // Uniform start s * 1 with s the least-squares fit of C (s 1) = totals.
  double s = 1.0;
  if (C.rows() > 0) {
    const Eigen::VectorXd rs = C.rowwise().sum();
    const double den = rs.squaredNorm();
    if (den > 0 && rs.dot(T) > 0) s = rs.dot(T) / den;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, std::log(s));
  EquilibriumResult res;
  Eigen::MatrixXd J;
  Eigen::VectorXd F = system(x, &J);
  for (int it = 0; it < kMaxEquilibriumIterations; ++it) {
    res.iterations = it;
    if (full_residual(x) <= 1e-3 * tol) break;
    const Eigen::VectorXd step = J.fullPivLu().solve(-F);
    const double norm0 = F.norm();
    double damping = 1.0;
    bool improved = false;
    for (int k = 0; k < 60; ++k, damping *= 0.5) {
      const Eigen::VectorXd trial = x + damping * step;
      if (!trial.allFinite() || trial.cwiseAbs().maxCoeff() > 700.0) continue;
      Eigen::MatrixXd Jt;
      const Eigen::VectorXd Ft = system(trial, &Jt);
      if (Ft.allFinite() && Ft.norm() < norm0) {
        x = trial;
        F = Ft;
        J = Jt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  res.residual = full_residual(x);
  if (!(res.residual <= tol))
    throw ConvergenceError("equilibrium Newton did not reach residual " + std::to_string(tol) + " (got " +
                           std::to_string(res.residual) + ")");
  res.u_inf.resize(m);
  for (std::size_t i = 0; i < m; ++i) res.u_inf[i] = std::exp(x[static_cast<Eigen::Index>(i)]);
  res.conserved_values = totals;
  return res;
}

DecayFit fit_decay_series(const std::vector<double>& t, const std::vector<double>& y, double t_start, double p) {
  if (t.size() != y.size()) throw DimensionMismatch("decay fit: series lengths differ");
  std::vector<double> xs, ls;
  double previous = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_start) continue;
    if (!(y[k] >= kDecayUnderflow)) break;
    // A distance that stops decreasing has reached the rounding floor.
    if (!xs.empty() && y[k] >= previous) break;
    previous = y[k];
    xs.push_back(t[k]);
    ls.push_back(std::log(y[k]));
  }
  if (xs.size() < kMinDecaySamples)
    throw PreconditionError("decay fit needs at least 10 samples above 1e-14 after t_start (have " +
                            std::to_string(xs.size()) + ")");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ls[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ls[k] - my);
    syy += (ls[k] - my) * (ls[k] - my);
  }
  if (sxx == 0.0) throw PreconditionError("decay fit needs distinct sample times");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ls[k] - (intercept + slope * xs[k]);
    ssr += e * e;
  }
  DecayFit fit;
  fit.lambda = -slope;
  fit.prefactor = std::exp(intercept);
  fit.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
  fit.p = p;
  fit.samples = xs.size();
  return fit;
}

DecayFit fit_decay(const SimTrace& trace, const std::vector<double>& u_inf, double p, double t_start) {
  if (trace.samples.empty()) throw PreconditionError("empty trace");
  if (!(p >= 1.0)) throw PreconditionError("p must be at least 1");
  const std::size_t m = trace.species.size();
  if (u_inf.size() != m) throw DimensionMismatch("equilibrium has wrong length");
  const bool stored = !trace.options.u_inf.empty() && same_vector(u_inf, trace.options.u_inf, m);
  std::vector<double> y;
  for (const auto& s : trace.samples) {
    if (stored && p == 1.0) {
      y.push_back(s.dist_l1);
    } else if (stored && p == trace.options.dist_p) {
      y.push_back(s.dist_lp);
    } else {
      if (s.fields.empty()) throw PreconditionError("trace keeps no fields for this distance");
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (double v : s.fields[i]) acc += std::pow(std::abs(v - u_inf[i]), p);
      y.push_back(std::pow(acc * trace.grid.cell_volume(), 1.0 / p));
    }
  }
  return fit_decay_series(sample_times(trace), y, t_start, p);
}

std::vector<double> entropy_series(const SimTrace& trace, const std::vector<double>& z) {
  const std::size_t m = trace.species.size();
  if (!z.empty() && z.size() != m) throw DimensionMismatch("entropy reference has wrong length");
  for (double v : z)
    if (!(v > 0)) throw PreconditionError("entropy reference must be positive");
  std::vector<double> out;
  const bool stored = same_vector(z, trace.options.z, m);
  for (const auto& s : trace.samples) {
    if (stored) {
      out.push_back(s.entropy);
      continue;
    }
    if (s.fields.empty()) throw PreconditionError("trace keeps no fields for this entropy reference");
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (double v : s.fields[i]) acc += entropy_density(v, z.empty() ? 1.0 : z[i]);
    out.push_back(acc * trace.grid.cell_volume());
  }
  return out;
}

std::vector<double> mass_series(const SimTrace& trace, const std::vector<double>& alpha) {
  if (alpha.size() != trace.species.size()) throw DimensionMismatch("alpha has wrong length");
  for (double a : alpha)
    if (!(a > 0)) throw PreconditionError("alpha must be positive");
  std::vector<double> out;
  for (const auto& s : trace.samples) {
    double acc = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) acc += alpha[i] * s.integral[i];
    out.push_back(acc);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace, const std::vector<std::string>& header) {
  for (const auto& line : header) out << "# " << line << "\n";
  out << "t,species,sup_norm,l1_mass,entropy,dist_l1_to_eq,dist_lp_to_eq\n";
  std::ostringstream row;
  row << std::setprecision(17);
  for (const auto& s : trace.samples) {
    for (std::size_t i = 0; i < trace.species.size(); ++i) {
      row.str("");
      row << s.t << "," << trace.species[i] << "," << s.sup[i] << "," << s.integral[i] << "," << s.entropy << ","
          << s.dist_l1 << "," << s.dist_lp << "\n";
      out << row.str();
    }
  }
}

}  // namespace rdnet
