#include "rdnet/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "rdnet/rational.hpp"

namespace rdnet {

const char* version() { return RDNET_VERSION; }

namespace {

using nlohmann::json;

json rationals(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_fraction_string(q));
  return a;
}

json matrix(const RationalMatrix& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(rationals(row));
  return a;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

json fit_json(const std::optional<DecayFit>& f) {
  if (!f) return nullptr;
  return {{"p", f->p}, {"lambda", f->lambda}, {"prefactor", f->prefactor}, {"r_squared", f->r_squared},
          {"samples", f->samples}};
}

std::string monomial_text(const Monomial& mono, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < mono.species(); ++i) {
    if (mono.exponent(i) == 0) continue;
    if (!s.empty()) s += "*";
    s += names[i];
    if (mono.exponent(i) > 1) s += "^" + std::to_string(mono.exponent(i));
  }
  return s.empty() ? "1" : s;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::vector<std::string> fmt_all(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(fmt(x));
  return out;
}

std::vector<std::string> fractions(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  for (const auto& q : v) out.push_back(to_compact_string(q));
  return out;
}

}  // namespace

SimulationSummary summarize_simulation(const SimTrace& trace, const std::optional<std::vector<double>>& alpha,
                                       const std::optional<EquilibriumResult>& eq, double t_start) {
  SimulationSummary s;
  const std::size_t m = trace.species.size();
  s.samples = trace.samples.size();
  s.steps = trace.steps;
  s.dt = trace.dt;
  s.valid = trace.valid;
  s.clip_events = trace.positivity.count;
  s.clipped_mass = trace.positivity.clipped_mass;
  s.initial_mass = trace.initial_mass;
  s.equilibrium = eq;
  if (trace.samples.empty()) return s;
  s.horizon = trace.samples.back().t - trace.samples.front().t;

  if (alpha) {
    s.alpha = alpha;
    const auto mass = mass_series(trace, *alpha);
    for (double v : mass) s.mass_drift = std::max(s.mass_drift, std::abs(v - mass.front()) / std::abs(mass.front()));
  }
  s.z = trace.options.z.empty() ? std::vector<double>(m, 1.0) : trace.options.z;
  const auto ent = entropy_series(trace, trace.options.z);
  // Below this level the entropy is rounding noise around the equilibrium.
  const double entropy_floor = 1e-20 * std::max(1.0, trace.initial_mass);
  for (std::size_t k = 1; k < ent.size(); ++k)
    if (ent[k - 1] > entropy_floor)
      s.entropy_max_uptick = std::max(s.entropy_max_uptick, (ent[k] - ent[k - 1]) / ent[k - 1]);

  const auto times = sample_times(trace);
  for (std::size_t i = 0; i < m; ++i) {
    s.final_sup.push_back(trace.samples.back().sup[i]);
    std::vector<double> sup;
    for (const auto& smp : trace.samples) sup.push_back(smp.sup[i]);
    s.plateau.push_back(check_plateau(times, sup));
    try {
      s.cylinder_l2.push_back(cylinder_norm_series(trace, i, 2.0, 1.0));
    } catch (const Error& e) {
      s.cylinder_l2.emplace_back();
    }
  }

  if (eq) {
    try {
      s.decay_l1 = fit_decay(trace, eq->u_inf, 1.0, t_start);
    } catch (const Error& e) {
      s.notes.push_back(std::string("L1 decay fit skipped: ") + e.what());
    }
    if (trace.options.dist_p != 1.0) {
      try {
        s.decay_lp = fit_decay(trace, eq->u_inf, trace.options.dist_p, t_start);
      } catch (const Error& e) {
        s.notes.push_back(std::string("Lp decay fit skipped: ") + e.what());
      }
    }
  }
  if (!s.valid) s.notes.push_back("clipped mass exceeds 1e-6 of the initial mass; run flagged invalid");
  return s;
}

nlohmann::json to_json(const StructuralReport& rep, const ReactionNetwork& net) {
  json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", "rdnet"}, {"version", version()}};
  j["network"] = {{"species", net.species}, {"reactions", net.reactions.size()}, {"diffusion", rationals(net.diffusion)}};
  json qp = {{"holds", rep.quasipositive}, {"witness", nullptr}};
  if (rep.quasipositivity_witness) {
    const auto& [comp, mono] = *rep.quasipositivity_witness;
    qp["witness"] = {{"component", net.species[comp]}, {"monomial", monomial_text(mono, net.species)}};
  }
  j["quasipositivity"] = qp;
  j["mass_control"] = {{"class", to_string(rep.mass.cls)}, {"alpha", rationals(rep.mass.alpha)},
                       {"K", rep.mass.cls == MassClass::None ? json(nullptr) : json(to_fraction_string(rep.mass.K))}};
  if (rep.entropy) {
    const auto& e = *rep.entropy;
    j["entropy"] = {{"converged", e.converged},   {"z", doubles(e.z)},
                    {"residual", e.residual},     {"shifted", e.shifted},
                    {"dissipative", e.dissipative}, {"samples_checked", e.samples_checked},
                    {"max_sampled", number_or_null(e.max_sampled)},
                    {"violation", e.violation ? doubles(*e.violation) : json(nullptr)}};
  } else {
    j["entropy"] = nullptr;
  }
  auto cert_json = [&](const IntermediateSumCert& c) {
    std::vector<std::string> order;
    for (auto i : c.ordering) order.push_back(net.species[i]);
    return json{{"r", c.r}, {"ordering", order}, {"matrix", matrix(c.A)}};
  };
  j["intermediate_sum"] = rep.intermediate ? cert_json(*rep.intermediate) : json(nullptr);
  if (rep.hint) {
    json h = cert_json(rep.hint->cert);
    h["valid"] = rep.hint->valid;
    j["hint"] = h;
  } else {
    j["hint"] = nullptr;
  }
  j["growth"] = rep.growth;
  if (rep.quasi_uniform)
    j["quasi_uniform"] = {{"verdict", to_string(rep.quasi_uniform->verdict)},
                          {"margin", number_or_null(rep.quasi_uniform->margin)},
                          {"route", rep.quasi_uniform->route}};
  else
    j["quasi_uniform"] = nullptr;
  j["n"] = rep.n;
  j["lyapunov"] = rep.lyapunov;
  j["uniform_in_time"] = rep.uniform_in_time;
  j["two_dimensional_route"] = rep.two_dimensional_route;
  j["quasi_uniform_route"] = rep.quasi_uniform_route;
  j["verified"] = rep.verified;
  j["verdict"] = rep.verdict;
  return j;
}

nlohmann::json to_json(const SimulationSummary& s) {
  json j;
  j["horizon"] = s.horizon;
  j["dt"] = s.dt;
  j["steps"] = s.steps;
  j["samples"] = s.samples;
  j["valid"] = s.valid;
  j["positivity"] = {{"clip_events", s.clip_events}, {"clipped_mass", s.clipped_mass}, {"initial_mass", s.initial_mass}};
  j["conservation"] = s.alpha ? json{{"alpha", doubles(*s.alpha)}, {"relative_drift", s.mass_drift}} : json(nullptr);
  j["entropy"] = {{"z", doubles(s.z)}, {"max_relative_uptick", s.entropy_max_uptick}};
  j["final_sup"] = doubles(s.final_sup);
  json plateau = json::array();
  for (const auto& p : s.plateau)
    plateau.push_back({{"early_max", p.early_max}, {"late_max", p.late_max}, {"plateau", p.plateau}});
  j["sup_plateau"] = plateau;
  json cyl = json::array();
  for (const auto& series : s.cylinder_l2) {
    json entry = {{"values", doubles(series)}};
    if (!series.empty()) {
      const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
      entry["max_over_min"] = number_or_null(*hi / *lo);
    }
    cyl.push_back(entry);
  }
  j["cylinder_l2"] = cyl;
  if (s.equilibrium)
    j["equilibrium"] = {{"u_inf", doubles(s.equilibrium->u_inf)},
                        {"residual", s.equilibrium->residual},
                        {"conserved_values", doubles(s.equilibrium->conserved_values)}};
  else
    j["equilibrium"] = nullptr;
  j["decay_l1"] = fit_json(s.decay_l1);
  j["decay_lp"] = fit_json(s.decay_lp);
  j["notes"] = s.notes;
  return j;
}

std::string to_text(const StructuralReport& rep, const ReactionNetwork& net) {
  std::ostringstream os;
  os << "species: " << join(net.species, ", ") << "\n";
  os << "quasipositivity: " << (rep.quasipositive ? "holds" : "fails");
  if (rep.quasipositivity_witness)
    os << " (f_" << net.species[rep.quasipositivity_witness->first] << " has negative term "
       << monomial_text(rep.quasipositivity_witness->second, net.species) << ")";
  os << "\n";
  os << "mass control: " << to_string(rep.mass.cls);
  if (rep.mass.cls != MassClass::None)
    os << ", alpha = (" << join(fractions(rep.mass.alpha), ", ") << "), K = " << to_compact_string(rep.mass.K);
  os << "\n";
  if (rep.entropy) {
    const auto& e = *rep.entropy;
    os << "entropy: ";
    if (!e.converged)
      os << "no complex-balanced equilibrium found (defect " << fmt(e.residual) << ")";
    else
      os << (e.dissipative ? "dissipative" : "violated") << ", z = (" << join(fmt_all(e.z), ", ")
         << "), defect " << fmt(e.residual) << ", " << e.samples_checked << " samples";
    os << "\n";
  }
  if (rep.intermediate) {
    const auto& c = *rep.intermediate;
    std::vector<std::string> order;
    for (auto i : c.ordering) order.push_back(net.species[i]);
    os << "intermediate sums: r = " << c.r << ", ordering (" << join(order, ", ") << ")\n";
    for (const auto& row : c.A) os << "  [" << join(fractions(row), " ") << "]\n";
  } else {
    os << "intermediate sums: none found\n";
  }
  if (rep.hint)
    os << "hint matrix (r = " << rep.hint->cert.r << "): " << (rep.hint->valid ? "valid" : "rejected") << "\n";
  os << "growth degree: " << rep.growth << "\n";
  if (rep.quasi_uniform)
    os << "quasi-uniform (n = " << rep.n << "): " << to_string(rep.quasi_uniform->verdict) << ", margin "
       << fmt(rep.quasi_uniform->margin) << " (" << rep.quasi_uniform->route << ")\n";
  os << "verdict: " << rep.verdict << "\n";
  return os.str();
}

std::string to_text(const SimulationSummary& s) {
  std::ostringstream os;
  os << "horizon " << fmt(s.horizon) << ", dt " << fmt(s.dt) << ", " << s.steps << " steps, " << s.samples
     << " samples\n";
  os << "positivity: " << s.clip_events << " clip events, clipped mass " << fmt(s.clipped_mass)
     << (s.valid ? "" : " (run invalid)") << "\n";
  if (s.alpha) os << "conservation: relative drift " << fmt(s.mass_drift) << "\n";
  os << "entropy: largest relative uptick " << fmt(s.entropy_max_uptick) << "\n";
  os << "final sup norms: " << join(fmt_all(s.final_sup), ", ") << "\n";
  for (std::size_t i = 0; i < s.plateau.size(); ++i)
    os << "sup plateau [" << i << "]: early " << fmt(s.plateau[i].early_max) << ", late " << fmt(s.plateau[i].late_max)
       << (s.plateau[i].plateau ? " (plateau)" : " (growing)") << "\n";
  if (s.equilibrium) os << "equilibrium: (" << join(fmt_all(s.equilibrium->u_inf), ", ") << ")\n";
  if (s.decay_l1)
    os << "L1 decay: lambda " << fmt(s.decay_l1->lambda) << ", r^2 " << fmt(s.decay_l1->r_squared) << "\n";
  if (s.decay_lp)
    os << "L" << fmt(s.decay_lp->p) << " decay: lambda " << fmt(s.decay_lp->lambda) << ", r^2 "
       << fmt(s.decay_lp->r_squared) << "\n";
  for (const auto& n : s.notes) os << "note: " << n << "\n";
  return os.str();
}

}  // namespace rdnet
