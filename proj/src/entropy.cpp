#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rdnet/error.hpp"
#include "rdnet/structural.hpp"

namespace rdnet {

namespace {

struct Flux {
  std::size_t source;
  std::size_t target;
  double rate;
};

struct ComplexGraph {
  std::vector<std::vector<int>> complexes;
  std::vector<Flux> fluxes;
};

ComplexGraph build_complex_graph(const ReactionNetwork& net) {
  ComplexGraph g;
  std::map<std::vector<int>, std::size_t> index;
  auto id = [&](const std::vector<int>& c) {
    auto [it, inserted] = index.try_emplace(c, g.complexes.size());
    if (inserted) g.complexes.push_back(c);
    return it->second;
  };
  for (const auto& rx : net.reactions) {
    const std::size_t a = id(rx.reactant), b = id(rx.product);
    g.fluxes.push_back({a, b, rx.rate_forward.get_d()});
    if (rx.reversible()) g.fluxes.push_back({b, a, rx.rate_backward.get_d()});
  }
  return g;
}

/// Complex-balance defects g_c(x) at z = exp(x) and, optionally, dg/dx.
Eigen::VectorXd defects(const ComplexGraph& g, const Eigen::VectorXd& x, Eigen::MatrixXd* jac) {
  const auto nc = static_cast<Eigen::Index>(g.complexes.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nc);
  if (jac) *jac = Eigen::MatrixXd::Zero(nc, x.size());
  for (const auto& fl : g.fluxes) {
    const auto& src = g.complexes[fl.source];
    double expo = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) expo += src[j] * x[j];
    const double phi = fl.rate * std::exp(expo);
    out[static_cast<Eigen::Index>(fl.source)] += phi;
    out[static_cast<Eigen::Index>(fl.target)] -= phi;
    if (jac) {
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (src[j] == 0) continue;
        (*jac)(static_cast<Eigen::Index>(fl.source), j) += src[j] * phi;
        (*jac)(static_cast<Eigen::Index>(fl.target), j) -= src[j] * phi;
      }
    }
  }
  return out;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Radical-inverse Halton sequence in the first m prime bases.
class Halton {
 public:
  explicit Halton(std::size_t dims) {
    for (int candidate = 2; primes_.size() < dims; ++candidate) {
      bool prime = true;
      for (int p : primes_)
        if (candidate % p == 0) prime = false;
      if (prime) primes_.push_back(candidate);
    }
  }
  double coordinate(std::size_t index, std::size_t dim) const {
    double f = 1.0, r = 0.0;
    const int b = primes_[dim];
    for (std::size_t i = index; i > 0; i /= static_cast<std::size_t>(b)) {
      f /= b;
      r += f * static_cast<double>(i % static_cast<std::size_t>(b));
    }
    return r;
  }

 private:
  std::vector<int> primes_;
};

PolyVec absolute_coefficients(const PolyVec& f) {
  PolyVec a = PolyVec::zero(f.species);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (const auto& [m, c] : f.components[i].terms()) a.components[i].add_term(m, abs(c));
  return a;
}

struct SampleOutcome {
  int checked = 0;
  double max_normalised = 0.0;
  std::optional<std::vector<double>> violation;
};

SampleOutcome sample_entropy(const ReactionNetwork& net, const std::vector<double>& z, const EntropyOptions& options) {
  const std::size_t m = net.species_count();
  const PolyVec rhs = compile_rhs(net);
  const CompiledPolyVec f(rhs);
  const CompiledPolyVec fabs(absolute_coefficients(rhs));
  const Halton halton(m);
  const double lo = std::log(options.sample_low), hi = std::log(options.sample_high);
  std::vector<double> u(m), fu(m), fa(m), scratch_f(f.monomial_count()), scratch_a(fabs.monomial_count());
  SampleOutcome out;
  out.max_normalised = options.samples > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
  for (int s = 0; s < options.samples; ++s) {
    for (std::size_t i = 0; i < m; ++i)
      u[i] = std::exp(lo + (hi - lo) * halton.coordinate(static_cast<std::size_t>(s) + 1, i));
    f.evaluate(u.data(), fu.data(), scratch_f.data());
    fabs.evaluate(u.data(), fa.data(), scratch_a.data());
    double sum = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = std::log(u[i] / z[i]);
      sum += w * fu[i];
      scale += std::abs(w) * fa[i];
    }
    out.max_normalised = std::max(out.max_normalised, sum / scale);
    ++out.checked;
    if (sum > options.tol * scale) {
      out.violation = u;
      break;
    }
  }
  return out;
}

}  // namespace

double complex_balance_defect(const ReactionNetwork& net, const std::vector<double>& z) {
  if (z.size() != net.species_count()) throw DimensionMismatch("z length differs from species count");
  Eigen::VectorXd x(static_cast<Eigen::Index>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0)) throw PreconditionError("z must be positive");
    x[static_cast<Eigen::Index>(i)] = std::log(z[i]);
  }
  return max_abs(defects(build_complex_graph(net), x, nullptr));
}

bool verify_entropy_dissipation(const ReactionNetwork& net, const std::vector<double>& z, const EntropyOptions& options,
                                std::optional<std::vector<double>>* witness) {
  if (z.size() != net.species_count()) throw DimensionMismatch("z length differs from species count");
  for (double v : z)
    if (!(v > 0)) throw PreconditionError("z must be positive");
  SampleOutcome out = sample_entropy(net, z, options);
  if (witness) *witness = out.violation;
  return !out.violation;
}

EntropyCert check_entropy_dissipation(const ReactionNetwork& net, const EntropyOptions& options) {
  if (!(options.tol > 0)) throw PreconditionError("entropy tolerance must be positive");
  const std::size_t m = net.species_count();
  const ComplexGraph g = build_complex_graph(net);
  EntropyCert cert;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd jac;
  Eigen::VectorXd res = defects(g, x, &jac);
  for (int it = 0; it < options.max_newton_iterations && max_abs(res) > options.tol; ++it) {
    Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-res);
    const double norm0 = res.norm();
    double damping = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, damping *= 0.5) {
      Eigen::VectorXd trial = x + damping * step;
      if (trial.cwiseAbs().maxCoeff() > 60.0) continue;
      Eigen::MatrixXd trial_jac;
      Eigen::VectorXd trial_res = defects(g, trial, &trial_jac);
      if (trial_res.norm() < norm0) {
        x = trial;
        res = trial_res;
        jac = trial_jac;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  cert.residual = max_abs(res);
  cert.converged = cert.residual <= options.tol;
  cert.z.resize(m);
  for (std::size_t i = 0; i < m; ++i) cert.z[i] = std::exp(x[static_cast<Eigen::Index>(i)]);
  cert.shifted = std::any_of(cert.z.begin(), cert.z.end(), [&](double v) { return std::abs(v - 1.0) > options.tol; });
  if (!cert.converged) return cert;

  SampleOutcome out = sample_entropy(net, cert.z, options);
  cert.samples_checked = out.checked;
  cert.max_sampled = out.max_normalised;
  cert.violation = out.violation;
  cert.dissipative = !out.violation;
  return cert;
}

}  // namespace rdnet
