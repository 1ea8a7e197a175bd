#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rdnet/error.hpp"
#include "rdnet/structural.hpp"

namespace rdnet {

HeatSolutionOperator::HeatSolutionOperator(const Grid& grid, double m_diff, double window, int time_steps)
    : grid_(grid),
      cells_(grid.size()),
      steps_(time_steps),
      dt_(window / time_steps),
      solver_(grid, m_diff * (window / time_steps)) {
  if (time_steps < 1) throw PreconditionError("time_steps must be positive");
  if (!(window > 0)) throw PreconditionError("window must be positive");
}

// phi^0 = 0, phi^k = R (phi^{k-1} + dt theta^k) with R = (I - dt m L)^{-1}.
void HeatSolutionOperator::solve(std::span<const double> theta, std::span<double> phi) const {
  if (theta.size() != size() || phi.size() != size()) throw DimensionMismatch("heat operator: size mismatch");
  std::vector<double> cur(cells_, 0.0);
  for (int k = 0; k < steps_; ++k) {
    const std::size_t off = static_cast<std::size_t>(k) * cells_;
    for (std::size_t c = 0; c < cells_; ++c) cur[c] += dt_ * theta[off + c];
    solver_.solve(cur, cur);
    std::copy(cur.begin(), cur.end(), phi.begin() + static_cast<std::ptrdiff_t>(off));
  }
}

void HeatSolutionOperator::apply(std::span<const double> theta, std::span<double> out) const {
  std::vector<double> phi(size());
  solve(theta, phi);
  for (int k = 0; k < steps_; ++k) {
    const std::size_t off = static_cast<std::size_t>(k) * cells_;
    apply_laplacian(grid_, std::span<const double>(phi).subspan(off, cells_), out.subspan(off, cells_));
  }
}

// T = L S, so T^T = S^T L. S^T runs the recursion backwards in time:
// w^K = R y^K, w^k = R (y^k + w^{k+1}), out^k = dt w^k.
void HeatSolutionOperator::apply_adjoint(std::span<const double> y, std::span<double> out) const {
  if (y.size() != size() || out.size() != size()) throw DimensionMismatch("heat operator: size mismatch");
  std::vector<double> lap(cells_), cur(cells_, 0.0);
  for (int k = steps_ - 1; k >= 0; --k) {
    const std::size_t off = static_cast<std::size_t>(k) * cells_;
    apply_laplacian(grid_, y.subspan(off, cells_), lap);
    for (std::size_t c = 0; c < cells_; ++c) cur[c] += lap[c];
    solver_.solve(cur, cur);
    for (std::size_t c = 0; c < cells_; ++c) out[off + c] = dt_ * cur[c];
  }
}

namespace {

double lp_norm(const std::vector<double>& v, double p) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Largest eigenvalue of T^T T by restarted Lanczos with full
// reorthogonalisation (second pass on cancellation), a Krylov form of power iteration. Restarts from the
// current Ritz vector every kMaxBasis products. Ritz values never exceed the
// true eigenvalue. Every kCheck steps the Ritz pair is tested: converged when
// its residual |beta_k s_k| is at most rel_tol * theta, or the Krylov space is
// exhausted.
double largest_eigenvalue(const HeatSolutionOperator& op, std::vector<double> start, int max_products,
                          double rel_tol, int& products) {
  constexpr Eigen::Index kMaxBasis = 600;
  constexpr Eigen::Index kCheck = 100;
  const auto n = static_cast<Eigen::Index>(op.size());
  const Eigen::Index basis_cap = std::min(kMaxBasis, n);
  Eigen::MatrixXd V(n, basis_cap);
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(start.data(), n), w(n), tv(n);
  std::vector<double> alpha, beta;
  products = 0;
  for (;;) {
    const double ns = v.norm();
    if (ns == 0.0) return 0.0;
    V.col(0) = v / ns;
    alpha.clear();
    beta.clear();
    Eigen::VectorXd ritz;
    Eigen::Index used = 0;
    for (Eigen::Index j = 0; j < basis_cap; ++j) {
      if (products >= max_products)
        throw ConvergenceError("power iteration did not converge within " + std::to_string(max_products) +
                               " iterations");
      op.apply({V.col(j).data(), static_cast<std::size_t>(n)}, {tv.data(), static_cast<std::size_t>(n)});
      op.apply_adjoint({tv.data(), static_cast<std::size_t>(n)}, {w.data(), static_cast<std::size_t>(n)});
      ++products;
      used = j + 1;
      alpha.push_back(V.col(j).dot(w));
      const auto Q = V.leftCols(used);
      // second pass only when the first removed most of w
      const double before = w.norm();
      w.noalias() -= Q * (Q.transpose() * w);
      double b = w.norm();
      if (b < 0.7 * before) {
        w.noalias() -= Q * (Q.transpose() * w);
        b = w.norm();
      }
      const bool last = used == basis_cap;
      if (used % kCheck == 0 || last || b == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(Eigen::Map<const Eigen::VectorXd>(alpha.data(), used),
                                  Eigen::Map<const Eigen::VectorXd>(beta.data(), used - 1));
        const double theta = es.eigenvalues()(used - 1);
        ritz = es.eigenvectors().col(used - 1);
        if (b * std::abs(ritz(used - 1)) <= rel_tol * theta || b <= 1e-300 * theta || used == n) return theta;
      }
      if (last) break;
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
    v = V.leftCols(used) * ritz;
  }
}

}  // namespace

MaxRegEstimate estimate_maxreg_constant(double m_diff, double p_prime, const Grid& grid, int steps,
                                        const MaxRegOptions& options) {
  if (!(m_diff > 0)) throw PreconditionError("m_diff must be positive");
  if (!(p_prime > 1.0 && p_prime <= 2.0)) throw PreconditionError("p' must lie in (1, 2]");
  if (steps < 1) throw PreconditionError("iteration cap must be positive");
  grid.validate();
  const HeatSolutionOperator op(grid, m_diff, options.window, options.time_steps);
  const std::size_t n = op.size();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  MaxRegEstimate est;

  if (p_prime == 2.0) {
    est.analytic_bound = 1.0 / m_diff;
    std::vector<double> v(n);
    for (auto& x : v) x = unit(rng) - 0.5;
    const double lambda = largest_eigenvalue(op, std::move(v), steps, options.rel_tol, est.iterations);
    est.value = std::sqrt(std::max(lambda, 0.0));
    return est;
  }

  if (options.dictionary_size < 1) throw PreconditionError("empty theta dictionary");
  // Dictionary: dense, sparse and single-spike nonnegative fields in rotation.
  std::vector<double> theta(n), out(n);
  const double q = p_prime;
  for (int d = 0; d < options.dictionary_size; ++d) {
    switch (d % 3) {
      case 0:
        for (auto& x : theta) x = unit(rng);
        break;
      case 1:
        for (auto& x : theta) x = unit(rng) < 0.125 ? unit(rng) : 0.0;
        break;
      default:
        std::fill(theta.begin(), theta.end(), 0.0);
        theta[static_cast<std::size_t>(unit(rng) * static_cast<double>(n)) % n] = 1.0;
    }
    const double denom = lp_norm(theta, q);
    if (denom == 0.0) continue;  // ratio undefined for theta = 0
    op.apply(theta, out);
    est.value = std::max(est.value, lp_norm(out, q) / denom);
    ++est.iterations;
  }
  if (est.iterations == 0) throw PreconditionError("theta dictionary contains only zero fields");
  return est;
}

}  // namespace rdnet
