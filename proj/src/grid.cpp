#include "rdnet/grid.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <string>

#include "rdnet/error.hpp"

namespace rdnet {

Grid Grid::line(double length, int cells) { return Grid{1, {length, 1.0}, {cells, 1}}; }

Grid Grid::rectangle(double lx, double ly, int nx, int ny) { return Grid{2, {lx, ly}, {nx, ny}}; }

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw PreconditionError("grid dimension must be 1 or 2");
  for (int axis = 0; axis < dim; ++axis) {
    if (!(lengths[axis] > 0) || !std::isfinite(lengths[axis]))
      throw PreconditionError("grid lengths must be positive and finite");
    if (cells[axis] < 3) throw PreconditionError("grid needs at least 3 cells per axis");
  }
  if (static_cast<double>(cells[0]) * (dim == 2 ? cells[1] : 1) > static_cast<double>(kMaxGridCells))
    throw PreconditionError("grid exceeds " + std::to_string(kMaxGridCells) + " cells");
}

std::size_t Grid::size() const {
  return static_cast<std::size_t>(cells[0]) * static_cast<std::size_t>(dim == 2 ? cells[1] : 1);
}

double Grid::cell_volume() const { return dim == 2 ? spacing(0) * spacing(1) : spacing(0); }

double Grid::measure() const { return dim == 2 ? lengths[0] * lengths[1] : lengths[0]; }

void apply_laplacian(const Grid& grid, std::span<const double> in, std::span<double> out) {
  const std::size_t n = grid.size();
  if (in.size() != n || out.size() != n) throw DimensionMismatch("laplacian: field size differs from grid");
  const int nx = grid.cells[0];
  const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  if (grid.dim == 1) {
    for (int i = 0; i < nx; ++i) {
      const double left = in[i > 0 ? i - 1 : i];
      const double right = in[i + 1 < nx ? i + 1 : i];
      out[i] = (left - 2.0 * in[i] + right) * ix2;
    }
    return;
  }
  const int ny = grid.cells[1];
  const double iy2 = 1.0 / (grid.spacing(1) * grid.spacing(1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx + i;
      const double xm = in[i > 0 ? c - 1 : c];
      const double xp = in[i + 1 < nx ? c + 1 : c];
      const double ym = in[j > 0 ? c - nx : c];
      const double yp = in[j + 1 < ny ? c + nx : c];
      out[c] = (xm - 2.0 * in[c] + xp) * ix2 + (ym - 2.0 * in[c] + yp) * iy2;
    }
  }
}

struct ImplicitDiffusion::Impl {
  // dimension 1: Thomas factors
  std::vector<double> sub, diag_inv, sup_mod;
  // dimension 2
  Eigen::SparseMatrix<double> matrix;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

ImplicitDiffusion::ImplicitDiffusion(const Grid& grid, double a) : grid_(grid), a_(a), impl_(std::make_unique<Impl>()) {
  grid.validate();
  if (!(a > 0)) throw PreconditionError("implicit diffusion coefficient must be positive");
  const int nx = grid.cells[0];
  if (grid.dim == 1) {
    const double off = -a / (grid.spacing(0) * grid.spacing(0));
    auto& s = *impl_;
    s.sub.assign(nx, off);
    s.diag_inv.resize(nx);
    s.sup_mod.resize(nx);
    // Forward elimination of the tridiagonal matrix with constant off-diagonals.
    double prev_sup = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double neighbours = (i > 0 ? 1 : 0) + (i + 1 < nx ? 1 : 0);
      double d = 1.0 - neighbours * off;
      if (i > 0) d -= off * prev_sup;
      s.diag_inv[i] = 1.0 / d;
      prev_sup = (i + 1 < nx ? off : 0.0) * s.diag_inv[i];
      s.sup_mod[i] = prev_sup;
    }
    return;
  }
  const int ny = grid.cells[1];
  const double ax = a / (grid.spacing(0) * grid.spacing(0));
  const double ay = a / (grid.spacing(1) * grid.spacing(1));
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * 5);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Eigen::Index c = static_cast<Eigen::Index>(j) * nx + i;
      double d = 1.0;
      auto link = [&](Eigen::Index other, double w) {
        trips.emplace_back(c, other, -w);
        d += w;
      };
      if (i > 0) link(c - 1, ax);
      if (i + 1 < nx) link(c + 1, ax);
      if (j > 0) link(c - nx, ay);
      if (j + 1 < ny) link(c + nx, ay);
      trips.emplace_back(c, c, d);
    }
  }
  impl_->matrix.resize(n, n);
  impl_->matrix.setFromTriplets(trips.begin(), trips.end());
  impl_->ldlt.compute(impl_->matrix);
  if (impl_->ldlt.info() != Eigen::Success) throw ConvergenceError("sparse factorization of diffusion matrix failed");
}

ImplicitDiffusion::~ImplicitDiffusion() = default;
ImplicitDiffusion::ImplicitDiffusion(ImplicitDiffusion&&) noexcept = default;
ImplicitDiffusion& ImplicitDiffusion::operator=(ImplicitDiffusion&&) noexcept = default;

void ImplicitDiffusion::solve(std::span<const double> rhs, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (rhs.size() != n || out.size() != n) throw DimensionMismatch("diffusion solve: field size differs from grid");
  if (grid_.dim == 1) {
    const auto& s = *impl_;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      prev = (rhs[i] - (i > 0 ? s.sub[i] * prev : 0.0)) * s.diag_inv[i];
      out[i] = prev;
    }
    for (std::size_t i = n - 1; i-- > 0;) out[i] -= s.sup_mod[i] * out[i + 1];
    return;
  }
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  if (impl_->ldlt.info() != Eigen::Success) throw ConvergenceError("sparse diffusion solve failed");
  Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(n)) = x;
}

double ImplicitDiffusion::relative_residual(std::span<const double> x, std::span<const double> rhs) const {
  std::vector<double> lap(x.size());
  apply_laplacian(grid_, x, lap);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] - a_ * lap[i] - rhs[i];
    num += r * r;
    den += rhs[i] * rhs[i];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace rdnet
