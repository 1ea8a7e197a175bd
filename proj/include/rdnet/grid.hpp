#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace rdnet {

/// Uniform cell-centred grid on an interval (dim 1) or rectangle (dim 2).
/// Cell (i, j) is stored at index j * cells[0] + i.
struct Grid {
  int dim = 1;
  std::array<double, 2> lengths{1.0, 1.0};
  std::array<int, 2> cells{16, 1};

  static Grid line(double length, int cells);
  static Grid rectangle(double lx, double ly, int nx, int ny);

  /// Throws PreconditionError unless dim is 1 or 2, lengths are positive,
  /// every active axis has at least 3 cells and the total is at most 2^24.
  void validate() const;

  double spacing(int axis) const { return lengths[axis] / cells[axis]; }
  double center(int axis, int index) const { return (index + 0.5) * spacing(axis); }
  std::size_t size() const;
  double cell_volume() const;
  double measure() const;
  bool operator==(const Grid&) const = default;
};

inline constexpr std::size_t kMaxGridCells = std::size_t{1} << 24;

/// Second-order Laplacian with mirror ghost cells (homogeneous Neumann).
/// Rows sum to zero, so the discrete integral of out is zero.
void apply_laplacian(const Grid& grid, std::span<const double> in, std::span<double> out);

/// Solver for (I - a * Laplacian) x = b with a > 0. Dimension 1 uses the
/// Thomas algorithm; dimension 2 a sparse Cholesky factorization computed once
/// at construction. The matrix is a symmetric M-matrix with unit row sums,
/// hence the inverse maps nonnegative data to nonnegative data and preserves
/// the discrete integral.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(const Grid& grid, double a);
  ~ImplicitDiffusion();
  ImplicitDiffusion(ImplicitDiffusion&&) noexcept;
  ImplicitDiffusion& operator=(ImplicitDiffusion&&) noexcept;

  double coefficient() const { return a_; }
  /// rhs and out may alias.
  void solve(std::span<const double> rhs, std::span<double> out) const;
  /// ||(I - a L) x - b||_2 / ||b||_2.
  double relative_residual(std::span<const double> x, std::span<const double> rhs) const;

 private:
  struct Impl;
  Grid grid_;
  double a_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rdnet
