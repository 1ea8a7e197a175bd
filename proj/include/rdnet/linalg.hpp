#pragma once

#include <cstddef>
#include <vector>

#include "rdnet/rational.hpp"

namespace rdnet {

using RationalMatrix = std::vector<std::vector<Rational>>;

RationalMatrix transpose(const RationalMatrix& a, std::size_t cols_if_empty = 0);

/// Basis of {x : a x = 0}, one vector per free column of the reduced row
/// echelon form, scaled to coprime integers with a positive leading entry.
/// `cols` is needed when `a` has no rows.
RationalMatrix nullspace(const RationalMatrix& a, std::size_t cols);

/// Basis of {y : y^T a = 0}.
RationalMatrix left_nullspace(const RationalMatrix& a, std::size_t cols);

std::size_t rank(const RationalMatrix& a);

/// Indices of a maximal linearly independent subset of rows, chosen greedily
/// in increasing index order.
std::vector<std::size_t> independent_rows(const RationalMatrix& a);

}  // namespace rdnet
