#pragma once

#include <cstddef>
#include <vector>

#include "rdnet/rational.hpp"

namespace rdnet {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearConstraint {
  std::vector<Rational> coeffs;
  Relation relation = Relation::LessEqual;
  Rational rhs;
};

/// minimize objective . x  subject to constraints and x >= lower_bounds.
/// An empty objective turns the problem into a pure feasibility query.
struct LinearProgram {
  std::size_t variables = 0;
  std::vector<Rational> lower_bounds;
  std::vector<LinearConstraint> constraints;
  std::vector<Rational> objective;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Rational> x;
  Rational objective;
};

inline constexpr std::size_t kMaxLpConstraints = 100000;

/// Dense two-phase simplex over exact rationals. Bland's rule for both the
/// entering and the leaving variable, so the method cannot cycle.
/// Throws ResourceError when the program has more than kMaxLpConstraints rows.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace rdnet
