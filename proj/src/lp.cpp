#include "rdnet/lp.hpp"

#include <limits>
#include <optional>

#include "rdnet/error.hpp"

namespace rdnet {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : cols_(cols), a_(rows, std::vector<Rational>(cols + 1)), basis_(rows), cost_(cols + 1) {}

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return cols_; }
  Rational& at(std::size_t i, std::size_t j) { return a_[i][j]; }
  Rational& rhs(std::size_t i) { return a_[i][cols_]; }
  std::vector<std::size_t>& basis() { return basis_; }

  /// Installs c as the objective and prices out the current basis.
  void set_objective(const std::vector<Rational>& c) {
    for (std::size_t j = 0; j <= cols_; ++j) cost_[j] = j < cols_ ? c[j] : Rational(0);
    for (std::size_t i = 0; i < rows(); ++i) {
      const Rational cb = c[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= cb * a_[i][j];
    }
  }

  Rational objective_value() const { return -cost_[cols_]; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational inv = 1 / a_[r][c];
    for (auto& v : a_[r]) v *= inv;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == r || a_[i][c] == 0) continue;
      const Rational factor = a_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (a_[r][j] != 0) a_[i][j] -= factor * a_[r][j];
    }
    if (cost_[c] != 0) {
      const Rational factor = cost_[c];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (a_[r][j] != 0) cost_[j] -= factor * a_[r][j];
    }
    basis_[r] = c;
  }

  /// Returns false when the objective is unbounded below.
  bool optimize(const std::vector<bool>& allowed) {
    while (true) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && cost_[j] < 0) {
          entering = j;
          break;
        }
      }
      if (!entering) return true;
      const std::size_t c = *entering;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (a_[i][c] <= 0) continue;
        Rational ratio = a_[i][cols_] / a_[i][c];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return false;
      pivot(*leave, c);
    }
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  std::size_t cols_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> cost_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.constraints.size() > kMaxLpConstraints)
    throw ResourceError("LP has " + std::to_string(lp.constraints.size()) + " constraints, limit is " +
                        std::to_string(kMaxLpConstraints));
  const std::size_t n = lp.variables;
  std::vector<Rational> lower = lp.lower_bounds;
  if (lower.empty()) lower.assign(n, Rational(0));
  if (lower.size() != n) throw DimensionMismatch("lower bound vector length differs from variable count");
  if (!lp.objective.empty() && lp.objective.size() != n) throw DimensionMismatch("objective length differs from variable count");

  // Shift x = lower + y and orient every row so that its right-hand side is >= 0.
  struct Row {
    std::vector<Rational> coeffs;
    Relation rel;
    Rational rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size());
  std::size_t slack_count = 0, artificial_count = 0;
  for (const auto& con : lp.constraints) {
    if (con.coeffs.size() != n) throw DimensionMismatch("constraint length differs from variable count");
    Row row{con.coeffs, con.relation, con.rhs};
    for (std::size_t j = 0; j < n; ++j) row.rhs -= con.coeffs[j] * lower[j];
    if (row.rhs < 0) {
      for (auto& v : row.coeffs) v = -v;
      row.rhs = -row.rhs;
      if (row.rel == Relation::LessEqual) row.rel = Relation::GreaterEqual;
      else if (row.rel == Relation::GreaterEqual) row.rel = Relation::LessEqual;
    }
    if (row.rel != Relation::Equal) ++slack_count;
    if (row.rel != Relation::LessEqual) ++artificial_count;
    rows.push_back(std::move(row));
  }

  const std::size_t first_slack = n;
  const std::size_t first_artificial = n + slack_count;
  const std::size_t total = n + slack_count + artificial_count;
  Tableau tab(rows.size(), total);
  std::size_t slack = first_slack, art = first_artificial;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = rows[i].coeffs[j];
    tab.rhs(i) = rows[i].rhs;
    switch (rows[i].rel) {
      case Relation::LessEqual:
        tab.at(i, slack) = 1;
        tab.basis()[i] = slack++;
        break;
      case Relation::GreaterEqual:
        tab.at(i, slack++) = -1;
        tab.at(i, art) = 1;
        tab.basis()[i] = art++;
        break;
      case Relation::Equal:
        tab.at(i, art) = 1;
        tab.basis()[i] = art++;
        break;
    }
  }

  std::vector<bool> allowed(total, true);
  if (artificial_count > 0) {
    std::vector<Rational> phase1(total);
    for (std::size_t j = first_artificial; j < total; ++j) phase1[j] = 1;
    tab.set_objective(phase1);
    tab.optimize(allowed);
    if (tab.objective_value() > 0) return LpSolution{LpStatus::Infeasible, {}, Rational(0)};
    // Pivot zero-level artificials out of the basis; rows that cannot be
    // pivoted are linearly dependent and are dropped.
    for (std::size_t i = tab.rows(); i-- > 0;) {
      if (tab.basis()[i] < first_artificial) continue;
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_artificial; ++j)
        if (tab.at(i, j) != 0) {
          col = j;
          break;
        }
      if (col) tab.pivot(i, *col);
      else tab.drop_row(i);
    }
    for (std::size_t j = first_artificial; j < total; ++j) allowed[j] = false;
  }

  std::vector<Rational> cost(total);
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) cost[j] = lp.objective[j];
  tab.set_objective(cost);
  if (!tab.optimize(allowed)) return LpSolution{LpStatus::Unbounded, {}, Rational(0)};

  LpSolution sol{LpStatus::Optimal, lower, Rational(0)};
  for (std::size_t i = 0; i < tab.rows(); ++i)
    if (tab.basis()[i] < n) sol.x[tab.basis()[i]] += tab.rhs(i);
  for (std::size_t j = 0; j < n && j < lp.objective.size(); ++j) sol.objective += lp.objective[j] * sol.x[j];
  return sol;
}

}  // namespace rdnet
