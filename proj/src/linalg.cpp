#include "rdnet/linalg.hpp"

#include <numeric>

namespace rdnet {

namespace {

/// In-place reduced row echelon form; returns the pivot column of each
/// nonzero row.
std::vector<std::size_t> rref(RationalMatrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Rational inv = 1 / a[row][c];
    for (auto& v : a[row]) v *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][c] == 0) continue;
      const Rational factor = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= factor * a[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

void normalize_integer(std::vector<Rational>& v) {
  mpz_class lcm_den = 1, gcd_num = 0;
  for (const auto& q : v) {
    if (q == 0) continue;
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den_mpz_t());
  }
  for (auto& q : v) q *= lcm_den;
  for (const auto& q : v) mpz_gcd(gcd_num.get_mpz_t(), gcd_num.get_mpz_t(), q.get_num_mpz_t());
  if (gcd_num == 0) return;
  Rational scale(1, gcd_num);
  for (const auto& q : v) {
    if (q == 0) continue;
    if (q < 0) scale = -scale;
    break;
  }
  for (auto& q : v) q *= scale;
}

}  // namespace

RationalMatrix transpose(const RationalMatrix& a, std::size_t cols_if_empty) {
  const std::size_t cols = a.empty() ? cols_if_empty : a.front().size();
  RationalMatrix t(cols, std::vector<Rational>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
  return t;
}

RationalMatrix nullspace(const RationalMatrix& a, std::size_t cols) {
  RationalMatrix r = a;
  const auto pivots = rref(r, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  RationalMatrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols);
    v[free] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -r[k][free];
    normalize_integer(v);
    basis.push_back(std::move(v));
  }
  return basis;
}

RationalMatrix left_nullspace(const RationalMatrix& a, std::size_t cols) {
  return nullspace(transpose(a, cols), a.size());
}

std::size_t rank(const RationalMatrix& a) {
  if (a.empty()) return 0;
  RationalMatrix r = a;
  return rref(r, a.front().size()).size();
}

std::vector<std::size_t> independent_rows(const RationalMatrix& a) {
  std::vector<std::size_t> chosen;
  RationalMatrix acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc.push_back(a[i]);
    if (rank(acc) == acc.size()) chosen.push_back(i);
    else acc.pop_back();
  }
  return chosen;
}

}  // namespace rdnet
