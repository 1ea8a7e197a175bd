#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rdnet/rational.hpp"

namespace rdnet {

/// Power product u_1^{e_1} ... u_m^{e_m}.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);
  static Monomial constant(std::size_t species);
  static Monomial variable(std::size_t species, std::size_t index, int power = 1);

  std::size_t species() const { return exponents_.size(); }
  int degree() const { return degree_; }
  int exponent(std::size_t i) const { return exponents_[i]; }
  const std::vector<int>& exponents() const { return exponents_; }

  Monomial operator*(const Monomial& other) const;
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Graded-lex order: total degree ascending, ties broken by comparing exponent
/// vectors with u_1 most significant (u_1^2 precedes u_1 u_2).
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse polynomial with exact rational coefficients. Zero coefficients are
/// never stored and iteration follows GradedLex.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::size_t species) : species_(species) {}

  std::size_t species() const { return species_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  Rational coefficient(const Monomial& m) const;

  /// Adds c * m, erasing the entry if the sum cancels.
  void add_term(const Monomial& m, const Rational& c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Rational& c, Polynomial p) { return p *= c; }
  bool operator==(const Polynomial& other) const;

  Polynomial derivative(std::size_t var) const;
  int max_degree() const;
  double evaluate(std::span<const double> u) const;

 private:
  std::size_t species_ = 0;
  TermMap terms_;
};

/// Vector field f = (f_1, ..., f_m); every component has m variables.
struct PolyVec {
  std::size_t species = 0;
  std::vector<Polynomial> components;

  static PolyVec zero(std::size_t species);
  std::size_t size() const { return components.size(); }
  const Polynomial& operator[](std::size_t i) const { return components[i]; }
  bool operator==(const PolyVec& other) const;
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// Complexes are stoichiometric vectors; rate_backward == 0 marks an
/// irreversible reaction.
struct Reaction {
  std::vector<int> reactant;
  std::vector<int> product;
  Rational rate_forward;
  Rational rate_backward;

  bool reversible() const { return rate_backward > 0; }
  bool operator==(const Reaction&) const = default;
};

struct ReactionNetwork {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  std::vector<Rational> diffusion;

  std::size_t species_count() const { return species.size(); }
  std::vector<double> diffusion_values() const;
  /// Throws PreconditionError naming the first violated invariant.
  void validate() const;
  bool operator==(const ReactionNetwork&) const = default;
};

/// Mass-action right-hand side. Reactions contribute
/// (nu' - nu) k_f u^nu + (nu - nu') k_b u^nu'.
PolyVec compile_rhs(const ReactionNetwork& net);

std::vector<double> eval_rhs(const PolyVec& f, std::span<const double> u);

/// Entry (i, j) is d f_i / d u_j.
PolyMatrix jacobian(const PolyVec& f);

/// Largest total degree of a positive-coefficient monomial over all
/// components; 0 when f has no positive monomial.
int growth_degree(const PolyVec& f);

/// Text form: header "rdnet-polyvec/1 m=<m>", then per component a line
/// "[f<i>]" followed by "num/den : e1 ... em" lines in graded-lex order.
std::string serialize(const PolyVec& f);
PolyVec deserialize_polyvec(const std::string& text);

/// Floating-point evaluator of a PolyVec, flattened for the inner loops of the
/// simulator. Monomials are shared between components and evaluated once per
/// point; summation follows the canonical monomial order.
class CompiledPolyVec {
 public:
  CompiledPolyVec() = default;
  explicit CompiledPolyVec(const PolyVec& f);

  std::size_t species() const { return species_; }
  std::size_t components() const { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  /// out has `components()` entries; scratch must hold `monomial_count()`.
  void evaluate(const double* u, double* out, double* scratch) const;
  std::vector<double> evaluate(std::span<const double> u) const;
  std::size_t monomial_count() const { return exps_.size() / (species_ ? species_ : 1); }

 private:
  std::size_t species_ = 0;
  std::vector<int> exps_;            // monomial_count x species, row-major
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> term_monomial_;
  std::vector<double> coeffs_;
};

/// Stoichiometric matrix N (species x reaction) with entries nu' - nu.
std::vector<std::vector<Rational>> stoichiometric_matrix(const ReactionNetwork& net);

}  // namespace rdnet
