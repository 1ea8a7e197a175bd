#include "rdnet/netmodel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "rdnet/error.hpp"

namespace rdnet {

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw PreconditionError("negative exponent in monomial");
    degree_ += e;
  }
}

Monomial Monomial::constant(std::size_t species) { return Monomial(std::vector<int>(species, 0)); }

Monomial Monomial::variable(std::size_t species, std::size_t index, int power) {
  std::vector<int> e(species, 0);
  e.at(index) = power;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (species() != other.species()) throw DimensionMismatch("monomial species count differs");
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return Monomial(std::move(e));
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  return std::lexicographical_compare(a.exponents().begin(), a.exponents().end(),
                                      b.exponents().begin(), b.exponents().end(),
                                      std::greater<int>{});
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (m.species() != species_) throw DimensionMismatch("monomial does not match polynomial species count");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

bool Polynomial::operator==(const Polynomial& other) const {
  if (species_ != other.species_ || terms_.size() != other.terms_.size()) return false;
  return std::equal(terms_.begin(), terms_.end(), other.terms_.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first && a.second == b.second; });
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= species_) throw DimensionMismatch("derivative variable out of range");
  Polynomial d(species_);
  for (const auto& [m, c] : terms_) {
    int e = m.exponent(var);
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[var] -= 1;
    d.add_term(Monomial(std::move(exps)), c * e);
  }
  return d;
}

int Polynomial::max_degree() const {
  int deg = 0;
  for (const auto& [m, c] : terms_) deg = std::max(deg, m.degree());
  return deg;
}

namespace {

double monomial_value(const int* exps, std::size_t species, const double* u) {
  double v = 1.0;
  for (std::size_t j = 0; j < species; ++j)
    for (int k = 0; k < exps[j]; ++k) v *= u[j];
  return v;
}

}  // namespace

double Polynomial::evaluate(std::span<const double> u) const {
  if (u.size() != species_) throw DimensionMismatch("evaluation point has wrong length");
  double sum = 0.0;
  for (const auto& [m, c] : terms_)
    sum += c.get_d() * monomial_value(m.exponents().data(), species_, u.data());
  return sum;
}

PolyVec PolyVec::zero(std::size_t species) {
  return PolyVec{species, std::vector<Polynomial>(species, Polynomial(species))};
}

bool PolyVec::operator==(const PolyVec& other) const {
  return species == other.species && components == other.components;
}

std::vector<double> ReactionNetwork::diffusion_values() const {
  std::vector<double> d;
  d.reserve(diffusion.size());
  for (const auto& q : diffusion) d.push_back(q.get_d());
  return d;
}

void ReactionNetwork::validate() const {
  const std::size_t m = species.size();
  std::set<std::string> names(species.begin(), species.end());
  if (names.size() != m) throw PreconditionError("species names are not unique");
  if (diffusion.size() != m) throw PreconditionError("diffusion vector length differs from species count");
  for (const auto& d : diffusion)
    if (d <= 0) throw PreconditionError("diffusion coefficients must be positive");
  for (std::size_t r = 0; r < reactions.size(); ++r) {
    const auto& rx = reactions[r];
    if (rx.reactant.size() != m || rx.product.size() != m)
      throw PreconditionError("reaction " + std::to_string(r + 1) + " has wrong stoichiometry length");
    for (std::size_t i = 0; i < m; ++i)
      if (rx.reactant[i] < 0 || rx.product[i] < 0)
        throw PreconditionError("reaction " + std::to_string(r + 1) + " has negative stoichiometry");
    if (rx.reactant == rx.product)
      throw PreconditionError("reaction " + std::to_string(r + 1) + " has zero net stoichiometry");
    if (rx.rate_forward <= 0) throw PreconditionError("reaction " + std::to_string(r + 1) + " has non-positive forward rate");
    if (rx.rate_backward < 0) throw PreconditionError("reaction " + std::to_string(r + 1) + " has negative backward rate");
  }
}

PolyVec compile_rhs(const ReactionNetwork& net) {
  net.validate();
  const std::size_t m = net.species_count();
  PolyVec f = PolyVec::zero(m);
  for (const auto& rx : net.reactions) {
    Monomial forward(rx.reactant);
    Monomial backward(rx.product);
    for (std::size_t i = 0; i < m; ++i) {
      const int net_change = rx.product[i] - rx.reactant[i];
      if (net_change == 0) continue;
      f.components[i].add_term(forward, rx.rate_forward * net_change);
      if (rx.rate_backward != 0) f.components[i].add_term(backward, -rx.rate_backward * net_change);
    }
  }
  return f;
}

std::vector<double> eval_rhs(const PolyVec& f, std::span<const double> u) {
  if (u.size() != f.species) throw DimensionMismatch("eval_rhs: state length differs from species count");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f.components[i].evaluate(u);
  return out;
}

PolyMatrix jacobian(const PolyVec& f) {
  PolyMatrix jac(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    jac[i].reserve(f.species);
    for (std::size_t j = 0; j < f.species; ++j) jac[i].push_back(f.components[i].derivative(j));
  }
  return jac;
}

int growth_degree(const PolyVec& f) {
  int rho = 0;
  for (const auto& p : f.components)
    for (const auto& [m, c] : p.terms())
      if (c > 0) rho = std::max(rho, m.degree());
  return rho;
}

std::string serialize(const PolyVec& f) {
  std::ostringstream os;
  os << "rdnet-polyvec/1 m=" << f.species << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << "[f" << (i + 1) << "]\n";
    for (const auto& [m, c] : f.components[i].terms()) {
      os << to_fraction_string(c) << " :";
      for (int e : m.exponents()) os << ' ' << e;
      os << '\n';
    }
  }
  return os.str();
}

PolyVec deserialize_polyvec(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("rdnet-polyvec/1 m=", 0) != 0)
    throw PreconditionError("missing rdnet-polyvec/1 header");
  const std::size_t m = std::stoul(line.substr(18));
  PolyVec f{m, {}};
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      f.components.emplace_back(m);
      continue;
    }
    if (f.components.empty()) throw PreconditionError("monomial line before first component header");
    std::istringstream ls(line);
    std::string coeff, colon;
    ls >> coeff >> colon;
    if (colon != ":") throw PreconditionError("malformed monomial line: " + line);
    std::vector<int> exps(m);
    for (auto& e : exps)
      if (!(ls >> e)) throw PreconditionError("short exponent list: " + line);
    f.components.back().add_term(Monomial(std::move(exps)), parse_rational(coeff));
  }
  if (f.components.size() != m) throw PreconditionError("component count differs from m");
  return f;
}

CompiledPolyVec::CompiledPolyVec(const PolyVec& f) : species_(f.species) {
  std::map<Monomial, std::size_t, GradedLex> index;
  for (const auto& p : f.components)
    for (const auto& [m, c] : p.terms()) index.try_emplace(m, 0);
  std::size_t k = 0;
  for (auto& [m, idx] : index) {
    idx = k++;
    exps_.insert(exps_.end(), m.exponents().begin(), m.exponents().end());
  }
  row_start_.push_back(0);
  for (const auto& p : f.components) {
    for (const auto& [m, c] : p.terms()) {
      term_monomial_.push_back(index.at(m));
      coeffs_.push_back(c.get_d());
    }
    row_start_.push_back(coeffs_.size());
  }
}

void CompiledPolyVec::evaluate(const double* u, double* out, double* scratch) const {
  const std::size_t nmono = monomial_count();
  for (std::size_t k = 0; k < nmono; ++k) scratch[k] = monomial_value(&exps_[k * species_], species_, u);
  const std::size_t rows = components();
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t t = row_start_[i]; t < row_start_[i + 1]; ++t) sum += coeffs_[t] * scratch[term_monomial_[t]];
    out[i] = sum;
  }
}

std::vector<double> CompiledPolyVec::evaluate(std::span<const double> u) const {
  if (u.size() != species_) throw DimensionMismatch("state length differs from species count");
  std::vector<double> out(components());
  std::vector<double> scratch(monomial_count());
  evaluate(u.data(), out.data(), scratch.data());
  return out;
}

std::vector<std::vector<Rational>> stoichiometric_matrix(const ReactionNetwork& net) {
  const std::size_t m = net.species_count();
  std::vector<std::vector<Rational>> n(m, std::vector<Rational>(net.reactions.size()));
  for (std::size_t r = 0; r < net.reactions.size(); ++r)
    for (std::size_t i = 0; i < m; ++i)
      n[i][r] = net.reactions[r].product[i] - net.reactions[r].reactant[i];
  return n;
}

}  // namespace rdnet
