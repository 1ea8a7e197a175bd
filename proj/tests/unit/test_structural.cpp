#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "rdnet/error.hpp"
#include "rdnet/structural.hpp"

using namespace rdnet;

namespace {

Monomial mono(std::vector<int> e) { return Monomial(std::move(e)); }

Polynomial weighted_sum(const PolyVec& f, const std::vector<Rational>& alpha) {
  Polynomial s(f.species);
  for (std::size_t i = 0; i < f.size(); ++i) s += alpha[i] * f[i];
  return s;
}

// Independent re-check of the monomial-sign criterion: row sums computed from
// scratch, every monomial of degree > r must have a non-positive coefficient.
bool rows_satisfy(const PolyVec& f, const std::vector<std::size_t>& ordering, const RationalMatrix& A, int r) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (A[k][k] < 1) return false;
    Polynomial row(f.species);
    for (std::size_t j = 0; j <= k; ++j) {
      if (A[k][j] < 0) return false;
      row += A[k][j] * f[ordering[j]];
    }
    for (const auto& [m, c] : row.terms())
      if (m.degree() > r && c > 0) return false;
  }
  return true;
}

RationalMatrix lower_ones(std::size_t m) {
  RationalMatrix A(m, std::vector<Rational>(m, 0));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j <= k; ++j) A[k][j] = 1;
  return A;
}

std::vector<std::size_t> identity_order(std::size_t m) {
  std::vector<std::size_t> o(m);
  for (std::size_t i = 0; i < m; ++i) o[i] = i;
  return o;
}

PolyVec single(std::vector<std::pair<std::vector<int>, Rational>> terms, std::size_t m = 1) {
  PolyVec f = PolyVec::zero(m);
  for (auto& [e, c] : terms) f.components[0].add_term(mono(e), c);
  return f;
}

}  // namespace

TEST_SUITE("structural") {
  TEST_CASE("quasipositivity of S1 and of a constant sink") {
    CHECK(check_quasipositivity(compile_rhs(fixtures::s1(2))).holds);
    const auto res = check_quasipositivity(single({{{0}, -1}}));
    CHECK_FALSE(res.holds);
    REQUIRE(res.witness);
    CHECK(res.witness->first == 0);
    CHECK(res.witness->second.degree() == 0);
  }

  TEST_CASE("every compiled random network is quasipositive") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 500; ++trial)
      CHECK(check_quasipositivity(compile_rhs(fixtures::random_network(rng))).holds);
  }

  TEST_CASE("mass control of S1 is conservation with weights (1, 1, 2)") {
    const PolyVec f = compile_rhs(fixtures::s1(2));
    const auto cert = find_mass_control(f);
    CHECK(cert.cls == MassClass::Conservation);
    CHECK(cert.alpha == std::vector<Rational>{1, 1, 2});
    CHECK(cert.K == 0);
    CHECK(weighted_sum(f, cert.alpha).is_zero());
    CHECK(verify_mass_control(f, cert));
  }

  TEST_CASE("reversible network with p = q = l = 2 conserves (1, 1, 2)") {
    const PolyVec f = compile_rhs(fixtures::reversible(2, 2, 2));
    const auto cert = find_mass_control(f);
    CHECK(cert.cls == MassClass::Conservation);
    CHECK(cert.alpha == std::vector<Rational>{1, 1, 2});
    CHECK(weighted_sum(f, cert.alpha).is_zero());
  }

  TEST_CASE("S2 and S3 admit no linear mass control") {
    for (const char* name : {"s2.crn", "s3.crn"}) {
      const auto cert = find_mass_control(compile_rhs(fixtures::load(name).network));
      CHECK(cert.cls == MassClass::None);
    }
  }

  TEST_CASE("dissipation and control classes with their K") {
    // f = -u^2: dissipation.
    auto cert = find_mass_control(single({{{2}, -1}}));
    CHECK(cert.cls == MassClass::Dissipation);
    CHECK(cert.K == 0);
    // f = 1 - u: control with K = 1.
    const PolyVec g = single({{{0}, 1}, {{1}, -1}});
    cert = find_mass_control(g);
    CHECK(cert.cls == MassClass::Control);
    CHECK(cert.K == 1);
    CHECK(verify_mass_control(g, cert));
    // f = 3 u - u^2: control with K = 3.
    cert = find_mass_control(single({{{1}, 3}, {{2}, -1}}));
    CHECK(cert.cls == MassClass::Control);
    CHECK(cert.K == 3);
    // f = u^2: none.
    CHECK(find_mass_control(single({{{2}, 1}})).cls == MassClass::None);
    // Tampered certificates are rejected.
    auto bad = find_mass_control(g);
    bad.K = Rational(1, 2);
    CHECK_FALSE(verify_mass_control(g, bad));
  }

  TEST_CASE("entropy certificates of S2, S3 and the three-cycle") {
    for (const char* name : {"s2.crn", "s3.crn", "cycle.crn"}) {
      CAPTURE(name);
      const ReactionNetwork net = fixtures::load(name).network;
      const auto cert = check_entropy_dissipation(net);
      CHECK(cert.converged);
      CHECK(cert.dissipative);
      CHECK_FALSE(cert.shifted);
      CHECK(cert.residual <= 1e-10);
      CHECK(cert.samples_checked >= 10000);
      for (double z : cert.z) CHECK(std::abs(z - 1.0) <= 1e-10);
      CHECK(complex_balance_defect(net, std::vector<double>(net.species.size(), 1.0)) <= 1e-12);
    }
  }

  TEST_CASE("entropy production of S3 vanishes at the equilibrium and is negative elsewhere") {
    const ReactionNetwork net = fixtures::load("s3.crn").network;
    const PolyVec f = compile_rhs(net);
    auto production = [&](const std::vector<double>& u) {
      const auto fu = eval_rhs(f, u);
      double s = 0;
      for (std::size_t i = 0; i < u.size(); ++i) s += std::log(u[i]) * fu[i];
      return s;
    };
    CHECK(production({1, 1, 1}) == doctest::Approx(0.0));
    CHECK(production({2.0, 0.3, 5.0}) < 0);
  }

  TEST_CASE("S2 entropy production is non-positive at generic points") {
    const PolyVec f = compile_rhs(fixtures::load("s2.crn").network);
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> lu(-3, 3);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> u(4);
      for (double& x : u) x = std::exp(lu(rng));
      const auto fu = eval_rhs(f, u);
      double s = 0, scale = 1;
      for (std::size_t i = 0; i < 4; ++i) {
        s += std::log(u[i]) * fu[i];
        scale += std::abs(std::log(u[i]) * fu[i]);
      }
      CHECK(s <= 1e-12 * scale);
    }
  }

  TEST_CASE("shifted entropy for non-unit rates") {
    ReactionNetwork net = fixtures::reversible(1, 1, 1);
    net.reactions[0].rate_forward = 2;
    const auto cert = check_entropy_dissipation(net);
    REQUIRE(cert.converged);
    CHECK(cert.shifted);
    CHECK(cert.dissipative);
    // Complex balance: 2 z1 z2 = z3.
    CHECK(2 * cert.z[0] * cert.z[1] == doctest::Approx(cert.z[2]).epsilon(1e-9));
    CHECK(complex_balance_defect(net, cert.z) <= 1e-10);
    // The unit vector is not balanced for these rates.
    EntropyOptions opts;
    opts.samples = 2000;
    std::optional<std::vector<double>> witness;
    CHECK_FALSE(verify_entropy_dissipation(net, {1, 1, 1}, opts, &witness));
    CHECK(witness.has_value());
  }

  TEST_CASE("autocatalysis has no complex-balanced equilibrium") {
    const ReactionNetwork net = parse_network("species A d=1\nA -> 2 A @ 1\n");
    const auto cert = check_entropy_dissipation(net);
    CHECK_FALSE(cert.dissipative);
  }

  TEST_CASE("intermediate sums on the reversible network") {
    const PolyVec f = compile_rhs(fixtures::reversible(2, 3, 2));
    // Displayed matrix rows (1,0,0), (0,1,0), (q, p, 2pq/l).
    IntermediateSumCert displayed{identity_order(3), {{1, 0, 0}, {0, 1, 0}, {3, 2, 6}}, 2};
    CHECK(verify_intermediate_sum(f, displayed));
    CHECK(rows_satisfy(f, displayed.ordering, displayed.A, 2));
    const auto found = find_intermediate_sum(f, 5);
    REQUIRE(found);
    CHECK(found->r == 2);
    CHECK(rows_satisfy(f, found->ordering, found->A, found->r));
    CHECK_FALSE(find_intermediate_sum_at(f, 1));
  }

  TEST_CASE("intermediate sum of S3 has r = 2") {
    const PolyVec f = compile_rhs(fixtures::load("s3.crn").network);
    IntermediateSumCert displayed{identity_order(3), lower_ones(3), 2};
    CHECK(verify_intermediate_sum(f, displayed));
    const auto found = find_intermediate_sum(f, 3);
    REQUIRE(found);
    CHECK(found->r == 2);
    CHECK(verify_intermediate_sum(f, *found));
    CHECK(rows_satisfy(f, found->ordering, found->A, 2));
    CHECK_FALSE(find_intermediate_sum_at(f, 1));
  }

  TEST_CASE("intermediate sum of the three-cycle has r = 1") {
    const PolyVec f = compile_rhs(fixtures::cycle(1));
    IntermediateSumCert displayed{identity_order(3), lower_ones(3), 1};
    CHECK(verify_intermediate_sum(f, displayed));
    const auto found = find_intermediate_sum(f, 2);
    REQUIRE(found);
    CHECK(found->r == 1);
    CHECK(rows_satisfy(f, found->ordering, found->A, 1));
  }

  TEST_CASE("intermediate sum of S1 is minimal") {
    const PolyVec f = compile_rhs(fixtures::s1(2));
    const auto found = find_intermediate_sum(f, 3);
    REQUIRE(found);
    CHECK(rows_satisfy(f, found->ordering, found->A, found->r));
    if (found->r > 1) CHECK_FALSE(find_intermediate_sum_at(f, found->r - 1));
  }

  TEST_CASE("u1^2 needs r = 2") {
    const PolyVec f = single({{{2}, 1}});
    CHECK_FALSE(find_intermediate_sum_at(f, 1));
    const auto found = find_intermediate_sum(f, 2);
    REQUIRE(found);
    CHECK(found->r == 2);
    CHECK(found->A == RationalMatrix{{1}});
  }

  TEST_CASE("identity matrix fails on the reversible network at r = 1") {
    const PolyVec f = compile_rhs(fixtures::reversible(1, 2, 2));
    IntermediateSumCert id{identity_order(3), {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1};
    CHECK_FALSE(verify_intermediate_sum(f, id));
    // Row 1 carries +u3^2.
    CHECK(f[0].coefficient(mono({0, 0, 2})) > 0);
  }

  TEST_CASE("verify rejects malformed certificates") {
    const PolyVec f = compile_rhs(fixtures::load("s3.crn").network);
    IntermediateSumCert c{{0, 0, 1}, lower_ones(3), 2};
    CHECK_FALSE(verify_intermediate_sum(f, c));
    c = {identity_order(3), lower_ones(3), 2};
    c.A[1][1] = Rational(1, 2);
    CHECK_FALSE(verify_intermediate_sum(f, c));
    c = {identity_order(3), lower_ones(3), 2};
    c.A[0].push_back(1);
    c.A[0][1] = 1;
    CHECK_FALSE(verify_intermediate_sum(f, c));
    c = {identity_order(2), lower_ones(2), 2};
    CHECK_THROWS_AS(verify_intermediate_sum(f, c), DimensionMismatch);
  }

  TEST_CASE("search certificates verify on random networks") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 150; ++trial) {
      const PolyVec f = compile_rhs(fixtures::random_network(rng));
      if (f.size() == 0) continue;
      const auto mass = find_mass_control(f);
      CHECK(verify_mass_control(f, mass));
      for (const auto& a : mass.alpha) CHECK(a >= 1);
      int deg = 1;
      for (const auto& p : f.components) deg = std::max(deg, p.max_degree());
      const auto cert = find_intermediate_sum(f, deg);
      if (!cert) continue;
      CHECK(verify_intermediate_sum(f, *cert));
      CHECK(rows_satisfy(f, cert->ordering, cert->A, cert->r));
      if (cert->r > 1) CHECK_FALSE(find_intermediate_sum_at(f, cert->r - 1));
    }
  }

  TEST_CASE("classes are invariant under positive scaling") {
    std::mt19937_64 rng(34);
    const Rational scales[] = {Rational(1, 3), Rational(5), Rational(7, 2)};
    for (int trial = 0; trial < 100; ++trial) {
      const PolyVec f = compile_rhs(fixtures::random_network(rng));
      if (f.size() == 0) continue;
      const Rational c = scales[trial % 3];
      PolyVec g = f;
      for (auto& p : g.components) p *= c;
      CHECK(find_mass_control(f).cls == find_mass_control(g).cls);
      int deg = 1;
      for (const auto& p : f.components) deg = std::max(deg, p.max_degree());
      const auto cf = find_intermediate_sum(f, deg);
      const auto cg = find_intermediate_sum(g, deg);
      REQUIRE(cf.has_value() == cg.has_value());
      if (!cf) continue;
      CHECK(cf->r == cg->r);
      // A certificate for f is one for c f and conversely.
      CHECK(verify_intermediate_sum(g, *cf));
      CHECK(verify_intermediate_sum(f, *cg));
    }
  }

  TEST_CASE("quasi-uniform examples") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> d(0.01, 100.0);
    for (int trial = 0; trial < 100; ++trial) {
      double a = d(rng), b = d(rng);
      if (a > b) std::swap(a, b);
      QuasiUniformQuery q{1 + trial % 5, 1, a, b, 2.0, 0.0};
      CHECK(check_quasi_uniform(q).verdict == Verdict::Holds);
    }
    for (int trial = 0; trial < 1000; ++trial) {
      double a = d(rng), b = d(rng);
      if (a > b) std::swap(a, b);
      // p' = 2 energy route at n = 2, r = 2: (1/m)(B - A)/2 < 1 for all A > 0.
      const auto res = check_quasi_uniform({2, 2, a, b, 2.0, 0.0});
      const double direct = (1.0 / (0.5 * (a + b))) * (b - a) / 2.0;
      CHECK(direct < 1.0);
      CHECK(res.verdict == Verdict::Holds);
      CHECK(res.margin == doctest::Approx(1.0 - direct).epsilon(1e-12));
    }
    const auto eq = check_quasi_uniform({3, 2, 2.0, 2.0, 2.0, 0.0});
    CHECK(eq.verdict == Verdict::Holds);
    CHECK(std::isinf(eq.margin));
  }

  TEST_CASE("quasi-uniform p' < 2 verdicts and preconditions") {
    // n = 2, r = 2 needs p > 2, i.e. p' < 2.
    CHECK(check_quasi_uniform({2, 2, 1.0, 3.0, 1.8, 0.5}).verdict == Verdict::Inconclusive);
    CHECK(check_quasi_uniform({2, 2, 1.0, 3.0, 1.8, 1.5}).verdict == Verdict::Fails);
    // p = 3 does not exceed (n+2)(r-1)/2 = 4 for n = 6.
    CHECK_THROWS_AS(check_quasi_uniform({6, 2, 1.0, 3.0, 1.5, 0.1}), PreconditionError);
    CHECK_THROWS_AS(check_quasi_uniform({2, 2, 1.0, 3.0, 2.5, 0.1}), PreconditionError);
    CHECK_THROWS_AS(check_quasi_uniform({2, 3, 1.0, 3.0, 2.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(check_quasi_uniform({2, 2, 3.0, 1.0, 2.0, 0.0}), PreconditionError);
  }

  TEST_CASE("analyze verdicts on the bundled networks") {
    auto run = [](const char* name, int n = 2) {
      const NetworkFile file = fixtures::load(name);
      AnalyzeOptions opts;
      opts.n = n;
      opts.entropy.samples = 2000;
      return analyze(file.network, opts, file.intermediate_hint ? std::optional(file.intermediate_hint->rows)
                                                                : std::nullopt,
                     file.intermediate_hint ? file.intermediate_hint->r : 0);
    };
    const auto s3 = run("s3.crn");
    CHECK(s3.verified);
    CHECK(s3.mass.cls == MassClass::None);
    CHECK(s3.growth == 3);
    REQUIRE(s3.intermediate);
    CHECK(s3.intermediate->r == 2);
    CHECK(s3.two_dimensional_route);
    CHECK(s3.hint->valid);

    const auto e5 = run("cycle.crn", 3);
    CHECK(e5.verified);
    CHECK(e5.intermediate->r == 1);
    CHECK(e5.verdict.find("all dimensions") != std::string::npos);

    const auto rev = run("reversible.crn");
    CHECK(rev.hint->valid);
    CHECK(rev.growth == 5);

    ReactionNetwork empty;
    const auto rep = analyze(empty);
    CHECK(rep.verified);
  }
}
