// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "rdnet/config.hpp"
#include "rdnet/diagnostics.hpp"
#include "rdnet/ladder.hpp"
#include "rdnet/pipeline.hpp"
#include "rdnet/reaction_dsl.hpp"
#include "rdnet/structural.hpp"

using namespace rdnet;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string config_path(const std::string& name) { return std::string(RDNET_CONFIG_DIR) + "/" + name; }

NetworkFile load_network(const std::string& name) { return parse_network_file(read_text_file(config_path(name))); }

// Row sums rebuilt from scratch: every monomial of degree > r must have a
// non-positive coefficient, and the matrix must be nonnegative with a_kk >= 1.
bool rows_satisfy(const PolyVec& f, const std::vector<std::size_t>& ordering, const RationalMatrix& A, int r) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (A[k][k] < 1) return false;
    Polynomial row(f.species);
    for (std::size_t j = 0; j <= k; ++j) {
      if (A[k][j] < 0) return false;
      row += A[k][j] * f[ordering[j]];
    }
    for (std::size_t j = k + 1; j < A[k].size(); ++j)
      if (A[k][j] != 0) return false;
    for (const auto& [m, c] : row.terms())
      if (m.degree() > r && c > 0) return false;
  }
  return true;
}

StructuralReport analyze_file(const NetworkFile& file) {
  return analyze(file.network, AnalyzeOptions{},
                 file.intermediate_hint ? std::optional(file.intermediate_hint->rows) : std::nullopt,
                 file.intermediate_hint ? file.intermediate_hint->r : 0);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- 1 ----------------------------------------------------------------------
void certificates(Outcome& o) {
  struct Case {
    const char* file;
    int r;
  };
  for (const Case c : {Case{"reversible.crn", 2}, Case{"s3.crn", 2}, Case{"cycle.crn", 1}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const NetworkFile file = load_network(c.file);
    const StructuralReport rep = analyze_file(file);
    const double secs = seconds_since(t0);
    const PolyVec f = compile_rhs(file.network);
    o.detail << " " << c.file << ": r=" << (rep.intermediate ? rep.intermediate->r : -1) << " (" << std::fixed
             << std::setprecision(2) << secs << "s)" << std::defaultfloat;
    o.require(secs < 5.0, std::string(c.file) + " under 5 s");
    o.require(rep.intermediate && rep.intermediate->r == c.r, std::string(c.file) + " minimal r");
    if (rep.intermediate)
      o.require(rows_satisfy(f, rep.intermediate->ordering, rep.intermediate->A, c.r),
                std::string(c.file) + " found certificate re-checked");
    if (c.r > 1) o.require(!find_intermediate_sum_at(f, c.r - 1), std::string(c.file) + " no certificate below r");
    o.require(rep.hint && rep.hint->valid, std::string(c.file) + " displayed matrix verified");
  }
  // Displayed matrix for the reversible network with p = 2, q = 3, l = 2: rows (1,0,0), (0,1,0), (q, p, 2pq/l).
  const NetworkFile rev = load_network("reversible.crn");
  const PolyVec f = compile_rhs(rev.network);
  const IntermediateSumCert displayed{{0, 1, 2}, {{1, 0, 0}, {0, 1, 0}, {3, 2, Rational(2 * 2 * 3, 2)}}, 2};
  o.require(verify_intermediate_sum(f, displayed), "displayed reversible-network matrix");
  o.require(rows_satisfy(f, displayed.ordering, displayed.A, 2), "displayed reversible-network matrix re-checked");
}

// --- 2 ----------------------------------------------------------------------
void mass_certificates(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const PolyVec f1 = compile_rhs(load_network("s1.crn").network);
  const MassControlCert c1 = find_mass_control(f1);
  o.require(c1.cls == MassClass::Conservation, "S1 conservation class");
  o.require(c1.alpha.size() == 3 && c1.alpha[1] == c1.alpha[0] && c1.alpha[2] == 2 * c1.alpha[0],
            "S1 alpha proportional to (1,1,2)");
  o.require(verify_mass_control(f1, c1), "S1 certificate verified");
  o.detail << " S1 alpha=(";
  for (std::size_t i = 0; i < c1.alpha.size(); ++i) o.detail << (i ? "," : "") << c1.alpha[i].get_str();
  o.detail << ")";

  for (const char* name : {"s2.crn", "s3.crn"}) {
    const ReactionNetwork net = load_network(name).network;
    const MassControlCert c = find_mass_control(compile_rhs(net));
    o.require(c.cls == MassClass::None, std::string(name) + " class none");
    const EntropyCert e = check_entropy_dissipation(net);
    o.require(e.converged && e.dissipative, std::string(name) + " entropy dissipative");
    o.require(!e.shifted, std::string(name) + " z is the unit vector");
    const double defect = complex_balance_defect(net, std::vector<double>(net.species.size(), 1.0));
    o.require(defect <= 1e-10, std::string(name) + " complex-balance residual at 1");
    o.detail << " " << name << ": class " << to_string(c.cls) << ", residual " << defect;
  }
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "under 10 s");
}

// --- 3 ----------------------------------------------------------------------
void ladder_checks(Outcome& o) {
  const LadderResult res = ladder({2, 2.0, 2.5});
  const std::vector<double> expect{2.5, 10.0 / 3.0, 10.0};
  o.require(res.terminal() && res.N0 == 2, "terminal with N0 = 2");
  o.require(res.sequence.size() == expect.size(), "sequence length 3");
  double err = 0;
  for (std::size_t k = 0; k < std::min(res.sequence.size(), expect.size()); ++k)
    err = std::max(err, std::abs(res.sequence[k] - expect[k]));
  o.require(err <= 1e-12, "sequence exact to 1e-12");
  o.detail << " max error " << err;

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dn(1, 4);
  std::uniform_real_distribution<double> dr(2.0, 6.0);
  int fixed = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = dn(rng);
    const double r = dr(rng);
    const LadderResult s = ladder({n, r, (n + 2) * (r - 1) / 2.0});
    const bool ok = s.verdict == LadderVerdict::Stalls && s.sequence.size() >= 2 &&
                    std::abs(s.sequence[1] - s.sequence[0]) <= 1e-12 * s.sequence[0];
    fixed += ok;
  }
  o.require(fixed == 20, "threshold is a fixed point for all random (n, r)");
  o.detail << ", fixed points " << fixed << "/20";
}

// --- 4 ----------------------------------------------------------------------
double modewise_norm(const Grid& grid, double m, double window, int steps) {
  auto eig = [](int cells, double length) {
    const double h = length / cells;
    std::vector<double> out;
    for (int k = 0; k < cells; ++k) out.push_back(4.0 / (h * h) * std::pow(std::sin(kPi * k / (2.0 * cells)), 2));
    return out;
  };
  const double dt = window / steps;
  double best = 0;
  for (double a : eig(grid.cells[0], grid.lengths[0]))
    for (double b : eig(grid.cells[1], grid.lengths[1])) {
      const double mu = a + b;
      if (mu == 0) continue;
      const double rho = 1.0 / (1.0 + dt * m * mu);
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
      for (int k = 0; k < steps; ++k)
        for (int j = 0; j <= k; ++j) T(k, j) = mu * dt * std::pow(rho, k - j + 1);
      best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXd>(T).singularValues()(0));
    }
  return best;
}

double dense_norm(const HeatSolutionOperator& op) {
  const std::size_t n = op.size();
  Eigen::MatrixXd T(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) T(i, j) = col[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.transpose() * T, Eigen::EigenvaluesOnly);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

void quasi_uniform(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(1e-3, 1e3);
  std::uniform_int_distribution<int> un(1, 5);
  int r1 = 0;
  for (int k = 0; k < 100; ++k) {
    double a = ud(rng), b = ud(rng);
    if (a > b) std::swap(a, b);
    r1 += check_quasi_uniform({un(rng), 1, a, b, 2.0, 0.0}).verdict == Verdict::Holds;
  }
  o.require(r1 == 100, "r = 1 holds for 100 random diffusion vectors");

  int energy = 0, pairs = 0;
  for (int n : {1, 2}) {
    for (int k = 0; k < 500; ++k, ++pairs) {
      double a = ud(rng), b = ud(rng);
      if (a > b) std::swap(a, b);
      energy += check_quasi_uniform({n, 2, a, b, 2.0, 0.0}).verdict == Verdict::Holds;
    }
  }
  o.require(energy == pairs, "p' = 2 energy route holds for random (A, B)");
  o.detail << " r=1 holds " << r1 << "/100, p'=2 holds " << energy << "/" << pairs;

  const Grid g = Grid::rectangle(1.0, 1.0, 16, 16);
  for (double m : {0.5, 1.0, 2.0}) {
    const MaxRegEstimate est = estimate_maxreg_constant(m, 2.0, g, 5000);
    const double oracle = modewise_norm(g, m, 1.0, MaxRegOptions{}.time_steps);
    o.require(est.value <= 1.0 / m + 1e-6, "estimate below 1/m + 1e-6");
    o.require(std::abs(est.value - oracle) <= 1e-6 * oracle, "estimate matches the mode-wise oracle");
    o.detail << ", m=" << m << ": " << std::setprecision(10) << est.value << " (oracle " << oracle << ")"
             << std::setprecision(6);
  }
  MaxRegOptions coarse;
  coarse.time_steps = 4;
  const HeatSolutionOperator op(g, 1.0, coarse.window, coarse.time_steps);
  const double dense = dense_norm(op);
  const double est = estimate_maxreg_constant(1.0, 2.0, g, 5000, coarse).value;
  o.require(est <= 1.0 + 1e-6, "coarse estimate below 1/m + 1e-6");
  o.require(std::abs(est - dense) <= 1e-6 * dense, "estimate matches the dense oracle");
  o.require(std::abs(dense - modewise_norm(g, 1.0, coarse.window, coarse.time_steps)) <= 1e-10 * dense,
            "dense and mode-wise oracles agree");
  o.detail << ", dense " << std::setprecision(10) << dense << " vs " << est << std::setprecision(6);
  o.require(seconds_since(t0) < 30.0, "under 30 s");
}

// --- 5 ----------------------------------------------------------------------
ReactionNetwork heat(double d) {
  ReactionNetwork net;
  net.species = {"U"};
  net.diffusion = {Rational(d)};
  return net;
}

double cosine_amplitude(const SimState& st) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < st.fields[0].size(); ++i) {
    const double c = std::cos(kPi * st.grid.center(0, static_cast<int>(i)) / st.grid.lengths[0]);
    num += st.fields[0][i] * c;
    den += c * c;
  }
  return num / den;
}

void solver(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const int N = 128;
  const double dt = 1e-4, t = 0.1;
  SimState st = init_state(Grid::line(1.0, N), {Profile::cosine(1, 1)});
  const int steps = static_cast<int>(std::lround(t / dt));
  for (int k = 0; k < steps; ++k) st = diffusion_step(st, heat(1.0), dt);
  const double h = 1.0 / N;
  const double mu = 4.0 / (h * h) * std::pow(std::sin(kPi / (2.0 * N)), 2);
  const double discrete = std::pow(1.0 + dt * mu, -steps);
  const double amp = cosine_amplitude(st);
  o.require(std::abs(amp - discrete) <= 1e-3, "amplitude matches the discrete eigenvalue oracle");
  o.require(std::abs(amp - std::exp(-kPi * kPi * t)) <= 1e-3, "amplitude matches the continuous decay");
  o.detail << " amplitude " << std::setprecision(8) << amp << " oracle " << discrete << std::setprecision(6);

  // Each backward-Euler step scales the mode by 1/(1 + dt mu_h); the error of
  // mu_h against pi^2 is purely spatial.
  std::vector<double> errors;
  for (int cells : {16, 32, 64, 128}) {
    const SimState s0 = init_state(Grid::line(1.0, cells), {Profile::cosine(1, 1)});
    const SimState s1 = diffusion_step(s0, heat(1.0), 1e-3);
    const double mu_h = (cosine_amplitude(s0) / cosine_amplitude(s1) - 1.0) / 1e-3;
    errors.push_back(std::abs(mu_h - kPi * kPi));
  }
  o.detail << ", orders";
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double order = std::log2(errors[k] / errors[k + 1]);
    o.detail << " " << std::setprecision(4) << order << std::setprecision(6);
    o.require(order >= 1.9, "spatial order at least 1.9");
  }
  o.require(seconds_since(t0) < 60.0, "under 60 s");
}

// --- 6 ----------------------------------------------------------------------
void conservation_entropy(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  {
    const RunConfig cfg = load_run_config(config_path("s1.cfg"));
    const NetworkFile file = parse_network_file(cfg.network_text);
    const SimulationOutput out = run_simulation(cfg, file.network);
    const auto mass = mass_series(out.trace, {1.0, 1.0, 2.0});
    double drift = 0;
    for (double v : mass) drift = std::max(drift, std::abs(v - mass.front()) / mass.front());
    o.require(cfg.grid.dim == 1 && cfg.grid.cells[0] == 64 && cfg.horizon == 50, "S1 run at 1D, 64 cells, t = 50");
    o.require(drift <= 1e-6, "S1 relative mass drift at most 1e-6");
    o.require(out.summary.mass_drift <= 1e-6, "summary mass drift at most 1e-6");
    o.detail << " S1 drift " << drift;
  }
  {
    RunConfig cfg = load_run_config(config_path("s3.cfg"));
    cfg.cadence = cfg.step.dt;
    const NetworkFile file = parse_network_file(cfg.network_text);
    const SimulationOutput out = run_simulation(cfg, file.network);
    const auto ent = entropy_series(out.trace, std::vector<double>(3, 1.0));
    double uptick = 0;
    for (std::size_t k = 1; k < ent.size(); ++k) uptick = std::max(uptick, ent[k] - ent[k - 1]);
    o.require(out.trace.samples.size() == out.trace.steps + 1, "S3 sampled every step");
    o.require(uptick <= 1e-8, "S3 entropy increase per step at most 1e-8");
    o.detail << ", S3 steps " << out.trace.steps << ", entropy " << ent.front() << " -> " << ent.back()
             << ", largest per-step increase " << uptick;
  }
  o.require(seconds_since(t0) < 120.0, "under 120 s");
}

// --- 7 ----------------------------------------------------------------------
void boundedness(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load_run_config(config_path("reversible.cfg"));
  o.require(cfg.grid.dim == 2 && cfg.grid.cells[0] == 64 && cfg.grid.cells[1] == 64 && cfg.horizon == 100,
            "reversible run on 64 x 64 to t = 100");
  const NetworkFile file = parse_network_file(cfg.network_text);
  SimulationOutput out;
  try {
    out = run_simulation(cfg, file.network);
  } catch (const BlowupDetected& e) {
    o.require(false, std::string("no blow-up: ") + e.what());
    return;
  }
  const auto t = sample_times(out.trace);
  for (std::size_t i = 0; i < file.network.species.size(); ++i) {
    const auto sup = running_sup_norm(out.trace, i);
    const PlateauCheck pc = check_plateau(t, sup, 1e-6);
    o.require(pc.plateau, "running sup plateaus for " + file.network.species[i]);
    const auto cyl = cylinder_norm_series(out.trace, i, 2.0, 1.0);
    o.require(cyl.size() == 100, "cylinder windows tau = 0..99");
    const auto [lo, hi] = std::minmax_element(cyl.begin(), cyl.end());
    o.detail << " " << file.network.species[i] << ": sup early " << pc.early_max << " late " << pc.late_max
             << ", cylinder L2 max/min " << *hi << "/" << *lo << " = " << *hi / *lo << ";";
  }
  o.require(seconds_since(t0) < 600.0, "under 10 min");
}

// --- 8 ----------------------------------------------------------------------
void equilibration(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"s1.cfg", "cycle.cfg"}) {
    const RunConfig cfg = load_run_config(config_path(name));
    const NetworkFile file = parse_network_file(cfg.network_text);
    const SimState init = init_state(cfg.grid, profiles_for(cfg, file.network), cfg.seed);
    o.require(*std::min_element(init.fields[1].begin(), init.fields[1].end()) >= 0.1,
              std::string(name) + " second species starts at least 0.1");
    const SimulationOutput out = run_simulation(cfg, file.network);
    const auto& fit = out.summary.decay_l1;
    o.require(fit.has_value(), std::string(name) + " L1 decay fitted");
    if (!fit) continue;
    o.require(fit->lambda > 0 && fit->r_squared >= 0.99, std::string(name) + " lambda > 0 with r^2 >= 0.99");
    o.detail << " " << name << ": lambda " << fit->lambda << ", r^2 " << fit->r_squared << ";";
  }
  const ReactionNetwork ex5 = load_network("cycle.crn").network;
  const EquilibriumResult eq = solve_equilibrium(ex5, conservation_basis(ex5), {4.0});
  double err = 0;
  for (double v : eq.u_inf) err = std::max(err, std::abs(v - 1.0));
  o.require(eq.u_inf.size() == 3 && err <= 1e-10, "equilibrium (1,1,1) to 1e-10");
  o.detail << " equilibrium error " << err;
  o.require(seconds_since(t0) < 300.0, "under 5 min");
}

// --- 9 ----------------------------------------------------------------------
void determinism(Outcome& o) {
  const fs::path base = fs::temp_directory_path() / "rdnet-acceptance-determinism";
  fs::remove_all(base);
  std::string traces[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = base / std::to_string(k);
    const std::string cmd = std::string("\"") + RDNET_CLI_PATH + "\" simulate \"" + config_path("s2.cfg") +
                            "\" --output \"" + dir.string() + "\" > /dev/null";
    o.require(std::system(cmd.c_str()) == 0, "simulate exits 0");
    traces[k] = read_text_file(dir / "trace.csv");
  }
  o.require(!traces[0].empty() && traces[0] == traces[1], "byte-identical trace.csv");
  o.detail << " " << traces[0].size() << " bytes, identical " << (traces[0] == traces[1] ? "yes" : "no");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"certificate reproduction", certificates},
      {"mass certificates", mass_certificates},
      {"ladder", ladder_checks},
      {"quasi-uniform", quasi_uniform},
      {"solver correctness", solver},
      {"conservation and entropy", conservation_entropy},
      {"uniform-in-time boundedness", boundedness},
      {"exponential equilibration", equilibration},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << k + 1 << " " << criteria[k].first << " ("
              << std::fixed << std::setprecision(2) << secs << "s):" << std::defaultfloat << o.detail.str()
              << std::endl;
  }
  std::cout << (failures ? "FAILED " : "all passed ") << criteria.size() - failures << "/" << criteria.size()
            << std::endl;
  return failures ? 1 : 0;
}
