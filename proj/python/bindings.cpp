// Python bindings: thin wrappers returning plain dicts, lists and JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "rdnet/config.hpp"
#include "rdnet/ladder.hpp"
#include "rdnet/pipeline.hpp"
#include "rdnet/reaction_dsl.hpp"
#include "rdnet/report.hpp"
#include "rdnet/structural.hpp"

namespace py = pybind11;
using namespace rdnet;

namespace {

py::dict network_dict(const NetworkFile& file) {
  const ReactionNetwork& net = file.network;
  py::list reactions;
  for (const auto& r : net.reactions) {
    py::dict d;
    d["reactant"] = r.reactant;
    d["product"] = r.product;
    d["rate_forward"] = r.rate_forward.get_d();
    d["rate_backward"] = r.rate_backward.get_d();
    reactions.append(d);
  }
  py::dict out;
  out["species"] = net.species;
  out["diffusion"] = net.diffusion_values();
  out["reactions"] = reactions;
  if (file.intermediate_hint) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : file.intermediate_hint->rows) {
      rows.emplace_back();
      for (const auto& q : row) rows.back().push_back(q.get_d());
    }
    out["hint"] = py::dict(py::arg("r") = file.intermediate_hint->r, py::arg("rows") = rows);
  }
  return out;
}

std::string analyze_text(const std::string& text, int n, int samples) {
  const NetworkFile file = parse_network_file(text);
  AnalyzeOptions opts;
  opts.n = n;
  opts.entropy.samples = samples;
  const StructuralReport rep =
      analyze(file.network, opts, file.intermediate_hint ? std::optional(file.intermediate_hint->rows) : std::nullopt,
              file.intermediate_hint ? file.intermediate_hint->r : 0);
  nlohmann::json j = to_json(rep, file.network);
  j["config_hash"] = fnv1a_hex(text);
  j["seed"] = 0;
  return j.dump();
}

std::string simulate_config(const std::string& path, std::optional<std::string> output,
                            std::optional<double> horizon, std::optional<std::uint64_t> seed) {
  RunConfig cfg = load_run_config(path);
  if (horizon) cfg.horizon = *horizon;
  if (seed) cfg.seed = *seed;
  if (horizon || seed) cfg.text += "\n#override seed=" + std::to_string(cfg.seed) + " horizon=" + std::to_string(cfg.horizon);
  const NetworkFile file = parse_network_file(cfg.network_text);
  SimulationOutput out;
  {
    py::gil_scoped_release release;
    out = run_simulation(cfg, file.network);
  }
  if (output) write_simulation_outputs(*output, out, cfg);
  nlohmann::json j;
  j["config_hash"] = out.config_hash;
  j["seed"] = cfg.seed;
  j["simulation"] = to_json(out.summary);
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_rdnet, m) {
  m.doc() = "rdnet core bindings";
  m.attr("__version__") = version();

  // translators run newest first, so the base class goes in first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("parse", [](const std::string& text) { return network_dict(parse_network_file(text)); }, py::arg("text"));
  m.def("pretty_print", [](const std::string& text) { return pretty_print(parse_network_file(text)); },
        py::arg("text"), "Canonical DSL text of a network file.");
  m.def("analyze_json", &analyze_text, py::arg("text"), py::arg("n") = 2,
        py::arg("samples") = EntropyOptions{}.samples);

  m.def(
      "ladder",
      [](int n, double r, double p0) {
        const LadderResult res = ladder({n, r, p0});
        py::dict d;
        d["sequence"] = res.sequence;
        d["N0"] = res.N0;
        d["verdict"] = to_string(res.verdict);
        return d;
      },
      py::arg("n"), py::arg("r"), py::arg("p0"));
  m.def("ladder_threshold", &ladder_threshold, py::arg("n"), py::arg("r"));

  m.def(
      "quasi_uniform",
      [](int n, int r, double dmin, double dmax, double p_prime, double c_estimate) {
        const QuasiUniformResult res = check_quasi_uniform({n, r, dmin, dmax, p_prime, c_estimate});
        py::dict d;
        d["verdict"] = to_string(res.verdict);
        d["margin"] = res.margin;
        d["route"] = res.route;
        return d;
      },
      py::arg("n"), py::arg("r"), py::arg("dmin"), py::arg("dmax"), py::arg("p_prime") = 2.0,
      py::arg("c_estimate") = 0.0);

  m.def(
      "maxreg_constant",
      [](double m_diff, double p_prime, int cells, int dim, int steps) {
        const Grid g = dim == 1 ? Grid::line(1.0, cells) : Grid::rectangle(1.0, 1.0, cells, cells);
        py::gil_scoped_release release;
        return estimate_maxreg_constant(m_diff, p_prime, g, steps).value;
      },
      py::arg("m_diff"), py::arg("p_prime") = 2.0, py::arg("cells") = 16, py::arg("dim") = 2,
      py::arg("steps") = 5000);

  m.def("simulate_json", &simulate_config, py::arg("config"), py::arg("output") = std::nullopt,
        py::arg("horizon") = std::nullopt, py::arg("seed") = std::nullopt);

  m.def(
      "equilibrium",
      [](const std::string& config, std::optional<std::vector<double>> totals) {
        const RunConfig cfg = load_run_config(config);
        const NetworkFile file = parse_network_file(cfg.network_text);
        const EquilibriumResult eq = totals ? solve_equilibrium(file.network, conservation_basis(file.network), *totals)
                                            : equilibrium_for_config(cfg, file.network);
        return eq.u_inf;
      },
      py::arg("config"), py::arg("totals") = std::nullopt);
}
