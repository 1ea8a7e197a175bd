#include "rdnet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rdnet {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_number(const std::string& key, const std::string& word) {
  try {
    std::size_t used = 0;
    const double v = std::stod(word, &used);
    if (used == word.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": not a number: '" + word + "'");
}

std::vector<double> numbers(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& w : words(value)) out.push_back(to_number(key, w));
  return out;
}

Profile parse_profile(const std::string& key, const std::string& value) {
  const auto w = words(value);
  if (w.empty()) throw ConfigError(key + ": empty profile");
  auto arg = [&](std::size_t i) { return to_number(key, w[i]); };
  if (w[0] == "const" && w.size() == 2) return Profile::constant(arg(1));
  if (w[0] == "cosine" && w.size() == 3) return Profile::cosine(arg(1), arg(2));
  if (w[0] == "random" && w.size() == 3) return Profile::random(arg(1), arg(2));
  if (w.size() == 1) return Profile::constant(arg(0));
  throw ConfigError(key + ": expected 'const v', 'cosine mean amp' or 'random lo hi'");
}

void check_keys(const pt::ptree& tree) {
  static const std::map<std::string, std::set<std::string>> allowed{
      {"network", {"file"}},
      {"grid", {"dim", "lengths", "cells"}},
      {"step", {"dt", "mode", "reaction_substeps", "positivity"}},
      {"run", {"horizon", "cadence", "output", "seed", "snapshot_every"}},
      {"diagnostics", {"dist_p", "powers", "equilibrium", "entropy", "t_start"}},
  };
  for (const auto& [section, body] : tree) {
    if (section == "initial") continue;
    auto it = allowed.find(section);
    if (it == allowed.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, _] : body)
      if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  check_keys(tree);
  RunConfig cfg;
  cfg.text = text;
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '/')); };
  auto number = [&](const std::string& path, double fallback) {
    auto v = get(path);
    return v ? to_number(path, *v) : fallback;
  };

  const auto file = get("network/file");
  if (!file) throw ConfigError("missing [network] file");
  cfg.network_file = base_dir / *file;

  const int dim = static_cast<int>(number("grid/dim", 1));
  std::vector<double> lengths = get("grid/lengths") ? numbers("grid/lengths", *get("grid/lengths")) : std::vector<double>{};
  std::vector<double> cells = get("grid/cells") ? numbers("grid/cells", *get("grid/cells")) : std::vector<double>{};
  if (lengths.empty()) lengths.assign(static_cast<std::size_t>(std::max(dim, 1)), 1.0);
  if (cells.empty()) cells.assign(static_cast<std::size_t>(std::max(dim, 1)), 32.0);
  if (dim == 2) {
    if (lengths.size() == 1) lengths.push_back(lengths[0]);
    if (cells.size() == 1) cells.push_back(cells[0]);
  }
  if (dim != 1 && dim != 2) throw ConfigError("grid/dim must be 1 or 2");
  if (lengths.size() != static_cast<std::size_t>(dim) || cells.size() != static_cast<std::size_t>(dim))
    throw ConfigError("grid: lengths and cells need one entry per axis");
  cfg.grid = dim == 1 ? Grid::line(lengths[0], static_cast<int>(cells[0]))
                      : Grid::rectangle(lengths[0], lengths[1], static_cast<int>(cells[0]), static_cast<int>(cells[1]));
  try {
    cfg.grid.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  if (auto init = tree.get_child_optional("initial")) {
    for (const auto& [key, node] : *init) {
      Profile p = parse_profile("initial/" + key, node.data());
      if (key == "default")
        cfg.default_profile = p;
      else
        cfg.initial[key] = p;
    }
  }

  cfg.step.dt = number("step/dt", cfg.step.dt);
  if (auto mode = get("step/mode")) {
    if (*mode == "splitting")
      cfg.step.mode = StepMode::Splitting;
    else if (*mode == "imex")
      cfg.step.mode = StepMode::Imex;
    else
      throw ConfigError("step/mode must be splitting or imex");
  }
  cfg.step.reaction_substeps = static_cast<int>(number("step/reaction_substeps", cfg.step.reaction_substeps));
  if (auto pos = get("step/positivity")) {
    if (*pos == "clip_report")
      cfg.step.positivity = PositivityMode::ClipReport;
    else if (*pos == "reject_retry")
      cfg.step.positivity = PositivityMode::RejectRetry;
    else
      throw ConfigError("step/positivity must be clip_report or reject_retry");
  }
  try {
    cfg.step.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("step: ") + e.what());
  }

  cfg.horizon = number("run/horizon", cfg.horizon);
  cfg.cadence = number("run/cadence", cfg.cadence);
  if (auto out = get("run/output")) cfg.output = *out;
  cfg.seed = static_cast<std::uint64_t>(number("run/seed", 0));
  cfg.snapshot_every = static_cast<int>(number("run/snapshot_every", 0));
  if (!(cfg.horizon >= 0)) throw ConfigError("run/horizon must be nonnegative");
  if (!(cfg.cadence > 0)) throw ConfigError("run/cadence must be positive");

  cfg.dist_p = number("diagnostics/dist_p", cfg.dist_p);
  if (auto pw = get("diagnostics/powers")) cfg.powers = numbers("diagnostics/powers", *pw);
  if (auto eq = get("diagnostics/equilibrium")) {
    if (*eq != "auto" && *eq != "none") throw ConfigError("diagnostics/equilibrium must be auto or none");
    cfg.equilibrium = *eq == "auto";
  }
  if (auto en = get("diagnostics/entropy")) {
    if (*en != "auto" && *en != "ones") throw ConfigError("diagnostics/entropy must be auto or ones");
    cfg.entropy_auto = *en == "auto";
  }
  cfg.t_start_fraction = number("diagnostics/t_start", cfg.t_start_fraction);
  if (!(cfg.dist_p >= 1)) throw ConfigError("diagnostics/dist_p must be at least 1");
  for (double p : cfg.powers)
    if (!(p >= 1)) throw ConfigError("diagnostics/powers must be at least 1");
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg = parse_run_config(read_text_file(path), path.parent_path());
  cfg.source = path;
  cfg.network_text = read_text_file(cfg.network_file);
  return cfg;
}

std::vector<Profile> profiles_for(const RunConfig& cfg, const ReactionNetwork& net) {
  for (const auto& [name, _] : cfg.initial)
    if (std::find(net.species.begin(), net.species.end(), name) == net.species.end())
      throw ConfigError("initial profile for unknown species '" + name + "'");
  std::vector<Profile> out;
  for (const auto& name : net.species) {
    if (auto it = cfg.initial.find(name); it != cfg.initial.end())
      out.push_back(it->second);
    else if (cfg.default_profile)
      out.push_back(*cfg.default_profile);
    else
      throw ConfigError("no initial profile for species '" + name + "'");
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(cfg.text + '\0' + cfg.network_text); }

}  // namespace rdnet
