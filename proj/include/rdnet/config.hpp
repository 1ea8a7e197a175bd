#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdnet/error.hpp"
#include "rdnet/grid.hpp"
#include "rdnet/netmodel.hpp"
#include "rdnet/pde.hpp"

namespace rdnet {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Run description read from a sectioned key=value file:
///
///   [network]   file = path (relative to the config file)
///   [grid]      dim = 1|2, lengths = L [Ly], cells = N [Ny]
///   [initial]   <species> = const v | cosine mean amp | random lo hi;
///               default = ... applies to unlisted species
///   [step]      dt, mode = splitting|imex, reaction_substeps,
///               positivity = clip_report|reject_retry
///   [run]       horizon, cadence, output, seed, snapshot_every (samples, 0 = off)
///   [diagnostics] dist_p, powers = p1 p2 ..., equilibrium = auto|none,
///               entropy = auto|ones, t_start (fraction of the horizon)
struct RunConfig {
  std::filesystem::path source;
  std::filesystem::path network_file;
  Grid grid;
  std::map<std::string, Profile> initial;
  std::optional<Profile> default_profile;
  StepControl step;
  double horizon = 1.0;
  double cadence = 0.1;
  std::filesystem::path output = "rdnet-out";
  std::uint64_t seed = 0;
  int snapshot_every = 0;
  double dist_p = 2.0;
  std::vector<double> powers{1.0, 2.0};
  bool equilibrium = true;
  bool entropy_auto = true;
  double t_start_fraction = 0.2;
  /// Raw text of the config and of the network file, used for the hash.
  std::string text;
  std::string network_text;
};

/// Parses config text; relative network paths resolve against base_dir.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

/// Reads and parses a config file, then loads the network file text.
RunConfig load_run_config(const std::filesystem::path& path);

/// Profiles in network species order. Throws ConfigError when a species has
/// no profile and there is no default, or a profile names an unknown species.
std::vector<Profile> profiles_for(const RunConfig& cfg, const ReactionNetwork& net);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Hash of config text and network text.
std::string config_hash(const RunConfig& cfg);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rdnet
