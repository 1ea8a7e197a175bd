#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "rdnet/netmodel.hpp"
#include "rdnet/reaction_dsl.hpp"

namespace fixtures {

inline std::string config_path(const std::string& name) { return std::string(RDNET_CONFIG_DIR) + "/" + name; }

inline std::string read(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline rdnet::NetworkFile load(const std::string& name) { return rdnet::parse_network_file(read(config_path(name))); }

/// p S1 + q S2 <-> l S3 with unit rates and d = (1, 2, 3).
inline rdnet::ReactionNetwork reversible(int p, int q, int l) {
  rdnet::ReactionNetwork net;
  net.species = {"S1", "S2", "S3"};
  net.diffusion = {1, 2, 3};
  net.reactions.push_back({{p, q, 0}, {0, 0, l}, 1, 1});
  return net;
}

/// A + k B <-> B + C with unit rates.
inline rdnet::ReactionNetwork s1(int k) {
  rdnet::ReactionNetwork net;
  net.species = {"A", "B", "C"};
  net.diffusion = {1, 2, 3};
  net.reactions.push_back({{1, k, 0}, {0, 1, 1}, 1, 1});
  return net;
}

/// S1 + q S2 -> (q+1) S2 -> S3 -> S1 + q S2 with unit rates.
inline rdnet::ReactionNetwork cycle(int q) {
  rdnet::ReactionNetwork net;
  net.species = {"S1", "S2", "S3"};
  net.diffusion = {1, 2, 3};
  net.reactions.push_back({{1, q, 0}, {0, q + 1, 0}, 1, 0});
  net.reactions.push_back({{0, q + 1, 0}, {0, 0, 1}, 1, 0});
  net.reactions.push_back({{0, 0, 1}, {1, q, 0}, 1, 0});
  return net;
}

/// Random valid network: 1..4 species, 0..4 reactions, coefficients 0..3.
inline rdnet::ReactionNetwork random_network(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> species_count(1, 4), reaction_count(0, 4), coeff(0, 3), num(1, 9), den(1, 4),
      coin(0, 1);
  rdnet::ReactionNetwork net;
  const int m = species_count(rng);
  for (int i = 0; i < m; ++i) {
    net.species.push_back("X" + std::to_string(i));
    net.diffusion.emplace_back(num(rng), den(rng));
    net.diffusion.back().canonicalize();
  }
  const int reactions = reaction_count(rng);
  while (static_cast<int>(net.reactions.size()) < reactions) {
    rdnet::Reaction rx;
    for (int i = 0; i < m; ++i) {
      rx.reactant.push_back(coeff(rng));
      rx.product.push_back(coeff(rng));
    }
    if (rx.reactant == rx.product) continue;
    rx.rate_forward = rdnet::Rational(num(rng), den(rng));
    rx.rate_forward.canonicalize();
    rx.rate_backward = coin(rng) ? rdnet::Rational(num(rng), den(rng)) : rdnet::Rational(0);
    rx.rate_backward.canonicalize();
    net.reactions.push_back(rx);
  }
  return net;
}

}  // namespace fixtures
