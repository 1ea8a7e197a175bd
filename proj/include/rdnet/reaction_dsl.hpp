#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdnet/error.hpp"
#include "rdnet/netmodel.hpp"

namespace rdnet {

/// Rejection raised by parse_network. `line` and `column` are 1-based and
/// point at the offending source text.
class ParseError : public Error {
 public:
  enum class Kind {
    SyntaxError,
    UndeclaredSpecies,
    DuplicateSpecies,
    ZeroNetStoichiometry,
    NonpositiveRate,
    NonpositiveDiffusion,
    StoichiometryRange,
    BadHint,
  };

  ParseError(Kind kind, int line, int column, std::string detail);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string detail_;
};

const char* to_string(ParseError::Kind kind);

/// Candidate intermediate-sum matrix supplied in a hints block. Rows are given
/// in declared species order; entry (k, j) with j > k must be zero.
struct IntermediateHint {
  int r = 1;
  std::vector<std::vector<Rational>> rows;
  bool operator==(const IntermediateHint&) const = default;
};

struct NetworkFile {
  ReactionNetwork network;
  std::optional<IntermediateHint> intermediate_hint;
  bool operator==(const NetworkFile&) const = default;
};

/// Grammar (whitespace-insensitive, '#' starts a comment):
///
///   file     := species* reaction* hint*
///   species  := "species" NAME "d=" NUMBER
///   reaction := side ("->" | "<->") side "@" NUMBER ["," NUMBER]
///   side     := "0" | term ("+" term)*
///   term     := [INT] NAME
///   hint     := "hint" "intermediate" "r=" INT ":" row (";" row)*
///   NUMBER   := decimal literal, optional exponent, or INT "/" INT
///
/// "<->" requires forward and backward rates, "->" exactly one. Stoichiometric
/// coefficients are limited to 1..64 per complex entry.
NetworkFile parse_network_file(std::string_view text);
ReactionNetwork parse_network(std::string_view text);

/// Canonical DSL text; parse_network(pretty_print(net)) == net.
std::string pretty_print(const ReactionNetwork& net);
std::string pretty_print(const NetworkFile& file);

inline constexpr int kMaxStoichiometry = 64;

}  // namespace rdnet
