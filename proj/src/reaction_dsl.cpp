#include "rdnet/reaction_dsl.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace rdnet {

ParseError::ParseError(Kind kind, int line, int column, std::string detail)
    : Error(std::string(to_string(kind)) + " at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + detail),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(std::move(detail)) {}

const char* to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::SyntaxError: return "SyntaxError";
    case ParseError::Kind::UndeclaredSpecies: return "UndeclaredSpecies";
    case ParseError::Kind::DuplicateSpecies: return "DuplicateSpecies";
    case ParseError::Kind::ZeroNetStoichiometry: return "ZeroNetStoichiometry";
    case ParseError::Kind::NonpositiveRate: return "NonpositiveRate";
    case ParseError::Kind::NonpositiveDiffusion: return "NonpositiveDiffusion";
    case ParseError::Kind::StoichiometryRange: return "StoichiometryRange";
    case ParseError::Kind::BadHint: return "BadHint";
  }
  return "ParseError";
}

namespace {

enum class Tok { Name, Number, Arrow, BiArrow, Plus, At, Comma, Colon, Semi, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  int column;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Name: return "name";
    case Tok::Number: return "number";
    case Tok::Arrow: return "'->'";
    case Tok::BiArrow: return "'<->'";
    case Tok::Plus: return "'+'";
    case Tok::At: return "'@'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Eq: return "'='";
    case Tok::End: return "end of line";
  }
  return "token";
}

std::vector<Token> lex_line(std::string_view line, int line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&](std::size_t pos) { return static_cast<int>(pos) + 1; };
  auto is_digit = [&](std::size_t pos) {
    return pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]));
  };
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
      out.push_back({Tok::Name, std::string(line.substr(start, i - start)), col(start)});
    } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && is_digit(i + 1))) {
      while (is_digit(i)) ++i;
      if (i < line.size() && line[i] == '.') {
        ++i;
        while (is_digit(i)) ++i;
      }
      if (i < line.size() && (line[i] == 'e' || line[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < line.size() && (line[j] == '+' || line[j] == '-')) ++j;
        if (is_digit(j)) {
          i = j;
          while (is_digit(i)) ++i;
        }
      }
      if (i < line.size() && line[i] == '/' && is_digit(i + 1)) {
        ++i;
        while (is_digit(i)) ++i;
      }
      out.push_back({Tok::Number, std::string(line.substr(start, i - start)), col(start)});
    } else if (line.substr(i, 3) == "<->") {
      out.push_back({Tok::BiArrow, "<->", col(start)});
      i += 3;
    } else if (line.substr(i, 2) == "->") {
      out.push_back({Tok::Arrow, "->", col(start)});
      i += 2;
    } else {
      Tok kind;
      switch (c) {
        case '+': kind = Tok::Plus; break;
        case '@': kind = Tok::At; break;
        case ',': kind = Tok::Comma; break;
        case ':': kind = Tok::Colon; break;
        case ';': kind = Tok::Semi; break;
        case '=': kind = Tok::Eq; break;
        default:
          throw ParseError(ParseError::Kind::SyntaxError, line_no, col(start),
                           std::string("unexpected character '") + c + "'");
      }
      out.push_back({kind, std::string(1, c), col(start)});
      ++i;
    }
  }
  out.push_back({Tok::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line_no) : toks_(std::move(toks)), line_(line_no) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool at_name(std::string_view name) const { return at(Tok::Name) && peek().text == name; }

  const Token& expect(Tok t) {
    if (!at(t)) fail_expected(describe(t));
    return toks_[pos_++];
  }
  void expect_name(std::string_view name) {
    if (!at_name(name)) fail_expected(std::string("'") + std::string(name) + "'");
    ++pos_;
  }
  [[noreturn]] void fail_expected(const std::string& what) const {
    std::string found = at(Tok::End) ? "end of line" : "'" + peek().text + "'";
    throw ParseError(ParseError::Kind::SyntaxError, line_, peek().column, "expected " + what + ", found " + found);
  }

  Rational number(ParseError::Kind positive_kind, const char* what) {
    const Token& t = expect(Tok::Number);
    Rational q = parse_rational(t.text);
    if (q <= 0) throw ParseError(positive_kind, line_, t.column, std::string(what) + " must be positive");
    return q;
  }

  int line() const { return line_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

std::vector<int> parse_side(LineParser& p, const std::map<std::string, std::size_t>& index, std::size_t m) {
  std::vector<int> stoich(m, 0);
  if (p.at(Tok::Number) && p.peek().text == "0") {
    p.expect(Tok::Number);
    if (!p.at(Tok::Name)) return stoich;  // empty complex
    throw ParseError(ParseError::Kind::StoichiometryRange, p.line(), p.peek().column,
                     "stoichiometric coefficient must lie in 1.." + std::to_string(kMaxStoichiometry));
  }
  while (true) {
    int coeff = 1;
    if (p.at(Tok::Number)) {
      const Token& t = p.expect(Tok::Number);
      bool integral = !t.text.empty();
      for (char c : t.text) integral = integral && std::isdigit(static_cast<unsigned char>(c));
      if (!integral) throw ParseError(ParseError::Kind::SyntaxError, p.line(), t.column, "stoichiometric coefficient must be an integer");
      if (t.text.size() > 3 || std::stoi(t.text) < 1 || std::stoi(t.text) > kMaxStoichiometry)
        throw ParseError(ParseError::Kind::StoichiometryRange, p.line(), t.column,
                         "stoichiometric coefficient must lie in 1.." + std::to_string(kMaxStoichiometry));
      coeff = std::stoi(t.text);
    }
    const Token& name = p.expect(Tok::Name);
    auto it = index.find(name.text);
    if (it == index.end())
      throw ParseError(ParseError::Kind::UndeclaredSpecies, p.line(), name.column, "species '" + name.text + "' is not declared");
    stoich[it->second] += coeff;
    if (stoich[it->second] > kMaxStoichiometry)
      throw ParseError(ParseError::Kind::StoichiometryRange, p.line(), name.column,
                       "combined coefficient of '" + name.text + "' exceeds " + std::to_string(kMaxStoichiometry));
    if (!p.at(Tok::Plus)) break;
    p.expect(Tok::Plus);
  }
  return stoich;
}

}  // namespace

NetworkFile parse_network_file(std::string_view text) {
  NetworkFile file;
  ReactionNetwork& net = file.network;
  std::map<std::string, std::size_t> index;
  enum class Section { Species, Reactions, Hints } section = Section::Species;

  std::size_t start = 0;
  int line_no = 0;
  int hint_line = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;

    LineParser p(lex_line(line, line_no), line_no);
    if (p.at(Tok::End)) {
      if (end == text.size()) break;
      continue;
    }

    if (p.at_name("species")) {
      if (section != Section::Species)
        throw ParseError(ParseError::Kind::SyntaxError, line_no, p.peek().column, "species must be declared before reactions");
      p.expect_name("species");
      const Token name = p.expect(Tok::Name);
      if (index.contains(name.text))
        throw ParseError(ParseError::Kind::DuplicateSpecies, line_no, name.column, "species '" + name.text + "' declared twice");
      p.expect_name("d");
      p.expect(Tok::Eq);
      Rational d = p.number(ParseError::Kind::NonpositiveDiffusion, "diffusion coefficient");
      p.expect(Tok::End);
      index.emplace(name.text, net.species.size());
      net.species.push_back(name.text);
      net.diffusion.push_back(d);
    } else if (p.at_name("hint")) {
      section = Section::Hints;
      p.expect_name("hint");
      p.expect_name("intermediate");
      p.expect_name("r");
      p.expect(Tok::Eq);
      const Token& rt = p.expect(Tok::Number);
      IntermediateHint hint;
      try {
        hint.r = std::stoi(rt.text);
      } catch (const std::exception&) {
        throw ParseError(ParseError::Kind::BadHint, line_no, rt.column, "r must be a positive integer");
      }
      if (hint.r < 1 || rt.text.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError(ParseError::Kind::BadHint, line_no, rt.column, "r must be a positive integer");
      p.expect(Tok::Colon);
      const std::size_t m = net.species.size();
      hint.rows.emplace_back();
      while (!p.at(Tok::End)) {
        if (p.at(Tok::Semi)) {
          p.expect(Tok::Semi);
          hint.rows.emplace_back();
          continue;
        }
        const Token& t = p.expect(Tok::Number);
        hint.rows.back().push_back(parse_rational(t.text));
      }
      if (hint.rows.size() != m)
        throw ParseError(ParseError::Kind::BadHint, line_no, 1, "matrix must have one row per species");
      for (const auto& row : hint.rows)
        if (row.size() != m) throw ParseError(ParseError::Kind::BadHint, line_no, 1, "matrix rows must have one entry per species");
      file.intermediate_hint = std::move(hint);
      hint_line = line_no;
    } else {
      if (section == Section::Hints)
        throw ParseError(ParseError::Kind::SyntaxError, line_no, p.peek().column, "reactions must precede hints");
      section = Section::Reactions;
      const std::size_t m = net.species.size();
      Reaction rx;
      rx.reactant = parse_side(p, index, m);
      bool reversible;
      if (p.at(Tok::Arrow)) {
        reversible = false;
        p.expect(Tok::Arrow);
      } else if (p.at(Tok::BiArrow)) {
        reversible = true;
        p.expect(Tok::BiArrow);
      } else {
        p.fail_expected("'->' or '<->'");
      }
      rx.product = parse_side(p, index, m);
      if (!p.at(Tok::At)) p.fail_expected("'@'");
      const int at_column = p.expect(Tok::At).column;
      if (rx.reactant == rx.product)
        throw ParseError(ParseError::Kind::ZeroNetStoichiometry, line_no, at_column, "reactant and product complexes are identical");
      rx.rate_forward = p.number(ParseError::Kind::NonpositiveRate, "forward rate");
      if (reversible) {
        p.expect(Tok::Comma);
        rx.rate_backward = p.number(ParseError::Kind::NonpositiveRate, "backward rate");
      } else if (p.at(Tok::Comma)) {
        throw ParseError(ParseError::Kind::SyntaxError, line_no, p.peek().column, "irreversible reaction '->' takes a single rate");
      }
      p.expect(Tok::End);
      net.reactions.push_back(std::move(rx));
    }
    if (end == text.size()) break;
  }
  if (file.intermediate_hint) {
    const auto& rows = file.intermediate_hint->rows;
    for (std::size_t k = 0; k < rows.size(); ++k)
      for (std::size_t j = k + 1; j < rows.size(); ++j)
        if (rows[k][j] != 0) throw ParseError(ParseError::Kind::BadHint, hint_line, 1, "hint matrix must be lower triangular");
  }
  return file;
}

ReactionNetwork parse_network(std::string_view text) { return parse_network_file(text).network; }

namespace {

std::string format_complex(const std::vector<int>& stoich, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < stoich.size(); ++i) {
    if (stoich[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (stoich[i] != 1) out += std::to_string(stoich[i]) + " ";
    out += names[i];
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string pretty_print(const ReactionNetwork& net) {
  std::ostringstream os;
  for (std::size_t i = 0; i < net.species.size(); ++i)
    os << "species " << net.species[i] << " d=" << to_compact_string(net.diffusion[i]) << '\n';
  for (const auto& rx : net.reactions) {
    os << format_complex(rx.reactant, net.species) << (rx.reversible() ? " <-> " : " -> ")
       << format_complex(rx.product, net.species) << " @ " << to_compact_string(rx.rate_forward);
    if (rx.reversible()) os << ", " << to_compact_string(rx.rate_backward);
    os << '\n';
  }
  return os.str();
}

std::string pretty_print(const NetworkFile& file) {
  std::string out = pretty_print(file.network);
  if (file.intermediate_hint) {
    out += "hint intermediate r=" + std::to_string(file.intermediate_hint->r) + " :";
    const auto& rows = file.intermediate_hint->rows;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k > 0) out += " ;";
      for (const auto& v : rows[k]) out += " " + to_compact_string(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace rdnet
