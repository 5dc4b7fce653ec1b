#ifndef QBFCHAN_QBF_HPP
#define QBFCHAN_QBF_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qbfchan {

enum class Quantifier : uint8_t { Existential, Universal };

struct Literal {
  int var = 0;  // 1-based variable index
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// A clause is a set of literals: non-empty, no duplicate (var, polarity)
// pair. A variable may appear with both polarities (tautological clause).
struct Clause {
  std::vector<Literal> literals;  // kept sorted by (var, positive-first)

  bool contains(int var, bool positive) const;
  bool tautological() const;
  bool satisfied_by(const std::vector<bool>& assignment) const;

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct QbfFormula {
  int n = 0;                       // variable count
  std::vector<Quantifier> quants;  // kind of x1..xn, bound in index order
  std::vector<Clause> clauses;

  int m() const { return static_cast<int>(clauses.size()); }
  int num_universals() const;
  bool matrix_satisfied(const std::vector<bool>& assignment) const;

  // Throws std::invalid_argument when an invariant is broken
  // (n < 1, m < 1, empty clause, variable out of range, ...).
  void validate() const;

  friend bool operator==(const QbfFormula&, const QbfFormula&) = default;
};

enum class ParseErrorKind {
  MalformedHeader,
  BadToken,
  VariableOutOfRange,
  EmptyClause,
  DuplicateLiteral,
  DuplicateQuantifier,
  MissingTerminator,
  ClauseCountMismatch,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& message);
  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  ParseErrorKind kind_;
  int line_;
};

struct ParseResult {
  QbfFormula formula;
  std::vector<std::string> warnings;  // e.g. tautological clauses
};

// QDIMACS dialect: optional 'c' comment lines, a 'p cnf <n> <m>' problem
// line, zero or more 'e'/'a' quantifier lines (0-terminated), then exactly
// m clause lines (0-terminated). Variables not listed in any quantifier
// line default to Existential. Variables are always bound in index order,
// so quantifier lines must list variables in increasing order overall.
ParseResult parse_qdimacs(std::istream& in);
ParseResult parse_qdimacs(const std::string& text);

// Canonical emission of the same dialect; parse(serialize(f)) == f.
std::string serialize_qdimacs(const QbfFormula& f);

// Witness for a true formula: the chosen value of each existential
// variable, keyed by (index j, values of x1..x_{j-1}). Stored as an
// explicit decision tree: only prefixes reachable when the strategy
// follows its own choices are present.
struct ExistentialStrategy {
  std::map<std::pair<int, std::vector<bool>>, bool> choice;

  bool defined(int var, const std::vector<bool>& prefix) const;
  // Throws StrategyError when the prefix has no entry.
  bool value(int var, const std::vector<bool>& prefix) const;
};

class StrategyError : public std::runtime_error {
 public:
  explicit StrategyError(const std::string& message) : std::runtime_error(message) {}
};

struct QbfResult {
  bool truth = false;
  std::optional<ExistentialStrategy> strategy;  // present iff truth
};

inline constexpr int kEvalVariableGuard = 24;

// Exhaustive game-tree evaluation; existential branches try 'true' first,
// so the extracted strategy is canonical. Throws std::invalid_argument
// when n exceeds kEvalVariableGuard.
QbfResult evaluate_qbf(const QbfFormula& f);

// Independent witness check: true iff playing s satisfies every clause
// under every universal assignment. Throws StrategyError when s is
// undefined on a reachable prefix.
bool check_strategy(const QbfFormula& f, const ExistentialStrategy& s);

}  // namespace qbfchan

#endif
