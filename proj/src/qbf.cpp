#include "qbfchan/qbf.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace qbfchan {

bool Clause::contains(int var, bool positive) const {
  return std::find(literals.begin(), literals.end(), Literal{var, positive}) != literals.end();
}

bool Clause::tautological() const {
  for (const auto& lit : literals)
    if (lit.positive && contains(lit.var, false)) return true;
  return false;
}

bool Clause::satisfied_by(const std::vector<bool>& assignment) const {
  for (const auto& lit : literals)
    if (assignment[lit.var - 1] == lit.positive) return true;
  return false;
}

int QbfFormula::num_universals() const {
  return static_cast<int>(std::count(quants.begin(), quants.end(), Quantifier::Universal));
}

bool QbfFormula::matrix_satisfied(const std::vector<bool>& assignment) const {
  for (const auto& clause : clauses)
    if (!clause.satisfied_by(assignment)) return false;
  return true;
}

void QbfFormula::validate() const {
  if (n < 1) throw std::invalid_argument("formula needs at least one variable");
  if (clauses.empty()) throw std::invalid_argument("formula needs at least one clause");
  if (static_cast<int>(quants.size()) != n)
    throw std::invalid_argument("quantifier list length must equal n");
  for (const auto& clause : clauses) {
    if (clause.literals.empty()) throw std::invalid_argument("empty clause");
    for (size_t k = 0; k < clause.literals.size(); ++k) {
      const auto& lit = clause.literals[k];
      if (lit.var < 1 || lit.var > n) throw std::invalid_argument("variable index out of range");
      if (k > 0 && clause.literals[k] == clause.literals[k - 1])
        throw std::invalid_argument("duplicate literal in clause");
    }
    if (!std::is_sorted(clause.literals.begin(), clause.literals.end()))
      throw std::invalid_argument("clause literals not in canonical order");
  }
}

ParseError::ParseError(ParseErrorKind kind, int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      kind_(kind),
      line_(line) {}

namespace {

std::vector<long> tokenize_ints(const std::string& line, int line_no) {
  std::istringstream iss(line);
  std::vector<long> out;
  std::string tok;
  while (iss >> tok) {
    size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      throw ParseError(ParseErrorKind::BadToken, line_no, "expected integer, got '" + tok + "'");
    }
    if (pos != tok.size())
      throw ParseError(ParseErrorKind::BadToken, line_no, "expected integer, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

ParseResult parse_qdimacs(std::istream& in) {
  ParseResult result;
  QbfFormula& f = result.formula;

  std::string line;
  int line_no = 0;
  bool saw_header = false;
  long header_m = 0;
  std::vector<bool> quantified;  // per variable, listed in a quantifier line
  int last_quantified_var = 0;
  bool saw_clause = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::istringstream iss(line);
    std::string first;
    iss >> first;
    if (first == "c") continue;

    if (first == "p") {
      if (saw_header)
        throw ParseError(ParseErrorKind::MalformedHeader, line_no, "duplicate problem line");
      std::string fmt;
      long n = 0, m = 0;
      if (!(iss >> fmt >> n >> m) || fmt != "cnf")
        throw ParseError(ParseErrorKind::MalformedHeader, line_no, "expected 'p cnf <n> <m>'");
      std::string extra;
      if (iss >> extra)
        throw ParseError(ParseErrorKind::MalformedHeader, line_no, "trailing tokens after header");
      if (n < 1 || m < 1)
        throw ParseError(ParseErrorKind::MalformedHeader, line_no, "n and m must be positive");
      saw_header = true;
      header_m = m;
      f.n = static_cast<int>(n);
      f.quants.assign(f.n, Quantifier::Existential);
      quantified.assign(f.n, false);
      continue;
    }

    if (!saw_header)
      throw ParseError(ParseErrorKind::MalformedHeader, line_no, "content before problem line");

    if (first == "e" || first == "a") {
      if (saw_clause)
        throw ParseError(ParseErrorKind::BadToken, line_no, "quantifier line after clauses");
      std::string rest;
      std::getline(iss, rest);
      auto vals = tokenize_ints(rest, line_no);
      if (vals.empty() || vals.back() != 0)
        throw ParseError(ParseErrorKind::MissingTerminator, line_no, "quantifier line must end in 0");
      vals.pop_back();
      for (long v : vals) {
        if (v < 1 || v > f.n)
          throw ParseError(ParseErrorKind::VariableOutOfRange, line_no,
                           "variable " + std::to_string(v) + " out of range 1.." + std::to_string(f.n));
        int var = static_cast<int>(v);
        if (quantified[var - 1])
          throw ParseError(ParseErrorKind::DuplicateQuantifier, line_no,
                           "variable " + std::to_string(var) + " quantified twice");
        if (var <= last_quantified_var)
          throw ParseError(ParseErrorKind::BadToken, line_no,
                           "quantifier lines must list variables in increasing order");
        quantified[var - 1] = true;
        last_quantified_var = var;
        f.quants[var - 1] = (first == "e") ? Quantifier::Existential : Quantifier::Universal;
      }
      continue;
    }

    // Clause line.
    saw_clause = true;
    auto vals = tokenize_ints(line, line_no);
    if (vals.empty() || vals.back() != 0)
      throw ParseError(ParseErrorKind::MissingTerminator, line_no, "clause line must end in 0");
    vals.pop_back();
    if (vals.empty())
      throw ParseError(ParseErrorKind::EmptyClause, line_no,
                       "empty clause at line " + std::to_string(line_no));
    Clause clause;
    for (long v : vals) {
      if (v == 0 || std::abs(v) > f.n)
        throw ParseError(ParseErrorKind::VariableOutOfRange, line_no,
                         "literal " + std::to_string(v) + " out of range");
      Literal lit{static_cast<int>(std::abs(v)), v > 0};
      if (clause.contains(lit.var, lit.positive))
        throw ParseError(ParseErrorKind::DuplicateLiteral, line_no,
                         "duplicate literal " + std::to_string(v));
      clause.literals.push_back(lit);
    }
    std::sort(clause.literals.begin(), clause.literals.end());
    if (clause.tautological())
      result.warnings.push_back("line " + std::to_string(line_no) +
                                ": tautological clause (both polarities of one variable)");
    f.clauses.push_back(std::move(clause));
    if (static_cast<long>(f.clauses.size()) > header_m)
      throw ParseError(ParseErrorKind::ClauseCountMismatch, line_no,
                       "more clauses than the header's " + std::to_string(header_m));
  }

  if (!saw_header)
    throw ParseError(ParseErrorKind::MalformedHeader, line_no, "missing problem line");
  if (static_cast<long>(f.clauses.size()) != header_m)
    throw ParseError(ParseErrorKind::ClauseCountMismatch, line_no,
                     "expected " + std::to_string(header_m) + " clauses, got " +
                         std::to_string(f.clauses.size()));
  f.validate();
  return result;
}

ParseResult parse_qdimacs(const std::string& text) {
  std::istringstream iss(text);
  return parse_qdimacs(iss);
}

std::string serialize_qdimacs(const QbfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.n << " " << f.clauses.size() << "\n";
  // Maximal runs of one quantifier kind become one block line.
  int i = 0;
  while (i < f.n) {
    int j = i;
    while (j < f.n && f.quants[j] == f.quants[i]) ++j;
    out << (f.quants[i] == Quantifier::Existential ? "e" : "a");
    for (int v = i + 1; v <= j; ++v) out << " " << v;
    out << " 0\n";
    i = j;
  }
  for (const auto& clause : f.clauses) {
    for (const auto& lit : clause.literals) out << (lit.positive ? lit.var : -lit.var) << " ";
    out << "0\n";
  }
  return out.str();
}

bool ExistentialStrategy::defined(int var, const std::vector<bool>& prefix) const {
  return choice.count({var, prefix}) != 0;
}

bool ExistentialStrategy::value(int var, const std::vector<bool>& prefix) const {
  auto it = choice.find({var, prefix});
  if (it == choice.end())
    throw StrategyError("strategy undefined for x" + std::to_string(var) + " at prefix of length " +
                        std::to_string(prefix.size()));
  return it->second;
}

namespace {

// Game-tree recursion; fills the strategy along winning existential branches.
bool eval_from(const QbfFormula& f, int var, std::vector<bool>& assignment,
               ExistentialStrategy* strategy) {
  if (var > f.n) return f.matrix_satisfied(assignment);
  if (f.quants[var - 1] == Quantifier::Existential) {
    for (bool value : {true, false}) {
      assignment.push_back(value);
      bool won = eval_from(f, var + 1, assignment, strategy);
      assignment.pop_back();
      if (won) {
        if (strategy) strategy->choice[{var, assignment}] = value;
        return true;
      }
    }
    return false;
  }
  for (bool value : {false, true}) {
    assignment.push_back(value);
    bool won = eval_from(f, var + 1, assignment, strategy);
    assignment.pop_back();
    if (!won) return false;
  }
  return true;
}

}  // namespace

QbfResult evaluate_qbf(const QbfFormula& f) {
  f.validate();
  if (f.n > kEvalVariableGuard)
    throw std::invalid_argument("evaluate_qbf: n exceeds the 2^n enumeration guard (n <= " +
                                std::to_string(kEvalVariableGuard) + ")");
  QbfResult result;
  ExistentialStrategy strategy;
  std::vector<bool> assignment;
  assignment.reserve(f.n);
  result.truth = eval_from(f, 1, assignment, &strategy);
  if (result.truth) result.strategy = std::move(strategy);
  return result;
}

bool check_strategy(const QbfFormula& f, const ExistentialStrategy& s) {
  f.validate();
  const int u = f.num_universals();
  std::vector<bool> assignment(f.n);
  std::vector<bool> prefix;
  for (uint64_t coins = 0; coins < (uint64_t{1} << u); ++coins) {
    prefix.clear();
    int coin_index = 0;
    for (int var = 1; var <= f.n; ++var) {
      bool value;
      if (f.quants[var - 1] == Quantifier::Universal) {
        value = (coins >> coin_index++) & 1;
      } else {
        value = s.value(var, prefix);  // throws on undefined prefix
      }
      assignment[var - 1] = value;
      prefix.push_back(value);
    }
    if (!f.matrix_satisfied(assignment)) return false;
  }
  return true;
}

}  // namespace qbfchan
