#include "qbfchan/reduction.hpp"

#include <algorithm>

namespace qbfchan {

std::string to_string(Decision d) { return d == Decision::D1 ? "D1" : "D2"; }

bool is_absorbing(StateFamily f) { return f == StateFamily::Good || f == StateFamily::Bad; }

bool is_column_entry(StateFamily f) { return f == StateFamily::A || f == StateFamily::Ap; }

bool is_primed(StateFamily f) {
  return f == StateFamily::Ap || f == StateFamily::Tp || f == StateFamily::Fp ||
         f == StateFamily::Bad;
}

namespace {

const char* family_name(StateFamily f) {
  switch (f) {
    case StateFamily::S0: return "S0";
    case StateFamily::A: return "A";
    case StateFamily::Ap: return "Ap";
    case StateFamily::T: return "T";
    case StateFamily::Tp: return "Tp";
    case StateFamily::F: return "F";
    case StateFamily::Fp: return "Fp";
    case StateFamily::Good: return "Good";
    case StateFamily::Bad: return "Bad";
  }
  return "?";
}

int family_offset(StateFamily f) {
  switch (f) {
    case StateFamily::A: return 0;
    case StateFamily::Ap: return 1;
    case StateFamily::T: return 2;
    case StateFamily::Tp: return 3;
    case StateFamily::F: return 4;
    case StateFamily::Fp: return 5;
    default: return -1;
  }
}

const StateFamily kColumnFamilies[6] = {StateFamily::A, StateFamily::Ap, StateFamily::T,
                                        StateFamily::Tp, StateFamily::F, StateFamily::Fp};

}  // namespace

std::string to_string(const StateId& s) {
  if (s.family == StateFamily::S0 || is_absorbing(s.family)) return family_name(s.family);
  return std::string(family_name(s.family)) + "(" + std::to_string(s.row) + "," +
         std::to_string(s.col) + ")";
}

std::string to_string(const ObsLabel& label) {
  if (label.family == StateFamily::S0 || is_absorbing(label.family))
    return family_name(label.family);
  return std::string(family_name(label.family)) + "(" + std::to_string(label.col) + ")";
}

void ChannelParams::validate() const {
  if (a_exp < 1) throw std::invalid_argument("a_exp must be a positive integer");
  if (b_exp <= a_exp) throw std::invalid_argument("b_exp must exceed a_exp");
  if (leak_exp && *leak_exp <= b_exp)
    throw std::invalid_argument("leak_exp must exceed b_exp");
}

ChannelSpec::ChannelSpec(const QbfFormula& f, ChannelParams params)
    : n_(f.n), m_(f.m()), quants_(f.quants), params_(params) {
  f.validate();
  params_.validate();
  occurrence_.assign(static_cast<size_t>(m_) * n_, Occurrence::None);
  for (int i = 1; i <= m_; ++i) {
    const Clause& clause = f.clauses[i - 1];
    for (int j = 1; j <= n_; ++j) {
      bool pos = clause.contains(j, true);
      bool neg = clause.contains(j, false);
      Occurrence oc = Occurrence::None;
      if (pos && neg) oc = Occurrence::Both;
      else if (pos) oc = Occurrence::Positive;
      else if (neg) oc = Occurrence::Negative;
      occurrence_[(i - 1) * static_cast<size_t>(n_) + (j - 1)] = oc;
    }
  }
}

ChannelSpec build_channel(const QbfFormula& f, ChannelParams params) {
  return ChannelSpec(f, params);
}

int ChannelSpec::num_universals() const {
  return static_cast<int>(std::count(quants_.begin(), quants_.end(), Quantifier::Universal));
}

bool ChannelSpec::existential(int col) const {
  if (col < 1 || col > n_) throw std::out_of_range("column out of range");
  return quants_[col - 1] == Quantifier::Existential;
}

Occurrence ChannelSpec::occurrence(int row, int col) const {
  if (row < 1 || row > m_ || col < 1 || col > n_)
    throw std::out_of_range("occurrence index out of range");
  return occurrence_[(row - 1) * static_cast<size_t>(n_) + (col - 1)];
}

void ChannelSpec::check_state(const StateId& s) const {
  if (s.family == StateFamily::S0 || is_absorbing(s.family)) {
    if (s.row != 0 || s.col != 0) throw std::invalid_argument("row/col must be 0 for " + to_string(s));
    return;
  }
  if (s.row < 1 || s.row > m_ || s.col < 1 || s.col > n_)
    throw std::invalid_argument("state " + to_string(s) + " out of range");
}

std::vector<std::pair<StateId, Rational>> ChannelSpec::transition(const StateId& s,
                                                                  Decision d) const {
  check_state(s);
  std::vector<std::pair<StateId, Rational>> out;

  switch (s.family) {
    case StateFamily::S0: {
      // A clause row is drawn uniformly; every row starts primed.
      for (int i = 1; i <= m_; ++i)
        out.push_back({{StateFamily::Ap, i, 1}, Rational(1, m_)});
      break;
    }
    case StateFamily::A:
    case StateFamily::Ap: {
      const bool primed = s.family == StateFamily::Ap;
      const StateId t{primed ? StateFamily::Tp : StateFamily::T, s.row, s.col};
      const StateId f{primed ? StateFamily::Fp : StateFamily::F, s.row, s.col};
      if (existential(s.col)) {
        out.push_back({d == Decision::D1 ? t : f, Rational(1)});
      } else {
        // Universal columns ignore the decision input.
        out.push_back({t, Rational(1, 2)});
        out.push_back({f, Rational(1, 2)});
      }
      break;
    }
    case StateFamily::T:
    case StateFamily::F:
    case StateFamily::Tp:
    case StateFamily::Fp: {
      bool primed = is_primed(s.family);
      if (primed) {
        // Crossover: the branch satisfying the row's clause unprimes it.
        Occurrence oc = occurrence(s.row, s.col);
        if (s.family == StateFamily::Tp &&
            (oc == Occurrence::Positive || oc == Occurrence::Both))
          primed = false;
        if (s.family == StateFamily::Fp &&
            (oc == Occurrence::Negative || oc == Occurrence::Both))
          primed = false;
      }
      StateId next;
      if (s.col == n_) {
        next = {primed ? StateFamily::Bad : StateFamily::Good, 0, 0};
      } else {
        next = {primed ? StateFamily::Ap : StateFamily::A, s.row, s.col + 1};
      }
      out.push_back({next, Rational(1)});
      break;
    }
    case StateFamily::Good: {
      const Rational p = params_.p();
      if (params_.leak_exp) {
        const Rational leak = pow2_inv(*params_.leak_exp);
        out.push_back({{StateFamily::Good, 0, 0}, 1 - p - leak});
        out.push_back({{StateFamily::Bad, 0, 0}, leak});
        out.push_back({{StateFamily::S0, 0, 0}, p});
      } else {
        out.push_back({{StateFamily::Good, 0, 0}, 1 - p});
        out.push_back({{StateFamily::S0, 0, 0}, p});
      }
      break;
    }
    case StateFamily::Bad: {
      const Rational q = params_.q();
      out.push_back({{StateFamily::Bad, 0, 0}, 1 - q});
      out.push_back({{StateFamily::S0, 0, 0}, q});
      break;
    }
  }

  std::sort(out.begin(), out.end(), [this](const auto& x, const auto& y) {
    return state_index(x.first) < state_index(y.first);
  });
  return out;
}

ObsLabel ChannelSpec::observe(const StateId& s) const {
  check_state(s);
  if (s.family == StateFamily::S0 || is_absorbing(s.family)) return {s.family, 0};
  return {s.family, s.col};
}

int ChannelSpec::state_index(const StateId& s) const {
  check_state(s);
  switch (s.family) {
    case StateFamily::S0: return 0;
    case StateFamily::Good: return 6 * m_ * n_ + 1;
    case StateFamily::Bad: return 6 * m_ * n_ + 2;
    default:
      return 1 + 6 * ((s.col - 1) * m_ + (s.row - 1)) + family_offset(s.family);
  }
}

StateId ChannelSpec::state_at(int index) const {
  if (index < 0 || index >= state_count()) throw std::out_of_range("state index out of range");
  if (index == 0) return {StateFamily::S0, 0, 0};
  if (index == 6 * m_ * n_ + 1) return {StateFamily::Good, 0, 0};
  if (index == 6 * m_ * n_ + 2) return {StateFamily::Bad, 0, 0};
  int k = index - 1;
  int fam = k % 6;
  int cell = k / 6;
  int row = cell % m_ + 1;
  int col = cell / m_ + 1;
  return {kColumnFamilies[fam], row, col};
}

std::vector<StateId> ChannelSpec::all_states() const {
  std::vector<StateId> out;
  out.reserve(state_count());
  for (int i = 0; i < state_count(); ++i) out.push_back(state_at(i));
  return out;
}

namespace {

const char* occurrence_name(Occurrence oc) {
  switch (oc) {
    case Occurrence::None: return "none";
    case Occurrence::Positive: return "positive";
    case Occurrence::Negative: return "negative";
    case Occurrence::Both: return "both";
  }
  return "?";
}

}  // namespace

nlohmann::json ChannelSpec::to_json() const {
  nlohmann::json j;
  j["schema"] = "channel-spec-v1";
  j["n"] = n_;
  j["m"] = m_;
  std::string q;
  for (auto quant : quants_) q += (quant == Quantifier::Existential ? 'e' : 'a');
  j["quantifiers"] = q;
  nlohmann::json occ = nlohmann::json::array();
  for (int i = 1; i <= m_; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int jcol = 1; jcol <= n_; ++jcol) row.push_back(occurrence_name(occurrence(i, jcol)));
    occ.push_back(row);
  }
  j["occurrence"] = occ;
  j["a_exp"] = params_.a_exp;
  j["b_exp"] = params_.b_exp;
  if (params_.leak_exp) j["leak_exp"] = *params_.leak_exp;
  j["state_count"] = state_count();
  return j;
}

nlohmann::json ChannelSpec::transitions_json() const {
  nlohmann::json j;
  j["schema"] = "channel-transitions-v1";
  j["n"] = n_;
  j["m"] = m_;
  nlohmann::json entries = nlohmann::json::array();
  for (const StateId& s : all_states()) {
    for (Decision d : {Decision::D1, Decision::D2}) {
      nlohmann::json entry;
      entry["state"] = to_string(s);
      entry["decision"] = to_string(d);
      nlohmann::json dist = nlohmann::json::array();
      for (const auto& [next, prob] : transition(s, d)) {
        dist.push_back({{"state", to_string(next)}, {"prob", fraction_string(prob)}});
      }
      entry["next"] = dist;
      entries.push_back(entry);
    }
  }
  j["entries"] = entries;
  return j;
}

std::vector<StateId> trace_assignment(const ChannelSpec& spec, int row,
                                      const std::vector<bool>& assignment) {
  if (row < 1 || row > spec.m()) throw std::out_of_range("row out of range");
  if (static_cast<int>(assignment.size()) != spec.n())
    throw std::invalid_argument("assignment length must equal n");
  std::vector<StateId> path;
  path.reserve(spec.pass_length());
  StateId state{StateFamily::S0, 0, 0};
  for (int step = 0; step < spec.pass_length(); ++step) {
    switch (state.family) {
      case StateFamily::S0:
        state = {StateFamily::Ap, row, 1};
        break;
      case StateFamily::A:
      case StateFamily::Ap: {
        const bool primed = state.family == StateFamily::Ap;
        const bool value = assignment[state.col - 1];
        StateFamily branch = value ? (primed ? StateFamily::Tp : StateFamily::T)
                                   : (primed ? StateFamily::Fp : StateFamily::F);
        state = {branch, state.row, state.col};
        break;
      }
      case StateFamily::T:
      case StateFamily::Tp:
      case StateFamily::F:
      case StateFamily::Fp:
        // Single outgoing transition (crossover handled by the law itself).
        state = spec.transition(state, Decision::D1).front().first;
        break;
      default:
        throw std::logic_error("absorbed before the pass ended");
    }
    path.push_back(state);
  }
  return path;
}

}  // namespace qbfchan
