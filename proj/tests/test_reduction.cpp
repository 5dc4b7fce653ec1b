#include <doctest.h>

#include <map>

#include "qbfchan/corpus.hpp"
#include "qbfchan/qbf.hpp"
#include "qbfchan/reduction.hpp"

using namespace qbfchan;

namespace {

QbfFormula q1() {
  return parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n").formula;
}

QbfFormula q2() {
  return parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 2 0\n").formula;
}

Rational prob_of(const std::vector<std::pair<StateId, Rational>>& dist, const StateId& s) {
  for (const auto& [next, p] : dist)
    if (next == s) return p;
  return Rational(0);
}

// Does the prefix x_1..x_upto of the assignment satisfy clause `row`?
bool prefix_satisfies(const QbfFormula& f, int row, const std::vector<bool>& x, int upto) {
  const Clause& clause = f.clauses[row - 1];
  for (int var = 1; var <= upto; ++var)
    if (clause.contains(var, x[var - 1])) return true;
  return false;
}

}  // namespace

TEST_CASE("build_channel counts and occurrence matrix for Q1") {
  const ChannelSpec spec(q1(), ChannelParams{});
  CHECK(spec.n() == 2);
  CHECK(spec.m() == 2);
  CHECK(spec.state_count() == 27);  // 6*2*2+3
  CHECK(spec.occurrence(1, 1) == Occurrence::Positive);
  CHECK(spec.occurrence(1, 2) == Occurrence::Positive);
  CHECK(spec.occurrence(2, 1) == Occurrence::Positive);
  CHECK(spec.occurrence(2, 2) == Occurrence::Negative);
}

TEST_CASE("state count for a 1x1 instance is 9") {
  const auto f = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").formula;
  CHECK(ChannelSpec(f, ChannelParams{}).state_count() == 9);
}

TEST_CASE("channel params invariants") {
  CHECK_THROWS_AS((ChannelParams{20, 20, {}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ChannelParams{20, 10, {}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ChannelParams{6, 12, 12}).validate(), std::invalid_argument);
  CHECK_NOTHROW((ChannelParams{6, 12, 13}).validate());
}

TEST_CASE("transition rules on the Q1 gadget") {
  const ChannelSpec spec(q1(), ChannelParams{20, 40, {}});

  SUBCASE("S0 fans out to the primed first column uniformly") {
    const auto dist = spec.transition({StateFamily::S0, 0, 0}, Decision::D1);
    REQUIRE(dist.size() == 2);
    CHECK(prob_of(dist, {StateFamily::Ap, 1, 1}) == Rational(1, 2));
    CHECK(prob_of(dist, {StateFamily::Ap, 2, 1}) == Rational(1, 2));
  }

  SUBCASE("existential column: decision picks the branch with certainty") {
    const auto d1 = spec.transition({StateFamily::Ap, 1, 1}, Decision::D1);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].first == StateId{StateFamily::Tp, 1, 1});
    CHECK(d1[0].second == Rational(1));
    const auto d2 = spec.transition({StateFamily::Ap, 1, 1}, Decision::D2);
    CHECK(d2[0].first == StateId{StateFamily::Fp, 1, 1});
    const auto unprimed = spec.transition({StateFamily::A, 1, 1}, Decision::D2);
    CHECK(unprimed[0].first == StateId{StateFamily::F, 1, 1});
  }

  SUBCASE("universal column ignores the decision") {
    for (Decision d : {Decision::D1, Decision::D2}) {
      const auto dist = spec.transition({StateFamily::Ap, 1, 2}, d);
      REQUIRE(dist.size() == 2);
      CHECK(prob_of(dist, {StateFamily::Tp, 1, 2}) == Rational(1, 2));
      CHECK(prob_of(dist, {StateFamily::Fp, 1, 2}) == Rational(1, 2));
    }
  }

  SUBCASE("crossover: a satisfied clause unprimes the row") {
    // x1 appears positively in C1, so Tp(1,1) crosses to A(1,2).
    const auto cross = spec.transition({StateFamily::Tp, 1, 1}, Decision::D1);
    CHECK(cross[0].first == StateId{StateFamily::A, 1, 2});
    // F-branch of column 1 does not satisfy C1.
    const auto stay = spec.transition({StateFamily::Fp, 1, 1}, Decision::D1);
    CHECK(stay[0].first == StateId{StateFamily::Ap, 1, 2});
    // x2 appears negatively in C2: Fp(2,2) crosses, and column 2 exits the pass.
    const auto last = spec.transition({StateFamily::Fp, 2, 2}, Decision::D1);
    CHECK(last[0].first == StateId{StateFamily::Good, 0, 0});
    const auto bad = spec.transition({StateFamily::Tp, 2, 2}, Decision::D1);
    CHECK(bad[0].first == StateId{StateFamily::Bad, 0, 0});
  }

  SUBCASE("unprimed rows never re-prime") {
    const auto t = spec.transition({StateFamily::T, 1, 1}, Decision::D1);
    CHECK(t[0].first == StateId{StateFamily::A, 1, 2});
    const auto f = spec.transition({StateFamily::F, 2, 2}, Decision::D2);
    CHECK(f[0].first == StateId{StateFamily::Good, 0, 0});
  }

  SUBCASE("good state resets with probability p") {
    const auto dist = spec.transition({StateFamily::Good, 0, 0}, Decision::D2);
    REQUIRE(dist.size() == 2);
    CHECK(prob_of(dist, {StateFamily::S0, 0, 0}) == pow2_inv(20));
    CHECK(prob_of(dist, {StateFamily::Good, 0, 0}) == 1 - pow2_inv(20));
  }

  SUBCASE("bad state resets with probability q") {
    const auto dist = spec.transition({StateFamily::Bad, 0, 0}, Decision::D1);
    CHECK(prob_of(dist, {StateFamily::S0, 0, 0}) == pow2_inv(40));
    CHECK(prob_of(dist, {StateFamily::Bad, 0, 0}) == 1 - pow2_inv(40));
  }
}

TEST_CASE("leak splits the good-state exit") {
  const ChannelSpec spec(q1(), ChannelParams{6, 12, 20});
  const auto dist = spec.transition({StateFamily::Good, 0, 0}, Decision::D1);
  REQUIRE(dist.size() == 3);
  CHECK(prob_of(dist, {StateFamily::S0, 0, 0}) == pow2_inv(6));
  CHECK(prob_of(dist, {StateFamily::Bad, 0, 0}) == pow2_inv(20));
  CHECK(prob_of(dist, {StateFamily::Good, 0, 0}) == 1 - pow2_inv(6) - pow2_inv(20));
}

TEST_CASE("observation hides the row and keeps the column") {
  const ChannelSpec spec(q2(), ChannelParams{});
  CHECK(spec.observe({StateFamily::A, 2, 1}) == ObsLabel{StateFamily::A, 1});
  CHECK(spec.observe({StateFamily::A, 1, 1}) == ObsLabel{StateFamily::A, 1});
  CHECK(spec.observe({StateFamily::Tp, 1, 2}) == ObsLabel{StateFamily::Tp, 2});
  CHECK(spec.observe({StateFamily::Good, 0, 0}) == ObsLabel{StateFamily::Good, 0});
  CHECK(spec.observe({StateFamily::S0, 0, 0}) == ObsLabel{StateFamily::S0, 0});
}

TEST_CASE("observation is constant on families and injective across them") {
  for (const auto& inst : small_formula_corpus(2, 2)) {
    const ChannelSpec spec(inst.formula, ChannelParams{});
    std::map<ObsLabel, StateFamily> seen;
    int labels = 0;
    for (const StateId& s : spec.all_states()) {
      const ObsLabel label = spec.observe(s);
      CHECK(label.family == s.family);
      auto [it, fresh] = seen.emplace(label, s.family);
      if (fresh) ++labels;
      else CHECK(it->second == s.family);
    }
    CHECK(labels == 6 * spec.n() + 3);
  }
}

TEST_CASE("transition rows are exact distributions on every corpus spec") {
  for (const auto& inst : small_formula_corpus(2, 2)) {
    const ChannelSpec spec(inst.formula, ChannelParams{});
    for (const StateId& s : spec.all_states()) {
      for (Decision d : {Decision::D1, Decision::D2}) {
        Rational total(0);
        for (const auto& [next, p] : spec.transition(s, d)) {
          CHECK(p > 0);
          total += p;
        }
        CHECK(total == 1);
      }
    }
  }
}

TEST_CASE("every pass lasts exactly 2n+1 steps and ends absorbed") {
  for (const auto& inst : small_formula_corpus(3, 2)) {
    const ChannelSpec spec(inst.formula, ChannelParams{});
    for (int row = 1; row <= spec.m(); ++row) {
      for (unsigned bits = 0; bits < (1u << spec.n()); ++bits) {
        std::vector<bool> x;
        for (int k = 0; k < spec.n(); ++k) x.push_back((bits >> k) & 1);
        const auto path = trace_assignment(spec, row, x);
        REQUIRE(static_cast<int>(path.size()) == 2 * spec.n() + 1);
        for (size_t t = 0; t + 1 < path.size(); ++t) CHECK(!is_absorbing(path[t].family));
        CHECK(is_absorbing(path.back().family));
      }
    }
  }
}

TEST_CASE("a row is unprimed at column j+1 iff its clause is satisfied by x1..xj") {
  // Exhaustive trajectory enumeration over n <= 3, m <= 3 gadgets.
  auto clauses3 = corpus_clauses(3);
  std::vector<QbfFormula> formulas;
  for (const auto& inst : small_formula_corpus(3, 2)) formulas.push_back(inst.formula);
  for (size_t a = 0; a < clauses3.size(); a += 5)
    for (size_t b = a; b < clauses3.size(); b += 7)
      for (size_t c = b; c < clauses3.size(); c += 11) {
        QbfFormula f;
        f.n = 3;
        f.quants = {Quantifier::Existential, Quantifier::Universal, Quantifier::Existential};
        f.clauses = {clauses3[a], clauses3[b], clauses3[c]};
        formulas.push_back(std::move(f));
      }

  for (const QbfFormula& f : formulas) {
    const ChannelSpec spec(f, ChannelParams{});
    for (int row = 1; row <= spec.m(); ++row) {
      for (unsigned bits = 0; bits < (1u << spec.n()); ++bits) {
        std::vector<bool> x;
        for (int k = 0; k < spec.n(); ++k) x.push_back((bits >> k) & 1);
        const auto path = trace_assignment(spec, row, x);
        // path[2j] (0-based) is the column-(j+1) entry for j = 1..n-1;
        // path.back() is the lumped column-(n+1) state.
        for (int j = 1; j < spec.n(); ++j) {
          const StateId& entry = path[2 * j];
          REQUIRE(is_column_entry(entry.family));
          REQUIRE(entry.col == j + 1);
          CHECK(is_primed(entry.family) == !prefix_satisfies(f, row, x, j));
        }
        CHECK(is_primed(path.back().family) == !prefix_satisfies(f, row, x, spec.n()));
        CHECK((path.back().family == StateFamily::Good) ==
              f.clauses[row - 1].satisfied_by(x));
      }
    }
  }
}

TEST_CASE("state indexing is a bijection") {
  const ChannelSpec spec(q1(), ChannelParams{});
  for (int i = 0; i < spec.state_count(); ++i) CHECK(spec.state_index(spec.state_at(i)) == i);
}

TEST_CASE("spec JSON emission") {
  const ChannelSpec spec(q1(), ChannelParams{20, 40, {}});
  const auto j = spec.to_json();
  CHECK(j["schema"] == "channel-spec-v1");
  CHECK(j["n"] == 2);
  CHECK(j["m"] == 2);
  CHECK(j["quantifiers"] == "ea");
  CHECK(j["state_count"] == 27);
  CHECK(j["a_exp"] == 20);
  CHECK(j["b_exp"] == 40);
  CHECK(!j.contains("leak_exp"));
  CHECK(j["occurrence"][0] == nlohmann::json({"positive", "positive"}));
  CHECK(j["occurrence"][1] == nlohmann::json({"positive", "negative"}));

  const auto t = spec.transitions_json();
  CHECK(t["schema"] == "channel-transitions-v1");
  CHECK(t["entries"].size() == 27 * 2);
  CHECK(t["entries"][0]["state"] == "S0");
  CHECK(t["entries"][0]["next"][0]["prob"] == "1/2");
}

TEST_CASE("state names used by the dump formats") {
  CHECK(to_string(StateId{StateFamily::Ap, 2, 1}) == "Ap(2,1)");
  CHECK(to_string(StateId{StateFamily::Good, 0, 0}) == "Good");
  CHECK(to_string(ObsLabel{StateFamily::Fp, 2}) == "Fp(2)");
  CHECK(to_string(ObsLabel{StateFamily::S0, 0}) == "S0");
  CHECK(to_string(Decision::D2) == "D2");
}
