#include <doctest.h>

#include <sstream>

#include "qbfchan/corpus.hpp"
#include "qbfchan/policy.hpp"

using namespace qbfchan;

namespace {

QbfFormula q1() {
  return parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n1 -2 0\n").formula;
}

QbfFormula q2() {
  return parse_qdimacs("p cnf 2 2\ne 1 0\na 2 0\n1 2 0\n-1 2 0\n").formula;
}

DecisionPolicy x1_true_policy() {
  ExistentialStrategy s;
  s.choice[{1, {}}] = true;
  return strategy_policy(s);
}

const ObsLabel kS0{StateFamily::S0, 0};

}  // namespace

TEST_CASE("strategy policy answers D1 at the first-column entry of Q1") {
  const DecisionPolicy pol = x1_true_policy();
  CHECK(pol.rule({kS0, {StateFamily::Ap, 1}}) == Decision::D1);
}

TEST_CASE("strategy policy is total on structurally valid histories") {
  const DecisionPolicy pol = x1_true_policy();
  // Reachable query point.
  CHECK_NOTHROW(pol.rule({kS0, {StateFamily::Ap, 1}}));
  // Unreachable under x1:=true (the F branch was taken), still answered.
  ExistentialStrategy s;
  s.choice[{1, {}}] = true;
  s.choice[{2, {true}}] = true;  // pretend x2 existential in some other formula
  const DecisionPolicy pol2 = strategy_policy(s);
  CHECK_NOTHROW(pol2.rule({kS0, {StateFamily::Ap, 1}, {StateFamily::Fp, 1}, {StateFamily::Ap, 2}}));
  // Structurally broken histories are rejected.
  CHECK_THROWS_AS(pol.rule({kS0, {StateFamily::Tp, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(pol.rule({{StateFamily::A, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(pol.rule({kS0, {StateFamily::Ap, 2}}), std::invalid_argument);
}

TEST_CASE("strategy policy reconstructs universal values from branch labels") {
  // n=3, prefix a e: strategy for x2 depends on the observed x1 coin.
  const auto f = parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n").formula;
  const QbfResult r = evaluate_qbf(f);
  REQUIRE(r.truth);  // x2 := not x1 satisfies both clauses
  const DecisionPolicy pol = strategy_policy(*r.strategy);
  // x1 = true seen on the T branch -> clause 2 forces x2 = false.
  CHECK(pol.rule({kS0, {StateFamily::Ap, 1}, {StateFamily::Tp, 1}, {StateFamily::Ap, 2}}) ==
        Decision::D2);
  CHECK(pol.rule({kS0, {StateFamily::Ap, 1}, {StateFamily::Tp, 1}, {StateFamily::A, 2}}) ==
        Decision::D2);
  // x1 = false -> clause 1 forces x2 = true.
  CHECK(pol.rule({kS0, {StateFamily::Ap, 1}, {StateFamily::Fp, 1}, {StateFamily::Ap, 2}}) ==
        Decision::D1);
}

TEST_CASE("pass_bad_probability: winning policy on Q1 never goes Bad") {
  const ChannelSpec spec(q1(), ChannelParams{});
  const PassAnalysis analysis = pass_bad_probability(spec, x1_true_policy());
  CHECK(analysis.beta == 0);
  CHECK(analysis.table.size() == 4);  // 2 rows x 1 universal coin
  for (const auto& row : analysis.table) CHECK(row.final_state.family == StateFamily::Good);
}

TEST_CASE("pass_bad_probability: x1:=true on Q2 fails exactly scenario (C2, x2=false)") {
  const ChannelSpec spec(q2(), ChannelParams{});
  const PassAnalysis analysis = pass_bad_probability(spec, x1_true_policy());
  CHECK(analysis.beta == Rational(1, 4));
  int bad = 0;
  for (const auto& row : analysis.table) {
    if (row.final_state.family == StateFamily::Bad) {
      ++bad;
      CHECK(row.scenario.row == 2);
      CHECK(row.scenario.coins == 0);  // x2 = false
    }
  }
  CHECK(bad == 1);
}

TEST_CASE("beta denominators divide m * 2^u across the small corpus") {
  for (const auto& inst : small_formula_corpus(2, 2)) {
    const ChannelSpec spec(inst.formula, ChannelParams{});
    const BigInt scenario_count = BigInt(spec.m()) << spec.num_universals();
    for (const auto& pol : enumerate_policies(spec)) {
      const PassAnalysis analysis = pass_bad_probability(spec, pol);
      CHECK(analysis.beta >= 0);
      CHECK(analysis.beta <= 1);
      CHECK(scenario_count % denominator(analysis.beta) == 0);
    }
  }
}

TEST_CASE("optimal_bad_probability on the named instances") {
  const ChannelSpec s1(q1(), ChannelParams{});
  const OptimalPolicyResult r1 = optimal_bad_probability(s1);
  CHECK(r1.beta_min == 0);
  // The witness plays D1 (x1 := true) at the single decision point.
  CHECK(r1.policy.rule({kS0, {StateFamily::Ap, 1}}) == Decision::D1);
  CHECK(pass_bad_probability(s1, r1.policy).beta == 0);

  const ChannelSpec s2(q2(), ChannelParams{});
  const OptimalPolicyResult r2 = optimal_bad_probability(s2);
  CHECK(r2.beta_min == Rational(1, 4));
  CHECK(pass_bad_probability(s2, r2.policy).beta == Rational(1, 4));
}

TEST_CASE("enumerate_policies finds exactly two policies for Q1 and Q2") {
  CHECK(enumerate_policies(ChannelSpec(q1(), ChannelParams{})).size() == 2);
  CHECK(enumerate_policies(ChannelSpec(q2(), ChannelParams{})).size() == 2);
}

TEST_CASE("a spec without existential variables has exactly one empty policy") {
  const auto f = parse_qdimacs("p cnf 2 1\na 1 2 0\n1 2 0\n").formula;
  const ChannelSpec spec(f, ChannelParams{});
  const auto policies = enumerate_policies(spec);
  REQUIRE(policies.size() == 1);
  const PassAnalysis analysis = pass_bad_probability(spec, policies[0]);
  CHECK(analysis.beta == Rational(1, 4));  // only x=(1,1) satisfies x1 or x2... both coins
}

TEST_CASE("backward induction equals the enumeration oracle on n <= 2 instances") {
  for (const auto& inst : small_formula_corpus(2, 2)) {
    const ChannelSpec spec(inst.formula, ChannelParams{});
    const OptimalPolicyResult opt = optimal_bad_probability(spec);
    bool first = true;
    Rational best;
    for_each_policy(spec, [&](const std::map<HistoryView, Decision>& table) {
      const Rational beta = pass_bad_probability(spec, table_policy("e", table)).beta;
      if (first || beta < best) {
        best = beta;
        first = false;
      }
    });
    REQUIRE(!first);
    if (opt.beta_min != best) {
      CAPTURE(inst.id);
      REQUIRE(opt.beta_min == best);
    }
  }
}

TEST_CASE("beta_min is zero exactly on true formulas (n <= 2 corpus)") {
  for (const auto& inst : small_formula_corpus(2, 2)) {
    const ChannelSpec spec(inst.formula, ChannelParams{});
    const bool truth = evaluate_qbf(inst.formula).truth;
    const Rational beta_min = optimal_bad_probability(spec).beta_min;
    if ((beta_min == 0) != truth) {
      CAPTURE(inst.id);
      REQUIRE((beta_min == 0) == truth);
    }
    if (!truth) {
      // Quantitative floor: one scenario of weight >= 2^-n / m must fail.
      const Rational floor = Rational(1, spec.m()) * pow2_inv(spec.n());
      CHECK(beta_min >= floor);
    }
  }
}

TEST_CASE("winning strategies induce zero-beta policies across the corpus") {
  for (const auto& inst : small_formula_corpus(2, 2)) {
    const QbfResult r = evaluate_qbf(inst.formula);
    if (!r.truth) continue;
    REQUIRE(check_strategy(inst.formula, *r.strategy));
    const ChannelSpec spec(inst.formula, ChannelParams{});
    CHECK(pass_bad_probability(spec, strategy_policy(*r.strategy)).beta == 0);
  }
}

TEST_CASE("guards reject oversized instances") {
  // 23 universal variables: m * 2^u = 2^23 > 2^22.
  QbfFormula wide;
  wide.n = 23;
  wide.quants.assign(23, Quantifier::Universal);
  wide.clauses.push_back(Clause{{{1, true}}});
  const ChannelSpec spec(wide, ChannelParams{});
  CHECK_THROWS_AS(pass_bad_probability(spec, x1_true_policy()), std::invalid_argument);
  CHECK_THROWS_AS(optimal_bad_probability(spec), std::invalid_argument);

  // 16 universals pass the scenario guard but overflow the history guard.
  QbfFormula tall;
  tall.n = 16;
  tall.quants.assign(16, Quantifier::Universal);
  tall.clauses.push_back(Clause{{{1, true}}});
  const ChannelSpec spec2(tall, ChannelParams{});
  CHECK(count_reachable_histories(spec2) > kHistoryGuard);
  CHECK_THROWS_AS(enumerate_policies(spec2), std::invalid_argument);
}

TEST_CASE("pass analysis ops reject leaky specs") {
  const ChannelSpec spec(q1(), ChannelParams{6, 12, 14});
  CHECK_THROWS_AS(pass_bad_probability(spec, x1_true_policy()), std::invalid_argument);
  CHECK_THROWS_AS(optimal_bad_probability(spec), std::invalid_argument);
}

TEST_CASE("pass analysis CSV export") {
  const ChannelSpec spec(q2(), ChannelParams{});
  const PassAnalysis analysis = pass_bad_probability(spec, x1_true_policy());
  std::ostringstream out;
  write_pass_analysis_csv(out, spec, analysis);
  const std::string text = out.str();
  CHECK(text.find("# policy=strategy beta=1/4\n") == 0);
  CHECK(text.find("clause_row,universal_assignment,final_state\n") != std::string::npos);
  CHECK(text.find("2,0,Bad\n") != std::string::npos);
  CHECK(text.find("1,1,Good\n") != std::string::npos);
}
