#include "qbfchan/analysis.hpp"

#include <cmath>

namespace qbfchan {

CycleStats cycle_stats(int n, int m, const Rational& beta, const ChannelParams& params) {
  if (n < 1 || m < 1) throw std::invalid_argument("cycle_stats: n and m must be positive");
  if (beta < 0 || beta > 1) throw std::invalid_argument("cycle_stats: beta must lie in [0,1]");
  params.validate();
  if (params.leak_exp)
    throw std::invalid_argument("cycle_stats: specs with a leak are unsupported");

  CycleStats stats;
  stats.n = n;
  stats.m = m;
  stats.beta = beta;
  stats.p = params.p();
  stats.q = params.q();
  stats.good_dwell = (1 - beta) / stats.p;
  stats.e_cycle = (2 * n + 1) + stats.good_dwell + beta / stats.q;
  return stats;
}

Rational rate_lower_bound(const CycleStats& stats) { return stats.good_dwell / stats.e_cycle; }

namespace {

long output_space_size(const CycleStats& stats) { return 6L * stats.m * stats.n + 3; }

}  // namespace

Rational rate_upper_bound(const CycleStats& stats) {
  const Rational transit = log2_upper_bound(output_space_size(stats));
  return (stats.good_dwell + transit) / stats.e_cycle;
}

RateBounds rate_bounds(const CycleStats& stats) {
  RateBounds bounds;
  bounds.stats = stats;
  bounds.transit_ub = log2_upper_bound(output_space_size(stats));
  bounds.transit_bits = std::log2(static_cast<double>(output_space_size(stats)));
  bounds.lower = rate_lower_bound(stats);
  bounds.upper = rate_upper_bound(stats);
  return bounds;
}

std::string to_string(Verdict v) {
  return v == Verdict::HighCapacity ? "HighCapacity" : "LowCapacity";
}

GapDecision decide_gap(const ChannelSpec& spec, const GapThresholds& thresholds) {
  if (spec.params().leak_exp)
    throw std::invalid_argument("decide_gap: specs with a leak are unsupported");

  OptimalPolicyResult opt = optimal_bad_probability(spec);
  CycleStats stats = cycle_stats(spec.n(), spec.m(), opt.beta_min, spec.params());
  RateBounds bounds = rate_bounds(stats);

  GapDecision decision{Verdict::HighCapacity, bounds, opt.beta_min,
                       std::move(opt.decisions), std::move(opt.policy)};
  if (bounds.lower > thresholds.high) {
    decision.verdict = Verdict::HighCapacity;
    return decision;
  }
  if (bounds.upper < thresholds.low) {
    decision.verdict = Verdict::LowCapacity;
    return decision;
  }
  auto [a, b] = recommended_exponents(spec.n(), spec.m());
  throw IndeterminateError(
      "bounds [" + fraction_string(bounds.lower) + ", " + fraction_string(bounds.upper) +
          "] certify neither threshold; exponents a_exp=" + std::to_string(a) +
          ", b_exp=" + std::to_string(b) + " would separate them",
      a, b);
}

bool exponents_meet_rule(int n, int m, unsigned a_exp, unsigned b_exp) {
  if (b_exp <= a_exp) return false;
  if (pow2(a_exp) < 20 * (2 * n + 1) + 100) return false;
  return pow2(b_exp - a_exp) >= BigInt(20) * m * pow2(static_cast<unsigned>(n)) + 100;
}

bool exponents_verified(int n, int m, unsigned a_exp, unsigned b_exp,
                        const GapThresholds& thresholds) {
  ChannelParams params{a_exp, b_exp, {}};
  params.validate();
  // True formula: beta 0 must certify the high side.
  if (rate_lower_bound(cycle_stats(n, m, Rational(0), params)) <= thresholds.high) return false;
  // False formula: the smallest possible nonzero beta must certify the low
  // side; the upper bound is decreasing in beta, so any larger beta passes too.
  const Rational beta_floor = Rational(1, m) * pow2_inv(static_cast<unsigned>(n));
  return rate_upper_bound(cycle_stats(n, m, beta_floor, params)) < thresholds.low;
}

namespace {

unsigned round_up_to_5(unsigned v) { return (v + 4) / 5 * 5; }

unsigned smallest_exponent(const BigInt& target) {
  unsigned e = 1;
  while (pow2(e) < target) ++e;
  return e;
}

}  // namespace

std::pair<unsigned, unsigned> recommended_exponents(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("recommended_exponents: n, m must be positive");
  unsigned a = round_up_to_5(smallest_exponent(BigInt(20) * (2 * n + 1) + 100));
  unsigned gap = smallest_exponent(BigInt(20) * m * pow2(static_cast<unsigned>(n)) + 100);
  unsigned b = round_up_to_5(a + gap);
  while (!exponents_verified(n, m, a, b)) {
    if (rate_lower_bound(cycle_stats(n, m, Rational(0), ChannelParams{a, b, {}})) <=
        GapThresholds{}.high)
      a += 5;
    b += 5;
  }
  return {a, b};
}

nlohmann::json gap_decision_json(const ChannelSpec& spec, const GapDecision& decision,
                                 const GapThresholds& thresholds) {
  nlohmann::json j;
  j["schema"] = "gap-decision-v1";
  j["verdict"] = to_string(decision.verdict);
  j["beta_min"] = fraction_string(decision.beta_min);
  j["lower"] = {{"fraction", fraction_string(decision.bounds.lower)},
                {"decimal", to_double(decision.bounds.lower)}};
  j["upper"] = {{"fraction", fraction_string(decision.bounds.upper)},
                {"decimal", to_double(decision.bounds.upper)}};
  j["transit_bits"] = decision.bounds.transit_bits;
  j["transit_bits_upper"] = fraction_string(decision.bounds.transit_ub);
  j["e_cycle"] = fraction_string(decision.bounds.stats.e_cycle);
  j["good_dwell"] = fraction_string(decision.bounds.stats.good_dwell);
  j["a_exp"] = spec.params().a_exp;
  j["b_exp"] = spec.params().b_exp;
  j["thresholds"] = {{"low", fraction_string(thresholds.low)},
                     {"high", fraction_string(thresholds.high)}};
  j["upper_bound_note"] =
      "The upper bound charges one bit per Good-resident step plus a log2(6mn+3)-bit "
      "transit allowance per pass, evaluated at beta_min; it certifies the gap verdict "
      "for this channel family and is not a converse for arbitrary coding schemes.";
  nlohmann::json witness = nlohmann::json::array();
  for (const auto& [hist, d] : decision.witness_decisions) {
    nlohmann::json labels = nlohmann::json::array();
    for (const ObsLabel& label : hist) labels.push_back(to_string(label));
    witness.push_back({{"history", labels}, {"decision", to_string(d)}});
  }
  j["witness_policy"] = witness;
  return j;
}

}  // namespace qbfchan
