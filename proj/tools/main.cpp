// qbfchan: compile a quantified Boolean formula into a finite-state
// feedback channel, certify the capacity gap exactly, and cross-check by
// simulation.
//
// Exit codes: 0 success, 1 corpus disagreement, 2 input/config error,
// 3 indeterminate analysis.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbfchan/analysis.hpp"
#include "qbfchan/channel.hpp"
#include "qbfchan/corpus.hpp"
#include "qbfchan/qbf.hpp"
#include "qbfchan/sim.hpp"

namespace {

using namespace qbfchan;

QbfFormula load_formula(const std::string& path) {
  ParseResult parsed;
  if (path == "-") {
    parsed = parse_qdimacs(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    parsed = parse_qdimacs(in);
  }
  for (const std::string& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
  return parsed.formula;
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty() || output_path == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(output_path);
  if (!out) throw std::invalid_argument("cannot write '" + output_path + "'");
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
}

struct CommonOptions {
  std::string input;
  std::string output;
  unsigned a_exp = 20;
  unsigned b_exp = 40;
  std::optional<unsigned> leak_exp;
  unsigned leak_raw = 0;
  bool leak_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_leak) {
  cmd->add_option("input", opt.input, "QDIMACS file, or - for stdin")->required();
  cmd->add_option("-o,--output", opt.output, "write the result here instead of stdout");
  cmd->add_option("--a-exp", opt.a_exp, "good-state reset exponent: p = 2^-a_exp")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--b-exp", opt.b_exp, "bad-state reset exponent: q = 2^-b_exp")
      ->check(CLI::PositiveNumber);
  if (with_leak) {
    cmd->add_option("--leak-exp", opt.leak_raw,
                    "good-to-bad leak exponent (simulation only)")
        ->check(CLI::PositiveNumber)
        ->each([&opt](const std::string&) { opt.leak_set = true; });
  }
}

ChannelParams params_of(const CommonOptions& opt) {
  ChannelParams params{opt.a_exp, opt.b_exp,
                       opt.leak_set ? std::optional<unsigned>(opt.leak_raw) : std::nullopt};
  params.validate();
  return params;
}

nlohmann::json strategy_json(const ExistentialStrategy& strategy) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [key, value] : strategy.choice) {
    std::string prefix;
    for (bool bit : key.second) prefix += bit ? '1' : '0';
    rows.push_back({{"var", key.first}, {"given", prefix}, {"value", value}});
  }
  return rows;
}

// The policy driving `simulate`. For leaky specs the policy is derived
// from the leak-free twin (the analysis modules reject leaks).
DecisionPolicy select_policy(const QbfFormula& f, const ChannelParams& params,
                             const std::string& kind) {
  ChannelParams clean = params;
  clean.leak_exp.reset();
  const ChannelSpec policy_spec(f, clean);
  if (kind == "optimal") return optimal_bad_probability(policy_spec).policy;
  if (kind == "strategy") {
    const QbfResult r = evaluate_qbf(f);
    if (!r.truth)
      throw std::invalid_argument(
          "the formula is false, so no winning strategy exists; use --policy optimal");
    return strategy_policy(*r.strategy);
  }
  throw std::invalid_argument("unknown policy '" + kind + "'");
}

int run_corpus(unsigned a_exp, unsigned b_exp, int max_n, int max_m) {
  const ChannelParams params{a_exp, b_exp, {}};
  params.validate();
  const auto corpus = small_formula_corpus(max_n, max_m);
  const auto start = std::chrono::steady_clock::now();

  uint64_t true_count = 0, high_count = 0, mismatches = 0, indeterminate = 0;
  for (const auto& inst : corpus) {
    const bool truth = evaluate_qbf(inst.formula).truth;
    if (truth) ++true_count;
    bool high = false;
    try {
      const ChannelSpec spec(inst.formula, params);
      high = decide_gap(spec).verdict == Verdict::HighCapacity;
    } catch (const IndeterminateError&) {
      ++indeterminate;
      std::cout << "indeterminate: " << inst.id << "\n";
      continue;
    }
    if (high) ++high_count;
    if (high != truth) {
      ++mismatches;
      std::cout << "mismatch: " << inst.id << " truth=" << (truth ? "true" : "false")
                << " verdict=" << (high ? "HighCapacity" : "LowCapacity") << "\n";
    }
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  std::cout << "instances:        " << corpus.size() << "\n"
            << "true formulas:    " << true_count << "\n"
            << "false formulas:   " << corpus.size() - true_count << "\n"
            << "HighCapacity:     " << high_count << "\n"
            << "LowCapacity:      " << corpus.size() - high_count - indeterminate << "\n"
            << "indeterminate:    " << indeterminate << "\n"
            << "mismatches:       " << mismatches << "\n"
            << "agreement:        "
            << (corpus.size() - mismatches - indeterminate) * 100.0 / corpus.size() << "%\n"
            << "elapsed_ms:       " << elapsed.count() << "\n";
  return (mismatches == 0 && indeterminate == 0) ? 0 : 1;
}

std::string decide_text(const ChannelSpec& spec, const GapDecision& d,
                        const GapThresholds& thresholds) {
  std::ostringstream out;
  out << "verdict:    " << to_string(d.verdict) << "\n"
      << "beta_min:   " << fraction_string(d.beta_min) << "\n"
      << "lower:      " << fraction_string(d.bounds.lower) << " ~ "
      << to_double(d.bounds.lower) << "\n"
      << "upper:      " << fraction_string(d.bounds.upper) << " ~ "
      << to_double(d.bounds.upper) << "\n"
      << "thresholds: low " << fraction_string(thresholds.low) << ", high "
      << fraction_string(thresholds.high) << "\n"
      << "exponents:  a_exp " << spec.params().a_exp << ", b_exp " << spec.params().b_exp
      << "\n"
      << "note: the upper bound charges one bit per Good-resident step plus a\n"
      << "      log2(6mn+3)-bit transit allowance per pass at beta_min; it certifies\n"
      << "      the verdict for this channel family, not a general converse.\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qbfchan: compile quantified Boolean formulas into finite-state Markov channels\n"
      "with perfect feedback and certify whether the capacity is high (> 0.8) or low\n"
      "(< 0.2) -- high exactly when the formula is true"};
  app.require_subcommand(1);

  // --- build ---------------------------------------------------------
  CommonOptions build_opt;
  bool expanded = false;
  CLI::App* build = app.add_subcommand("build", "compile a formula into a channel spec (JSON)");
  add_common(build, build_opt, true);
  build->add_flag("--expanded", expanded,
                  "emit every (state, decision) -> distribution triple instead");

  // --- solve ---------------------------------------------------------
  std::string solve_input, solve_output;
  CLI::App* solve = app.add_subcommand("solve", "decide the formula by brute force (JSON)");
  solve->add_option("input", solve_input, "QDIMACS file, or - for stdin")->required();
  solve->add_option("-o,--output", solve_output, "write the result here instead of stdout");

  // --- decide --------------------------------------------------------
  CommonOptions decide_opt;
  std::string low_threshold = "1/5", high_threshold = "4/5", scenario_csv, decide_format = "json";
  CLI::App* decide = app.add_subcommand("decide", "certify the capacity gap exactly");
  add_common(decide, decide_opt, false);
  decide->add_option("--low-threshold", low_threshold, "LowCapacity cutoff (default 1/5)");
  decide->add_option("--high-threshold", high_threshold, "HighCapacity cutoff (default 4/5)");
  decide->add_option("--scenario-csv", scenario_csv,
                     "also write the witness policy's scenario table as CSV");
  decide->add_option("--format", decide_format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  // --- simulate ------------------------------------------------------
  CommonOptions sim_opt;
  sim_opt.a_exp = 6;
  sim_opt.b_exp = 12;
  uint64_t steps = 1000000, seed = 0;
  unsigned replicas = 1;
  bool relay = false;
  std::string policy_kind = "optimal", cycles_csv, bits = "10110100";
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo / bit-relay runs");
  add_common(simulate, sim_opt, true);
  simulate->add_option("--steps", steps, "channel uses to simulate")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "RNG seed (env QBFCHAN_SEED, default 0)")
      ->envname("QBFCHAN_SEED");
  simulate->add_flag("--relay", relay, "run the sequential bit relay instead of occupancy");
  simulate->add_option("--policy", policy_kind, "optimal or strategy")
      ->check(CLI::IsMember({"optimal", "strategy"}));
  simulate->add_option("--replicas", replicas, "independent replicas merged by weight")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--cycles-csv", cycles_csv, "write the per-cycle time series as CSV");
  simulate->add_option("--bits", bits, "bit pattern relayed cyclically (relay mode)");

  // --- corpus --------------------------------------------------------
  unsigned corpus_a = 20, corpus_b = 40;
  int corpus_n = 3, corpus_m = 2;
  CLI::App* corpus =
      app.add_subcommand("corpus", "run the exhaustive small-formula suite and report agreement");
  corpus->add_option("--a-exp", corpus_a, "good-state reset exponent");
  corpus->add_option("--b-exp", corpus_b, "bad-state reset exponent");
  corpus->add_option("--max-n", corpus_n, "largest variable count")->check(CLI::Range(1, 4));
  corpus->add_option("--max-m", corpus_m, "largest clause count")->check(CLI::Range(1, 2));

  try {
    app.parse(argc, argv);

    if (build->parsed()) {
      const QbfFormula f = load_formula(build_opt.input);
      const ChannelSpec spec(f, params_of(build_opt));
      emit((expanded ? spec.transitions_json() : spec.to_json()).dump(2), build_opt.output);
      return 0;
    }

    if (solve->parsed()) {
      const QbfFormula f = load_formula(solve_input);
      const QbfResult r = evaluate_qbf(f);
      nlohmann::json j;
      j["schema"] = "qbf-solve-v1";
      j["n"] = f.n;
      j["m"] = f.m();
      j["truth"] = r.truth;
      if (r.strategy) j["strategy"] = strategy_json(*r.strategy);
      emit(j.dump(2), solve_output);
      return 0;
    }

    if (decide->parsed()) {
      const QbfFormula f = load_formula(decide_opt.input);
      const ChannelSpec spec(f, params_of(decide_opt));
      GapThresholds thresholds{parse_rational(low_threshold), parse_rational(high_threshold)};
      if (!(thresholds.low <= thresholds.high))
        throw std::invalid_argument("--low-threshold must not exceed --high-threshold");
      const GapDecision d = decide_gap(spec, thresholds);
      if (!scenario_csv.empty()) {
        std::ofstream csv(scenario_csv);
        if (!csv) throw std::invalid_argument("cannot write '" + scenario_csv + "'");
        write_pass_analysis_csv(csv, spec, pass_bad_probability(spec, d.witness));
      }
      emit(decide_format == "text" ? decide_text(spec, d, thresholds)
                                   : gap_decision_json(spec, d, thresholds).dump(2),
           decide_opt.output);
      return 0;
    }

    if (simulate->parsed()) {
      const QbfFormula f = load_formula(sim_opt.input);
      const ChannelParams params = params_of(sim_opt);
      const ChannelSpec spec(f, params);
      const DecisionPolicy policy = select_policy(f, params, policy_kind);
      if (relay) {
        std::vector<int> stream;
        for (char c : bits) {
          if (c != '0' && c != '1')
            throw std::invalid_argument("--bits must be a string of 0s and 1s");
          stream.push_back(c - '0');
        }
        const RelayReport report = relay_bits(spec, policy, stream, steps, seed);
        emit(report_json(report).dump(2), sim_opt.output);
        return 0;
      }
      MonteCarloReport report;
      if (replicas == 1) {
        std::vector<CycleRow> cycles;
        report = monte_carlo(spec, policy, steps, seed, cycles_csv.empty() ? nullptr : &cycles);
        if (!cycles_csv.empty()) {
          std::ofstream csv(cycles_csv);
          if (!csv) throw std::invalid_argument("cannot write '" + cycles_csv + "'");
          write_cycles_csv(csv, cycles);
        }
      } else {
        if (!cycles_csv.empty())
          throw std::invalid_argument("--cycles-csv requires --replicas 1");
        report = monte_carlo_parallel(spec, policy, steps, seed, replicas);
      }
      emit(report_json(report).dump(2), sim_opt.output);
      return 0;
    }

    if (corpus->parsed()) return run_corpus(corpus_a, corpus_b, corpus_n, corpus_m);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const IndeterminateError& e) {
    std::cerr << "indeterminate: " << e.what() << "\n"
              << "hint: retry with --a-exp " << e.recommended_a_exp() << " --b-exp "
              << e.recommended_b_exp() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
