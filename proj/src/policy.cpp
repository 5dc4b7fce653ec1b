#include "qbfchan/policy.hpp"

#include <algorithm>
#include <memory>
#include <ostream>

namespace qbfchan {

void check_history(const HistoryView& hist, int n) {
  if (hist.empty() || hist[0] != ObsLabel{StateFamily::S0, 0})
    throw std::invalid_argument("history must begin with S0");
  if (static_cast<int>(hist.size()) > 2 * n + 2)
    throw std::invalid_argument("history longer than a pass");
  for (size_t idx = 1; idx < hist.size(); ++idx) {
    const ObsLabel& label = hist[idx];
    if (static_cast<int>(idx) == 2 * n + 1) {
      if (!is_absorbing(label.family))
        throw std::invalid_argument("pass must end in Good or Bad");
      continue;
    }
    const int col = static_cast<int>((idx + 1) / 2);
    if (idx % 2 == 1) {
      if (!is_column_entry(label.family) || label.col != col)
        throw std::invalid_argument("expected a column-" + std::to_string(col) +
                                    " entry label at position " + std::to_string(idx));
    } else {
      const bool branch = label.family == StateFamily::T || label.family == StateFamily::Tp ||
                          label.family == StateFamily::F || label.family == StateFamily::Fp;
      if (!branch || label.col != col)
        throw std::invalid_argument("expected a column-" + std::to_string(col) +
                                    " branch label at position " + std::to_string(idx));
    }
  }
}

std::vector<bool> assigned_values(const HistoryView& hist) {
  std::vector<bool> values;
  for (size_t idx = 2; idx < hist.size(); idx += 2) {
    const StateFamily f = hist[idx].family;
    if (f == StateFamily::T || f == StateFamily::Tp) values.push_back(true);
    else if (f == StateFamily::F || f == StateFamily::Fp) values.push_back(false);
    else break;
  }
  return values;
}

DecisionPolicy table_policy(std::string name, std::map<HistoryView, Decision> table) {
  auto shared = std::make_shared<std::map<HistoryView, Decision>>(std::move(table));
  return DecisionPolicy{
      std::move(name),
      [shared](const HistoryView& hist) {
        auto it = shared->find(hist);
        return it == shared->end() ? Decision::D1 : it->second;
      }};
}

DecisionPolicy strategy_policy(const ExistentialStrategy& strategy) {
  auto shared = std::make_shared<ExistentialStrategy>(strategy);
  return DecisionPolicy{
      "strategy",
      [shared](const HistoryView& hist) {
        if (hist.empty() || hist[0] != ObsLabel{StateFamily::S0, 0})
          throw std::invalid_argument("history must begin with S0");
        if (hist.size() % 2 != 0 || !is_column_entry(hist.back().family))
          throw std::invalid_argument("policy queried away from a column-entry label");
        const int var = hist.back().col;
        if (static_cast<size_t>(2 * var) != hist.size())
          throw std::invalid_argument("column-entry label at the wrong history position");
        std::vector<bool> prefix = assigned_values(hist);
        if (static_cast<int>(prefix.size()) != var - 1)
          throw std::invalid_argument("history branch labels are inconsistent");
        if (!shared->defined(var, prefix)) return Decision::D1;  // unreachable under the strategy
        return shared->value(var, prefix) ? Decision::D1 : Decision::D2;
      }};
}

namespace {

// Coin bit k belongs to the k-th universal column in index order.
std::vector<int> coin_index_by_col(const ChannelSpec& spec) {
  std::vector<int> index(spec.n() + 1, -1);
  int k = 0;
  for (int j = 1; j <= spec.n(); ++j)
    if (!spec.existential(j)) index[j] = k++;
  return index;
}

// One deterministic step of a scenario's walk. 'value' is the branch to
// take at a column-entry state (true = T) and is ignored elsewhere.
StateId scenario_step(const ChannelSpec& spec, const StateId& s, int row, bool value) {
  switch (s.family) {
    case StateFamily::S0:
      return {StateFamily::Ap, row, 1};
    case StateFamily::A:
    case StateFamily::Ap: {
      const bool primed = s.family == StateFamily::Ap;
      StateFamily branch = value ? (primed ? StateFamily::Tp : StateFamily::T)
                                 : (primed ? StateFamily::Fp : StateFamily::F);
      return {branch, s.row, s.col};
    }
    case StateFamily::T:
    case StateFamily::Tp:
    case StateFamily::F:
    case StateFamily::Fp:
      return spec.transition(s, Decision::D1).front().first;
    default:
      throw std::logic_error("scenario stepped out of an absorbing state");
  }
}

void reject_leak(const ChannelSpec& spec, const char* op) {
  if (spec.params().leak_exp)
    throw std::invalid_argument(std::string(op) + ": specs with a leak are unsupported");
}

uint64_t scenario_space(const ChannelSpec& spec) {
  const int u = spec.num_universals();
  return static_cast<uint64_t>(spec.m()) << u;
}

void check_scenario_guard(const ChannelSpec& spec, const char* op) {
  if (scenario_space(spec) > kScenarioGuard)
    throw std::invalid_argument(std::string(op) + ": m * 2^universals exceeds the guard");
}

}  // namespace

PassAnalysis pass_bad_probability(const ChannelSpec& spec, const DecisionPolicy& pol) {
  reject_leak(spec, "pass_bad_probability");
  check_scenario_guard(spec, "pass_bad_probability");

  const auto coin_index = coin_index_by_col(spec);
  const int u = spec.num_universals();
  const uint64_t coin_count = uint64_t{1} << u;

  PassAnalysis analysis;
  analysis.policy_name = pol.name;
  uint64_t bad = 0;
  for (int row = 1; row <= spec.m(); ++row) {
    for (uint64_t coins = 0; coins < coin_count; ++coins) {
      HistoryView hist{{StateFamily::S0, 0}};
      StateId state{StateFamily::S0, 0, 0};
      for (int step = 0; step < spec.pass_length(); ++step) {
        bool value = false;
        if (is_column_entry(state.family)) {
          if (spec.existential(state.col)) {
            value = pol.rule(hist) == Decision::D1;
          } else {
            value = (coins >> coin_index[state.col]) & 1;
          }
        }
        state = scenario_step(spec, state, row, value);
        hist.push_back(spec.observe(state));
      }
      analysis.table.push_back(
          {Scenario{row, static_cast<uint32_t>(coins)}, state});
      if (state.family == StateFamily::Bad) ++bad;
    }
  }
  analysis.beta = Rational(BigInt(bad), BigInt(spec.m()) << u);
  return analysis;
}

namespace {

struct DpEntry {
  Scenario scenario;
  StateId state;
};

struct DpContext {
  const ChannelSpec& spec;
  std::vector<int> coin_index;
  Rational unit;  // probability of one scenario
  std::map<HistoryView, Decision>* table = nullptr;
  uint64_t nodes = 0;
};

// Advances every entry one step; at column entries of existential columns
// the caller supplies the decision via 'value'; universal columns read each
// scenario's coin.
std::vector<DpEntry> advance_entries(const DpContext& ctx, const std::vector<DpEntry>& entries,
                                     bool decision_value) {
  std::vector<DpEntry> next;
  next.reserve(entries.size());
  for (const DpEntry& e : entries) {
    bool value = decision_value;
    if (is_column_entry(e.state.family) && !ctx.spec.existential(e.state.col))
      value = (e.scenario.coins >> ctx.coin_index[e.state.col]) & 1;
    next.push_back({e.scenario, scenario_step(ctx.spec, e.state, e.scenario.row, value)});
  }
  return next;
}

// Splits advanced entries into per-label children, ordered by label.
std::vector<std::pair<ObsLabel, std::vector<DpEntry>>> partition_by_label(
    const DpContext& ctx, const std::vector<DpEntry>& advanced) {
  std::map<ObsLabel, std::vector<DpEntry>> buckets;
  for (const DpEntry& e : advanced) buckets[ctx.spec.observe(e.state)].push_back(e);
  return {buckets.begin(), buckets.end()};
}

bool is_decision_node(const DpContext& ctx, const std::vector<DpEntry>& entries) {
  const StateId& s = entries.front().state;
  return is_column_entry(s.family) && ctx.spec.existential(s.col);
}

Rational dp_value(DpContext& ctx, const std::vector<DpEntry>& entries, HistoryView& hist) {
  ++ctx.nodes;
  const StateFamily family = entries.front().state.family;
  if (is_absorbing(family)) {
    return family == StateFamily::Bad ? ctx.unit * static_cast<int64_t>(entries.size())
                                      : Rational(0);
  }
  if (is_decision_node(ctx, entries)) {
    Rational best;
    Decision best_d = Decision::D1;
    bool first = true;
    for (Decision d : {Decision::D1, Decision::D2}) {
      auto advanced = advance_entries(ctx, entries, d == Decision::D1);
      hist.push_back(ctx.spec.observe(advanced.front().state));
      Rational v = dp_value(ctx, advanced, hist);
      hist.pop_back();
      if (first || v < best) {  // strict: ties stay at D1
        best = v;
        best_d = d;
        first = false;
      }
    }
    if (ctx.table) (*ctx.table)[hist] = best_d;
    return best;
  }
  // Chance node: S0 fan-out, universal coin, or crossover split.
  auto advanced = advance_entries(ctx, entries, false);
  Rational total(0);
  for (auto& [label, child] : partition_by_label(ctx, advanced)) {
    hist.push_back(label);
    total += dp_value(ctx, child, hist);
    hist.pop_back();
  }
  return total;
}

std::vector<DpEntry> root_entries(const ChannelSpec& spec) {
  const int u = spec.num_universals();
  std::vector<DpEntry> entries;
  entries.reserve(scenario_space(spec));
  for (int row = 1; row <= spec.m(); ++row)
    for (uint64_t coins = 0; coins < (uint64_t{1} << u); ++coins)
      entries.push_back({Scenario{row, static_cast<uint32_t>(coins)},
                         StateId{StateFamily::S0, 0, 0}});
  return entries;
}

}  // namespace

OptimalPolicyResult optimal_bad_probability(const ChannelSpec& spec) {
  reject_leak(spec, "optimal_bad_probability");
  check_scenario_guard(spec, "optimal_bad_probability");

  OptimalPolicyResult result;
  DpContext ctx{spec, coin_index_by_col(spec),
                Rational(BigInt(1), BigInt(spec.m()) << spec.num_universals()),
                &result.decisions};
  HistoryView hist{{StateFamily::S0, 0}};
  result.beta_min = dp_value(ctx, root_entries(spec), hist);
  result.policy = table_policy("optimal", result.decisions);
  return result;
}

uint64_t count_reachable_histories(const ChannelSpec& spec) {
  reject_leak(spec, "count_reachable_histories");
  check_scenario_guard(spec, "count_reachable_histories");
  DpContext ctx{spec, coin_index_by_col(spec), Rational(0), nullptr};
  HistoryView hist{{StateFamily::S0, 0}};
  dp_value(ctx, root_entries(spec), hist);
  return ctx.nodes;
}

namespace {

struct EnumItem {
  std::vector<DpEntry> entries;
  HistoryView hist;
};

struct EnumContext {
  DpContext dp;
  const std::function<void(const std::map<HistoryView, Decision>&)>* fn = nullptr;
  std::map<HistoryView, Decision> table;
  uint64_t emitted = 0;
};

void enum_rec(EnumContext& ctx, std::vector<EnumItem>& work) {
  if (work.empty()) {
    if (++ctx.emitted > kPolicyGuard)
      throw std::invalid_argument("enumerate_policies: policy count exceeds the guard");
    (*ctx.fn)(ctx.table);
    return;
  }
  EnumItem item = std::move(work.back());
  work.pop_back();
  const StateFamily family = item.entries.front().state.family;
  if (is_absorbing(family)) {
    enum_rec(ctx, work);
  } else if (is_decision_node(ctx.dp, item.entries)) {
    for (Decision d : {Decision::D1, Decision::D2}) {
      auto advanced = advance_entries(ctx.dp, item.entries, d == Decision::D1);
      HistoryView child_hist = item.hist;
      child_hist.push_back(ctx.dp.spec.observe(advanced.front().state));
      ctx.table[item.hist] = d;
      work.push_back({std::move(advanced), std::move(child_hist)});
      enum_rec(ctx, work);
      work.pop_back();
    }
    ctx.table.erase(item.hist);
  } else {
    auto advanced = advance_entries(ctx.dp, item.entries, false);
    size_t pushed = 0;
    for (auto& [label, child] : partition_by_label(ctx.dp, advanced)) {
      HistoryView child_hist = item.hist;
      child_hist.push_back(label);
      work.push_back({std::move(child), std::move(child_hist)});
      ++pushed;
    }
    enum_rec(ctx, work);
    work.resize(work.size() - pushed);
  }
  work.push_back(std::move(item));
}

}  // namespace

void for_each_policy(const ChannelSpec& spec,
                     const std::function<void(const std::map<HistoryView, Decision>&)>& fn) {
  reject_leak(spec, "enumerate_policies");
  check_scenario_guard(spec, "enumerate_policies");
  if (count_reachable_histories(spec) > kHistoryGuard)
    throw std::invalid_argument("enumerate_policies: reachable-history count exceeds the guard");

  EnumContext ctx{DpContext{spec, coin_index_by_col(spec), Rational(0), nullptr}, &fn, {}, 0};
  std::vector<EnumItem> work;
  work.push_back({root_entries(spec), HistoryView{{StateFamily::S0, 0}}});
  enum_rec(ctx, work);
}

std::vector<DecisionPolicy> enumerate_policies(const ChannelSpec& spec) {
  std::vector<DecisionPolicy> out;
  for_each_policy(spec, [&](const std::map<HistoryView, Decision>& table) {
    out.push_back(table_policy("policy-" + std::to_string(out.size()), table));
  });
  return out;
}

void write_pass_analysis_csv(std::ostream& out, const ChannelSpec& spec,
                             const PassAnalysis& analysis) {
  const int u = spec.num_universals();
  out << "# policy=" << analysis.policy_name << " beta=" << fraction_string(analysis.beta)
      << "\n";
  out << "clause_row,universal_assignment,final_state\n";
  for (const auto& row : analysis.table) {
    std::string coins;
    for (int k = 0; k < u; ++k) coins += ((row.scenario.coins >> k) & 1) ? '1' : '0';
    out << row.scenario.row << "," << coins << "," << to_string(row.final_state) << "\n";
  }
}

}  // namespace qbfchan
