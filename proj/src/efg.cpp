#include "cumulant/efg.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "cumulant/errors.hpp"
#include "memo_dfs.hpp"

namespace cumulant {

using nlohmann::json;

// ---- structure ----

void ExtensiveFormGame::validate() const {
  std::vector<std::string> errors;
  const int count = static_cast<int>(states.size());
  if (players < 1) errors.push_back("players: must be positive");
  if (count == 0) errors.push_back("states: empty");
  if (root < 0 || root >= count) errors.push_back("root: out of range");
  for (int s = 0; s < count; ++s) {
    const auto& st = states[static_cast<std::size_t>(s)];
    const std::string path = "states[" + std::to_string(s) + "]";
    std::set<int> seen;
    for (int c : st.children) {
      if (c < 0 || c >= count) errors.push_back(path + ".children: id " + std::to_string(c) + " out of range");
      if (!seen.insert(c).second) errors.push_back(path + ".children: duplicate id " + std::to_string(c));
    }
    if (st.children.empty()) {
      if (static_cast<int>(st.utilities.size()) != players)
        errors.push_back(path + ".utilities: terminal needs " + std::to_string(players) + " values");
    } else if (st.turn < 1 || st.turn > players) {
      errors.push_back(path + ".turn: out of range");
    }
  }
  if (!errors.empty()) throw ValidationError(errors);
  const auto order = topological_order();
  if (static_cast<int>(order.size()) != count) {
    std::vector<char> reached(states.size(), 0);
    std::vector<int> stack{root};
    reached[static_cast<std::size_t>(root)] = 1;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int c : states[static_cast<std::size_t>(s)].children)
        if (!reached[static_cast<std::size_t>(c)]) {
          reached[static_cast<std::size_t>(c)] = 1;
          stack.push_back(c);
        }
    }
    if (std::count(reached.begin(), reached.end(), 1) == count)
      throw CycleError("extensive form game contains a cycle");
    for (int s = 0; s < count; ++s)
      if (!reached[static_cast<std::size_t>(s)])
        errors.push_back("states[" + std::to_string(s) + "]: unreachable from root");
    throw ValidationError(errors);
  }
}

std::vector<int> ExtensiveFormGame::topological_order() const {
  const std::size_t count = states.size();
  std::vector<int> indegree(count, 0);
  std::vector<char> reached(count, 0);
  std::vector<int> stack{root};
  reached[static_cast<std::size_t>(root)] = 1;
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int c : states[static_cast<std::size_t>(s)].children) {
      ++indegree[static_cast<std::size_t>(c)];
      if (!reached[static_cast<std::size_t>(c)]) {
        reached[static_cast<std::size_t>(c)] = 1;
        stack.push_back(c);
      }
    }
  }
  // LIFO with reversed children: preorder on trees, topological on DAGs.
  std::vector<int> order;
  stack = {root};
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    order.push_back(s);
    const auto& ch = states[static_cast<std::size_t>(s)].children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it)
      if (--indegree[static_cast<std::size_t>(*it)] == 0) stack.push_back(*it);
  }
  return order;
}

// ---- induction ----

InductionResult backward_induction(const ExtensiveFormGame& efg, const TiePolicy& tie) {
  efg.validate();
  const auto order = efg.topological_order();
  InductionResult out;
  out.profile.choice.assign(efg.size(), -1);
  out.state_values.assign(efg.size(), {});
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int s = *it;
    const auto& st = efg.states[static_cast<std::size_t>(s)];
    if (st.children.empty()) {
      out.state_values[static_cast<std::size_t>(s)] = st.utilities;
      continue;
    }
    const PlayerId mover(st.turn);
    int best = st.children.front();
    for (int c : st.children) {
      if (tie.compare(mover, out.state_values[static_cast<std::size_t>(c)],
                      out.state_values[static_cast<std::size_t>(best)]) < 0)
        best = c;
    }
    out.profile.choice[static_cast<std::size_t>(s)] = best;
    out.state_values[static_cast<std::size_t>(s)] = out.state_values[static_cast<std::size_t>(best)];
  }
  out.value = out.state_values[static_cast<std::size_t>(efg.root)];
  return out;
}

std::vector<int> realized_path(const ExtensiveFormGame& efg, const StrategyProfile& profile,
                               int s) {
  std::vector<int> path{s};
  while (!efg.terminal(s)) {
    s = profile.choice.at(static_cast<std::size_t>(s));
    if (s < 0) throw PreconditionError("profile undefined at a nonterminal state");
    path.push_back(s);
    if (path.size() > efg.size()) throw CycleError("profile loops");
  }
  return path;
}

std::vector<double> profile_outcome(const ExtensiveFormGame& efg, const StrategyProfile& profile,
                                    int s) {
  return efg.states[static_cast<std::size_t>(realized_path(efg, profile, s).back())].utilities;
}

bool satisfies_pspe(const ExtensiveFormGame& efg, const StrategyProfile& profile) {
  std::vector<std::vector<double>> outcome(efg.size());
  const auto order = efg.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto s = static_cast<std::size_t>(*it);
    const auto& st = efg.states[s];
    if (st.children.empty()) {
      outcome[s] = st.utilities;
      continue;
    }
    const int chosen = profile.choice.at(s);
    if (std::find(st.children.begin(), st.children.end(), chosen) == st.children.end())
      return false;
    outcome[s] = outcome[static_cast<std::size_t>(chosen)];
    const std::size_t me = PlayerId(st.turn).slot();
    for (int c : st.children)
      if (outcome[static_cast<std::size_t>(c)][me] > outcome[s][me] + 1e-9) return false;
  }
  return true;
}

// ---- profiles on cumulative games ----

PositionProfile PositionProfile::from_map(
    std::unordered_map<GroundedPosition, ActionVector, GroundedHash> choices) {
  auto table = std::make_shared<const decltype(choices)>(std::move(choices));
  return PositionProfile([table](const GroundedPosition& g,
                                 const std::vector<Move>& options) -> std::optional<std::size_t> {
    auto it = table->find(g);
    if (it == table->end()) return std::nullopt;
    for (std::size_t k = 0; k < options.size(); ++k)
      if (options[k].action == it->second) return k;
    return std::nullopt;
  });
}

PositionProfile PositionProfile::greedy() {
  return PositionProfile([](const GroundedPosition&,
                            const std::vector<Move>& options) -> std::optional<std::size_t> {
    if (options.empty()) return std::nullopt;
    std::size_t best = 0;
    Heap best_total = 0;
    for (std::size_t k = 0; k < options.size(); ++k) {
      const auto& d = options[k].action.delta;
      const Heap total = -std::accumulate(d.begin(), d.end(), Heap{0});
      if (k == 0 || total > best_total) {
        best = k;
        best_total = total;
      }
    }
    return best;
  });
}

PositionProfile PositionProfile::seeded(std::uint64_t seed) {
  return PositionProfile([seed](const GroundedPosition& g,
                                const std::vector<Move>& options) -> std::optional<std::size_t> {
    if (options.empty()) return std::nullopt;
    std::uint64_t h = GroundedHash{}(g) ^ (seed * 0x9e3779b97f4a7c15ULL);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h % options.size());
  });
}

PlayResult play_profile(const CumulativeGame& game, const GroundedPosition& g0,
                        const PositionProfile& profile) {
  PlayResult out;
  GroundedPosition g = g0;
  for (;;) {
    auto options = expand_options(game, g);
    if (options.empty()) break;
    if (out.line.size() >= game.move_budget)
      throw BudgetExceeded("line of play exceeds move budget " + std::to_string(game.move_budget));
    auto k = profile.choose(g, options);
    if (!k || *k >= options.size())
      throw PreconditionError("profile undefined at " + format_position(g));
    out.line.push_back(options[*k].action);
    g = std::move(options[*k].next);
  }
  out.cumulative = g.position.cumulation.row_sums();
  out.terminal = std::move(g);
  return out;
}

namespace {
struct Solved {
  std::vector<double> value;
  int best = -1;
};
}  // namespace

GameSolution solve_game(const CumulativeGame& game, const GroundedPosition& g0,
                        std::uint64_t node_budget) {
  validate_position(game, g0);
  std::unordered_map<GroundedPosition, Solved, GroundedHash> memo;
  const detail::SearchLimits limits{game.move_budget, budget_from_env(node_budget)};
  const auto& root = detail::memo_dfs(
      g0, memo, limits, [&](const GroundedPosition& g) { return expand_options(game, g); },
      [](const Move& m) -> const GroundedPosition& { return m.next; },
      [&](const GroundedPosition& g, const std::vector<Move>& options,
          const std::vector<const Solved*>& children) {
        if (options.empty()) return Solved{terminal_utilities(game, g), -1};
        const PlayerId mover = game.current_player(g);
        int best = 0;
        for (int k = 1; k < static_cast<int>(children.size()); ++k)
          if (game.tie.compare(mover, children[static_cast<std::size_t>(k)]->value,
                               children[static_cast<std::size_t>(best)]->value) < 0)
            best = k;
        return Solved{children[static_cast<std::size_t>(best)]->value, best};
      });

  GameSolution out;
  out.value = root.value;
  out.positions = memo.size();
  GroundedPosition g = g0;
  out.path.push_back(g);
  for (;;) {
    const Solved& s = memo.at(g);
    if (s.best < 0) break;
    auto options = expand_options(game, g);
    auto& m = options[static_cast<std::size_t>(s.best)];
    out.line.push_back(m.action);
    g = m.next;
    out.path.push_back(g);
  }
  for (const auto& [pos, s] : memo) {
    if (s.best < 0) continue;
    auto options = expand_options(game, pos);
    out.choices.emplace(pos, options[static_cast<std::size_t>(s.best)].action);
  }
  return out;
}

// ---- CG -> EFG ----

CgEfg cg_to_efg(const CumulativeGame& game, const GroundedPosition& g0, bool merge,
                std::uint64_t node_budget) {
  validate_position(game, g0);
  const std::uint64_t budget = budget_from_env(node_budget);
  CgEfg out;
  out.efg.players = game.players;
  std::unordered_map<GroundedPosition, int, GroundedHash> ids;
  std::vector<std::size_t> depth;

  auto add = [&](GroundedPosition g, std::size_t d) {
    if (out.positions.size() >= budget)
      throw BudgetExceeded("state count exceeds node budget " + std::to_string(budget));
    const int id = static_cast<int>(out.positions.size());
    if (merge) ids.emplace(g, id);
    out.positions.push_back(std::move(g));
    out.actions.emplace_back();
    out.efg.states.emplace_back();
    depth.push_back(d);
    return id;
  };

  add(g0, 0);
  for (std::size_t s = 0; s < out.positions.size(); ++s) {
    const GroundedPosition g = out.positions[s];
    auto options = expand_options(game, g);
    const std::size_t d = depth[s];
    if (!options.empty() && d >= game.move_budget)
      throw BudgetExceeded("line of play exceeds move budget " + std::to_string(game.move_budget));
    EfgState st;
    st.turn = game.current_player(g).index();
    if (options.empty()) st.utilities = terminal_utilities(game, g);
    std::vector<ActionVector> acts;
    for (auto& m : options) {
      int child;
      if (auto it = merge ? ids.find(m.next) : ids.end(); it != ids.end()) {
        child = it->second;
      } else {
        child = add(std::move(m.next), d + 1);
      }
      st.children.push_back(child);
      acts.push_back(std::move(m.action));
    }
    out.efg.states[s] = std::move(st);
    out.actions[s] = std::move(acts);
  }
  out.efg.root = 0;
  return out;
}

// ---- EFG transforms ----

ExtensiveFormGame uniform_child_movers(const ExtensiveFormGame& efg, std::vector<int>* dummies) {
  efg.validate();
  ExtensiveFormGame out = efg;
  const std::size_t original = efg.size();
  for (std::size_t s = 0; s < original; ++s) {
    std::vector<int> children = out.states[s].children;
    int target = 0;
    for (int c : children)
      if (!efg.terminal(c)) {
        target = efg.states[static_cast<std::size_t>(c)].turn;
        break;
      }
    for (int& c : children) {
      if (efg.terminal(c) || efg.states[static_cast<std::size_t>(c)].turn == target) continue;
      EfgState dummy;
      dummy.turn = target;
      dummy.children = {c};
      c = static_cast<int>(out.states.size());
      out.states.push_back(std::move(dummy));
      if (dummies) dummies->push_back(c);
    }
    out.states[s].children = std::move(children);
  }
  return out;
}

ExtensiveFormGame cycle_complete(const ExtensiveFormGame& efg, std::vector<int>* dummies) {
  efg.validate();
  ExtensiveFormGame out = efg;
  const int n = efg.players;
  const std::size_t original = efg.size();
  for (std::size_t s = 0; s < original; ++s) {
    const int from = efg.states[s].turn;
    std::vector<int> children = out.states[s].children;
    for (int& c : children) {
      if (efg.terminal(c)) continue;
      const int to = efg.states[static_cast<std::size_t>(c)].turn;
      const int k = ((to - from - 1) % n + n) % n + 1;
      int next = c;
      // Build the chain backwards so each dummy points at its successor.
      for (int j = k - 1; j >= 1; --j) {
        EfgState dummy;
        dummy.turn = (from - 1 + j) % n + 1;
        dummy.children = {next};
        next = static_cast<int>(out.states.size());
        out.states.push_back(std::move(dummy));
        if (dummies) dummies->push_back(next);
      }
      c = next;
    }
    out.states[s].children = std::move(children);
  }
  return out;
}

ExtensiveFormGame reduce(const ExtensiveFormGame& efg) {
  efg.validate();
  auto target = [&](int s) {
    while (efg.states[static_cast<std::size_t>(s)].children.size() == 1)
      s = efg.states[static_cast<std::size_t>(s)].children.front();
    return s;
  };
  ExtensiveFormGame out;
  out.players = efg.players;
  std::map<int, int> ids;
  std::vector<int> queue{target(efg.root)};
  ids[queue.front()] = 0;
  out.states.emplace_back();
  for (std::size_t k = 0; k < queue.size(); ++k) {
    const int s = queue[k];
    EfgState st = efg.states[static_cast<std::size_t>(s)];
    for (int& c : st.children) {
      const int t = target(c);
      auto [it, inserted] = ids.emplace(t, static_cast<int>(out.states.size()));
      if (inserted) {
        out.states.emplace_back();
        queue.push_back(t);
      }
      c = it->second;
    }
    out.states[static_cast<std::size_t>(ids.at(s))] = std::move(st);
  }
  out.root = 0;
  return out;
}

// ---- EFG -> CG ----

namespace {

std::vector<int> checked_numbering(const ExtensiveFormGame& efg, std::vector<int> q) {
  const int count = static_cast<int>(efg.size());
  if (static_cast<int>(q.size()) != count)
    throw ValidationError("numbering", "needs one entry per state");
  std::vector<char> used(efg.size() + 1, 0);
  for (int v : q) {
    if (v < 1 || v > count || used[static_cast<std::size_t>(v)])
      throw ValidationError("numbering", "must be a permutation of 1..Q");
    used[static_cast<std::size_t>(v)] = 1;
  }
  if (q[static_cast<std::size_t>(efg.root)] != 1)
    throw ValidationError("numbering", "root must be numbered 1");
  for (int s = 0; s < count; ++s)
    for (int c : efg.states[static_cast<std::size_t>(s)].children)
      if (q[static_cast<std::size_t>(c)] <= q[static_cast<std::size_t>(s)])
        throw ValidationError("numbering", "children must be numbered after their parents");
  return q;
}

EfgConversion finish(GameDocument doc, ExtensiveFormGame transformed, std::vector<int> dummies,
                     std::vector<Heap> heap_of_state) {
  EfgConversion out{std::move(doc), {}, {}, std::move(transformed), std::move(dummies),
                    std::move(heap_of_state)};
  out.game = build_game(out.document);
  out.start = initial_position(out.document);
  return out;
}

}  // namespace

EfgConversion efg_to_cg_preorder(const ExtensiveFormGame& efg,
                                 std::optional<std::vector<int>> numbering) {
  std::vector<int> dummies;
  ExtensiveFormGame work = uniform_child_movers(efg, &dummies);
  if (numbering && !dummies.empty())
    throw PreconditionError("explicit numbering requires children with a common mover");
  std::vector<int> q(work.size());
  if (numbering) {
    q = checked_numbering(work, *numbering);
  } else {
    const auto order = work.topological_order();
    for (std::size_t k = 0; k < order.size(); ++k)
      q[static_cast<std::size_t>(order[k])] = static_cast<int>(k) + 1;
  }
  const Heap total = static_cast<Heap>(work.size());

  GameDocument doc;
  doc.players = work.players;
  doc.heaps = 1;
  doc.label = "efg_preorder";
  doc.ruleset.preset = RulesetPreset::custom_table;
  doc.ruleset.rewards = RewardScheme::uniform_removal;
  doc.ruleset.turn = TurnTableKind::table;
  doc.utility.preset = UtilityPreset::custom_terminal_table;

  std::vector<Heap> heap_of(work.size());
  for (std::size_t s = 0; s < work.size(); ++s) heap_of[s] = total - q[s];
  std::vector<std::size_t> by_q(work.size());
  for (std::size_t s = 0; s < work.size(); ++s) by_q[static_cast<std::size_t>(q[s] - 1)] = s;
  for (std::size_t s : by_q) {
    const auto& st = work.states[s];
    const Heap x = heap_of[s];
    if (st.children.empty()) {
      doc.utility.table.push_back({static_cast<double>(q[s]), st.utilities});
      continue;
    }
    TableMove m{{x}, 0, {}};
    for (int c : st.children) m.actions.push_back({{heap_of[static_cast<std::size_t>(c)] - x}});
    doc.ruleset.moves.push_back(std::move(m));
    doc.ruleset.turn_table.push_back({{x}, st.turn});
  }
  const auto root = static_cast<std::size_t>(work.root);
  doc.initial.heaps = {heap_of[root]};
  doc.initial.cumulation.assign(static_cast<std::size_t>(work.players),
                                {static_cast<double>(q[root])});
  doc.initial.previous_player = 1;
  return finish(std::move(doc), std::move(work), std::move(dummies), std::move(heap_of));
}

EfgConversion efg_to_cg_cyclic(const ExtensiveFormGame& efg) {
  std::vector<int> dummies;
  ExtensiveFormGame work = cycle_complete(efg, &dummies);
  const int n = work.players;
  const auto order = work.topological_order();
  std::vector<Heap> heap_of(work.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    heap_of[static_cast<std::size_t>(order[k])] = static_cast<Heap>(k);

  GameDocument doc;
  doc.players = n;
  doc.heaps = 1;
  doc.label = "efg_cyclic";
  doc.ruleset.preset = RulesetPreset::custom_table;
  doc.ruleset.rewards = RewardScheme::table;
  doc.ruleset.turn = TurnTableKind::cyclic;
  doc.utility.preset = UtilityPreset::identity;
  for (int s : order) {
    const auto& st = work.states[static_cast<std::size_t>(s)];
    if (st.children.empty()) continue;
    const Heap x = heap_of[static_cast<std::size_t>(s)];
    TableMove m{{x}, 0, {}};
    for (int c : st.children) {
      const ActionVector a{{heap_of[static_cast<std::size_t>(c)] - x}};
      m.actions.push_back(a);
      if (work.terminal(c)) {
        std::vector<std::vector<double>> reward;
        for (double u : work.states[static_cast<std::size_t>(c)].utilities) reward.push_back({u});
        doc.ruleset.reward_table.push_back({{x}, 0, a, std::move(reward)});
      }
    }
    doc.ruleset.moves.push_back(std::move(m));
  }
  const int root_turn = work.terminal(work.root) ? 1 : work.states[static_cast<std::size_t>(work.root)].turn;
  doc.initial.heaps = {heap_of[static_cast<std::size_t>(work.root)]};
  doc.initial.previous_player = (root_turn + n - 2) % n + 1;
  if (work.terminal(work.root)) {
    // No action can pay out the utilities, so they start in the cumulation.
    for (double u : work.states[static_cast<std::size_t>(work.root)].utilities)
      doc.initial.cumulation.push_back({u});
  }
  return finish(std::move(doc), std::move(work), std::move(dummies), std::move(heap_of));
}

// ---- JSON ----

json to_json(const ExtensiveFormGame& efg) {
  json states = json::array();
  for (std::size_t s = 0; s < efg.size(); ++s) {
    const auto& st = efg.states[s];
    json e{{"id", s}, {"turn", st.turn}, {"children", st.children}};
    if (st.children.empty()) e["utilities"] = st.utilities;
    states.push_back(e);
  }
  return {{"kind", "efg"}, {"version", 1}, {"players", efg.players}, {"root", efg.root},
          {"states", states}};
}

ExtensiveFormGame parse_efg_document(const json& j) {
  std::vector<std::string> errors;
  ExtensiveFormGame efg;
  if (!j.is_object()) throw ValidationError("", "document must be a JSON object");
  auto need = [&](const char* key) {
    if (!j.contains(key)) errors.push_back(std::string(key) + ": missing");
    return j.contains(key);
  };
  if (j.contains("kind") && j["kind"] != "efg") errors.push_back("kind: expected 'efg'");
  if (need("version") && j["version"] != 1) errors.push_back("version: unsupported");
  try {
    if (need("players")) efg.players = j["players"].get<int>();
    if (need("root")) efg.root = j["root"].get<int>();
  } catch (const json::exception&) {
    errors.push_back("players/root: wrong type");
  }
  if (need("states")) {
    const json& states = j["states"];
    if (!states.is_array()) {
      errors.push_back("states: expected an array");
    } else {
      efg.states.resize(states.size());
      std::vector<char> seen(states.size(), 0);
      for (std::size_t k = 0; k < states.size(); ++k) {
        const std::string path = "states[" + std::to_string(k) + "]";
        const json& e = states[k];
        try {
          const int id = e.contains("id") ? e["id"].get<int>() : static_cast<int>(k);
          if (id < 0 || id >= static_cast<int>(states.size()) || seen[static_cast<std::size_t>(id)]) {
            errors.push_back(path + ".id: invalid or duplicate");
            continue;
          }
          seen[static_cast<std::size_t>(id)] = 1;
          EfgState st;
          if (e.contains("turn")) st.turn = e["turn"].get<int>();
          if (e.contains("children")) st.children = e["children"].get<std::vector<int>>();
          if (e.contains("utilities")) st.utilities = e["utilities"].get<std::vector<double>>();
          efg.states[static_cast<std::size_t>(id)] = std::move(st);
        } catch (const json::exception&) {
          errors.push_back(path + ": wrong field type");
        }
      }
    }
  }
  if (!errors.empty()) throw ValidationError(errors);
  efg.validate();
  return efg;
}

}  // namespace cumulant
