#include "cumulant/outcome.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "cumulant/errors.hpp"
#include "memo_dfs.hpp"

namespace cumulant {

using nlohmann::json;

std::string to_string(OutcomeVariant v) {
  switch (v) {
    case OutcomeVariant::zs_symmetric: return "zs_symmetric";
    case OutcomeVariant::si_symmetric: return "si_symmetric";
    case OutcomeVariant::zs_partizan: return "zs_partizan";
    case OutcomeVariant::si_partizan: return "si_partizan";
  }
  return "?";
}

std::vector<std::string> OutcomeTable::columns() const {
  switch (variant) {
    case OutcomeVariant::zs_symmetric: return {"o_zs"};
    case OutcomeVariant::si_symmetric: return {"o1", "o2"};
    case OutcomeVariant::zs_partizan: return {"o_prev2", "o_prev1"};
    case OutcomeVariant::si_partizan:
      return {"p1_starts_u1", "p1_starts_u2", "p2_starts_u1", "p2_starts_u2"};
  }
  return {};
}

namespace {

using Value = std::int64_t;

std::vector<Heap> normalized(std::vector<Heap> set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  set.erase(std::remove_if(set.begin(), set.end(), [](Heap s) { return s <= 0; }), set.end());
  return set;
}

std::vector<Heap> legal(const std::vector<Heap>& set, Heap x) {
  std::vector<Heap> out;
  for (Heap s : set)
    if (s <= x) out.push_back(s);
  return out;
}

// Chooses among `acts` by primary (maximize) then secondary per tie mode.
struct Pick {
  std::vector<Heap> optimal;
  std::vector<Heap> final;
  Value primary = 0;
  Value secondary = 0;
};

template <class Primary, class Secondary>
Pick pick(const std::vector<Heap>& acts, TieMode tie, Primary primary, Secondary secondary) {
  Pick p;
  p.primary = primary(acts.front());
  for (Heap a : acts) p.primary = std::max(p.primary, primary(a));
  for (Heap a : acts)
    if (primary(a) == p.primary) p.optimal.push_back(a);
  p.secondary = secondary(p.optimal.front());
  for (Heap a : p.optimal)
    p.secondary = tie == TieMode::antagonistic ? std::min(p.secondary, secondary(a))
                                               : std::max(p.secondary, secondary(a));
  for (Heap a : p.optimal)
    if (secondary(a) == p.secondary) p.final.push_back(a);
  return p;
}

void append_row(OutcomeTable& t) {
  const Heap x = static_cast<Heap>(t.rows.size());
  const auto& rows = t.rows;
  auto val = [&](Heap y, std::size_t k) { return rows[static_cast<std::size_t>(y)].values[k]; };
  OutcomeRow row;
  row.heap = x;

  auto add_block = [&](const Pick* p) {
    if (p == nullptr) {
      row.optimal.emplace_back();
      row.tie_final.emplace_back();
      row.chosen.push_back(0);
      return;
    }
    row.optimal.push_back(p->optimal);
    row.tie_final.push_back(p->final);
    row.chosen.push_back(p->final.back());
  };

  switch (t.variant) {
    case OutcomeVariant::zs_symmetric: {
      const auto acts = legal(t.sets[0], x);
      t.cells_visited += acts.size();
      if (acts.empty()) {
        row.values = {0};
        add_block(nullptr);
        break;
      }
      Pick p = pick(acts, t.tie, [&](Heap a) { return a - val(x - a, 0); },
                    [](Heap) { return Value{0}; });
      row.values = {std::max<Value>(p.primary, 0)};
      add_block(&p);
      break;
    }
    case OutcomeVariant::si_symmetric: {
      const auto acts = legal(t.sets[0], x);
      t.cells_visited += acts.size();
      if (acts.empty()) {
        row.values = {0, 0};
        add_block(nullptr);
        break;
      }
      Pick p = pick(acts, t.tie, [&](Heap a) { return val(x - a, 1) + a; },
                    [&](Heap a) { return val(x - a, 0); });
      row.values = {p.primary, p.secondary};
      add_block(&p);
      break;
    }
    case OutcomeVariant::zs_partizan: {
      const auto first = legal(t.sets[0], x);
      const auto second = legal(t.sets[1], x);
      t.cells_visited += first.size() + second.size();
      row.values = {0, 0};
      if (first.empty()) {
        add_block(nullptr);
      } else {
        Pick p = pick(first, t.tie, [&](Heap a) { return val(x - a, 1) + a; },
                      [](Heap) { return Value{0}; });
        row.values[0] = p.primary;
        add_block(&p);
      }
      if (second.empty()) {
        add_block(nullptr);
      } else {
        // Player 2 minimizes C1 - C2, i.e. maximizes its negation.
        Pick p = pick(second, t.tie, [&](Heap a) { return a - val(x - a, 0); },
                      [](Heap) { return Value{0}; });
        row.values[1] = -p.primary;
        add_block(&p);
      }
      break;
    }
    case OutcomeVariant::si_partizan: {
      const auto first = legal(t.sets[0], x);
      const auto second = legal(t.sets[1], x);
      t.cells_visited += first.size() + second.size();
      row.values = {0, 0, 0, 0};
      if (first.empty()) {
        add_block(nullptr);
      } else {
        Pick p = pick(first, t.tie, [&](Heap a) { return val(x - a, 2) + a; },
                      [&](Heap a) { return val(x - a, 3); });
        row.values[0] = p.primary;
        row.values[1] = p.secondary;
        add_block(&p);
      }
      if (second.empty()) {
        add_block(nullptr);
      } else {
        Pick p = pick(second, t.tie, [&](Heap a) { return val(x - a, 1) + a; },
                      [&](Heap a) { return val(x - a, 0); });
        row.values[2] = p.secondary;
        row.values[3] = p.primary;
        add_block(&p);
      }
      break;
    }
  }
  t.rows.push_back(std::move(row));
}

OutcomeTable make_table(OutcomeVariant v, std::vector<std::vector<Heap>> sets, TieMode tie,
                        Heap x_max) {
  OutcomeTable t;
  t.variant = v;
  for (auto& s : sets) t.sets.push_back(normalized(std::move(s)));
  t.tie = tie;
  extend_table(t, x_max);
  return t;
}

}  // namespace

void extend_table(OutcomeTable& table, Heap x_max) {
  while (static_cast<Heap>(table.rows.size()) <= x_max) append_row(table);
}

OutcomeTable outcome_zs_symmetric(std::vector<Heap> set, Heap x_max) {
  return make_table(OutcomeVariant::zs_symmetric, {std::move(set)}, TieMode::antagonistic, x_max);
}

OutcomeTable outcome_si_symmetric(std::vector<Heap> set, TieMode tie, Heap x_max) {
  return make_table(OutcomeVariant::si_symmetric, {std::move(set)}, tie, x_max);
}

OutcomeTable outcome_zs_partizan(std::vector<Heap> first, std::vector<Heap> second, Heap x_max) {
  return make_table(OutcomeVariant::zs_partizan, {std::move(first), std::move(second)},
                    TieMode::antagonistic, x_max);
}

OutcomeTable outcome_si_partizan(std::vector<Heap> first, std::vector<Heap> second, TieMode tie,
                                 Heap x_max) {
  return make_table(OutcomeVariant::si_partizan, {std::move(first), std::move(second)}, tie,
                    x_max);
}

std::string to_csv(const OutcomeTable& table) {
  std::ostringstream os;
  os << "heap";
  for (const auto& c : table.columns()) os << ',' << c;
  os << '\n';
  for (const auto& row : table.rows) {
    os << row.heap;
    for (Value v : row.values) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

json to_json(const OutcomeTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"heap", r.heap},
                    {"values", r.values},
                    {"optimal", r.optimal},
                    {"tie_final", r.tie_final},
                    {"chosen", r.chosen}});
  return {{"kind", "outcome_table"},
          {"version", 1},
          {"variant", to_string(table.variant)},
          {"sets", table.sets},
          {"tie_policy", std::string(to_string(table.tie))},
          {"columns", table.columns()},
          {"cells_visited", table.cells_visited},
          {"rows", rows}};
}

// ---- outcome matrices ----

std::vector<double> OutcomeMatrix::row(PlayerId previous) const {
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(previous.slot() * players_);
  return {begin, begin + players_};
}

void OutcomeMatrix::set_row(PlayerId previous, const std::vector<double>& values) {
  for (int i = 0; i < players_; ++i) at(previous, PlayerId(i + 1)) = values[static_cast<std::size_t>(i)];
}

bool OutcomeMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

bool OutcomeMatrix::leq(const OutcomeMatrix& other, double tolerance) const {
  if (players_ != other.players_) throw DimensionError("outcome matrices differ in size");
  for (std::size_t k = 0; k < data_.size(); ++k)
    if (data_[k] > other.data_[k] + tolerance) return false;
  return true;
}

std::vector<double> sigma_outcome(const CumulativeGame& game, const PositionProfile& profile,
                                  const GroundedPosition& g) {
  const auto played = play_profile(game, g, profile);
  auto start = g.position.cumulation.row_sums();
  std::vector<double> out(played.cumulative.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = played.cumulative[i] - start[i];
  return out;
}

OutcomeMatrix sigma_outcome_matrix(const CumulativeGame& game, const PositionProfile& profile,
                                   const HeapPosition& w) {
  OutcomeMatrix m(game.players);
  for (int p = 1; p <= game.players; ++p)
    m.set_row(PlayerId(p), sigma_outcome(game, profile, {w, PlayerId(p)}));
  return m;
}

// ---- recursive outcome ----

namespace {

struct HeapKey {
  std::vector<Heap> heaps;
  int previous = 1;
  bool operator==(const HeapKey&) const = default;
};

struct HeapKeyHash {
  std::size_t operator()(const HeapKey& k) const noexcept {
    return HeapsHash{}(k.heaps) * 31 + static_cast<std::size_t>(k.previous);
  }
};

struct HeapEdge {
  HeapKey child;
  std::vector<double> reward;  // per player, summed over heaps
};

void require_heap_dynamic(const CumulativeGame& game) {
  if (!game.utility.identity)
    throw PreconditionError("recursive outcome needs the identity utility");
  if (!game.ruleset.cumulation_independent || !game.turn.cumulation_independent)
    throw PreconditionError("recursive outcome needs a heap-size dynamic game");
}

class HeapDynamicSolver {
 public:
  explicit HeapDynamicSolver(const CumulativeGame& game) : game_(game) { require_heap_dynamic(game); }

  const std::vector<double>& row(const HeapKey& key) {
    return detail::memo_dfs(
        key, memo_, {game_.move_budget, budget_from_env(kDefaultNodeBudget)},
        [&](const HeapKey& k) { return edges(k); },
        [](const HeapEdge& e) -> const HeapKey& { return e.child; },
        [&](const HeapKey& k, const std::vector<HeapEdge>& es,
            const std::vector<const std::vector<double>*>& children) {
          std::vector<double> best(static_cast<std::size_t>(game_.players), 0.0);
          if (es.empty()) return best;
          const PlayerId mover = mover_at(k);
          for (std::size_t j = 0; j < es.size(); ++j) {
            std::vector<double> cand = *children[j];
            for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += es[j].reward[i];
            if (j == 0 || game_.tie.compare(mover, cand, best) < 0) best = std::move(cand);
          }
          return best;
        });
  }

  std::size_t size() const { return memo_.size(); }

 private:
  GroundedPosition grounded(const HeapKey& k, double offset) const {
    GroundedPosition g{{k.heaps, CumulationMatrix(game_.players, game_.heaps)}, PlayerId(k.previous)};
    if (offset != 0.0)
      for (int i = 0; i < game_.players; ++i)
        for (int h = 0; h < game_.heaps; ++h)
          g.position.cumulation(static_cast<std::size_t>(i), static_cast<std::size_t>(h)) =
              offset * (i + 1) + h;
    return g;
  }

  PlayerId mover_at(const HeapKey& k) const {
    return game_.current_player(grounded(k, 0.0));
  }

  std::vector<HeapEdge> edges(const HeapKey& k) {
    const auto g = grounded(k, 0.0);
    const PlayerId mover = game_.current_player(g);
    auto actions = game_.ruleset.actions(g, mover);
    std::sort(actions.begin(), actions.end());
    actions.erase(std::unique(actions.begin(), actions.end()), actions.end());

    // Spot check the heap-size dynamic claim against a shifted cumulation.
    const auto shifted = grounded(k, 3.5);
    if (game_.current_player(shifted) != mover)
      throw PreconditionError("turn function depends on cumulation");
    auto other = game_.ruleset.actions(shifted, mover);
    std::sort(other.begin(), other.end());
    other.erase(std::unique(other.begin(), other.end()), other.end());
    if (other != actions) throw PreconditionError("action sets depend on cumulation");

    std::vector<HeapEdge> out;
    for (const auto& a : actions) {
      HeapEdge e;
      e.child.heaps = k.heaps;
      for (std::size_t h = 0; h < e.child.heaps.size(); ++h) {
        e.child.heaps[h] += a.delta[h];
        if (e.child.heaps[h] < 0) throw IllegalActionError("action drives a heap negative");
      }
      e.child.previous = mover.index();
      const auto r = game_.ruleset.rewards(g, mover, a);
      if (r != game_.ruleset.rewards(shifted, mover, a))
        throw PreconditionError("rewards depend on cumulation");
      e.reward = r.row_sums();
      out.push_back(std::move(e));
    }
    return out;
  }

  const CumulativeGame& game_;
  std::unordered_map<HeapKey, std::vector<double>, HeapKeyHash> memo_;
};

void enumerate_tuples(int d, Heap x_max, std::vector<Heap>& cur,
                      const std::function<void(const std::vector<Heap>&)>& visit) {
  if (static_cast<int>(cur.size()) == d) {
    visit(cur);
    return;
  }
  for (Heap x = 0; x <= x_max; ++x) {
    cur.push_back(x);
    enumerate_tuples(d, x_max, cur, visit);
    cur.pop_back();
  }
}

}  // namespace

RecursiveOutcome recursive_outcome(const CumulativeGame& game, Heap x_max) {
  HeapDynamicSolver solver(game);
  RecursiveOutcome out;
  std::vector<Heap> cur;
  enumerate_tuples(game.heaps, x_max, cur, [&](const std::vector<Heap>& heaps) {
    OutcomeMatrix m(game.players);
    for (int p = 1; p <= game.players; ++p) m.set_row(PlayerId(p), solver.row({heaps, p}));
    out.matrices.emplace(heaps, std::move(m));
  });
  out.positions = solver.size();
  return out;
}

std::vector<double> recursive_value(const CumulativeGame& game, const GroundedPosition& g) {
  validate_position(game, g);
  HeapDynamicSolver solver(game);
  auto value = solver.row({g.position.heaps, g.previous.index()});
  const auto c = g.position.cumulation.row_sums();
  for (std::size_t i = 0; i < value.size(); ++i) value[i] += c[i];
  return value;
}

}  // namespace cumulant
