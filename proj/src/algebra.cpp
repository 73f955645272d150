#include "cumulant/algebra.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <thread>
#include <unordered_map>

#include "cumulant/errors.hpp"
#include "memo_dfs.hpp"

namespace cumulant {

namespace {

struct HeapPositionHash {
  std::size_t operator()(const HeapPosition& w) const noexcept {
    return GroundedHash{}(GroundedPosition{w, PlayerId(1)});
  }
};

// Embeds a position on `heaps` into a d-heap position that is zero elsewhere.
GroundedPosition embed(const GroundedPosition& local, const std::vector<int>& heaps, int players,
                       int d) {
  GroundedPosition full{{std::vector<Heap>(static_cast<std::size_t>(d), 0),
                         CumulationMatrix(players, d)},
                        local.previous};
  for (std::size_t l = 0; l < heaps.size(); ++l) {
    const auto h = static_cast<std::size_t>(heaps[l]);
    full.position.heaps[h] = local.position.heaps[l];
    for (int i = 0; i < players; ++i)
      full.position.cumulation(static_cast<std::size_t>(i), h) = local.position.cumulation(
          static_cast<std::size_t>(i), l);
  }
  return full;
}

CumulationMatrix project(const CumulationMatrix& m, const std::vector<int>& heaps) {
  CumulationMatrix out(m.players(), static_cast<int>(heaps.size()));
  for (std::size_t l = 0; l < heaps.size(); ++l)
    for (int i = 0; i < m.players(); ++i)
      out(static_cast<std::size_t>(i), l) = m(static_cast<std::size_t>(i),
                                              static_cast<std::size_t>(heaps[l]));
  return out;
}

PlayerId predecessor(PlayerId p, int players) {
  return PlayerId(p.index() == 1 ? players : p.index() - 1);
}

GroundedPosition slice(const GroundedPosition& g, int offset, int heaps) {
  GroundedPosition out{{std::vector<Heap>(g.position.heaps.begin() + offset,
                                          g.position.heaps.begin() + offset + heaps),
                        CumulationMatrix(g.position.cumulation.players(), heaps)},
                       g.previous};
  for (int h = 0; h < heaps; ++h)
    for (int i = 0; i < g.position.cumulation.players(); ++i)
      out.position.cumulation(static_cast<std::size_t>(i), static_cast<std::size_t>(h)) =
          g.position.cumulation(static_cast<std::size_t>(i), static_cast<std::size_t>(offset + h));
  return out;
}

}  // namespace

// ---- restriction and sums ----

CumulativeGame restrict_game(const CumulativeGame& game, const std::vector<int>& heaps) {
  for (int h : heaps)
    if (h < 0 || h >= game.heaps) throw DimensionError("heap index out of range");
  const int n = game.players;
  const int d = game.heaps;
  auto base = std::make_shared<const CumulativeGame>(game);
  CumulativeGame out = game;
  out.heaps = static_cast<int>(heaps.size());
  out.ruleset.actions = [base, heaps, n, d](const GroundedPosition& g, PlayerId mover) {
    std::vector<ActionVector> kept;
    for (const auto& a : base->ruleset.actions(embed(g, heaps, n, d), mover)) {
      ActionVector local{std::vector<Heap>(heaps.size(), 0)};
      Heap outside = 0;
      for (std::size_t h = 0; h < a.delta.size(); ++h) {
        auto it = std::find(heaps.begin(), heaps.end(), static_cast<int>(h));
        if (it == heaps.end())
          outside |= a.delta[h];
        else
          local.delta[static_cast<std::size_t>(it - heaps.begin())] = a.delta[h];
      }
      if (outside == 0) kept.push_back(std::move(local));
    }
    return kept;
  };
  out.ruleset.rewards = [base, heaps, n, d](const GroundedPosition& g, PlayerId mover,
                                            const ActionVector& a) {
    ActionVector full{std::vector<Heap>(static_cast<std::size_t>(d), 0)};
    for (std::size_t l = 0; l < heaps.size(); ++l)
      full.delta[static_cast<std::size_t>(heaps[l])] = a.delta[l];
    return project(base->ruleset.rewards(embed(g, heaps, n, d), mover, full), heaps);
  };
  if (game.turn.kind == TurnKind::custom)
    out.turn.custom = [base, heaps, n, d](const HeapPosition& w, PlayerId previous) {
      return base->turn.custom(embed({w, previous}, heaps, n, d).position, previous);
    };
  out.utility.per_heap = [base, heaps](PlayerId p, int heap, std::span<const double> column,
                                       PlayerId current) {
    return base->utility.per_heap(p, heaps.at(static_cast<std::size_t>(heap)), column, current);
  };
  return out;
}

HeapPosition restrict_position(const HeapPosition& w, const std::vector<int>& heaps) {
  HeapPosition out{{}, project(w.cumulation, heaps)};
  for (int h : heaps) out.heaps.push_back(w.heaps.at(static_cast<std::size_t>(h)));
  return out;
}

std::uint64_t check_free_order_finite(const CumulativeGame& game, const HeapPosition& w,
                                      std::uint64_t node_budget) {
  validate_position(game, {w, PlayerId(1)});
  std::unordered_map<HeapPosition, char, HeapPositionHash> seen;
  const detail::SearchLimits limits{game.move_budget, budget_from_env(node_budget)};
  auto succ = [&](const HeapPosition& p) {
    std::vector<HeapPosition> next;
    for (int i = 1; i <= game.players; ++i) {
      CumulativeGame free = game;
      free.turn = TurnFunction::cyclic();
      for (auto& m : expand_options(free, {p, predecessor(PlayerId(i), game.players)}))
        next.push_back(std::move(m.next.position));
    }
    return next;
  };
  detail::memo_dfs(
      w, seen, limits, succ, [](const HeapPosition& p) -> const HeapPosition& { return p; },
      [](const HeapPosition&, const std::vector<HeapPosition>&,
         const std::vector<const char*>&) { return char{1}; });
  return seen.size();
}

SumPosition disjunctive_sum(std::vector<Component> components, std::uint64_t node_budget) {
  if (components.empty()) throw PreconditionError("a sum needs at least one component");
  SumPosition sum;
  const int n = components.front().game.players;
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    const std::string which = "component " + std::to_string(k);
    if (c.game.players != n) throw PreconditionError(which + " has a different player count");
    if (c.game.turn.kind == TurnKind::custom)
      throw PreconditionError(which + " has a state dependent turn function");
    if (c.game.turn.kind == TurnKind::alternating && n != 2)
      throw PreconditionError(which + " alternates among more than two players");
    try {
      check_free_order_finite(c.game, c.position, node_budget);
    } catch (const CycleError& e) {
      throw PreconditionError(which + " has an infinite game tree: " + e.what());
    } catch (const BudgetExceeded& e) {
      throw PreconditionError(which + " has no finite game tree within budget: " + e.what());
    }
    sum.offsets.push_back(sum.heaps);
    sum.heaps += c.game.heaps;
  }
  sum.components = std::move(components);
  return sum;
}

SumPosition disjunctive_sum(const Component& g, const Component& h, std::uint64_t node_budget) {
  return disjunctive_sum(std::vector<Component>{g, h}, node_budget);
}

CumulativeGame to_game(const SumPosition& sum) {
  auto parts = std::make_shared<const SumPosition>(sum);
  const auto& first = sum.components.front().game;
  const int n = first.players;
  const int d = sum.heaps;

  // Component index per combined heap.
  auto owner = std::make_shared<std::vector<std::size_t>>();
  for (std::size_t k = 0; k < sum.components.size(); ++k)
    owner->insert(owner->end(), static_cast<std::size_t>(sum.components[k].game.heaps), k);

  CumulativeGame out;
  out.players = n;
  out.heaps = d;
  out.tie = first.tie;
  out.turn = TurnFunction::cyclic();
  out.move_budget = 0;
  out.ruleset.actions = [parts, d](const GroundedPosition& g, PlayerId mover) {
    std::vector<ActionVector> all;
    for (std::size_t k = 0; k < parts->components.size(); ++k) {
      const auto& c = parts->components[k].game;
      const int off = parts->offsets[k];
      for (const auto& a : c.ruleset.actions(slice(g, off, c.heaps), mover)) {
        ActionVector e{std::vector<Heap>(static_cast<std::size_t>(d), 0)};
        std::copy(a.delta.begin(), a.delta.end(), e.delta.begin() + off);
        all.push_back(std::move(e));
      }
    }
    return all;
  };
  out.ruleset.rewards = [parts, owner, n, d](const GroundedPosition& g, PlayerId mover,
                                             const ActionVector& a) {
    auto touched = std::find_if(a.delta.begin(), a.delta.end(), [](Heap v) { return v != 0; });
    CumulationMatrix r(n, d);
    if (touched == a.delta.end()) return r;
    const std::size_t k = (*owner)[static_cast<std::size_t>(touched - a.delta.begin())];
    const auto& c = parts->components[k].game;
    const int off = parts->offsets[k];
    ActionVector local{std::vector<Heap>(a.delta.begin() + off, a.delta.begin() + off + c.heaps)};
    auto m = c.ruleset.rewards(slice(g, off, c.heaps), mover, local);
    for (int h = 0; h < c.heaps; ++h)
      for (int i = 0; i < n; ++i)
        r(static_cast<std::size_t>(i), static_cast<std::size_t>(off + h)) =
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(h));
    return r;
  };
  out.ruleset.cumulation_independent = true;
  out.ruleset.symmetric = true;
  out.utility.identity = true;
  for (const auto& c : sum.components) {
    out.ruleset.cumulation_independent &= c.game.ruleset.cumulation_independent;
    out.ruleset.symmetric &= c.game.ruleset.symmetric;
    out.ruleset.short_ruleset &= c.game.ruleset.short_ruleset;
    out.utility.identity &= c.game.utility.identity;
    out.move_budget += c.game.move_budget;
  }
  out.utility.per_heap = [parts, owner](PlayerId p, int heap, std::span<const double> column,
                                        PlayerId current) {
    const std::size_t k = (*owner)[static_cast<std::size_t>(heap)];
    return parts->components[k].game.utility.per_heap(p, heap - parts->offsets[k], column,
                                                      current);
  };
  for (std::size_t k = 0; k < sum.components.size(); ++k) {
    if (k) out.label += " + ";
    out.label += sum.components[k].game.label.empty() ? "G" + std::to_string(k)
                                                      : sum.components[k].game.label;
  }
  return out;
}

HeapPosition combined_position(const SumPosition& sum) {
  const int n = sum.components.front().game.players;
  HeapPosition w{{}, CumulationMatrix(n, sum.heaps)};
  for (std::size_t k = 0; k < sum.components.size(); ++k) {
    const auto& p = sum.components[k].position;
    w.heaps.insert(w.heaps.end(), p.heaps.begin(), p.heaps.end());
    for (int h = 0; h < p.cumulation.heaps(); ++h)
      for (int i = 0; i < n; ++i)
        w.cumulation(static_cast<std::size_t>(i),
                     static_cast<std::size_t>(sum.offsets[k] + h)) =
            p.cumulation(static_cast<std::size_t>(i), static_cast<std::size_t>(h));
  }
  return w;
}

OutcomeMatrix outcome_matrix(const CumulativeGame& game, const HeapPosition& w,
                             std::uint64_t node_budget) {
  OutcomeMatrix m(game.players);
  const auto base = w.cumulation.row_sums();
  for (int p = 1; p <= game.players; ++p) {
    auto value = solve_game(game, {w, PlayerId(p)}, node_budget).value;
    for (std::size_t i = 0; i < value.size(); ++i) value[i] -= base[i];
    m.set_row(PlayerId(p), value);
  }
  return m;
}

// ---- normal play ----

std::string to_string(NpClass c) {
  switch (c) {
    case NpClass::L:
      return "L";
    case NpClass::R:
      return "R";
    case NpClass::P:
      return "P";
    case NpClass::N:
      return "N";
  }
  return "?";
}

bool np_class_geq(NpClass a, NpClass b) {
  if (a == b || a == NpClass::L || b == NpClass::R) return true;
  return false;
}

PartizanPosition negate(const PartizanPosition& g) { return {g.heap, g.right, g.left}; }

namespace {

NpClass classify(bool left_first_wins, bool right_first_wins) {
  if (left_first_wins && right_first_wins) return NpClass::N;
  if (left_first_wins) return NpClass::L;
  if (right_first_wins) return NpClass::R;
  return NpClass::P;
}

class NpSolver {
 public:
  explicit NpSolver(const std::vector<PartizanPosition>& parts) : parts_(parts) {}

  // True if the side to move wins.
  bool mover_wins(std::vector<Heap>& heaps, Side mover) {
    auto key = std::make_pair(heaps, mover);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool win = false;
    const Side other = mover == Side::left ? Side::right : Side::left;
    for (std::size_t k = 0; k < heaps.size() && !win; ++k) {
      const auto& set = mover == Side::left ? parts_[k].left : parts_[k].right;
      for (Heap s : set) {
        if (s <= 0 || s > heaps[k]) continue;
        heaps[k] -= s;
        const bool opponent = mover_wins(heaps, other);
        heaps[k] += s;
        if (!opponent) {
          win = true;
          break;
        }
      }
    }
    memo_.emplace(std::move(key), win);
    return win;
  }

 private:
  const std::vector<PartizanPosition>& parts_;
  std::map<std::pair<std::vector<Heap>, Side>, bool> memo_;
};

}  // namespace

std::vector<NpRow> np_outcome_classes(std::vector<Heap> left, std::vector<Heap> right,
                                      Heap x_max) {
  std::vector<NpRow> rows;
  for (Heap x = 0; x <= x_max; ++x) {
    NpRow r;
    r.heap = x;
    for (Heap s : left)
      if (s > 0 && s <= x && !rows[static_cast<std::size_t>(x - s)].right_first_wins)
        r.left_first_wins = true;
    for (Heap s : right)
      if (s > 0 && s <= x && !rows[static_cast<std::size_t>(x - s)].left_first_wins)
        r.right_first_wins = true;
    r.cls = classify(r.left_first_wins, r.right_first_wins);
    rows.push_back(r);
  }
  return rows;
}

Side np_winner(const std::vector<PartizanPosition>& components, Side first) {
  NpSolver solver(components);
  std::vector<Heap> heaps;
  for (const auto& c : components) heaps.push_back(c.heap);
  const bool wins = solver.mover_wins(heaps, first);
  return wins == (first == Side::left) ? Side::left : Side::right;
}

std::vector<NpMove> np_winning_moves(const std::vector<PartizanPosition>& components,
                                     Side mover) {
  NpSolver solver(components);
  std::vector<Heap> heaps;
  for (const auto& c : components) heaps.push_back(c.heap);
  const Side other = mover == Side::left ? Side::right : Side::left;
  std::vector<NpMove> out;
  for (std::size_t k = 0; k < heaps.size(); ++k) {
    const auto& set = mover == Side::left ? components[k].left : components[k].right;
    for (Heap s : set) {
      if (s <= 0 || s > heaps[k]) continue;
      heaps[k] -= s;
      if (!solver.mover_wins(heaps, other)) out.push_back({mover, k, s});
      heaps[k] += s;
    }
  }
  return out;
}

std::vector<NpMove> np_line(const std::vector<PartizanPosition>& components, Side first) {
  NpSolver solver(components);
  std::vector<Heap> heaps;
  for (const auto& c : components) heaps.push_back(c.heap);
  std::vector<NpMove> line;
  for (Side mover = first;;) {
    const Side other = mover == Side::left ? Side::right : Side::left;
    std::optional<NpMove> legal, winning;
    for (std::size_t k = 0; k < heaps.size() && !winning; ++k) {
      const auto& set = mover == Side::left ? components[k].left : components[k].right;
      for (Heap s : set) {
        if (s <= 0 || s > heaps[k]) continue;
        if (!legal) legal = NpMove{mover, k, s};
        heaps[k] -= s;
        const bool wins = !solver.mover_wins(heaps, other);
        heaps[k] += s;
        if (wins) {
          winning = NpMove{mover, k, s};
          break;
        }
      }
    }
    const auto pick = winning ? winning : legal;
    if (!pick) return line;
    heaps[pick->component] -= pick->take;
    line.push_back(*pick);
    mover = other;
  }
}

NpClass np_class(const std::vector<PartizanPosition>& components) {
  return classify(np_winner(components, Side::left) == Side::left,
                  np_winner(components, Side::right) == Side::right);
}

bool np_ge(const PartizanPosition& g, const PartizanPosition& h) {
  return np_winner({g, negate(h)}, Side::right) == Side::left;
}

// ---- certificates ----

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::proven_ge:
      return "proven_ge";
    case Verdict::refuted:
      return "refuted";
    case Verdict::unresolved:
      return "unresolved";
  }
  return "?";
}

std::string to_string(CompareMethod m) {
  return m == CompareMethod::normal_play_exact ? "normal_play_exact" : "bounded_refutation";
}

ComparisonCertificate compare_normal_play(const PartizanPosition& g, const PartizanPosition& h) {
  ComparisonCertificate c;
  c.method = CompareMethod::normal_play_exact;
  c.checked = 1;
  if (np_ge(g, h)) {
    c.verdict = Verdict::proven_ge;
    return c;
  }
  // H - H is won by Left moving second, G - H is not.
  c.verdict = Verdict::refuted;
  c.np_witness = negate(h);
  c.starting_side = Side::right;
  return c;
}

std::vector<Component> single_heap_family(const CumulativeGame& game, Heap x_max) {
  const CumulativeGame base = game.heaps == 1 ? game : restrict_game(game, {0});
  std::vector<Component> out;
  for (Heap x = 0; x <= x_max; ++x)
    out.push_back({base, {{x}, CumulationMatrix(game.players, 1)}});
  return out;
}

namespace {

struct CandidateResult {
  bool skipped = false;
  bool violated = false;
  int start = 0;
  std::vector<double> g_values;
  std::vector<double> h_values;
};

std::vector<double> sum_outcomes(const Component& a, const Component& x, std::uint64_t budget) {
  auto sum = disjunctive_sum(a, x, budget);
  auto game = to_game(sum);
  auto m = outcome_matrix(game, combined_position(sum), budget);
  // Row-major outcome matrix, row = previous player.
  std::vector<double> flat;
  for (int prev = 1; prev <= game.players; ++prev) {
    auto row = m.row(PlayerId(prev));
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

CandidateResult check_candidate(const Component& g, const Component& h, const Component& x,
                                PlayerId player, std::uint64_t budget) {
  CandidateResult r;
  std::vector<double> gm, hm;
  try {
    gm = sum_outcomes(g, x, budget);
    hm = sum_outcomes(h, x, budget);
  } catch (const Error&) {
    r.skipped = true;
    return r;
  }
  const int n = g.game.players;
  for (int start = 1; start <= n; ++start) {
    const auto row = static_cast<std::size_t>(predecessor(PlayerId(start), n).slot()) *
                     static_cast<std::size_t>(n);
    const double gv = gm[row + player.slot()];
    const double hv = hm[row + player.slot()];
    if (gv < hv - 1e-9) {
      r.violated = true;
      r.start = start;
      r.g_values.assign(gm.begin() + static_cast<std::ptrdiff_t>(row),
                        gm.begin() + static_cast<std::ptrdiff_t>(row) + n);
      r.h_values.assign(hm.begin() + static_cast<std::ptrdiff_t>(row),
                        hm.begin() + static_cast<std::ptrdiff_t>(row) + n);
      break;
    }
  }
  return r;
}

}  // namespace

ComparisonCertificate compare_refute(const Component& g, const Component& h, PlayerId player,
                                     const std::vector<Component>& family,
                                     const CompareOptions& options) {
  if (g.game.players != h.game.players)
    throw PreconditionError("compared games have different player counts");
  if (!player.valid_for(g.game.players)) throw DimensionError("player out of range");

  const std::size_t count = std::min(family.size(), options.max_candidates);
  std::vector<CandidateResult> results(count);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_violation{count};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count || k > first_violation.load()) return;
      results[k] = check_candidate(g, h, family[k], player, options.node_budget);
      if (results[k].violated) {
        std::size_t cur = first_violation.load();
        while (k < cur && !first_violation.compare_exchange_weak(cur, k)) {
        }
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::future<void>> tasks;
  for (unsigned t = 0; t < threads; ++t) tasks.push_back(std::async(std::launch::async, worker));
  for (auto& t : tasks) t.get();

  ComparisonCertificate c;
  c.method = CompareMethod::bounded_refutation;
  c.player = player.index();
  const std::size_t stop = first_violation.load();
  for (std::size_t k = 0; k < std::min(stop, count); ++k) {
    ++c.checked;
    if (results[k].skipped) ++c.skipped;
  }
  if (stop < count) {
    const auto& r = results[stop];
    ++c.checked;
    c.verdict = Verdict::refuted;
    c.witness = family[stop];
    c.starting_player = PlayerId(r.start);
    c.g_values = r.g_values;
    c.h_values = r.h_values;
  } else {
    c.verdict = Verdict::unresolved;
  }
  return c;
}

nlohmann::json to_json(const ComparisonCertificate& c) {
  nlohmann::json j;
  j["kind"] = "certificate";
  j["version"] = 1;
  j["verdict"] = to_string(c.verdict);
  j["method"] = to_string(c.method);
  j["player"] = c.player;
  j["checked"] = c.checked;
  j["skipped"] = c.skipped;
  if (c.witness) {
    j["witness"] = {{"label", c.witness->game.label},
                    {"heaps", c.witness->position.heaps},
                    {"cumulation", c.witness->position.cumulation.rows()}};
  }
  if (c.np_witness)
    j["witness"] = {{"heap", c.np_witness->heap},
                    {"left", c.np_witness->left},
                    {"right", c.np_witness->right}};
  if (c.starting_player) j["starting_player"] = c.starting_player->index();
  if (c.starting_side) j["starting_side"] = *c.starting_side == Side::left ? "left" : "right";
  if (!c.g_values.empty()) j["g_values"] = c.g_values;
  if (!c.h_values.empty()) j["h_values"] = c.h_values;
  return j;
}

}  // namespace cumulant
