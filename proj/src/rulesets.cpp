#include "cumulant/rulesets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

#include "cumulant/errors.hpp"

namespace cumulant {

using nlohmann::json;

namespace {

constexpr int kPrologueHeaps = 6;
constexpr Heap kPrologueSize = 4;
constexpr double kPrologueAuctionValue = 4;

// Index of the single heap an action touches, or -1.
int touched_heap(const ActionVector& a) {
  int found = -1;
  for (std::size_t h = 0; h < a.delta.size(); ++h) {
    if (a.delta[h] == 0) continue;
    if (found >= 0) return -1;
    found = static_cast<int>(h);
  }
  return found;
}

const std::vector<Heap>& set_for(const RulesetSpec& rs, PlayerId mover) {
  return rs.sets.size() == 1 ? rs.sets.front() : rs.sets.at(mover.slot());
}

std::vector<ActionVector> subtraction_actions(const std::vector<Heap>& set,
                                              const std::vector<Heap>& heaps) {
  std::vector<ActionVector> out;
  for (std::size_t h = 0; h < heaps.size(); ++h)
    for (Heap s : set)
      if (s > 0 && s <= heaps[h]) {
        ActionVector a{std::vector<Heap>(heaps.size(), 0)};
        a.delta[h] = -s;
        out.push_back(std::move(a));
      }
  return out;
}

std::vector<ActionVector> wealth_actions(const GroundedPosition& g, PlayerId mover,
                                         std::size_t h) {
  std::vector<ActionVector> out;
  const auto& w = g.position;
  const Heap cap = std::min<Heap>(w.heaps[h], static_cast<Heap>(std::floor(
                                                  w.cumulation(mover.slot(), h) + 1e-9)));
  for (Heap s = 1; s <= cap; ++s) {
    ActionVector a{std::vector<Heap>(w.heaps.size(), 0)};
    a.delta[h] = -s;
    out.push_back(std::move(a));
  }
  return out;
}

void scheme_reward(RewardScheme scheme, CumulationMatrix& r, const GroundedPosition& g,
                   PlayerId mover, std::size_t h, Heap delta) {
  const double s = static_cast<double>(-delta);
  const int n = r.players();
  const bool last = delta < 0 && -delta == g.position.heaps[h];
  switch (scheme) {
    case RewardScheme::identity:
      r(mover.slot(), h) += s;
      break;
    case RewardScheme::transfer:
      for (int i = 0; i < n; ++i) r(i, h) += (i == static_cast<int>(mover.slot()) ? s : -s);
      break;
    case RewardScheme::none:
    case RewardScheme::table:
      break;
    case RewardScheme::last_move_bonus:
    case RewardScheme::last_move_penalty: {
      if (!last) break;
      const double sign = scheme == RewardScheme::last_move_bonus ? 1.0 : -1.0;
      for (int i = 0; i < n; ++i)
        r(i, h) += (i == static_cast<int>(mover.slot()) ? sign : -sign);
      break;
    }
    case RewardScheme::uniform_removal:
      for (int i = 0; i < n; ++i) r(i, h) += s;
      break;
  }
}

struct TableKey {
  std::vector<Heap> heaps;
  int mover;
  auto operator<=>(const TableKey&) const = default;
};

struct RewardKey {
  std::vector<Heap> heaps;
  int mover;
  std::vector<Heap> action;
  auto operator<=>(const RewardKey&) const = default;
};

struct Tables {
  std::map<TableKey, std::vector<ActionVector>> moves;
  std::map<std::vector<Heap>, int> turns;
  std::map<RewardKey, CumulationMatrix> rewards;
};

std::shared_ptr<const Tables> compile_tables(const RulesetSpec& rs) {
  auto t = std::make_shared<Tables>();
  for (const auto& m : rs.moves) {
    auto& slot = t->moves[{m.heaps, m.mover}];
    slot.insert(slot.end(), m.actions.begin(), m.actions.end());
  }
  for (const auto& e : rs.turn_table) t->turns[e.heaps] = e.player;
  for (const auto& e : rs.reward_table)
    t->rewards[{e.heaps, e.mover, e.action.delta}] = CumulationMatrix::from_rows(e.reward);
  return t;
}

Ruleset fixed_ruleset(const RulesetSpec& rs, int players, int heaps) {
  Ruleset r;
  auto spec = std::make_shared<const RulesetSpec>(rs);
  r.actions = [spec](const GroundedPosition& g, PlayerId mover) {
    return subtraction_actions(set_for(*spec, mover), g.position.heaps);
  };
  r.rewards = [spec, players, heaps](const GroundedPosition& g, PlayerId mover,
                                     const ActionVector& a) {
    CumulationMatrix m(players, heaps);
    for (std::size_t h = 0; h < a.delta.size(); ++h)
      if (a.delta[h] != 0) scheme_reward(spec->rewards, m, g, mover, h, a.delta[h]);
    return m;
  };
  r.symmetric = std::all_of(rs.sets.begin(), rs.sets.end(),
                            [&](const auto& s) { return s == rs.sets.front(); });
  return r;
}

Ruleset wealth_ruleset(const RulesetSpec& rs, int players, int heaps) {
  Ruleset r;
  r.actions = [](const GroundedPosition& g, PlayerId mover) {
    std::vector<ActionVector> out;
    for (std::size_t h = 0; h < g.position.heaps.size(); ++h) {
      auto part = wealth_actions(g, mover, h);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  };
  const RewardScheme scheme = rs.rewards;
  r.rewards = [scheme, players, heaps](const GroundedPosition& g, PlayerId mover,
                                       const ActionVector& a) {
    CumulationMatrix m(players, heaps);
    for (std::size_t h = 0; h < a.delta.size(); ++h)
      if (a.delta[h] != 0) scheme_reward(scheme, m, g, mover, h, a.delta[h]);
    return m;
  };
  r.cumulation_independent = false;
  return r;
}

Ruleset table_ruleset(const RulesetSpec& rs, int players, int heaps) {
  Ruleset r;
  auto t = compile_tables(rs);
  r.actions = [t](const GroundedPosition& g, PlayerId mover) {
    const auto& x = g.position.heaps;
    if (auto it = t->moves.find({x, mover.index()}); it != t->moves.end()) return it->second;
    if (auto it = t->moves.find({x, 0}); it != t->moves.end()) return it->second;
    return std::vector<ActionVector>{};
  };
  const RewardScheme scheme = rs.rewards;
  r.rewards = [t, scheme, players, heaps](const GroundedPosition& g, PlayerId mover,
                                          const ActionVector& a) {
    if (scheme == RewardScheme::table) {
      const auto& x = g.position.heaps;
      if (auto it = t->rewards.find({x, mover.index(), a.delta}); it != t->rewards.end())
        return it->second;
      if (auto it = t->rewards.find({x, 0, a.delta}); it != t->rewards.end()) return it->second;
      return CumulationMatrix(players, heaps);
    }
    CumulationMatrix m(players, heaps);
    for (std::size_t h = 0; h < a.delta.size(); ++h)
      if (a.delta[h] != 0) scheme_reward(scheme, m, g, mover, h, a.delta[h]);
    return m;
  };
  r.symmetric = std::all_of(rs.moves.begin(), rs.moves.end(),
                            [](const TableMove& m) { return m.mover == 0; });
  return r;
}

std::vector<Heap> prologue_extra(const RulesetSpec& rs) {
  return rs.extra_action.empty() ? std::vector<Heap>{1, 1, 0, 0, 0, 0} : rs.extra_action;
}

Ruleset prologue_ruleset(const RulesetSpec& rs, int players) {
  Ruleset r;
  const ActionVector extra{prologue_extra(rs)};
  r.actions = [extra, players](const GroundedPosition& g, PlayerId mover) {
    const auto& x = g.position.heaps;
    static const std::vector<Heap> pair_set{2, 3};
    static const std::vector<Heap> third_set{1, 4};
    const auto& set = mover.index() == 3 ? third_set : pair_set;
    std::vector<ActionVector> out;
    for (std::size_t h = 0; h + 1 < x.size(); ++h)
      for (Heap s : set)
        if (s <= x[h]) {
          ActionVector a{std::vector<Heap>(x.size(), 0)};
          a.delta[h] = -s;
          out.push_back(std::move(a));
        }
    auto f = wealth_actions(g, mover, x.size() - 1);
    out.insert(out.end(), f.begin(), f.end());
    if (players >= 3 && mover.index() == 3) {
      bool fits = true;
      for (std::size_t h = 0; h < x.size(); ++h) fits = fits && x[h] + extra.delta[h] >= 0;
      if (fits) out.push_back(extra);
    }
    return out;
  };
  r.rewards = [extra, players](const GroundedPosition& g, PlayerId mover, const ActionVector& a) {
    CumulationMatrix m(players, kPrologueHeaps);
    if (players >= 3 && mover.index() == 3 && a == extra) return m;
    const int h = touched_heap(a);
    if (h < 0) return m;
    const Heap delta = a.delta[h];
    const double s = static_cast<double>(-delta);
    const std::size_t me = mover.slot();
    switch (h) {
      case 0:
        scheme_reward(RewardScheme::last_move_bonus, m, g, mover, h, delta);
        break;
      case 1:
        scheme_reward(RewardScheme::last_move_penalty, m, g, mover, h, delta);
        break;
      case 2: {
        // Alice and Charlie share one side of the score, Bob the other.
        const double sign = mover.index() == 2 ? -1.0 : 1.0;
        for (int i = 0; i < players; ++i) m(i, h) = (i == 1 ? -sign : sign) * s;
        break;
      }
      default:
        m(me, h) += s;
        break;
    }
    return m;
  };
  r.cumulation_independent = false;
  r.symmetric = false;
  return r;
}

TurnFunction build_turn(const RulesetSpec& rs, int players) {
  if (rs.preset == RulesetPreset::prologue_compound) {
    if (players < 3 || !rs.extra_turn) return TurnFunction::cyclic();
    TurnFunction t;
    t.kind = TurnKind::custom;
    t.cumulation_independent = false;
    t.custom = [players](const HeapPosition& w, PlayerId previous) {
      if (previous.index() == 2 && w.cumulation.row_sums()[1] == 5.0) return PlayerId(2);
      return previous.next(players);
    };
    return t;
  }
  if (rs.preset == RulesetPreset::custom_table) {
    if (rs.turn == TurnTableKind::alternating) return TurnFunction::alternating();
    if (rs.turn == TurnTableKind::table) {
      auto turns = std::make_shared<std::map<std::vector<Heap>, int>>();
      for (const auto& e : rs.turn_table) (*turns)[e.heaps] = e.player;
      TurnFunction t;
      t.kind = TurnKind::custom;
      t.custom = [turns, players](const HeapPosition& w, PlayerId previous) {
        if (auto it = turns->find(w.heaps); it != turns->end()) return PlayerId(it->second);
        return previous.next(players);
      };
      return t;
    }
  }
  return TurnFunction::cyclic();
}

double prologue_utility(PlayerId player, int heap, std::span<const double> column,
                        PlayerId current) {
  const double own = column[player.slot()];
  switch (heap) {
    case 4: {
      for (std::size_t j = 0; j < column.size(); ++j)
        if (j != player.slot() && column[j] >= own) return 0.0;
      return kPrologueAuctionValue - own;
    }
    case 5:
      return player == current ? -1.0 : 1.0;
    default:
      return own;
  }
}

UtilityMap build_utility(const UtilitySpec& us, int players) {
  UtilityMap u;
  switch (us.preset) {
    case UtilityPreset::identity:
    case UtilityPreset::scoring:
      return UtilityMap::identity_map();
    case UtilityPreset::zero_sum_difference:
      u.per_heap = [](PlayerId p, int, std::span<const double> c, PlayerId) {
        double others = 0;
        for (std::size_t j = 0; j < c.size(); ++j)
          if (j != p.slot()) others += c[j];
        return c[p.slot()] - others;
      };
      break;
    case UtilityPreset::normal_play:
    case UtilityPreset::misere_play: {
      const double stuck = us.preset == UtilityPreset::normal_play ? -1.0 : 1.0;
      u.per_heap = [stuck](PlayerId p, int heap, std::span<const double>, PlayerId current) {
        if (heap != 0) return 0.0;
        return p == current ? stuck : -stuck;
      };
      break;
    }
    case UtilityPreset::auction: {
      const double v = us.value;
      u.per_heap = [v](PlayerId p, int, std::span<const double> c, PlayerId) {
        const double own = c[p.slot()];
        for (std::size_t j = 0; j < c.size(); ++j)
          if (j != p.slot() && c[j] >= own) return 0.0;
        return v - own;
      };
      break;
    }
    case UtilityPreset::custom_terminal_table: {
      auto table = std::make_shared<std::map<double, std::vector<double>>>();
      for (const auto& e : us.table) (*table)[e.cumulation] = e.utilities;
      u.per_heap = [table](PlayerId p, int, std::span<const double> c, PlayerId) {
        auto it = table->find(c[p.slot()]);
        if (it == table->end() || p.slot() >= it->second.size()) return 0.0;
        return it->second[p.slot()];
      };
      break;
    }
    case UtilityPreset::prologue_compound:
      u.per_heap = prologue_utility;
      break;
  }
  (void)players;
  return u;
}

}  // namespace

CumulativeGame build_game(const RulesetSpec& rs, const UtilitySpec& us, int players,
                          int heaps) {
  if (players < 1) throw DimensionError("players must be positive");
  if (heaps < 1) throw DimensionError("heaps must be positive");
  CumulativeGame game;
  game.players = players;
  game.heaps = heaps;
  game.tie = us.tie;
  game.move_budget = budget_from_env(kDefaultMoveBudget);

  RulesetSpec spec = rs;
  if (us.preset == UtilityPreset::scoring) spec.rewards = RewardScheme::transfer;

  switch (spec.preset) {
    case RulesetPreset::fixed_subtraction:
      if (spec.sets.size() != 1 && static_cast<int>(spec.sets.size()) != players)
        throw DimensionError("expected one subtraction set or one per player");
      game.ruleset = fixed_ruleset(spec, players, heaps);
      break;
    case RulesetPreset::wealth:
      game.ruleset = wealth_ruleset(spec, players, heaps);
      break;
    case RulesetPreset::prologue_compound:
      if (heaps != kPrologueHeaps) throw DimensionError("the compound game has six heaps");
      if (players != 2 && players != 3) throw DimensionError("the compound game has 2 or 3 players");
      if (!spec.extra_action.empty() && static_cast<int>(spec.extra_action.size()) != heaps)
        throw DimensionError("extra_action must have one entry per heap");
      game.ruleset = prologue_ruleset(spec, players);
      break;
    case RulesetPreset::custom_table:
      game.ruleset = table_ruleset(spec, players, heaps);
      break;
  }
  if ((spec.rewards == RewardScheme::transfer) && players != 2)
    throw DimensionError("transfer rewards need exactly two players");
  if (us.preset == UtilityPreset::zero_sum_difference && players != 2)
    throw DimensionError("zero-sum difference utility needs exactly two players");

  game.turn = build_turn(spec, players);
  game.utility = build_utility(us, players);
  if (us.preset == UtilityPreset::prologue_compound &&
      spec.preset != RulesetPreset::prologue_compound)
    throw DimensionError("prologue utility requires the prologue ruleset");
  game.label = to_string(spec.preset) + "/" + to_string(us.preset);
  return game;
}

CumulativeGame build_game(const GameDocument& doc) {
  CumulativeGame game = build_game(doc.ruleset, doc.utility, doc.players, doc.heaps);
  game.move_budget = budget_from_env(doc.move_budget);
  if (!doc.label.empty()) game.label = doc.label;
  return game;
}

GroundedPosition initial_position(const GameDocument& doc) {
  GroundedPosition g{{doc.initial.heaps, CumulationMatrix(doc.players, doc.heaps)},
                     PlayerId(doc.initial.previous_player)};
  if (!doc.initial.cumulation.empty()) {
    auto c = CumulationMatrix::from_rows(doc.initial.cumulation);
    if (c.players() != doc.players || c.heaps() != doc.heaps)
      throw DimensionError("initial cumulation is not players x heaps");
    g.position.cumulation = c;
  }
  return g;
}

CumulativeGame zero_sum_transfer(const RulesetSpec& rs, int players, TieMode mode) {
  if (players != 2) throw DimensionError("zero-sum transfer needs exactly two players");
  RulesetSpec spec = rs;
  spec.rewards = RewardScheme::transfer;
  UtilitySpec us;
  us.tie.mode = mode;
  auto game = build_game(spec, us, 2, 1);
  game.label = "zero_sum_transfer";
  return game;
}

CumulativeGame subtraction_game(std::vector<std::vector<Heap>> sets, UtilityPreset utility,
                                TieMode mode, int players, int heaps) {
  RulesetSpec rs;
  rs.sets = std::move(sets);
  UtilitySpec us;
  us.preset = utility;
  us.tie.mode = mode;
  return build_game(rs, us, players, heaps);
}

GameDocument prologue_document(int players) {
  GameDocument doc;
  doc.players = players;
  doc.heaps = kPrologueHeaps;
  doc.ruleset.preset = RulesetPreset::prologue_compound;
  doc.utility.preset = UtilityPreset::prologue_compound;
  doc.initial.heaps.assign(kPrologueHeaps, kPrologueSize);
  doc.initial.cumulation.assign(players, std::vector<double>(kPrologueHeaps, 0.0));
  for (auto& row : doc.initial.cumulation) row.back() = 1.0;
  doc.initial.previous_player = players;
  if (players >= 3) doc.ruleset.extra_action = prologue_extra(doc.ruleset);
  doc.label = "prologue";
  return doc;
}

// ---- names ----

namespace {

template <class E>
struct Names {
  std::vector<std::pair<E, const char*>> entries;
  std::string name(E e) const {
    for (auto& [k, v] : entries)
      if (k == e) return v;
    return "?";
  }
  std::optional<E> parse(const std::string& s) const {
    for (auto& [k, v] : entries)
      if (s == v) return k;
    return std::nullopt;
  }
};

const Names<RulesetPreset> kRulesetNames{{{RulesetPreset::fixed_subtraction, "fixed_subtraction"},
                                          {RulesetPreset::wealth, "wealth"},
                                          {RulesetPreset::prologue_compound, "prologue_compound"},
                                          {RulesetPreset::custom_table, "custom_table"}}};
const Names<RewardScheme> kRewardNames{{{RewardScheme::identity, "identity"},
                                        {RewardScheme::transfer, "transfer"},
                                        {RewardScheme::none, "none"},
                                        {RewardScheme::last_move_bonus, "last_move_bonus"},
                                        {RewardScheme::last_move_penalty, "last_move_penalty"},
                                        {RewardScheme::uniform_removal, "uniform_removal"},
                                        {RewardScheme::table, "table"}}};
const Names<UtilityPreset> kUtilityNames{
    {{UtilityPreset::identity, "identity"},
     {UtilityPreset::zero_sum_difference, "zero_sum_difference"},
     {UtilityPreset::normal_play, "normal_play"},
     {UtilityPreset::misere_play, "misere_play"},
     {UtilityPreset::auction, "auction"},
     {UtilityPreset::scoring, "scoring"},
     {UtilityPreset::custom_terminal_table, "custom_terminal_table"},
     {UtilityPreset::prologue_compound, "prologue_compound"}}};
const Names<TurnTableKind> kTurnNames{{{TurnTableKind::cyclic, "cyclic"},
                                       {TurnTableKind::alternating, "alternating"},
                                       {TurnTableKind::table, "table"}}};

// Collects every schema problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& why) {
    errors.push_back(path + ": " + why);
  }

  const json* field(const json& obj, const std::string& path, const char* key, bool required) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(join(path, key), "missing");
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  std::optional<T> get(const json& obj, const std::string& path, const char* key, bool required) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return std::nullopt;
    try {
      return v->get<T>();
    } catch (const json::exception&) {
      fail(join(path, key), "wrong type");
      return std::nullopt;
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

std::vector<ActionVector> to_actions(const std::vector<std::vector<Heap>>& raw) {
  std::vector<ActionVector> out;
  for (const auto& r : raw) out.push_back({r});
  return out;
}

}  // namespace

std::string to_string(RulesetPreset p) { return kRulesetNames.name(p); }
std::string to_string(RewardScheme r) { return kRewardNames.name(r); }
std::string to_string(UtilityPreset u) { return kUtilityNames.name(u); }

GameDocument parse_game_document(const json& j) {
  Reader rd;
  GameDocument doc;
  if (!j.is_object()) throw ValidationError("", "document must be a JSON object");

  if (auto kind = rd.get<std::string>(j, "", "kind", false); kind && *kind != "game")
    rd.fail("kind", "expected 'game'");
  if (auto v = rd.get<int>(j, "", "version", true)) {
    if (*v != 1) rd.fail("version", "unsupported version " + std::to_string(*v));
    doc.version = *v;
  }
  if (auto n = rd.get<int>(j, "", "players", true)) {
    if (*n < 1) rd.fail("players", "must be positive");
    doc.players = *n;
  }
  if (auto d = rd.get<int>(j, "", "heaps", true)) {
    if (*d < 1) rd.fail("heaps", "must be positive");
    doc.heaps = *d;
  }
  if (auto b = rd.get<std::uint64_t>(j, "", "move_budget", false)) {
    if (*b == 0) rd.fail("move_budget", "must be positive");
    doc.move_budget = *b;
  }
  if (auto l = rd.get<std::string>(j, "", "label", false)) doc.label = *l;

  if (const json* rs = rd.field(j, "", "ruleset", true)) {
    auto& spec = doc.ruleset;
    if (auto p = rd.get<std::string>(*rs, "ruleset", "preset", true)) {
      if (auto e = kRulesetNames.parse(*p)) spec.preset = *e;
      else rd.fail("ruleset.preset", "unknown preset '" + *p + "'");
    }
    if (auto s = rd.get<std::vector<std::vector<Heap>>>(*rs, "ruleset", "sets", false))
      spec.sets = *s;
    if (auto r = rd.get<std::string>(*rs, "ruleset", "rewards", false)) {
      if (auto e = kRewardNames.parse(*r)) spec.rewards = *e;
      else rd.fail("ruleset.rewards", "unknown reward scheme '" + *r + "'");
    }
    if (auto a = rd.get<std::vector<Heap>>(*rs, "ruleset", "extra_action", false))
      spec.extra_action = *a;
    if (auto t = rd.get<bool>(*rs, "ruleset", "extra_turn", false)) spec.extra_turn = *t;
    if (auto t = rd.get<std::string>(*rs, "ruleset", "turn", false)) {
      if (auto e = kTurnNames.parse(*t)) spec.turn = *e;
      else rd.fail("ruleset.turn", "unknown turn kind '" + *t + "'");
    }
    if (const json* moves = rd.field(*rs, "ruleset", "moves", false)) {
      if (!moves->is_array()) rd.fail("ruleset.moves", "expected an array");
      else
        for (std::size_t k = 0; k < moves->size(); ++k) {
          const std::string path = "ruleset.moves[" + std::to_string(k) + "]";
          TableMove m;
          if (auto h = rd.get<std::vector<Heap>>((*moves)[k], path, "heaps", true)) m.heaps = *h;
          if (auto p = rd.get<int>((*moves)[k], path, "mover", false)) m.mover = *p;
          if (auto a = rd.get<std::vector<std::vector<Heap>>>((*moves)[k], path, "actions", true))
            m.actions = to_actions(*a);
          spec.moves.push_back(std::move(m));
        }
    }
    if (const json* turns = rd.field(*rs, "ruleset", "turn_table", false)) {
      if (!turns->is_array()) rd.fail("ruleset.turn_table", "expected an array");
      else
        for (std::size_t k = 0; k < turns->size(); ++k) {
          const std::string path = "ruleset.turn_table[" + std::to_string(k) + "]";
          TableTurn t;
          if (auto h = rd.get<std::vector<Heap>>((*turns)[k], path, "heaps", true)) t.heaps = *h;
          if (auto p = rd.get<int>((*turns)[k], path, "player", true)) t.player = *p;
          spec.turn_table.push_back(std::move(t));
        }
    }
    if (const json* rewards = rd.field(*rs, "ruleset", "reward_table", false)) {
      if (!rewards->is_array()) rd.fail("ruleset.reward_table", "expected an array");
      else
        for (std::size_t k = 0; k < rewards->size(); ++k) {
          const std::string path = "ruleset.reward_table[" + std::to_string(k) + "]";
          TableReward t;
          const json& e = (*rewards)[k];
          if (auto h = rd.get<std::vector<Heap>>(e, path, "heaps", true)) t.heaps = *h;
          if (auto p = rd.get<int>(e, path, "mover", false)) t.mover = *p;
          if (auto a = rd.get<std::vector<Heap>>(e, path, "action", true)) t.action = {*a};
          if (auto r = rd.get<std::vector<std::vector<double>>>(e, path, "reward", true))
            t.reward = *r;
          spec.reward_table.push_back(std::move(t));
        }
    }
    if (spec.preset == RulesetPreset::fixed_subtraction) {
      if (spec.sets.empty()) rd.fail("ruleset.sets", "fixed_subtraction needs at least one set");
      else if (spec.sets.size() != 1 && static_cast<int>(spec.sets.size()) != doc.players)
        rd.fail("ruleset.sets", "expected one set or one per player");
      for (std::size_t k = 0; k < spec.sets.size(); ++k)
        for (Heap s : spec.sets[k])
          if (s <= 0) rd.fail("ruleset.sets[" + std::to_string(k) + "]", "elements must be positive");
    }
  }

  if (const json* us = rd.field(j, "", "utility", true)) {
    auto& spec = doc.utility;
    if (auto p = rd.get<std::string>(*us, "utility", "preset", true)) {
      if (auto e = kUtilityNames.parse(*p)) spec.preset = *e;
      else rd.fail("utility.preset", "unknown preset '" + *p + "'");
    }
    if (auto t = rd.get<std::string>(*us, "utility", "tie_policy", false)) {
      if (*t == "antagonistic") spec.tie.mode = TieMode::antagonistic;
      else if (*t == "friendly") spec.tie.mode = TieMode::friendly;
      else rd.fail("utility.tie_policy", "expected antagonistic or friendly");
    }
    if (auto pr = rd.get<std::vector<std::vector<int>>>(*us, "utility", "preferences", false))
      spec.tie.preferences = *pr;
    if (auto v = rd.get<double>(*us, "utility", "value", false)) spec.value = *v;
    if (spec.preset == UtilityPreset::auction && !us->contains("value"))
      rd.fail("utility.value", "missing (auction value)");
    if (const json* table = rd.field(*us, "utility", "table", false)) {
      if (!table->is_array()) rd.fail("utility.table", "expected an array");
      else
        for (std::size_t k = 0; k < table->size(); ++k) {
          const std::string path = "utility.table[" + std::to_string(k) + "]";
          TerminalEntry e;
          if (auto c = rd.get<double>((*table)[k], path, "cumulation", true)) e.cumulation = *c;
          if (auto u = rd.get<std::vector<double>>((*table)[k], path, "utilities", true))
            e.utilities = *u;
          spec.table.push_back(std::move(e));
        }
    }
  }

  if (const json* init = rd.field(j, "", "initial", true)) {
    auto& spec = doc.initial;
    if (auto h = rd.get<std::vector<Heap>>(*init, "initial", "heaps", true)) {
      spec.heaps = *h;
      if (static_cast<int>(h->size()) != doc.heaps)
        rd.fail("initial.heaps", "expected " + std::to_string(doc.heaps) + " entries");
      for (Heap x : *h)
        if (x < 0) rd.fail("initial.heaps", "heap sizes must be nonnegative");
    }
    if (auto c = rd.get<std::vector<std::vector<double>>>(*init, "initial", "cumulation", false)) {
      spec.cumulation = *c;
      bool shape = static_cast<int>(c->size()) == doc.players;
      for (const auto& row : *c) shape = shape && static_cast<int>(row.size()) == doc.heaps;
      if (!shape) rd.fail("initial.cumulation", "expected players x heaps matrix");
    }
    if (auto p = rd.get<int>(*init, "initial", "previous_player", true)) {
      spec.previous_player = *p;
      if (*p < 1 || *p > doc.players) rd.fail("initial.previous_player", "out of range");
    }
    if (doc.utility.preset == UtilityPreset::auction) {
      for (Heap x : spec.heaps)
        if (static_cast<double>(x) > doc.utility.value)
          rd.fail("utility.value", "auction value must be at least the initial heap size");
    }
  }

  if (!rd.errors.empty()) throw ValidationError(rd.errors);
  return doc;
}

json to_json(const GameDocument& doc) {
  json j;
  j["kind"] = "game";
  j["version"] = doc.version;
  j["players"] = doc.players;
  j["heaps"] = doc.heaps;
  if (!doc.label.empty()) j["label"] = doc.label;

  const auto& rs = doc.ruleset;
  json r;
  r["preset"] = to_string(rs.preset);
  if (!rs.sets.empty()) r["sets"] = rs.sets;
  r["rewards"] = to_string(rs.rewards);
  if (rs.preset == RulesetPreset::prologue_compound) {
    if (!rs.extra_action.empty()) r["extra_action"] = rs.extra_action;
    r["extra_turn"] = rs.extra_turn;
  }
  if (rs.preset == RulesetPreset::custom_table) {
    r["turn"] = kTurnNames.name(rs.turn);
    json moves = json::array();
    for (const auto& m : rs.moves) {
      json e{{"heaps", m.heaps}};
      if (m.mover != 0) e["mover"] = m.mover;
      json acts = json::array();
      for (const auto& a : m.actions) acts.push_back(a.delta);
      e["actions"] = acts;
      moves.push_back(e);
    }
    r["moves"] = moves;
    if (!rs.turn_table.empty()) {
      json turns = json::array();
      for (const auto& t : rs.turn_table) turns.push_back({{"heaps", t.heaps}, {"player", t.player}});
      r["turn_table"] = turns;
    }
    if (!rs.reward_table.empty()) {
      json rewards = json::array();
      for (const auto& t : rs.reward_table) {
        json e{{"heaps", t.heaps}, {"action", t.action.delta}, {"reward", t.reward}};
        if (t.mover != 0) e["mover"] = t.mover;
        rewards.push_back(e);
      }
      r["reward_table"] = rewards;
    }
  }
  j["ruleset"] = r;

  const auto& us = doc.utility;
  json u;
  u["preset"] = to_string(us.preset);
  u["tie_policy"] = std::string(to_string(us.tie.mode));
  if (!us.tie.preferences.empty()) u["preferences"] = us.tie.preferences;
  if (us.preset == UtilityPreset::auction) u["value"] = us.value;
  if (!us.table.empty()) {
    json table = json::array();
    for (const auto& e : us.table)
      table.push_back({{"cumulation", e.cumulation}, {"utilities", e.utilities}});
    u["table"] = table;
  }
  j["utility"] = u;

  json init;
  init["heaps"] = doc.initial.heaps;
  if (!doc.initial.cumulation.empty()) init["cumulation"] = doc.initial.cumulation;
  init["previous_player"] = doc.initial.previous_player;
  j["initial"] = init;
  j["move_budget"] = doc.move_budget;
  return j;
}

}  // namespace cumulant
