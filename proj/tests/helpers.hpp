#pragma once

#include <map>
#include <memory>
#include <random>
#include <vector>

#include "cumulant/core.hpp"
#include "cumulant/efg.hpp"
#include "cumulant/rulesets.hpp"

namespace testing {

using namespace cumulant;

inline GroundedPosition grounded(const CumulativeGame& game, std::vector<Heap> heaps,
                                 const std::vector<std::vector<double>>& rows, int previous) {
  GroundedPosition g{{std::move(heaps), CumulationMatrix(game.players, game.heaps)},
                     PlayerId(previous)};
  if (!rows.empty()) g.position.cumulation = CumulationMatrix::from_rows(rows);
  return g;
}

inline ActionVector take(Heap s, std::size_t heap = 0, std::size_t heaps = 1) {
  ActionVector a{std::vector<Heap>(heaps, 0)};
  a.delta[heap] = -s;
  return a;
}

// Random heap-size dynamic game: per-player subtraction sets, integer
// rewards keyed by (heaps, mover, action), and for n = 3 an optional
// heap-only turn table.
struct RandomGame {
  CumulativeGame game;
  GroundedPosition start;
};

inline RandomGame random_heap_dynamic_game(std::mt19937_64& rng, Heap max_heap = 12) {
  std::uniform_int_distribution<int> players_dist(2, 3);
  const int n = players_dist(rng);
  const int d = std::uniform_int_distribution<int>(1, 2)(rng);
  std::vector<std::vector<Heap>> sets(static_cast<std::size_t>(n));
  for (auto& s : sets) {
    const int size = std::uniform_int_distribution<int>(1, 3)(rng);
    while (static_cast<int>(s.size()) < size) {
      Heap v = std::uniform_int_distribution<Heap>(1, 5)(rng);
      if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
    }
  }
  const std::uint64_t salt = rng();
  const bool custom_turn = n == 3 && (rng() & 1);
  const bool friendly = rng() & 1;

  CumulativeGame game;
  game.players = n;
  game.heaps = d;
  game.tie.mode = friendly ? TieMode::friendly : TieMode::antagonistic;
  if (rng() & 1) {
    game.tie.preferences.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      auto& order = game.tie.preferences[static_cast<std::size_t>(i - 1)];
      for (int j = n; j >= 1; --j)
        if (j != i) order.push_back(j);
    }
  }
  game.ruleset.actions = [sets](const GroundedPosition& g, PlayerId mover) {
    std::vector<ActionVector> out;
    const auto& x = g.position.heaps;
    for (std::size_t h = 0; h < x.size(); ++h)
      for (Heap s : sets[mover.slot()])
        if (s <= x[h]) out.push_back(take(s, h, x.size()));
    return out;
  };
  game.ruleset.rewards = [salt, n, d](const GroundedPosition& g, PlayerId mover,
                                      const ActionVector& a) {
    CumulationMatrix r(n, d);
    std::size_t seed = HeapsHash{}(g.position.heaps) ^ (salt + 977 * mover.index());
    seed ^= HeapsHash{}(a.delta) * 0x9e3779b97f4a7c15ULL;
    for (int h = 0; h < d; ++h) {
      if (a.delta[static_cast<std::size_t>(h)] == 0) continue;
      for (int i = 0; i < n; ++i) {
        seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
        r(static_cast<std::size_t>(i), static_cast<std::size_t>(h)) =
            static_cast<double>(static_cast<int>((seed >> 33) % 7) - 2);
      }
    }
    return r;
  };
  if (custom_turn) {
    game.turn.kind = TurnKind::custom;
    game.turn.custom = [salt](const HeapPosition& w, PlayerId previous) {
      const std::size_t h = HeapsHash{}(w.heaps) ^ salt;
      // Never hand the move back to the previous player.
      const int skip = 1 + static_cast<int>((h >> 7) % 2);
      return PlayerId((previous.index() - 1 + skip) % 3 + 1);
    };
  }
  game.utility = UtilityMap::identity_map();
  game.label = "random";

  std::vector<Heap> heaps(static_cast<std::size_t>(d));
  for (auto& x : heaps) x = std::uniform_int_distribution<Heap>(0, max_heap)(rng);
  if (d == 2) heaps[1] = std::min<Heap>(heaps[1], 6);
  GroundedPosition start{{heaps, CumulationMatrix(n, d)},
                         PlayerId(std::uniform_int_distribution<int>(1, n)(rng))};
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < d; ++h)
      start.position.cumulation(static_cast<std::size_t>(i), static_cast<std::size_t>(h)) =
          std::uniform_int_distribution<int>(-3, 3)(rng);
  return {std::move(game), std::move(start)};
}

// Random tree with at most `max_states` states; utilities are small integers
// (ties happen) unless `generic` is set.
inline ExtensiveFormGame random_efg(std::mt19937_64& rng, int players, int max_states,
                                    int max_depth = 6, int max_branch = 3, bool generic = false) {
  ExtensiveFormGame efg;
  efg.players = players;
  struct Pending {
    int id;
    int depth;
  };
  efg.states.emplace_back();
  std::vector<Pending> queue{{0, 0}};
  std::uniform_int_distribution<int> turn(1, players);
  for (std::size_t k = 0; k < queue.size(); ++k) {
    auto [id, depth] = queue[k];
    const int room = max_states - static_cast<int>(efg.states.size());
    int branch = std::uniform_int_distribution<int>(0, max_branch)(rng);
    if (depth == 0) branch = std::max(branch, 1);
    if (depth >= max_depth || room <= 0) branch = 0;
    branch = std::min(branch, room);
    auto& st = efg.states[static_cast<std::size_t>(id)];
    st.turn = turn(rng);
    for (int b = 0; b < branch; ++b) {
      const int child = static_cast<int>(efg.states.size());
      efg.states[static_cast<std::size_t>(id)].children.push_back(child);
      efg.states.emplace_back();
      queue.push_back({child, depth + 1});
    }
  }
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_real_distribution<double> wide(-100.0, 100.0);
  for (auto& st : efg.states)
    if (st.children.empty())
      for (int i = 0; i < players; ++i)
        st.utilities.push_back(generic ? wide(rng) : static_cast<double>(small(rng)));
  return efg;
}

}  // namespace testing
