#include <doctest.h>

#include <random>

#include "cumulant/errors.hpp"
#include "helpers.hpp"

using namespace cumulant;
using testing::grounded;
using testing::take;

namespace {

CumulativeGame squirrel() { return subtraction_game({{2, 3}}, UtilityPreset::identity); }

CumulativeGame wealth(UtilityPreset utility = UtilityPreset::normal_play) {
  RulesetSpec rs;
  rs.preset = RulesetPreset::wealth;
  UtilitySpec us;
  us.preset = utility;
  return build_game(rs, us, 2, 1);
}

}  // namespace

TEST_CASE("player ids are 1-based and cycle") {
  PlayerId p(3);
  CHECK(p.slot() == 2);
  CHECK(p.next(3) == PlayerId(1));
  CHECK(PlayerId(1).next(3) == PlayerId(2));
  CHECK_FALSE(PlayerId(4).valid_for(3));
}

TEST_CASE("cumulation matrix stores heap columns contiguously") {
  auto m = CumulationMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  auto col = m.column(1);
  CHECK(col[0] == 2);
  CHECK(col[1] == 5);
  CHECK(m.row_sums() == std::vector<double>{6, 15});
  CHECK(m.rows() == std::vector<std::vector<double>>{{1, 2, 3}, {4, 5, 6}});
  CHECK_THROWS_AS(m += CumulationMatrix(2, 2), DimensionError);
}

TEST_CASE("expand_options on the squirrel game") {
  auto game = squirrel();
  auto options = expand_options(game, grounded(game, {7}, {{0}, {0}}, 2));
  REQUIRE(options.size() == 2);
  // Sorted by action vector: (-3) before (-2).
  CHECK(options[0].next == grounded(game, {4}, {{3}, {0}}, 1));
  CHECK(options[1].next == grounded(game, {5}, {{2}, {0}}, 1));

  CHECK(expand_options(game, grounded(game, {1}, {{4}, {2}}, 2)).empty());
  CHECK(is_terminal(game, grounded(game, {1}, {{4}, {2}}, 2)));
}

TEST_CASE("expand_options under wealth play") {
  auto game = wealth();
  auto options = expand_options(game, grounded(game, {3}, {{2}, {1}}, 2));
  REQUIRE(options.size() == 2);
  CHECK(options[0].next == grounded(game, {1}, {{4}, {1}}, 1));
  CHECK(options[1].next == grounded(game, {2}, {{3}, {1}}, 1));
}

TEST_CASE("step follows a single option") {
  auto game = squirrel();
  auto next = step(game, grounded(game, {4}, {{3}, {0}}, 1), take(3));
  CHECK(next == grounded(game, {1}, {{3}, {3}}, 2));
  CHECK_THROWS_AS(step(game, grounded(game, {0}, {}, 1), take(2)), IllegalActionError);
  CHECK_THROWS_AS(step(game, grounded(game, {7}, {}, 1), take(4)), IllegalActionError);
}

TEST_CASE("dimension mismatches are rejected") {
  auto game = squirrel();
  GroundedPosition bad{{{3, 3}, CumulationMatrix(2, 2)}, PlayerId(1)};
  CHECK_THROWS_AS(expand_options(game, bad), DimensionError);
  GroundedPosition wrong_player{{{3}, CumulationMatrix(2, 1)}, PlayerId(3)};
  CHECK_THROWS_AS(expand_options(game, wrong_player), DimensionError);
  CHECK_THROWS_AS(step(game, grounded(game, {5}, {}, 1), ActionVector{{-2, 0}}), IllegalActionError);
}

TEST_CASE("an action that empties a heap below zero signals a broken ruleset") {
  CumulativeGame game = squirrel();
  game.ruleset.actions = [](const GroundedPosition&, PlayerId) {
    return std::vector<ActionVector>{take(5)};
  };
  CHECK_THROWS_AS(expand_options(game, grounded(game, {3}, {}, 1)), IllegalActionError);
}

TEST_CASE("turn functions") {
  HeapPosition w{{1}, CumulationMatrix(3, 1)};
  CHECK(TurnFunction::cyclic()(w, PlayerId(3), 3) == PlayerId(1));
  CHECK(TurnFunction::alternating()(w, PlayerId(1), 2) == PlayerId(2));
  CHECK(TurnFunction::alternating()(w, PlayerId(2), 2) == PlayerId(1));
}

TEST_CASE("feasibility") {
  auto game = squirrel();
  auto ok = check_feasibility(game, grounded(game, {7}, {}, 2));
  CHECK(ok.ok);
  CHECK(ok.longest_line == 3);

  CumulativeGame grow = squirrel();
  grow.move_budget = 10;
  grow.ruleset.actions = [](const GroundedPosition&, PlayerId) {
    return std::vector<ActionVector>{ActionVector{{1}}};
  };
  auto bad = check_feasibility(grow, grounded(grow, {0}, {}, 1));
  CHECK_FALSE(bad.ok);
  CHECK(bad.offending_path.size() == 11);
  CHECK(bad.offending_path.front() == ActionVector{{1}});

  CumulativeGame loop = squirrel();
  loop.ruleset.actions = [](const GroundedPosition& g, PlayerId) {
    return std::vector<ActionVector>{ActionVector{{g.position.heaps[0] == 0 ? 1 : -1}}};
  };
  loop.ruleset.rewards = [](const GroundedPosition&, PlayerId, const ActionVector&) {
    return CumulationMatrix(2, 1);
  };
  loop.turn = TurnFunction::alternating();
  auto cyc = check_feasibility(loop, grounded(loop, {0}, {}, 1));
  CHECK_FALSE(cyc.ok);
  CHECK_FALSE(cyc.offending_path.empty());
}

TEST_CASE("expansion is deterministic") {
  auto game = squirrel();
  auto g = grounded(game, {9}, {{1}, {2}}, 1);
  auto a = expand_options(game, g);
  auto b = expand_options(game, g);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].action == b[k].action);
    CHECK(a[k].next == b[k].next);
  }
}

TEST_CASE("cumulation-independent rulesets shift options by the same offset") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> off(-20, 20);
  for (auto game : {squirrel(), subtraction_game({{2, 3}, {1, 4}}, UtilityPreset::identity),
                    subtraction_game({{1, 3}}, UtilityPreset::identity, TieMode::antagonistic, 3, 2)}) {
    REQUIRE(game.ruleset.cumulation_independent);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Heap> heaps(static_cast<std::size_t>(game.heaps));
      for (auto& x : heaps) x = off(rng) + 20;
      auto base = make_grounded(game, heaps, PlayerId(1 + trial % game.players));
      auto shifted = base;
      CumulationMatrix delta(game.players, game.heaps);
      for (int i = 0; i < game.players; ++i)
        for (int h = 0; h < game.heaps; ++h)
          delta(static_cast<std::size_t>(i), static_cast<std::size_t>(h)) = off(rng);
      shifted.position.cumulation += delta;
      auto a = expand_options(game, base);
      auto b = expand_options(game, shifted);
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].action == b[k].action);
        CHECK(a[k].next.position.heaps == b[k].next.position.heaps);
        CHECK(a[k].next.position.cumulation + delta == b[k].next.position.cumulation);
      }
    }
  }
}

TEST_CASE("cumulation equals initial plus rewards along any line") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto [game, start] = testing::random_heap_dynamic_game(rng);
    auto g = start;
    CumulationMatrix total = start.position.cumulation;
    for (;;) {
      auto options = expand_options(game, g);
      if (options.empty()) break;
      auto& m = options[rng() % options.size()];
      total += game.ruleset.rewards(g, game.current_player(g), m.action);
      g = m.next;
      CHECK(g.position.cumulation == total);
    }
  }
}

TEST_CASE("wealth play positions from the opening examples") {
  auto game = wealth();
  for (int prev : {1, 2}) {
    auto g = grounded(game, {3}, {{2}, {2}}, prev);
    auto mover = game.current_player(g);
    auto sol = solve_game(game, g);
    CHECK(sol.value[mover.slot()] == -1);
  }
  auto g = grounded(game, {3}, {{2}, {1}}, 2);
  auto after_one = solve_game(game, step(game, g, take(1)));
  auto after_two = solve_game(game, step(game, g, take(2)));
  CHECK(after_one.value[0] == 1);
  CHECK(after_two.value[0] == -1);

  // Heap 6 from (1,1): after 5,(2,1) and 4,(2,2) Alice must take 1.
  auto h = grounded(game, {4}, {{2}, {2}}, 2);
  CHECK(solve_game(game, step(game, h, take(1))).value[0] == 1);
  CHECK(solve_game(game, step(game, h, take(2))).value[0] == -1);
}
