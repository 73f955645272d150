#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cumulant/errors.hpp"
#include "cumulant/lab.hpp"
#include "helpers.hpp"

using namespace cumulant;
using testing::grounded;
using testing::take;

TEST_CASE("brute force on the opening examples") {
  auto game = subtraction_game({{2, 3}}, UtilityPreset::identity);
  auto r = brute_force_pspe(game, grounded(game, {7}, {}, 2));
  CHECK(r.value == std::vector<double>{4, 3});
  CHECK(r.line == std::vector<ActionVector>{take(2), take(3), take(2)});

  RulesetSpec rs;
  rs.sets = {{2, 3}};
  UtilitySpec us;
  us.preset = UtilityPreset::auction;
  us.value = 4;
  auto auction = build_game(rs, us, 2, 1);
  auto a = brute_force_pspe(auction, grounded(auction, {4}, {{1}, {0}}, 2));
  CHECK(a.line.front() == take(2));
  CHECK(a.value == std::vector<double>{1, 0});

  CHECK_THROWS_AS(brute_force_pspe(game, grounded(game, {40}, {}, 2), 1000), BudgetExceeded);
}

TEST_CASE("three-way agreement on random heap-size dynamic games") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 250; ++trial) {
    auto [game, start] = testing::random_heap_dynamic_game(rng);
    auto brute = brute_force_pspe(game, start);
    auto recursive = recursive_value(game, start);
    auto tree = cg_to_efg(game, start, false);
    auto induced = backward_induction(tree.efg, game.tie);
    CHECK(brute.value == recursive);
    CHECK(brute.value == induced.value);
    CHECK(brute.value == solve_game(game, start).value);
  }
}

TEST_CASE("set enumeration") {
  auto sets = enumerate_sets(5, {2, 3});
  CHECK(sets.size() == 20);
  CHECK(std::is_sorted(sets.begin(), sets.end()));
  CHECK(sets.front() == std::vector<Heap>{1, 2});
  CHECK(enumerate_sets(20, {2, 3}).size() == 190 + 1140);
}

TEST_CASE("census anchors") {
  CHECK(first_divergence({3, 5}, TieMode::friendly, 40) == 14);
  CHECK(first_divergence({6, 13, 17}, TieMode::antagonistic, 100) == 76);
  CHECK_FALSE(first_divergence({6, 13, 17}, TieMode::antagonistic, 75).has_value());
  CHECK_FALSE(first_divergence({2, 3}, TieMode::antagonistic, 200).has_value());
}

TEST_CASE("census counts at element bound 20") {
  CensusOptions o;
  o.max_value = 20;
  o.heap_bound = 110;
  o.tie = TieMode::antagonistic;
  auto antagonistic = critical_set_scan(o);
  o.tie = TieMode::friendly;
  auto friendly = critical_set_scan(o);
  CHECK(antagonistic.count_at(108) == 1);
  CHECK(friendly.count_at(108) == 493);
  CHECK(friendly.count_at(110) == 494);
  CHECK(antagonistic.critical.front().set == std::vector<Heap>{6, 13, 17});

  // Counts never drop as the bound grows.
  std::size_t last = 0;
  for (Heap b = 0; b <= 110; ++b) {
    CHECK(friendly.count_at(b) >= last);
    last = friendly.count_at(b);
  }
  for (const auto& c : friendly.critical)
    CHECK(first_divergence(c.set, TieMode::friendly, c.first_heap) == c.first_heap);
}

TEST_CASE("census is deterministic and resumes from a checkpoint") {
  const auto path = (std::filesystem::temp_directory_path() / "cumulant_census_test.jsonl").string();
  std::filesystem::remove(path);
  CensusOptions o;
  o.max_value = 12;
  o.heap_bound = 60;
  o.tie = TieMode::friendly;
  auto plain = critical_set_scan(o);
  o.threads = 1;
  CHECK(to_json(critical_set_scan(o)) == to_json(plain));

  o.checkpoint = path;
  auto first = critical_set_scan(o);
  CHECK(to_json(first) == to_json(plain));
  {
    // Drop the second half of the log, as if interrupted, and append a torn line.
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();
    std::ofstream out(path, std::ios::trunc);
    for (std::size_t k = 0; k < lines.size() / 2; ++k) out << lines[k] << '\n';
    out << "{\"set\":[1,";
  }
  auto resumed = critical_set_scan(o);
  CHECK(to_json(resumed) == to_json(plain));

  CensusOptions other = o;
  other.heap_bound = 61;
  CHECK_THROWS_AS(critical_set_scan(other), PreconditionError);
  std::filesystem::remove(path);
  CHECK(to_csv(plain).rfind("set,first_heap\n", 0) == 0);
}

TEST_CASE("Pareto anchors") {
  auto big = subtraction_game({{20, 31, 51}}, UtilityPreset::identity);
  auto r = pareto_scan(big, grounded(big, {100}, {}, 2));
  CHECK(r.pspe_value == std::vector<double>{51, 31});
  CHECK(r.pspe_line == std::vector<ActionVector>{take(51), take(31)});
  REQUIRE(r.dominating);
  CHECK(*r.dominating == std::vector<double>{60, 40});
  CHECK(r.dominating_line == std::vector<ActionVector>(5, take(20)));

  auto sevens = subtraction_game({{3, 7}}, UtilityPreset::identity);
  for (Heap x = 0; x < 30; ++x)
    CHECK_FALSE(pareto_scan(sevens, grounded(sevens, {x}, {}, 2)).dominating);
  auto s = pareto_scan(sevens, grounded(sevens, {30}, {}, 2));
  CHECK(s.pspe_value == std::vector<double>{14, 14});
  REQUIRE(s.dominating);
  CHECK(*s.dominating == std::vector<double>{15, 15});

  for (TieMode mode : {TieMode::antagonistic, TieMode::friendly}) {
    auto small = subtraction_game({{2, 3}}, UtilityPreset::identity, mode);
    for (Heap x = 0; x <= 40; ++x)
      CHECK_FALSE(pareto_scan(small, grounded(small, {x}, {}, 2)).dominating);
  }
}

TEST_CASE("dominating lines are legal and dominate") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Heap> set{1 + Heap(rng() % 8), 1 + Heap(rng() % 8), 1 + Heap(rng() % 8)};
    auto game = subtraction_game({set}, UtilityPreset::identity);
    auto g0 = grounded(game, {Heap(rng() % 30)}, {}, 2);
    auto r = pareto_scan(game, g0);
    if (!r.dominating) continue;
    auto g = g0;
    for (const auto& a : r.dominating_line) g = step(game, g, a);
    CHECK(is_terminal(game, g));
    auto u = terminal_utilities(game, g);
    CHECK(u == *r.dominating);
    bool strict = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(u[i] >= r.pspe_value[i]);
      strict |= u[i] > r.pspe_value[i];
    }
    CHECK(strict);
  }
}

TEST_CASE("negated rewards") {
  auto sevens = subtraction_game({{3, 7}}, UtilityPreset::identity);
  auto r = reward_repair(sevens, grounded(sevens, {30}, {}, 2));
  CHECK(r.true_value == std::vector<double>{15, 15});
  CHECK_FALSE(r.dominated_by);

  auto big = subtraction_game({{20, 31, 51}}, UtilityPreset::identity);
  auto b = reward_repair(big, grounded(big, {100}, {}, 2));
  CHECK(b.true_value == std::vector<double>{51, 40});
  REQUIRE(b.dominated_by);
  CHECK(*b.dominated_by == std::vector<double>{60, 40});
}

TEST_CASE("greedy report is stable") {
  auto a = greedy_report(12, {2, 3}, 150, TieMode::antagonistic);
  auto b = greedy_report(12, {2, 3}, 150, TieMode::antagonistic);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(a.size() == enumerate_sets(12, {2, 3}).size());
  // Heap 7 with {2,3}: the opening sacrifice.
  auto squirrel = greedy_report(3, {2}, 30, TieMode::antagonistic);
  auto it = std::find_if(squirrel.begin(), squirrel.end(),
                         [](const GreedyRow& r) { return r.set == std::vector<Heap>{2, 3}; });
  REQUIRE(it != squirrel.end());
  REQUIRE(it->last_nonoptimal_si);
  CHECK(*it->last_nonoptimal_si >= 7);
}
