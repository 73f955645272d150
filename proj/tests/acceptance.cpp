// One line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cumulant/algebra.hpp"
#include "cumulant/lab.hpp"
#include "cumulant/outcome.hpp"
#include "cumulant/rulesets.hpp"
#include "helpers.hpp"

using namespace cumulant;
using testing::grounded;
using testing::take;

namespace {

struct Checks {
  int failed = 0;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failed;
    notes << "\n    failed: " << what;
  }
  void note(const std::string& text) { notes << "\n    " << text; }
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<void(Checks&)> body;
};

std::vector<std::int64_t> column(const OutcomeTable& t, std::size_t k) {
  std::vector<std::int64_t> out;
  for (const auto& r : t.rows) out.push_back(r.values[k]);
  return out;
}

std::string classes(const std::vector<NpRow>& rows) {
  std::string s;
  for (const auto& r : rows) s += to_string(r.cls);
  return s;
}

std::vector<Heap> random_set(std::mt19937_64& rng, Heap max = 5) {
  std::vector<Heap> s;
  const int size = 1 + int(rng() % 3);
  while (int(s.size()) < size) {
    Heap v = 1 + Heap(rng() % static_cast<std::uint64_t>(max));
    if (std::find(s.begin(), s.end(), v) == s.end()) s.push_back(v);
  }
  return s;
}

nlohmann::json load(const std::string& name) {
  std::ifstream in(std::string(CUMULANT_DATA_DIR) + "/" + name);
  return nlohmann::json::parse(in);
}

// ---- criteria ----

void golden_tables(Checks& c) {
  using V = std::vector<std::int64_t>;
  auto zs = outcome_zs_symmetric({2, 3}, 7);
  c.expect(column(zs, 0) == V{0, 0, 2, 3, 3, 1, 0, 1}, "o_zs for {2,3}");
  auto si = outcome_si_symmetric({2, 3}, TieMode::antagonistic, 7);
  c.expect(column(si, 0) == V{0, 0, 2, 3, 3, 3, 3, 4}, "o1_si for {2,3}");
  c.expect(column(si, 1) == V{0, 0, 0, 0, 0, 2, 3, 3}, "o2_si for {2,3}");

  auto pz = outcome_zs_partizan({2, 3}, {1, 4}, 7);
  c.expect(column(pz, 0) == V{0, 0, 2, 3, 2, 3, 4, -1}, "o_zs(x,2) for ({2,3},{1,4})");
  c.expect(column(pz, 1) == V{0, -1, -1, 1, -4, -4, -2, -1}, "o_zs(x,1) for ({2,3},{1,4})");
  auto ps = outcome_si_partizan({2, 3}, {1, 4}, TieMode::antagonistic, 7);
  c.expect(column(ps, 0) == V{0, 0, 2, 3, 3, 4, 5, 3}, "player 1 starts, u1");
  c.expect(column(ps, 1) == V{0, 0, 0, 0, 1, 1, 1, 4}, "player 1 starts, u2");
  c.expect(column(ps, 2) == V{0, 0, 0, 2, 0, 0, 2, 3}, "player 2 starts, u1");
  c.expect(column(ps, 3) == V{0, 1, 1, 1, 4, 4, 4, 4}, "player 2 starts, u2");

  c.expect(classes(np_outcome_classes({2, 3}, {2, 3}, 7)) == "PPNNNPPN", "classes for {2,3}");
  c.expect(classes(np_outcome_classes({2, 3}, {1, 4}, 7)) == "PRNLRNLP",
           "classes for ({2,3},{1,4})");
}

void walkthroughs(Checks& c) {
  auto squirrel = subtraction_game({{2, 3}}, UtilityPreset::identity);
  auto sol = solve_game(squirrel, grounded(squirrel, {7}, {}, 2));
  c.expect(sol.value == std::vector<double>{4, 3}, "squirrel value (4,3)");
  std::vector<Heap> heaps;
  for (const auto& g : sol.path) heaps.push_back(g.position.heaps[0]);
  c.expect(heaps == std::vector<Heap>{7, 5, 2, 0}, "squirrel line 7 5 2 0");

  RulesetSpec rs;
  rs.sets = {{2, 3}};
  UtilitySpec us;
  us.preset = UtilityPreset::auction;
  us.value = 4;
  auto auction = build_game(rs, us, 2, 1);
  auto first = [&](double c1, double c2, Heap x) {
    return solve_game(auction, grounded(auction, {x}, {{c1}, {c2}}, 2)).line.front();
  };
  c.expect(first(0, 0, 3) == take(2), "heap 3 from (0,0) takes 2");
  c.expect(first(0, 1, 3) == take(2), "heap 3 from (0,1) takes 2");
  c.expect(first(0, 2, 3) == take(3), "heap 3 from (0,2) takes 3");
  auto bid = solve_game(auction, grounded(auction, {4}, {{1}, {0}}, 2));
  c.expect(bid.line.front() == take(2), "heap 4 from (1,0) bids 2");
  c.expect(bid.value == std::vector<double>{1, 0}, "heap 4 from (1,0) utility (1,0)");
}

void compound_replay(Checks& c) {
  auto doc = parse_game_document(load("prologue.json"));
  auto game = build_game(doc);
  auto g = initial_position(doc);
  auto script = load("walkthrough.json");
  for (const auto& a : script["actions"]) g = step(game, g, {a.get<std::vector<Heap>>()});
  c.expect(script["actions"].size() == 15, "script has 15 moves");
  c.expect(is_terminal(game, g), "line ends at a terminal position");
  c.expect(terminal_utilities(game, g) == std::vector<double>{5, -2, 6}, "utilities (5,-2,6)");
}

void divergence_anchors(Checks& c) {
  c.expect(first_divergence({3, 5}, TieMode::friendly, 200) == 14, "{3,5} friendly at 14");
  auto zs = outcome_zs_symmetric({3, 5}, 14);
  auto si = outcome_si_symmetric({3, 5}, TieMode::friendly, 14);
  c.expect(zs.rows[14].values[0] == 3, "o_zs(14) = 3");
  c.expect(si.rows[14].values[0] - si.rows[14].values[1] == 2, "si difference 2 at 14");

  c.expect(first_divergence({6, 13, 17}, TieMode::antagonistic, 200) == 76,
           "{6,13,17} antagonistic at 76");
  auto zs3 = outcome_zs_symmetric({6, 13, 17}, 76);
  auto si3 = outcome_si_symmetric({6, 13, 17}, TieMode::antagonistic, 76);
  c.expect(zs3.rows[76].values[0] == 5, "o_zs(76) = 5");
  c.expect(si3.rows[76].values[0] - si3.rows[76].values[1] == 4, "si difference 4 at 76");
}

std::string ranges_with(const CriticalSetReport& r, std::size_t target, Heap max_bound) {
  std::string out;
  Heap start = -1;
  for (Heap b = 0; b <= max_bound + 1; ++b) {
    const bool hit = b <= max_bound && r.count_at(b) == target;
    if (hit && start < 0) start = b;
    if (!hit && start >= 0) {
      out += (out.empty() ? "" : ",") + std::to_string(start) +
             (b - 1 > start ? "-" + std::to_string(b - 1) : "");
      start = -1;
    }
  }
  return out.empty() ? "none" : out;
}

void census(Checks& c) {
  struct Target {
    Heap max_value;
    std::size_t antagonistic, friendly;
  };
  const Heap bound = 450;
  const std::vector<Heap> sweep{60, 80, 100, 108, 110, 150, 200, 207, 208, 243, 250, 300, 303,
                                350, 386, 403, 450};
  for (const Target t : {Target{20, 1, 493}, Target{30, 16, 2081}, Target{40, 68, 5386}}) {
    CensusOptions o;
    o.max_value = t.max_value;
    o.heap_bound = bound;
    o.tie = TieMode::antagonistic;
    auto a = critical_set_scan(o);
    o.tie = TieMode::friendly;
    auto f = critical_set_scan(o);
    const auto ra = ranges_with(a, t.antagonistic, bound);
    const auto rf = ranges_with(f, t.friendly, bound);
    c.expect(ra != "none", "max " + std::to_string(t.max_value) + " antagonistic count reached");
    c.expect(rf != "none", "max " + std::to_string(t.max_value) + " friendly count reached");
    std::ostringstream line;
    line << "max " << t.max_value << ": target (" << t.antagonistic << "," << t.friendly
         << "); antagonistic hits at bounds " << ra << ", friendly hits at bounds " << rf;
    c.note(line.str());
    std::ostringstream per;
    per << "  per bound (antagonistic/friendly):";
    for (Heap b : sweep) per << ' ' << b << ':' << a.count_at(b) << '/' << f.count_at(b);
    c.note(per.str());
  }
}

void property_suites(Checks& c) {
  std::mt19937_64 rng(20240601);
  int agree = 0, lemma = 0, shift = 0, transfer = 0, conv = 0, mimic = 0, assoc = 0;

  for (int trial = 0; trial < 200; ++trial) {
    auto [game, start] = testing::random_heap_dynamic_game(rng, 12);
    auto brute = brute_force_pspe(game, start).value;
    auto rec = recursive_value(game, start);
    auto bi = backward_induction(cg_to_efg(game, start, false).efg, game.tie).value;
    agree += brute == rec && brute == bi;

    auto profile = PositionProfile::seeded(rng());
    auto o = sigma_outcome(game, profile, start);
    auto played = play_profile(game, start, profile);
    auto c0 = start.position.cumulation.row_sums();
    bool ok = true;
    for (std::size_t i = 0; i < o.size(); ++i) ok &= o[i] == played.cumulative[i] - c0[i];
    lemma += ok;

    auto zero = start;
    zero.position.cumulation = CumulationMatrix(game.players, game.heaps);
    auto base = solve_game(game, zero).value;
    auto shifted = solve_game(game, start).value;
    ok = true;
    for (std::size_t i = 0; i < base.size(); ++i) ok &= shifted[i] == base[i] + c0[i];
    shift += ok;
  }
  c.expect(agree == 200, "three-way agreement " + std::to_string(agree) + "/200");
  c.expect(lemma == 200, "sigma outcome identity " + std::to_string(lemma) + "/200");
  c.expect(shift == 200, "cumulation shift " + std::to_string(shift) + "/200");

  int transfer_cases = 0;
  while (transfer_cases < 248) {
    std::vector<std::vector<Heap>> sets{random_set(rng)};
    if (rng() & 1) sets.push_back(random_set(rng));
    RulesetSpec rs;
    rs.sets = sets;
    const TieMode mode = rng() & 1 ? TieMode::friendly : TieMode::antagonistic;
    auto a = zero_sum_transfer(rs, 2, mode);
    auto b = subtraction_game(sets, UtilityPreset::zero_sum_difference, mode);
    for (Heap x = 0; x <= 30; ++x, ++transfer_cases) {
      auto sa = solve_game(a, grounded(a, {x}, {}, 2));
      auto sb = solve_game(b, grounded(b, {x}, {}, 2));
      transfer += sa.line == sb.line && sa.value[0] == sb.value[0];
    }
  }
  c.expect(transfer == transfer_cases, "transfer encoding " + std::to_string(transfer) + "/" +
                                           std::to_string(transfer_cases));

  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng() % 2);
    auto efg = testing::random_efg(rng, n, 40);
    TiePolicy tie;
    tie.mode = trial % 2 ? TieMode::friendly : TieMode::antagonistic;
    const auto expected = backward_induction(efg, tie).value;
    auto pre = efg_to_cg_preorder(efg);
    pre.game.tie = tie;
    auto cyc = efg_to_cg_cyclic(efg);
    cyc.game.tie = tie;
    conv += solve_game(pre.game, pre.start).value == expected &&
            solve_game(cyc.game, cyc.start).value == expected;
  }
  c.expect(conv == 200, "conversions preserve values " + std::to_string(conv) + "/200");

  int mimic_cases = 0;
  while (mimic_cases < 208) {
    auto s = random_set(rng, 8);
    for (Heap x = 0; x <= 15; ++x, ++mimic_cases) {
      PartizanPosition g{x, s, s};
      mimic += np_class({g, negate(g)}) == NpClass::P;
    }
  }
  c.expect(mimic == mimic_cases,
           "G - G is P " + std::to_string(mimic) + "/" + std::to_string(mimic_cases));

  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng() % 2);
    const TieMode mode = rng() & 1 ? TieMode::friendly : TieMode::antagonistic;
    std::vector<Component> parts;
    for (int k = 0; k < 3; ++k) {
      std::vector<std::vector<Heap>> sets;
      for (int i = 0; i < n; ++i) sets.push_back(random_set(rng));
      auto game = subtraction_game(sets, UtilityPreset::identity, mode, n);
      parts.push_back({game, {{Heap(rng() % 6)}, CumulationMatrix(n, 1)}});
    }
    auto as_component = [](const SumPosition& s) {
      return Component{to_game(s), combined_position(s)};
    };
    auto left = disjunctive_sum(as_component(disjunctive_sum(parts[0], parts[1])), parts[2]);
    auto right = disjunctive_sum(parts[0], as_component(disjunctive_sum(parts[1], parts[2])));
    auto swapped = disjunctive_sum(parts[2], as_component(disjunctive_sum(parts[1], parts[0])));
    auto m = outcome_matrix(to_game(left), combined_position(left));
    assoc += m == outcome_matrix(to_game(right), combined_position(right)) &&
             m == outcome_matrix(to_game(swapped), combined_position(swapped));
  }
  c.expect(assoc == 200, "sum associativity and commutativity " + std::to_string(assoc) + "/200");
}

void pareto(Checks& c) {
  auto big = subtraction_game({{20, 31, 51}}, UtilityPreset::identity);
  auto r = pareto_scan(big, grounded(big, {100}, {}, 2));
  c.expect(r.pspe_value == std::vector<double>{51, 31}, "{20,31,51} PSPE (51,31)");
  c.expect(r.dominating && *r.dominating == std::vector<double>{60, 40},
           "{20,31,51} dominated by (60,40)");
  c.expect(r.dominating_line == std::vector<ActionVector>(5, take(20)), "all-20 line");

  auto sevens = subtraction_game({{3, 7}}, UtilityPreset::identity);
  auto s = pareto_scan(sevens, grounded(sevens, {30}, {}, 2));
  c.expect(s.pspe_value == std::vector<double>{14, 14}, "{3,7} heap 30 PSPE (14,14)");
  c.expect(s.dominating && *s.dominating == std::vector<double>{15, 15},
           "{3,7} heap 30 dominated by (15,15)");
  bool earlier = false;
  for (Heap x = 0; x < 30; ++x)
    earlier |= pareto_scan(sevens, grounded(sevens, {x}, {}, 2)).dominating.has_value();
  c.expect(!earlier, "{3,7} efficient below 30");

  for (TieMode mode : {TieMode::antagonistic, TieMode::friendly}) {
    auto small = subtraction_game({{2, 3}}, UtilityPreset::identity, mode);
    bool any = false;
    for (Heap x = 0; x <= 40; ++x)
      any |= pareto_scan(small, grounded(small, {x}, {}, 2)).dominating.has_value();
    c.expect(!any, std::string("{2,3} efficient, ") + std::string(to_string(mode)));
  }
}

void comparison(Checks& c) {
  PartizanPosition g{4, {1, 4}, {2, 3}};
  PartizanPosition h{3, {1, 4}, {2, 3}};
  auto minus_h = negate(h);
  c.expect(np_ge(g, h), "heap 4 >= heap 3");
  c.expect(compare_normal_play(g, h).verdict == Verdict::proven_ge, "certificate proven_ge");
  c.expect(np_winner({g, minus_h}, Side::left) == Side::left, "Left wins going first");
  c.expect(np_winner({g, minus_h}, Side::right) == Side::left, "Left wins going second");

  auto has = [](const std::vector<NpMove>& moves, NpMove m) {
    return std::find(moves.begin(), moves.end(), m) != moves.end();
  };
  PartizanPosition g0{0, g.left, g.right};
  PartizanPosition h2{2, minus_h.left, minus_h.right};
  c.expect(has(np_winning_moves({g, minus_h}, Side::left), {Side::left, 0, 4}),
           "Left first: eliminating G wins");
  c.expect(np_winning_moves({g0, minus_h}, Side::right).empty(), "then Right is lost");
  c.expect(has(np_winning_moves({g0, h2}, Side::left), {Side::left, 1, 2}),
           "Left removes the last two");
  c.expect(has(np_winning_moves({{2, g.left, g.right}, minus_h}, Side::left), {Side::left, 0, 1}),
           "Right takes 2 from G, Left answers 1");
  c.expect(has(np_winning_moves({{1, g.left, g.right}, minus_h}, Side::left), {Side::left, 1, 3}),
           "Right takes 3 from G, Left eliminates H");
  c.expect(has(np_winning_moves({g, h2}, Side::left), {Side::left, 1, 2}),
           "Right takes 1 from H, Left eliminates it");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "golden outcome tables", 1.0, golden_tables},
      {2, "equilibrium walkthroughs", 1.0, walkthroughs},
      {3, "compound replay", 1.0, compound_replay},
      {4, "divergence anchors", 5.0, divergence_anchors},
      {5, "census calibration (soft)", 600.0, census},
      {6, "property suites", 300.0, property_suites},
      {7, "Pareto anchors", 30.0, pareto},
      {8, "heap 4 versus heap 3 comparison", 1.0, comparison},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Checks checks;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(checks);
    } catch (const std::exception& e) {
      checks.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds > cr.limit_seconds) checks.expect(false, "time limit exceeded");
    const bool ok = checks.failed == 0;
    failures += !ok;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2f s, limit %.0f s", seconds, cr.limit_seconds);
    std::cout << (ok ? "PASS" : "FAIL") << "  " << cr.id << ". " << cr.name << " (" << timing
              << ")" << checks.notes.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
