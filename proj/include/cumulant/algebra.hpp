#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cumulant/core.hpp"
#include "cumulant/efg.hpp"
#include "cumulant/outcome.hpp"

namespace cumulant {

// ---- disjunctive sums ----

struct Component {
  CumulativeGame game;
  HeapPosition position;
};

struct SumPosition {
  std::vector<Component> components;
  std::vector<int> offsets;  // first combined heap of each component
  int heaps = 0;
};

// Game on a subset of heaps: actions touching only those heaps, evaluated
// with every other heap and cumulation column at zero.
CumulativeGame restrict_game(const CumulativeGame& game, const std::vector<int>& heaps);
HeapPosition restrict_position(const HeapPosition& w, const std::vector<int>& heaps);

// Positions reachable when any player may move at any time; throws
// CycleError or BudgetExceeded when that tree is not finite within budget.
std::uint64_t check_free_order_finite(const CumulativeGame& game, const HeapPosition& w,
                                      std::uint64_t node_budget = kDefaultNodeBudget);

// Throws PreconditionError for custom turn functions, mismatched player
// counts, or a component whose free-order tree is infinite.
SumPosition disjunctive_sum(std::vector<Component> components,
                            std::uint64_t node_budget = kDefaultNodeBudget);
SumPosition disjunctive_sum(const Component& g, const Component& h,
                            std::uint64_t node_budget = kDefaultNodeBudget);

// Cyclic-turn game on the combined heaps; tie policy of the first component.
CumulativeGame to_game(const SumPosition& sum);
HeapPosition combined_position(const SumPosition& sum);

// Row p holds the PSPE rewards from w with previous player p.
OutcomeMatrix outcome_matrix(const CumulativeGame& game, const HeapPosition& w,
                             std::uint64_t node_budget = kDefaultNodeBudget);

// ---- normal play ----

enum class Side { left, right };
enum class NpClass { L, R, P, N };

std::string to_string(NpClass c);
// L > N > R and L > P > R; N and P are incomparable.
bool np_class_geq(NpClass a, NpClass b);

struct PartizanPosition {
  Heap heap = 0;
  std::vector<Heap> left;
  std::vector<Heap> right;
  bool operator==(const PartizanPosition&) const = default;
};

PartizanPosition negate(const PartizanPosition& g);

struct NpRow {
  Heap heap = 0;
  bool left_first_wins = false;   // Left to move, Left wins
  bool right_first_wins = false;  // Right to move, Right wins
  NpClass cls = NpClass::P;
};

std::vector<NpRow> np_outcome_classes(std::vector<Heap> left, std::vector<Heap> right,
                                      Heap x_max);

// Winner of the sum of the components with `first` to move.
Side np_winner(const std::vector<PartizanPosition>& components, Side first);
NpClass np_class(const std::vector<PartizanPosition>& components);

struct NpMove {
  Side side = Side::left;
  std::size_t component = 0;
  Heap take = 0;
  bool operator==(const NpMove&) const = default;
};

// Moves of `mover` after which the opponent, moving next, loses.
std::vector<NpMove> np_winning_moves(const std::vector<PartizanPosition>& components, Side mover);

// A play line from `first`: the eventual winner always picks its first
// winning move, the loser its first legal move. Ends with the loser stuck.
std::vector<NpMove> np_line(const std::vector<PartizanPosition>& components, Side first);

// Left wins G + (-H) moving second.
bool np_ge(const PartizanPosition& g, const PartizanPosition& h);

// ---- comparison certificates ----

enum class Verdict { proven_ge, refuted, unresolved };
enum class CompareMethod { normal_play_exact, bounded_refutation };

std::string to_string(Verdict v);
std::string to_string(CompareMethod m);

struct ComparisonCertificate {
  Verdict verdict = Verdict::unresolved;
  CompareMethod method = CompareMethod::bounded_refutation;
  int player = 1;
  std::optional<Component> witness;
  std::optional<PartizanPosition> np_witness;
  std::optional<PlayerId> starting_player;  // the player moving first
  std::optional<Side> starting_side;
  std::vector<double> g_values;  // player's value at the witness, G side
  std::vector<double> h_values;
  std::uint64_t checked = 0;
  std::uint64_t skipped = 0;  // X with an infeasible sum
};

ComparisonCertificate compare_normal_play(const PartizanPosition& g, const PartizanPosition& h);

struct CompareOptions {
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::size_t max_candidates = 1000;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Single-heap positions of the first heap of `game` with heap 0..x_max and
// zero cumulation.
std::vector<Component> single_heap_family(const CumulativeGame& game, Heap x_max = 8);

// Checks o_p(G+X) >= o_p(H+X) for every candidate X in order and every
// starting player; the first violation in candidate order is the witness.
ComparisonCertificate compare_refute(const Component& g, const Component& h, PlayerId player,
                                     const std::vector<Component>& family,
                                     const CompareOptions& options = {});

nlohmann::json to_json(const ComparisonCertificate& c);

}  // namespace cumulant
