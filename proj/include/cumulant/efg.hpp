#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cumulant/core.hpp"
#include "cumulant/rulesets.hpp"

namespace cumulant {

inline constexpr std::uint64_t kDefaultNodeBudget = 5'000'000;

struct EfgState {
  int turn = 1;  // mover; ignored at terminals
  std::vector<int> children;
  std::vector<double> utilities;  // terminals only

  bool operator==(const EfgState&) const = default;
};

struct ExtensiveFormGame {
  int players = 2;
  std::vector<EfgState> states;
  int root = 0;

  bool terminal(int s) const { return states[static_cast<std::size_t>(s)].children.empty(); }
  std::size_t size() const { return states.size(); }

  // Throws ValidationError on bad ids, unreachable states, or missing
  // utilities, and CycleError if the children relation has a cycle.
  void validate() const;
  // Parents before children, starting at the root.
  std::vector<int> topological_order() const;

  bool operator==(const ExtensiveFormGame&) const = default;
};

// choice[s] is the selected child of s, -1 at terminals.
struct StrategyProfile {
  std::vector<int> choice;
  bool operator==(const StrategyProfile&) const = default;
};

struct InductionResult {
  std::vector<double> value;
  StrategyProfile profile;
  std::vector<std::vector<double>> state_values;  // utilities at tau(s) per state
};

// Children are ranked by TiePolicy; remaining ties go to the earliest child.
InductionResult backward_induction(const ExtensiveFormGame& efg, const TiePolicy& tie);

// Utilities at the terminal reached from s by following the profile.
std::vector<double> profile_outcome(const ExtensiveFormGame& efg, const StrategyProfile& profile,
                                    int s);
std::vector<int> realized_path(const ExtensiveFormGame& efg, const StrategyProfile& profile,
                               int s);
// No mover gains by a one-step deviation at any state.
bool satisfies_pspe(const ExtensiveFormGame& efg, const StrategyProfile& profile);

// ---- strategy profiles on cumulative games ----

class PositionProfile {
 public:
  // Returns an index into `options`, or nullopt when undefined at g.
  using Chooser = std::function<std::optional<std::size_t>(const GroundedPosition& g,
                                                           const std::vector<Move>& options)>;

  explicit PositionProfile(Chooser chooser) : chooser_(std::move(chooser)) {}

  static PositionProfile from_map(
      std::unordered_map<GroundedPosition, ActionVector, GroundedHash> choices);
  // Largest total removal; ties to the smallest action vector.
  static PositionProfile greedy();
  // Deterministic pseudo-random choice keyed by position and seed.
  static PositionProfile seeded(std::uint64_t seed);

  std::optional<std::size_t> choose(const GroundedPosition& g,
                                    const std::vector<Move>& options) const {
    return chooser_(g, options);
  }

 private:
  Chooser chooser_;
};

struct PlayResult {
  GroundedPosition terminal;
  std::vector<double> cumulative;  // per-player terminal cumulation, summed over heaps
  std::vector<ActionVector> line;
};

PlayResult play_profile(const CumulativeGame& game, const GroundedPosition& g0,
                        const PositionProfile& profile);

struct GameSolution {
  std::vector<double> value;
  std::vector<ActionVector> line;
  std::vector<GroundedPosition> path;  // g0 first, terminal last
  std::size_t positions = 0;
  // Equilibrium action at every nonterminal position that was solved.
  std::unordered_map<GroundedPosition, ActionVector, GroundedHash> choices;
};

// Backward induction directly on the grounded game, merging identical
// grounded positions.
GameSolution solve_game(const CumulativeGame& game, const GroundedPosition& g0,
                        std::uint64_t node_budget = kDefaultNodeBudget);

// ---- conversions ----

struct CgEfg {
  ExtensiveFormGame efg;
  std::vector<GroundedPosition> positions;           // per state
  std::vector<std::vector<ActionVector>> actions;    // per state, aligned with children
};

// With merge=false the result is the plain game tree.
CgEfg cg_to_efg(const CumulativeGame& game, const GroundedPosition& g0, bool merge = true,
                std::uint64_t node_budget = kDefaultNodeBudget);

struct EfgConversion {
  GameDocument document;
  CumulativeGame game;
  GroundedPosition start;
  ExtensiveFormGame transformed;  // the efg actually encoded (after dummy insertion)
  std::vector<int> dummies;       // ids of inserted states in `transformed`
  std::vector<Heap> heap_of_state;
};

// Children of every state get one common mover; mixed children are routed
// through inserted single-child states.
ExtensiveFormGame uniform_child_movers(const ExtensiveFormGame& efg, std::vector<int>* dummies);

// Single-heap game with heap Q - q(s) for a topological numbering q (root 1).
// An explicit numbering (indexed by state, values 1..Q) may be supplied.
EfgConversion efg_to_cg_preorder(const ExtensiveFormGame& efg,
                                 std::optional<std::vector<int>> numbering = std::nullopt);

// Inserts pass-through states so each mover is followed by mover mod n + 1.
ExtensiveFormGame cycle_complete(const ExtensiveFormGame& efg, std::vector<int>* dummies);
// Bypasses every state with exactly one child.
ExtensiveFormGame reduce(const ExtensiveFormGame& efg);

// Growing single-heap game with cyclic turns and utilities paid as rewards
// on the final action.
EfgConversion efg_to_cg_cyclic(const ExtensiveFormGame& efg);

nlohmann::json to_json(const ExtensiveFormGame& efg);
ExtensiveFormGame parse_efg_document(const nlohmann::json& j);

}  // namespace cumulant
