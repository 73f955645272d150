#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cumulant/core.hpp"
#include "cumulant/outcome.hpp"

namespace cumulant {

// ---- brute-force oracle ----

struct BruteForceResult {
  std::vector<double> value;
  std::vector<ActionVector> line;
  std::uint64_t nodes = 0;
};

// Plain recursion over the whole grounded tree, no memoization.
BruteForceResult brute_force_pspe(const CumulativeGame& game, const GroundedPosition& g0,
                                  std::uint64_t node_budget = kDefaultNodeBudget);

// ---- zero-sum versus self-interest census ----

struct CensusOptions {
  Heap max_value = 20;
  std::vector<int> sizes{2, 3};
  Heap heap_bound = 120;
  TieMode tie = TieMode::antagonistic;
  unsigned threads = 0;             // 0: hardware concurrency
  std::string checkpoint;           // JSON lines file; empty disables
};

struct CriticalSet {
  std::vector<Heap> set;
  Heap first_heap = 0;  // first heap where the optimal first actions differ
  bool operator==(const CriticalSet&) const = default;
};

struct CriticalSetReport {
  CensusOptions options;
  std::uint64_t sets_scanned = 0;
  std::vector<CriticalSet> critical;  // sorted by set

  // Sets whose first divergence is at most `bound`.
  std::size_t count_at(Heap bound) const;
};

// First heap <= heap_bound where no zero-sum optimal action survives the
// self-interest tie rule, or nullopt.
std::optional<Heap> first_divergence(const std::vector<Heap>& set, TieMode tie, Heap heap_bound);

CriticalSetReport critical_set_scan(const CensusOptions& options);

std::string to_csv(const CriticalSetReport& report);
nlohmann::json to_json(const CriticalSetReport& report);

// ---- Pareto efficiency ----

struct ParetoReport {
  std::string label;
  std::vector<Heap> heaps;
  std::vector<double> pspe_value;
  std::vector<ActionVector> pspe_line;
  std::uint64_t allocations = 0;  // distinct terminal utility vectors
  std::optional<std::vector<double>> dominating;
  std::vector<ActionVector> dominating_line;
};

// Among allocations dominating the PSPE value, picks the one with the
// largest smallest gain, then the largest total, then the smallest line.
ParetoReport pareto_scan(const CumulativeGame& game, const GroundedPosition& g0,
                         std::uint64_t node_budget = kDefaultNodeBudget);

nlohmann::json to_json(const ParetoReport& report);

// Agents play with every reward negated; the report holds the removed totals
// of that equilibrium line and whether some line still dominates them.
struct RepairReport {
  std::vector<ActionVector> line;
  std::vector<double> true_value;
  std::optional<std::vector<double>> dominated_by;
};

RepairReport reward_repair(const CumulativeGame& game, const GroundedPosition& g0,
                           std::uint64_t node_budget = kDefaultNodeBudget);

nlohmann::json to_json(const RepairReport& report);

// ---- greedy play ----

struct GreedyRow {
  std::vector<Heap> set;
  std::optional<Heap> last_nonoptimal_zs;  // largest heap where greedy misses the optimum
  std::optional<Heap> last_nonoptimal_si;
};

std::vector<GreedyRow> greedy_report(Heap max_value, std::vector<int> sizes, Heap heap_bound,
                                     TieMode tie);

std::string to_csv(const std::vector<GreedyRow>& rows);

// All subsets of {1..max_value} with the given sizes, lexicographic.
std::vector<std::vector<Heap>> enumerate_sets(Heap max_value, const std::vector<int>& sizes);

}  // namespace cumulant
