#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cumulant/core.hpp"
#include "cumulant/efg.hpp"

namespace cumulant {

enum class OutcomeVariant { zs_symmetric, si_symmetric, zs_partizan, si_partizan };

std::string to_string(OutcomeVariant v);

// One row per heap size. Value layout by variant:
//   zs_symmetric  [o]
//   si_symmetric  [o1, o2]          (mover, other)
//   zs_partizan   [o(x,2), o(x,1)]  (player 1 to move, player 2 to move)
//   si_partizan   [p1 starts: u1, u2, p2 starts: u1, u2]
// Action sets hold removal amounts, one block per mover (player 1 first).
struct OutcomeRow {
  Heap heap = 0;
  std::vector<std::int64_t> values;
  std::vector<std::vector<Heap>> optimal;    // actions attaining the mover's max
  std::vector<std::vector<Heap>> tie_final;  // survivors of the tie rule
  std::vector<Heap> chosen;                  // residual pick (largest removal), 0 if none
};

struct OutcomeTable {
  OutcomeVariant variant = OutcomeVariant::zs_symmetric;
  std::vector<std::vector<Heap>> sets;  // one set, or (player 1, player 2)
  TieMode tie = TieMode::antagonistic;
  std::vector<OutcomeRow> rows;
  std::uint64_t cells_visited = 0;  // (heap, action) pairs evaluated

  std::vector<std::string> columns() const;
};

OutcomeTable outcome_zs_symmetric(std::vector<Heap> set, Heap x_max);
OutcomeTable outcome_si_symmetric(std::vector<Heap> set, TieMode tie, Heap x_max);
OutcomeTable outcome_zs_partizan(std::vector<Heap> first, std::vector<Heap> second, Heap x_max);
OutcomeTable outcome_si_partizan(std::vector<Heap> first, std::vector<Heap> second, TieMode tie,
                                 Heap x_max);

// Appends rows up to x_max; existing rows are reused as-is.
void extend_table(OutcomeTable& table, Heap x_max);

std::string to_csv(const OutcomeTable& table);
nlohmann::json to_json(const OutcomeTable& table);

// n x n; row = previous player, column = player whose value it is.
class OutcomeMatrix {
 public:
  OutcomeMatrix() = default;
  explicit OutcomeMatrix(int players)
      : players_(players), data_(static_cast<std::size_t>(players * players), 0.0) {}

  int players() const { return players_; }
  double& at(PlayerId previous, PlayerId player) {
    return data_[previous.slot() * static_cast<std::size_t>(players_) + player.slot()];
  }
  double at(PlayerId previous, PlayerId player) const {
    return data_[previous.slot() * static_cast<std::size_t>(players_) + player.slot()];
  }
  std::vector<double> row(PlayerId previous) const;
  void set_row(PlayerId previous, const std::vector<double>& values);
  bool is_zero() const;
  // Entrywise <=.
  bool leq(const OutcomeMatrix& other, double tolerance = 1e-9) const;

  bool operator==(const OutcomeMatrix&) const = default;

 private:
  int players_ = 0;
  std::vector<double> data_;
};

// Rewards accumulated along the profile's line from g (Lemma: equals the
// terminal cumulation minus the current one, per player).
std::vector<double> sigma_outcome(const CumulativeGame& game, const PositionProfile& profile,
                                  const GroundedPosition& g);
OutcomeMatrix sigma_outcome_matrix(const CumulativeGame& game, const PositionProfile& profile,
                                   const HeapPosition& w);

struct RecursiveOutcome {
  std::map<std::vector<Heap>, OutcomeMatrix> matrices;
  std::uint64_t positions = 0;
};

// Dynamic program over heap sizes for heap-size dynamic games with identity
// utility; throws PreconditionError when the game reads cumulations.
RecursiveOutcome recursive_outcome(const CumulativeGame& game, Heap x_max);
// Single grounded value via the same program: outcome row + current cumulation.
std::vector<double> recursive_value(const CumulativeGame& game, const GroundedPosition& g);

}  // namespace cumulant
