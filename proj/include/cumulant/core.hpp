#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cumulant/tie_policy.hpp"

namespace cumulant {

using Heap = std::int64_t;

inline constexpr std::uint64_t kDefaultMoveBudget = 1'000'000;

// Budget override from CUMULANT_BUDGET, or `fallback` when unset/invalid.
std::uint64_t budget_from_env(std::uint64_t fallback);

// 1-based player index.
class PlayerId {
 public:
  constexpr PlayerId() = default;
  constexpr explicit PlayerId(int index) : index_(index) {}

  constexpr int index() const { return index_; }
  constexpr std::size_t slot() const { return static_cast<std::size_t>(index_ - 1); }
  constexpr bool valid_for(int players) const { return index_ >= 1 && index_ <= players; }
  // p mod n + 1
  constexpr PlayerId next(int players) const { return PlayerId(index_ % players + 1); }

  auto operator<=>(const PlayerId&) const = default;

 private:
  int index_ = 1;
};

// n x d matrix of reals, stored heap-major so each heap's column is contiguous.
class CumulationMatrix {
 public:
  CumulationMatrix() = default;
  CumulationMatrix(int players, int heaps);
  // rows[i][h] is player i+1's cumulation on heap h.
  static CumulationMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int players() const { return players_; }
  int heaps() const { return heaps_; }

  double& operator()(std::size_t player_slot, std::size_t heap) {
    return data_[heap * static_cast<std::size_t>(players_) + player_slot];
  }
  double operator()(std::size_t player_slot, std::size_t heap) const {
    return data_[heap * static_cast<std::size_t>(players_) + player_slot];
  }

  std::span<const double> column(std::size_t heap) const {
    return {data_.data() + heap * static_cast<std::size_t>(players_),
            static_cast<std::size_t>(players_)};
  }
  std::span<const double> raw() const { return data_; }

  // Per-player totals over all heaps.
  std::vector<double> row_sums() const;
  std::vector<std::vector<double>> rows() const;
  bool is_zero() const;

  CumulationMatrix& operator+=(const CumulationMatrix& other);
  friend CumulationMatrix operator+(CumulationMatrix a, const CumulationMatrix& b) {
    a += b;
    return a;
  }
  friend CumulationMatrix operator-(CumulationMatrix a, const CumulationMatrix& b);

  bool operator==(const CumulationMatrix&) const = default;

 private:
  int players_ = 0;
  int heaps_ = 0;
  std::vector<double> data_;
};

struct HeapPosition {
  std::vector<Heap> heaps;
  CumulationMatrix cumulation;

  bool operator==(const HeapPosition&) const = default;
};

struct GroundedPosition {
  HeapPosition position;
  PlayerId previous;

  bool operator==(const GroundedPosition&) const = default;
};

struct ActionVector {
  std::vector<Heap> delta;

  auto operator<=>(const ActionVector&) const = default;
};

struct GroundedHash {
  std::size_t operator()(const GroundedPosition& g) const noexcept;
};
struct HeapsHash {
  std::size_t operator()(const std::vector<Heap>& heaps) const noexcept;
};

// The mover is passed explicitly so rulesets need not re-evaluate the turn
// function; it is always turn(g.position, g.previous).
struct Ruleset {
  std::function<std::vector<ActionVector>(const GroundedPosition&, PlayerId mover)> actions;
  std::function<CumulationMatrix(const GroundedPosition&, PlayerId mover, const ActionVector&)>
      rewards;
  bool cumulation_independent = true;
  bool symmetric = true;
  bool short_ruleset = true;
};

enum class TurnKind { cyclic, alternating, custom };

struct TurnFunction {
  TurnKind kind = TurnKind::cyclic;
  std::function<PlayerId(const HeapPosition&, PlayerId previous)> custom;
  // Set when `custom` reads only the heap sizes.
  bool cumulation_independent = true;

  PlayerId operator()(const HeapPosition& w, PlayerId previous, int players) const;

  static TurnFunction cyclic() { return {}; }
  static TurnFunction alternating() { return {TurnKind::alternating, {}, true}; }
};

// u_i = sum over heaps of per_heap(i, h, column h of C, current player).
struct UtilityMap {
  std::function<double(PlayerId player, int heap, std::span<const double> column,
                       PlayerId current)>
      per_heap;
  bool identity = false;

  std::vector<double> operator()(const HeapPosition& w, PlayerId current) const;

  static UtilityMap identity_map();
};

struct CumulativeGame {
  int players = 2;
  int heaps = 1;
  Ruleset ruleset;
  TurnFunction turn;
  UtilityMap utility;
  TiePolicy tie;
  std::uint64_t move_budget = kDefaultMoveBudget;
  std::string label;

  PlayerId current_player(const GroundedPosition& g) const {
    return turn(g.position, g.previous, players);
  }
};

struct Move {
  ActionVector action;
  GroundedPosition next;
};

// Throws DimensionError unless g has the game's n x d shape and nonnegative heaps.
void validate_position(const CumulativeGame& game, const GroundedPosition& g);

GroundedPosition make_grounded(const CumulativeGame& game, std::vector<Heap> heaps,
                               PlayerId previous);

// All options of g, sorted by action vector. Empty iff g is terminal.
std::vector<Move> expand_options(const CumulativeGame& game, const GroundedPosition& g);

GroundedPosition step(const CumulativeGame& game, const GroundedPosition& g,
                      const ActionVector& a);

bool is_terminal(const CumulativeGame& game, const GroundedPosition& g);

// u(C, current player) at g, meaningful at terminal positions.
std::vector<double> terminal_utilities(const CumulativeGame& game, const GroundedPosition& g);

struct FeasibilityReport {
  bool ok = true;
  std::uint64_t longest_line = 0;  // valid only when ok
  std::uint64_t positions = 0;
  std::vector<ActionVector> offending_path;
};

FeasibilityReport check_feasibility(const CumulativeGame& game, const GroundedPosition& g);

std::string format_position(const GroundedPosition& g);
std::string format_action(const ActionVector& a);

}  // namespace cumulant
