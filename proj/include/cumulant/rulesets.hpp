#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cumulant/core.hpp"

namespace cumulant {

enum class RulesetPreset { fixed_subtraction, wealth, prologue_compound, custom_table };

enum class RewardScheme {
  identity,           // mover gets the removed amount
  transfer,           // mover +s, the other player -s (two players)
  none,
  last_move_bonus,    // taking the last pebble: mover +1, others -1
  last_move_penalty,  // taking the last pebble: mover -1, others +1
  uniform_removal,    // every player gets the removed amount
  table,
};

enum class UtilityPreset {
  identity,
  zero_sum_difference,
  normal_play,
  misere_play,
  auction,
  scoring,
  custom_terminal_table,
  prologue_compound,
};

enum class TurnTableKind { cyclic, alternating, table };

struct TableMove {
  std::vector<Heap> heaps;
  int mover = 0;  // 0 = any player
  std::vector<ActionVector> actions;
  bool operator==(const TableMove&) const = default;
};

struct TableTurn {
  std::vector<Heap> heaps;
  int player = 1;
  bool operator==(const TableTurn&) const = default;
};

struct TableReward {
  std::vector<Heap> heaps;
  int mover = 0;
  ActionVector action;
  std::vector<std::vector<double>> reward;  // players x heaps
  bool operator==(const TableReward&) const = default;
};

struct RulesetSpec {
  RulesetPreset preset = RulesetPreset::fixed_subtraction;
  // One set for symmetric play, or one per player.
  std::vector<std::vector<Heap>> sets;
  RewardScheme rewards = RewardScheme::identity;

  // prologue_compound
  std::vector<Heap> extra_action;  // empty: (1,1,0,0,0,0)
  bool extra_turn = true;

  // custom_table
  std::vector<TableMove> moves;
  TurnTableKind turn = TurnTableKind::cyclic;
  std::vector<TableTurn> turn_table;
  std::vector<TableReward> reward_table;

  bool operator==(const RulesetSpec&) const = default;
};

struct TerminalEntry {
  double cumulation = 0;
  std::vector<double> utilities;
  bool operator==(const TerminalEntry&) const = default;
};

struct UtilitySpec {
  UtilityPreset preset = UtilityPreset::identity;
  double value = 0;  // auction value v
  std::vector<TerminalEntry> table;
  TiePolicy tie;
  bool operator==(const UtilitySpec&) const = default;
};

struct InitialSpec {
  std::vector<Heap> heaps;
  std::vector<std::vector<double>> cumulation;  // players x heaps; empty = zero
  int previous_player = 1;
  bool operator==(const InitialSpec&) const = default;
};

struct GameDocument {
  int version = 1;
  int players = 2;
  int heaps = 1;
  RulesetSpec ruleset;
  UtilitySpec utility;
  InitialSpec initial;
  std::uint64_t move_budget = kDefaultMoveBudget;
  std::string label;
  bool operator==(const GameDocument&) const = default;
};

CumulativeGame build_game(const RulesetSpec& rs, const UtilitySpec& us, int players, int heaps);
CumulativeGame build_game(const GameDocument& doc);
GroundedPosition initial_position(const GameDocument& doc);

// Identity-utility game with transfer rewards whose terminal C_1 is the
// zero-sum score C_1 - C_2 of the plain subtraction encoding.
CumulativeGame zero_sum_transfer(const RulesetSpec& rs, int players = 2,
                                 TieMode mode = TieMode::antagonistic);

// Shorthand for one-heap subtraction games.
CumulativeGame subtraction_game(std::vector<std::vector<Heap>> sets, UtilityPreset utility,
                                TieMode mode = TieMode::antagonistic, int players = 2,
                                int heaps = 1);

// Six heaps A..F, all 4; F starts with cumulation 1 for everyone.
GameDocument prologue_document(int players = 3);

// Throws ValidationError listing every offending field path.
GameDocument parse_game_document(const nlohmann::json& j);
nlohmann::json to_json(const GameDocument& doc);

std::string to_string(RulesetPreset p);
std::string to_string(RewardScheme r);
std::string to_string(UtilityPreset u);

}  // namespace cumulant
