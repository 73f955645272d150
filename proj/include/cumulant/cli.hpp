#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cumulant/core.hpp"

namespace cumulant {

enum class OutputFormat { csv, json, text };

struct Command {
  std::string subcommand;  // outcome, pspe, play, convert, sum, compare, np, lab
  std::string lab_task;    // census, pareto, repair, greedy, brute
  OutputFormat format = OutputFormat::text;

  std::vector<std::string> files;
  std::string script;
  std::string output;  // empty: stdout

  // outcome / np / lab
  std::string preset = "fixed";
  std::vector<std::vector<Heap>> sets;
  std::string variant = "si";
  TieMode tie = TieMode::antagonistic;
  Heap max_heap = 20;

  // convert
  std::string to;              // efg or cg
  std::string method = "preorder";
  bool tree = false;

  // sum / compare
  int previous = 0;  // 0: every previous player
  int player = 1;
  Heap max_x = 8;
  std::string np_g;  // "heap;left;right"
  std::string np_h;

  // lab census
  Heap max_value = 20;
  std::vector<int> sizes{2, 3};
  Heap heap_bound = 120;
  std::vector<Heap> bounds;
  std::string checkpoint;
  unsigned threads = 0;

  std::uint64_t budget = 0;  // 0: default or CUMULANT_BUDGET
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;

// Runs a parsed command; errors are reported on `err` and mapped to exit codes.
int run(const Command& cmd, std::ostream& out, std::ostream& err);

// Parses argv (argv[0] is the program name) and runs it.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cumulant
