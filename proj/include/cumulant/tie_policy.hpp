#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cumulant {

class PlayerId;

enum class TieMode { antagonistic, friendly };

std::string_view to_string(TieMode mode);
TieMode parse_tie_mode(std::string_view text);

// Generic tie-breaking shared by every solver path. A mover ranks two
// candidate utility vectors by
//   1. its own utility (higher is better),
//   2. opponents' utilities in the mover's preference order, lower is better
//      when antagonistic and higher when friendly,
// and reports a tie only when every coordinate agrees. The residual rule
// (smallest action / child) is applied by the caller.
struct TiePolicy {
  TieMode mode = TieMode::antagonistic;
  // preferences[i] lists the opponents of player i+1 (1-based ids) in
  // priority order. Empty, or a missing row, means ascending player index.
  std::vector<std::vector<int>> preferences;

  std::vector<int> opponent_order(PlayerId mover, int players) const;

  // Negative if `a` is strictly preferred by the mover, positive if `b` is,
  // zero if the two vectors are indistinguishable.
  int compare(PlayerId mover, std::span<const double> a,
              std::span<const double> b) const;

  bool operator==(const TiePolicy&) const = default;
};

}  // namespace cumulant
