#include "cumulant/tie_policy.hpp"

#include <cmath>
#include <string>

#include "cumulant/core.hpp"
#include "cumulant/errors.hpp"

namespace cumulant {

namespace {
constexpr double kTolerance = 1e-9;

int compare_values(double a, double b) {
  if (std::fabs(a - b) <= kTolerance) return 0;
  return a < b ? -1 : 1;
}
}  // namespace

std::string_view to_string(TieMode mode) {
  return mode == TieMode::antagonistic ? "antagonistic" : "friendly";
}

TieMode parse_tie_mode(std::string_view text) {
  if (text == "antagonistic") return TieMode::antagonistic;
  if (text == "friendly") return TieMode::friendly;
  throw ValidationError("tie_policy", "expected antagonistic or friendly, got '" +
                                          std::string(text) + "'");
}

std::vector<int> TiePolicy::opponent_order(PlayerId mover, int players) const {
  if (mover.slot() < preferences.size() && !preferences[mover.slot()].empty())
    return preferences[mover.slot()];
  std::vector<int> order;
  for (int j = 1; j <= players; ++j)
    if (j != mover.index()) order.push_back(j);
  return order;
}

int TiePolicy::compare(PlayerId mover, std::span<const double> a,
                       std::span<const double> b) const {
  const std::size_t me = mover.slot();
  if (int c = compare_values(a[me], b[me]); c != 0) return -c;
  const int sign = mode == TieMode::antagonistic ? 1 : -1;
  auto visit = [&](std::size_t j) { return sign * compare_values(a[j], b[j]); };
  if (me < preferences.size() && !preferences[me].empty()) {
    for (int j : preferences[me])
      if (int c = visit(static_cast<std::size_t>(j - 1)); c != 0) return c;
  }
  // Players absent from an explicit order are still compared, ascending.
  for (std::size_t j = 0; j < a.size(); ++j)
    if (j != me)
      if (int c = visit(j); c != 0) return c;
  return 0;
}

}  // namespace cumulant
