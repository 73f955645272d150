#include "cumulant/core.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include "cumulant/errors.hpp"
#include "memo_dfs.hpp"

namespace cumulant {

std::uint64_t budget_from_env(std::uint64_t fallback) {
  const char* raw = std::getenv("CUMULANT_BUDGET");
  if (raw == nullptr) return fallback;
  std::uint64_t value = 0;
  const char* end = raw + std::char_traits<char>::length(raw);
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || ptr != end || value == 0) return fallback;
  return value;
}

// ---- CumulationMatrix ----

CumulationMatrix::CumulationMatrix(int players, int heaps)
    : players_(players), heaps_(heaps), data_(static_cast<std::size_t>(players * heaps), 0.0) {}

CumulationMatrix CumulationMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  const int d = n == 0 ? 0 : static_cast<int>(rows.front().size());
  CumulationMatrix m(n, d);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != d)
      throw DimensionError("cumulation rows have unequal lengths");
    for (int h = 0; h < d; ++h) m(i, h) = rows[i][h];
  }
  return m;
}

std::vector<double> CumulationMatrix::row_sums() const {
  std::vector<double> sums(players_, 0.0);
  for (int h = 0; h < heaps_; ++h)
    for (int i = 0; i < players_; ++i) sums[i] += (*this)(i, h);
  return sums;
}

std::vector<std::vector<double>> CumulationMatrix::rows() const {
  std::vector<std::vector<double>> out(players_, std::vector<double>(heaps_));
  for (int i = 0; i < players_; ++i)
    for (int h = 0; h < heaps_; ++h) out[i][h] = (*this)(i, h);
  return out;
}

bool CumulationMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

CumulationMatrix& CumulationMatrix::operator+=(const CumulationMatrix& other) {
  if (other.players_ != players_ || other.heaps_ != heaps_)
    throw DimensionError("cumulation shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CumulationMatrix operator-(CumulationMatrix a, const CumulationMatrix& b) {
  if (a.players_ != b.players_ || a.heaps_ != b.heaps_)
    throw DimensionError("cumulation shape mismatch");
  for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
  return a;
}

// ---- hashing ----

namespace {
inline void mix(std::size_t& seed, std::uint64_t v) {
  seed ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}
}  // namespace

std::size_t HeapsHash::operator()(const std::vector<Heap>& heaps) const noexcept {
  std::size_t seed = heaps.size();
  for (Heap x : heaps) mix(seed, static_cast<std::uint64_t>(x));
  return seed;
}

std::size_t GroundedHash::operator()(const GroundedPosition& g) const noexcept {
  std::size_t seed = HeapsHash{}(g.position.heaps);
  for (double c : g.position.cumulation.raw()) mix(seed, std::bit_cast<std::uint64_t>(c + 0.0));
  mix(seed, static_cast<std::uint64_t>(g.previous.index()));
  return seed;
}

// ---- turn and utility ----

PlayerId TurnFunction::operator()(const HeapPosition& w, PlayerId previous, int players) const {
  switch (kind) {
    case TurnKind::cyclic:
      return previous.next(players);
    case TurnKind::alternating:
      return PlayerId(previous.index() == 1 ? 2 : 1);
    case TurnKind::custom:
      return custom(w, previous);
  }
  return previous.next(players);
}

std::vector<double> UtilityMap::operator()(const HeapPosition& w, PlayerId current) const {
  const auto& c = w.cumulation;
  if (identity) return c.row_sums();
  std::vector<double> u(c.players(), 0.0);
  for (int h = 0; h < c.heaps(); ++h) {
    auto column = c.column(h);
    for (int i = 0; i < c.players(); ++i) u[i] += per_heap(PlayerId(i + 1), h, column, current);
  }
  return u;
}

UtilityMap UtilityMap::identity_map() {
  UtilityMap u;
  u.identity = true;
  u.per_heap = [](PlayerId player, int, std::span<const double> column, PlayerId) {
    return column[player.slot()];
  };
  return u;
}

// ---- positions and options ----

void validate_position(const CumulativeGame& game, const GroundedPosition& g) {
  const auto& w = g.position;
  if (static_cast<int>(w.heaps.size()) != game.heaps)
    throw DimensionError("position has " + std::to_string(w.heaps.size()) + " heaps, game has " +
                         std::to_string(game.heaps));
  if (w.cumulation.players() != game.players || w.cumulation.heaps() != game.heaps)
    throw DimensionError("cumulation is not " + std::to_string(game.players) + "x" +
                         std::to_string(game.heaps));
  if (!g.previous.valid_for(game.players))
    throw DimensionError("previous player " + std::to_string(g.previous.index()) +
                         " out of range");
  for (Heap x : w.heaps)
    if (x < 0) throw DimensionError("negative heap size");
}

GroundedPosition make_grounded(const CumulativeGame& game, std::vector<Heap> heaps,
                               PlayerId previous) {
  GroundedPosition g{{std::move(heaps), CumulationMatrix(game.players, game.heaps)}, previous};
  validate_position(game, g);
  return g;
}

namespace {

GroundedPosition apply(const CumulativeGame& game, const GroundedPosition& g, PlayerId mover,
                       const ActionVector& a) {
  if (static_cast<int>(a.delta.size()) != game.heaps)
    throw DimensionError("action has " + std::to_string(a.delta.size()) + " entries, game has " +
                         std::to_string(game.heaps) + " heaps");
  GroundedPosition next{g.position, mover};
  for (int h = 0; h < game.heaps; ++h) {
    next.position.heaps[h] += a.delta[h];
    if (next.position.heaps[h] < 0)
      throw IllegalActionError("action " + format_action(a) + " drives heap " +
                               std::to_string(h) + " negative at " + format_position(g));
  }
  CumulationMatrix r = game.ruleset.rewards(g, mover, a);
  if (r.players() != game.players || r.heaps() != game.heaps)
    throw DimensionError("reward matrix shape mismatch");
  next.position.cumulation += r;
  return next;
}

std::vector<ActionVector> sorted_actions(const CumulativeGame& game, const GroundedPosition& g,
                                         PlayerId mover) {
  auto actions = game.ruleset.actions(g, mover);
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
  return actions;
}

}  // namespace

std::vector<Move> expand_options(const CumulativeGame& game, const GroundedPosition& g) {
  validate_position(game, g);
  const PlayerId mover = game.current_player(g);
  std::vector<Move> out;
  for (auto& a : sorted_actions(game, g, mover)) {
    auto next = apply(game, g, mover, a);
    out.push_back({std::move(a), std::move(next)});
  }
  return out;
}

GroundedPosition step(const CumulativeGame& game, const GroundedPosition& g,
                      const ActionVector& a) {
  validate_position(game, g);
  const PlayerId mover = game.current_player(g);
  const auto actions = game.ruleset.actions(g, mover);
  if (std::find(actions.begin(), actions.end(), a) == actions.end())
    throw IllegalActionError("action " + format_action(a) + " is not available to player " +
                             std::to_string(mover.index()) + " at " + format_position(g));
  return apply(game, g, mover, a);
}

bool is_terminal(const CumulativeGame& game, const GroundedPosition& g) {
  return game.ruleset.actions(g, game.current_player(g)).empty();
}

std::vector<double> terminal_utilities(const CumulativeGame& game, const GroundedPosition& g) {
  return game.utility(g.position, game.current_player(g));
}

// ---- feasibility ----

FeasibilityReport check_feasibility(const CumulativeGame& game, const GroundedPosition& g) {
  validate_position(game, g);
  FeasibilityReport report;
  std::unordered_map<GroundedPosition, std::uint64_t, GroundedHash> longest;
  const detail::SearchLimits limits{game.move_budget, UINT64_MAX};
  try {
    report.longest_line = detail::memo_dfs(
        g, longest, limits, [&](const GroundedPosition& p) { return expand_options(game, p); },
        [](const Move& m) -> const GroundedPosition& { return m.next; },
        [](const GroundedPosition&, const std::vector<Move>&,
           const std::vector<const std::uint64_t*>& children) {
          std::uint64_t best = 0;
          for (const auto* c : children) best = std::max(best, *c + 1);
          return best;
        },
        [&](detail::AbortReason, const auto& frames) {
          report.ok = false;
          for (const auto& f : frames) report.offending_path.push_back(f.edges[f.next].action);
          throw BudgetExceeded("infeasible");
        });
    if (report.longest_line > game.move_budget) report.ok = false;
  } catch (const BudgetExceeded&) {
    if (report.ok) throw;
  }
  report.positions = longest.size();
  return report;
}

// ---- formatting ----

namespace {
std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace

std::string format_action(const ActionVector& a) {
  std::string s = "(";
  for (std::size_t h = 0; h < a.delta.size(); ++h) {
    if (h) s += ",";
    s += std::to_string(a.delta[h]);
  }
  return s + ")";
}

std::string format_position(const GroundedPosition& g) {
  const auto& w = g.position;
  std::string s = "[";
  for (std::size_t h = 0; h < w.heaps.size(); ++h) {
    if (h) s += " ";
    s += std::to_string(w.heaps[h]) + ";(";
    auto col = w.cumulation.column(h);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (i) s += ",";
      s += format_number(col[i]);
    }
    s += ")";
  }
  return s + "] prev=" + std::to_string(g.previous.index());
}

}  // namespace cumulant
