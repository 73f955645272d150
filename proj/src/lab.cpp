#include "cumulant/lab.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "cumulant/errors.hpp"

namespace cumulant {

using nlohmann::json;

// ---- brute force ----

namespace {

class BruteForce {
 public:
  BruteForce(const CumulativeGame& game, std::uint64_t budget) : game_(game), budget_(budget) {}

  BruteForceResult solve(const GroundedPosition& g, std::uint64_t depth) {
    if (++nodes_ > budget_)
      throw BudgetExceeded("brute force exceeds node budget " + std::to_string(budget_));
    if (depth > game_.move_budget)
      throw BudgetExceeded("line of play exceeds move budget " +
                           std::to_string(game_.move_budget));
    auto options = expand_options(game_, g);
    if (options.empty()) return {terminal_utilities(game_, g), {}, 0};
    const PlayerId mover = game_.current_player(g);
    BruteForceResult best;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < options.size(); ++k) {
      auto r = solve(options[k].next, depth + 1);
      if (k == 0 || game_.tie.compare(mover, r.value, best.value) < 0) {
        best = std::move(r);
        best_k = k;
      }
    }
    best.line.insert(best.line.begin(), options[best_k].action);
    return best;
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  const CumulativeGame& game_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

BruteForceResult brute_force_pspe(const CumulativeGame& game, const GroundedPosition& g0,
                                  std::uint64_t node_budget) {
  validate_position(game, g0);
  BruteForce bf(game, budget_from_env(node_budget));
  auto r = bf.solve(g0, 0);
  r.nodes = bf.nodes();
  return r;
}

// ---- census ----

std::vector<std::vector<Heap>> enumerate_sets(Heap max_value, const std::vector<int>& sizes) {
  std::vector<std::vector<Heap>> out;
  for (int size : sizes) {
    if (size <= 0 || size > max_value) continue;
    std::vector<Heap> cur;
    auto rec = [&](auto&& self, Heap from) -> void {
      if (static_cast<int>(cur.size()) == size) {
        out.push_back(cur);
        return;
      }
      for (Heap v = from; v <= max_value; ++v) {
        cur.push_back(v);
        self(self, v + 1);
        cur.pop_back();
      }
    };
    rec(rec, 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Heap> first_divergence(const std::vector<Heap>& set, TieMode tie,
                                     Heap heap_bound) {
  auto zs = outcome_zs_symmetric(set, heap_bound);
  auto si = outcome_si_symmetric(set, tie, heap_bound);
  for (std::size_t x = 0; x < zs.rows.size(); ++x) {
    const auto& a = zs.rows[x].optimal[0];
    const auto& b = si.rows[x].tie_final[0];
    if (a.empty() || b.empty()) continue;
    const bool shared = std::any_of(a.begin(), a.end(), [&](Heap s) {
      return std::find(b.begin(), b.end(), s) != b.end();
    });
    if (!shared) return zs.rows[x].heap;
  }
  return std::nullopt;
}

std::size_t CriticalSetReport::count_at(Heap bound) const {
  return static_cast<std::size_t>(std::count_if(
      critical.begin(), critical.end(), [&](const CriticalSet& c) { return c.first_heap <= bound; }));
}

namespace {

json census_header(const CensusOptions& o) {
  return {{"kind", "census_checkpoint"}, {"version", 1},         {"max_value", o.max_value},
          {"sizes", o.sizes},            {"heap_bound", o.heap_bound}, {"tie", to_string(o.tie)}};
}

// Reads finished sets from a checkpoint; first_heap < 0 marks non-critical.
std::map<std::vector<Heap>, Heap> read_checkpoint(const CensusOptions& o) {
  std::map<std::vector<Heap>, Heap> done;
  std::ifstream in(o.checkpoint);
  if (!in) return done;
  std::string line;
  if (!std::getline(in, line)) return done;
  if (json::parse(line, nullptr, false) != census_header(o))
    throw PreconditionError("checkpoint " + o.checkpoint + " was written with other parameters");
  while (std::getline(in, line)) {
    auto j = json::parse(line, nullptr, false);
    // A torn final line from an interrupted run is ignored.
    if (j.is_discarded() || !j.contains("set") || !j.contains("first_heap")) continue;
    done[j["set"].get<std::vector<Heap>>()] = j["first_heap"].is_null() ? -1 : j["first_heap"].get<Heap>();
  }
  return done;
}

}  // namespace

CriticalSetReport critical_set_scan(const CensusOptions& options) {
  if (options.max_value <= 0 || options.heap_bound < 0)
    throw PreconditionError("census parameters must be positive");
  const auto sets = enumerate_sets(options.max_value, options.sizes);
  std::vector<Heap> result(sets.size(), -1);
  std::vector<char> finished(sets.size(), 0);

  std::ofstream log;
  if (!options.checkpoint.empty()) {
    auto done = read_checkpoint(options);
    for (std::size_t k = 0; k < sets.size(); ++k)
      if (auto it = done.find(sets[k]); it != done.end()) {
        result[k] = it->second;
        finished[k] = 1;
      }
    const bool fresh = done.empty();
    log.open(options.checkpoint, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw PreconditionError("cannot write checkpoint " + options.checkpoint);
    if (fresh) log << census_header(options).dump() << '\n';
  }

  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= sets.size()) return;
      if (finished[k]) continue;
      auto d = first_divergence(sets[k], options.tie, options.heap_bound);
      result[k] = d ? *d : -1;
      if (log.is_open()) {
        json j{{"set", sets[k]}, {"first_heap", d ? json(*d) : json(nullptr)}};
        std::lock_guard lock(log_mutex);
        log << j.dump() << '\n';
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  std::vector<std::future<void>> tasks;
  for (unsigned t = 0; t < threads; ++t) tasks.push_back(std::async(std::launch::async, worker));
  for (auto& t : tasks) t.get();

  CriticalSetReport report;
  report.options = options;
  report.sets_scanned = sets.size();
  for (std::size_t k = 0; k < sets.size(); ++k)
    if (result[k] >= 0) report.critical.push_back({sets[k], result[k]});
  return report;
}

std::string to_csv(const CriticalSetReport& report) {
  std::ostringstream os;
  os << "set,first_heap\n";
  for (const auto& c : report.critical) {
    for (std::size_t i = 0; i < c.set.size(); ++i) os << (i ? " " : "") << c.set[i];
    os << ',' << c.first_heap << '\n';
  }
  return os.str();
}

json to_json(const CriticalSetReport& report) {
  json j = census_header(report.options);
  j["kind"] = "census";
  j["sets_scanned"] = report.sets_scanned;
  j["count"] = report.critical.size();
  j["critical"] = json::array();
  for (const auto& c : report.critical)
    j["critical"].push_back({{"set", c.set}, {"first_heap", c.first_heap}});
  return j;
}

// ---- Pareto ----

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-9) return false;
    if (a[i] > b[i] + 1e-9) strict = true;
  }
  return strict;
}

struct Allocation {
  std::vector<double> value;
  std::vector<ActionVector> line;
};

// Every distinct terminal utility vector with the smallest line reaching it.
std::vector<Allocation> allocations(const CumulativeGame& game, const GroundedPosition& g0,
                                    std::uint64_t budget) {
  struct Frame {
    GroundedPosition g;
    std::vector<Move> options;
    std::size_t next = 0;
  };
  std::unordered_set<GroundedPosition, GroundedHash> seen{g0};
  std::map<std::vector<double>, std::vector<ActionVector>> found;
  std::vector<Frame> stack;
  std::vector<ActionVector> line;
  auto enter = [&](const GroundedPosition& g) {
    auto options = expand_options(game, g);
    if (options.empty()) {
      found.emplace(terminal_utilities(game, g), line);
      return;
    }
    if (stack.size() >= game.move_budget) throw BudgetExceeded("line exceeds move budget");
    stack.push_back({g, std::move(options), 0});
  };
  enter(g0);
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.next == top.options.size()) {
      stack.pop_back();
      if (!line.empty()) line.pop_back();
      continue;
    }
    const Move& m = top.options[top.next++];
    if (!seen.insert(m.next).second) continue;
    if (seen.size() > budget)
      throw BudgetExceeded("position count exceeds node budget " + std::to_string(budget));
    line.push_back(m.action);
    const std::size_t depth = stack.size();
    enter(m.next);
    if (stack.size() == depth) line.pop_back();
  }
  std::vector<Allocation> out;
  for (auto& [v, l] : found) out.push_back({v, std::move(l)});
  return out;
}

std::optional<Allocation> best_dominating(const std::vector<Allocation>& all,
                                          const std::vector<double>& base) {
  std::optional<Allocation> best;
  auto key = [&](const Allocation& a) {
    double min_gain = a.value[0] - base[0], total = 0;
    for (std::size_t i = 0; i < a.value.size(); ++i) {
      min_gain = std::min(min_gain, a.value[i] - base[i]);
      total += a.value[i];
    }
    return std::make_pair(min_gain, total);
  };
  for (const auto& a : all) {
    if (!dominates(a.value, base)) continue;
    if (!best || key(a) > key(*best) || (key(a) == key(*best) && a.line < best->line)) best = a;
  }
  return best;
}

json line_json(const std::vector<ActionVector>& line) {
  json j = json::array();
  for (const auto& a : line) j.push_back(a.delta);
  return j;
}

}  // namespace

ParetoReport pareto_scan(const CumulativeGame& game, const GroundedPosition& g0,
                         std::uint64_t node_budget) {
  const std::uint64_t budget = budget_from_env(node_budget);
  ParetoReport r;
  r.label = game.label;
  r.heaps = g0.position.heaps;
  auto sol = solve_game(game, g0, budget);
  r.pspe_value = sol.value;
  r.pspe_line = sol.line;
  auto all = allocations(game, g0, budget);
  r.allocations = all.size();
  if (auto best = best_dominating(all, sol.value)) {
    r.dominating = best->value;
    r.dominating_line = best->line;
  }
  return r;
}

json to_json(const ParetoReport& r) {
  json j{{"kind", "pareto"},
         {"version", 1},
         {"label", r.label},
         {"heaps", r.heaps},
         {"pspe_value", r.pspe_value},
         {"pspe_line", line_json(r.pspe_line)},
         {"allocations", r.allocations},
         {"efficient", !r.dominating.has_value()}};
  if (r.dominating) {
    j["dominating"] = *r.dominating;
    j["dominating_line"] = line_json(r.dominating_line);
  }
  return j;
}

RepairReport reward_repair(const CumulativeGame& game, const GroundedPosition& g0,
                           std::uint64_t node_budget) {
  const std::uint64_t budget = budget_from_env(node_budget);
  CumulativeGame negated = game;
  negated.ruleset.rewards = [rewards = game.ruleset.rewards](
                                const GroundedPosition& g, PlayerId mover, const ActionVector& a) {
    auto r = rewards(g, mover, a);
    return CumulationMatrix(r.players(), r.heaps()) - r;
  };
  // The negated game starts from the negated cumulation so positions stay mirrored.
  GroundedPosition start = g0;
  start.position.cumulation = CumulationMatrix(game.players, game.heaps) - g0.position.cumulation;
  auto sol = solve_game(negated, start, budget);

  RepairReport r;
  r.line = sol.line;
  GroundedPosition g = g0;
  for (const auto& a : sol.line) g = step(game, g, a);
  r.true_value = terminal_utilities(game, g);
  if (auto best = best_dominating(allocations(game, g0, budget), r.true_value))
    r.dominated_by = best->value;
  return r;
}

json to_json(const RepairReport& r) {
  json j{{"kind", "reward_repair"},
         {"version", 1},
         {"line", line_json(r.line)},
         {"true_value", r.true_value},
         {"efficient", !r.dominated_by.has_value()}};
  if (r.dominated_by) j["dominated_by"] = *r.dominated_by;
  return j;
}

// ---- greedy ----

std::vector<GreedyRow> greedy_report(Heap max_value, std::vector<int> sizes, Heap heap_bound,
                                     TieMode tie) {
  std::vector<GreedyRow> rows;
  for (const auto& set : enumerate_sets(max_value, sizes)) {
    GreedyRow row{set, std::nullopt, std::nullopt};
    auto zs = outcome_zs_symmetric(set, heap_bound);
    auto si = outcome_si_symmetric(set, tie, heap_bound);
    for (std::size_t x = 0; x < zs.rows.size(); ++x) {
      const Heap heap = zs.rows[x].heap;
      Heap greedy = 0;
      for (Heap s : set)
        if (s <= heap) greedy = std::max(greedy, s);
      if (greedy == 0) continue;
      auto misses = [&](const std::vector<Heap>& opt) {
        return std::find(opt.begin(), opt.end(), greedy) == opt.end();
      };
      if (misses(zs.rows[x].optimal[0])) row.last_nonoptimal_zs = heap;
      if (misses(si.rows[x].optimal[0])) row.last_nonoptimal_si = heap;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string to_csv(const std::vector<GreedyRow>& rows) {
  std::ostringstream os;
  os << "set,last_nonoptimal_zs,last_nonoptimal_si\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.set.size(); ++i) os << (i ? " " : "") << r.set[i];
    os << ',';
    if (r.last_nonoptimal_zs) os << *r.last_nonoptimal_zs;
    os << ',';
    if (r.last_nonoptimal_si) os << *r.last_nonoptimal_si;
    os << '\n';
  }
  return os.str();
}

}  // namespace cumulant
