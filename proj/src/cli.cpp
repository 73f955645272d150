#include "cumulant/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cumulant/algebra.hpp"
#include "cumulant/efg.hpp"
#include "cumulant/errors.hpp"
#include "cumulant/lab.hpp"
#include "cumulant/outcome.hpp"
#include "cumulant/rulesets.hpp"

namespace cumulant {

using nlohmann::json;

namespace {

std::string number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + number(v[i]);
  return s;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open file");
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError(path, "not valid JSON");
  return j;
}

std::vector<Heap> parse_list(const std::string& text, const std::string& field) {
  std::vector<Heap> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ValidationError(field, "expected comma separated integers, got '" + text + "'");
    }
  }
  return out;
}

PartizanPosition parse_partizan(const std::string& text, const std::string& field) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ';');) parts.push_back(item);
  if (parts.size() != 3) throw ValidationError(field, "expected 'heap;left set;right set'");
  auto heap = parse_list(parts[0], field);
  if (heap.size() != 1) throw ValidationError(field, "expected a single heap size");
  return {heap[0], parse_list(parts[1], field), parse_list(parts[2], field)};
}

std::uint64_t budget_of(const Command& cmd) {
  return budget_from_env(cmd.budget ? cmd.budget : kDefaultNodeBudget);
}

struct Loaded {
  GameDocument doc;
  CumulativeGame game;
  GroundedPosition start;
};

Loaded load_game(const std::string& path) {
  auto doc = parse_game_document(load_json(path));
  auto game = build_game(doc);
  auto start = initial_position(doc);
  return {doc, std::move(game), std::move(start)};
}

// Single-heap removals read more naturally than action vectors.
std::string line_text(const std::vector<ActionVector>& line) {
  std::string s;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (k) s += " ";
    const auto& d = line[k].delta;
    s += d.size() == 1 && d[0] < 0 ? std::to_string(-d[0]) : format_action(line[k]);
  }
  return s;
}

json line_json(const std::vector<ActionVector>& line) {
  json j = json::array();
  for (const auto& a : line) j.push_back(a.delta);
  return j;
}

std::string csv_to_text(const std::string& csv) {
  std::string s = csv;
  std::replace(s.begin(), s.end(), ',', ' ');
  return s;
}

void emit_table(std::ostream& out, OutputFormat f, const std::string& csv, const json& j) {
  switch (f) {
    case OutputFormat::csv:
      out << csv;
      break;
    case OutputFormat::json:
      out << j.dump(2) << '\n';
      break;
    case OutputFormat::text:
      out << csv_to_text(csv);
      break;
  }
}

// ---- subcommands ----

void cmd_outcome(const Command& cmd, std::ostream& out) {
  if (cmd.preset != "fixed")
    throw ValidationError("preset", "outcome tables need the fixed subtraction preset");
  if (cmd.sets.empty() || cmd.sets.size() > 2)
    throw ValidationError("sets", "give one set, or one per player");
  if (cmd.variant != "zs" && cmd.variant != "si")
    throw ValidationError("variant", "expected zs or si");
  OutcomeTable t;
  if (cmd.sets.size() == 1)
    t = cmd.variant == "zs" ? outcome_zs_symmetric(cmd.sets[0], cmd.max_heap)
                            : outcome_si_symmetric(cmd.sets[0], cmd.tie, cmd.max_heap);
  else
    t = cmd.variant == "zs" ? outcome_zs_partizan(cmd.sets[0], cmd.sets[1], cmd.max_heap)
                            : outcome_si_partizan(cmd.sets[0], cmd.sets[1], cmd.tie, cmd.max_heap);
  emit_table(out, cmd.format, to_csv(t), to_json(t));
}

void cmd_pspe(const Command& cmd, std::ostream& out) {
  if (cmd.files.size() != 1) throw ValidationError("file", "exactly one game file expected");
  auto g = load_game(cmd.files[0]);
  auto sol = solve_game(g.game, g.start, budget_of(cmd));
  if (cmd.format == OutputFormat::json) {
    out << json{{"kind", "pspe"},
                {"version", 1},
                {"value", sol.value},
                {"line", line_json(sol.line)},
                {"positions", sol.positions}}
               .dump(2)
        << '\n';
    return;
  }
  if (cmd.format == OutputFormat::csv) {
    out << "player,value\n";
    for (std::size_t i = 0; i < sol.value.size(); ++i)
      out << i + 1 << ',' << number(sol.value[i]) << '\n';
    return;
  }
  out << "value: " << numbers(sol.value) << '\n';
  out << "line: " << line_text(sol.line) << '\n';
  out << "positions: " << sol.positions << '\n';
}

void cmd_play(const Command& cmd, std::ostream& out) {
  if (cmd.files.size() != 1) throw ValidationError("file", "exactly one game file expected");
  if (cmd.script.empty()) throw ValidationError("script", "a script file is required");
  auto g = load_game(cmd.files[0]);
  auto sj = load_json(cmd.script);
  if (!sj.is_object() || !sj.contains("actions") || !sj["actions"].is_array())
    throw ValidationError("actions", "expected an array of action vectors");
  if (sj.contains("kind") && sj["kind"] != "script")
    throw ValidationError("kind", "expected 'script'");

  std::vector<ActionVector> script;
  for (std::size_t k = 0; k < sj["actions"].size(); ++k) {
    const auto& a = sj["actions"][k];
    if (!a.is_array()) throw ValidationError("actions[" + std::to_string(k) + "]", "not an array");
    ActionVector v;
    for (const auto& x : a) {
      if (!x.is_number_integer())
        throw ValidationError("actions[" + std::to_string(k) + "]", "entries must be integers");
      v.delta.push_back(x.get<Heap>());
    }
    script.push_back(std::move(v));
  }

  json moves = json::array();
  GroundedPosition pos = g.start;
  if (cmd.format == OutputFormat::text) out << "start: " << format_position(pos) << '\n';
  for (std::size_t k = 0; k < script.size(); ++k) {
    const PlayerId mover = g.game.current_player(pos);
    pos = step(g.game, pos, script[k]);
    if (cmd.format == OutputFormat::text)
      out << k + 1 << ". player " << mover.index() << " plays " << format_action(script[k])
          << " -> " << format_position(pos) << '\n';
    moves.push_back({{"player", mover.index()},
                     {"action", script[k].delta},
                     {"position", format_position(pos)}});
  }
  const bool terminal = is_terminal(g.game, pos);
  const auto u = terminal_utilities(g.game, pos);
  if (cmd.format == OutputFormat::json) {
    out << json{{"kind", "replay"},
                {"version", 1},
                {"moves", moves},
                {"terminal", terminal},
                {"current_player", g.game.current_player(pos).index()},
                {"utilities", u}}
               .dump(2)
        << '\n';
    return;
  }
  if (cmd.format == OutputFormat::csv) {
    out << "move,player,action\n";
    for (std::size_t k = 0; k < moves.size(); ++k)
      out << k + 1 << ',' << moves[k]["player"].get<int>() << ','
          << csv_to_text(format_action(script[k])) << '\n';
    return;
  }
  out << (terminal ? "terminal" : "not terminal") << ", player "
      << g.game.current_player(pos).index() << " to move\n";
  out << "utilities: " << numbers(u) << '\n';
}

void cmd_convert(const Command& cmd, std::ostream& out) {
  if (cmd.files.size() != 1) throw ValidationError("file", "exactly one input file expected");
  auto j = load_json(cmd.files[0]);
  const bool is_efg = j.is_object() && j.value("kind", std::string()) == "efg";
  if (is_efg) {
    if (!cmd.to.empty() && cmd.to != "cg") throw ValidationError("to", "an efg converts to cg");
    auto efg = parse_efg_document(j);
    EfgConversion conv;
    if (cmd.method == "preorder")
      conv = efg_to_cg_preorder(efg);
    else if (cmd.method == "cyclic")
      conv = efg_to_cg_cyclic(efg);
    else
      throw ValidationError("method", "expected preorder or cyclic");
    out << to_json(conv.document).dump(2) << '\n';
    return;
  }
  if (!cmd.to.empty() && cmd.to != "efg") throw ValidationError("to", "a game converts to efg");
  auto doc = parse_game_document(j);
  auto game = build_game(doc);
  auto tree = cg_to_efg(game, initial_position(doc), !cmd.tree, budget_of(cmd));
  out << to_json(tree.efg).dump(2) << '\n';
}

void cmd_sum(const Command& cmd, std::ostream& out) {
  if (cmd.files.size() < 2) throw ValidationError("file", "a sum needs at least two game files");
  std::vector<Component> parts;
  for (const auto& f : cmd.files) {
    auto g = load_game(f);
    parts.push_back({std::move(g.game), g.start.position});
  }
  auto sum = disjunctive_sum(std::move(parts), budget_of(cmd));
  auto game = to_game(sum);
  auto w = combined_position(sum);
  auto m = outcome_matrix(game, w, budget_of(cmd));

  json j{{"kind", "sum_outcome"}, {"version", 1}, {"heaps", w.heaps}, {"matrix", json::array()}};
  std::ostringstream csv;
  csv << "previous";
  for (int i = 1; i <= game.players; ++i) csv << ",o" << i;
  csv << '\n';
  for (int p = 1; p <= game.players; ++p) {
    auto row = m.row(PlayerId(p));
    j["matrix"].push_back(row);
    csv << p;
    for (double v : row) csv << ',' << number(v);
    csv << '\n';
  }
  if (cmd.previous) {
    if (!PlayerId(cmd.previous).valid_for(game.players))
      throw ValidationError("previous", "player out of range");
    auto sol = solve_game(game, {w, PlayerId(cmd.previous)}, budget_of(cmd));
    j["value"] = sol.value;
    j["line"] = line_json(sol.line);
  }
  if (cmd.format == OutputFormat::json) {
    out << j.dump(2) << '\n';
    return;
  }
  out << (cmd.format == OutputFormat::csv ? csv.str() : csv_to_text(csv.str()));
  if (cmd.previous && cmd.format == OutputFormat::text) {
    out << "value: " << numbers(j["value"].get<std::vector<double>>()) << '\n';
    std::vector<ActionVector> line;
    for (const auto& a : j["line"]) line.push_back({a.get<std::vector<Heap>>()});
    std::string s;
    for (const auto& a : line) s += (s.empty() ? "" : " ") + format_action(a);
    out << "line: " << s << '\n';
  }
}

void emit_certificate(const ComparisonCertificate& c, const Command& cmd, std::ostream& out) {
  auto j = to_json(c);
  if (cmd.format == OutputFormat::json) {
    out << j.dump(2) << '\n';
    return;
  }
  out << "verdict: " << to_string(c.verdict) << '\n';
  out << "method: " << to_string(c.method) << '\n';
  out << "checked: " << c.checked << " skipped: " << c.skipped << '\n';
  if (c.witness) {
    out << "witness: heaps";
    for (Heap x : c.witness->position.heaps) out << ' ' << x;
    out << ", player " << c.starting_player->index() << " starts\n";
    out << "G values: " << numbers(c.g_values) << "\nH values: " << numbers(c.h_values) << '\n';
  }
  if (c.np_witness)
    out << "witness: " << j["witness"].dump() << ", "
        << (*c.starting_side == Side::left ? "Left" : "Right") << " starts\n";
}

void cmd_compare(const Command& cmd, std::ostream& out) {
  if (!cmd.np_g.empty() || !cmd.np_h.empty()) {
    auto g = parse_partizan(cmd.np_g, "g");
    auto h = parse_partizan(cmd.np_h, "h");
    emit_certificate(compare_normal_play(g, h), cmd, out);
    return;
  }
  if (cmd.files.size() != 2) throw ValidationError("file", "compare needs two game files");
  auto g = load_game(cmd.files[0]);
  auto h = load_game(cmd.files[1]);
  CompareOptions opt;
  opt.node_budget = budget_of(cmd);
  opt.threads = cmd.threads;
  auto family = single_heap_family(g.game, cmd.max_x);
  auto cert = compare_refute({g.game, g.start.position}, {h.game, h.start.position},
                             PlayerId(cmd.player), family, opt);
  emit_certificate(cert, cmd, out);
}

void cmd_np(const Command& cmd, std::ostream& out) {
  if (cmd.sets.empty() || cmd.sets.size() > 2)
    throw ValidationError("sets", "give one set, or Left's then Right's");
  const auto& left = cmd.sets[0];
  const auto& right = cmd.sets.size() == 2 ? cmd.sets[1] : cmd.sets[0];
  auto rows = np_outcome_classes(left, right, cmd.max_heap);
  std::ostringstream csv;
  csv << "heap,left_first_wins,right_first_wins,class\n";
  json j{{"kind", "np_classes"}, {"version", 1}, {"left", left}, {"right", right},
         {"rows", json::array()}};
  for (const auto& r : rows) {
    csv << r.heap << ',' << r.left_first_wins << ',' << r.right_first_wins << ','
        << to_string(r.cls) << '\n';
    j["rows"].push_back({{"heap", r.heap},
                         {"left_first_wins", r.left_first_wins},
                         {"right_first_wins", r.right_first_wins},
                         {"class", to_string(r.cls)}});
  }
  emit_table(out, cmd.format, csv.str(), j);
}

void cmd_lab(const Command& cmd, std::ostream& out) {
  if (cmd.lab_task == "census") {
    CensusOptions o;
    o.max_value = cmd.max_value;
    o.sizes = cmd.sizes;
    o.heap_bound = cmd.heap_bound;
    o.tie = cmd.tie;
    o.threads = cmd.threads;
    o.checkpoint = cmd.checkpoint;
    auto report = critical_set_scan(o);
    auto bounds = cmd.bounds;
    if (bounds.empty()) bounds.push_back(o.heap_bound);
    auto j = to_json(report);
    j["counts_by_bound"] = json::array();
    for (Heap b : bounds) j["counts_by_bound"].push_back({{"bound", b}, {"count", report.count_at(b)}});
    if (cmd.format == OutputFormat::json) {
      out << j.dump(2) << '\n';
    } else if (cmd.format == OutputFormat::csv) {
      out << to_csv(report);
    } else {
      out << "sets scanned: " << report.sets_scanned << '\n';
      for (Heap b : bounds) out << "bound " << b << ": " << report.count_at(b) << " critical\n";
    }
    return;
  }
  if (cmd.lab_task == "greedy") {
    auto rows = greedy_report(cmd.max_value, cmd.sizes, cmd.heap_bound, cmd.tie);
    const auto csv = to_csv(rows);
    json j{{"kind", "greedy"}, {"version", 1}, {"rows", json::array()}};
    for (const auto& r : rows)
      j["rows"].push_back({{"set", r.set},
                           {"last_nonoptimal_zs", r.last_nonoptimal_zs ? json(*r.last_nonoptimal_zs) : json(nullptr)},
                           {"last_nonoptimal_si", r.last_nonoptimal_si ? json(*r.last_nonoptimal_si) : json(nullptr)}});
    emit_table(out, cmd.format, csv, j);
    return;
  }
  if (cmd.files.size() != 1) throw ValidationError("file", "exactly one game file expected");
  auto g = load_game(cmd.files[0]);
  json j;
  if (cmd.lab_task == "pareto") {
    j = to_json(pareto_scan(g.game, g.start, budget_of(cmd)));
  } else if (cmd.lab_task == "repair") {
    j = to_json(reward_repair(g.game, g.start, budget_of(cmd)));
  } else if (cmd.lab_task == "brute") {
    auto r = brute_force_pspe(g.game, g.start, budget_of(cmd));
    j = {{"kind", "brute_force"}, {"version", 1}, {"value", r.value},
         {"line", line_json(r.line)}, {"nodes", r.nodes}};
  } else {
    throw ValidationError("lab", "unknown task '" + cmd.lab_task + "'");
  }
  if (cmd.format == OutputFormat::json) {
    out << j.dump(2) << '\n';
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "kind" && it.key() != "version") out << it.key() << ": " << it.value().dump() << '\n';
}

}  // namespace

int run(const Command& cmd, std::ostream& out, std::ostream& err) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!cmd.output.empty()) {
    file.open(cmd.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "error: cannot write " << cmd.output << '\n';
      return kExitFailure;
    }
    sink = &file;
  }
  try {
    if (cmd.subcommand == "outcome") cmd_outcome(cmd, *sink);
    else if (cmd.subcommand == "pspe") cmd_pspe(cmd, *sink);
    else if (cmd.subcommand == "play") cmd_play(cmd, *sink);
    else if (cmd.subcommand == "convert") cmd_convert(cmd, *sink);
    else if (cmd.subcommand == "sum") cmd_sum(cmd, *sink);
    else if (cmd.subcommand == "compare") cmd_compare(cmd, *sink);
    else if (cmd.subcommand == "np") cmd_np(cmd, *sink);
    else if (cmd.subcommand == "lab") cmd_lab(cmd, *sink);
    else throw ValidationError("subcommand", "unknown '" + cmd.subcommand + "'");
  } catch (const ValidationError& e) {
    err << "validation error:\n";
    for (const auto& f : e.fields()) err << "  " << f << '\n';
    return kExitValidation;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const CycleError& e) {
    err << "infeasible game: " << e.what() << '\n';
    return kExitBudget;
  } catch (const DimensionError& e) {
    err << "validation error:\n  " << e.what() << '\n';
    return kExitValidation;
  } catch (const IllegalActionError& e) {
    err << "illegal action: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command cmd;
  std::string format = "text";
  std::string tie = "antagonistic";
  std::vector<std::string> sets;
  std::string bounds;
  std::string sizes;

  CLI::App app{"Cumulative game solver"};
  app.require_subcommand(1);
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "csv, json or text")
        ->check(CLI::IsMember({"csv", "json", "text"}));
    sub->add_option("--output,-o", cmd.output, "write to a file instead of stdout");
    sub->add_option("--budget", cmd.budget, "node budget");
  };
  auto add_tie = [&](CLI::App* sub) {
    sub->add_option("--tie", tie, "antagonistic or friendly")
        ->check(CLI::IsMember({"antagonistic", "friendly"}));
  };

  auto* outcome = app.add_subcommand("outcome", "outcome table of a subtraction game");
  outcome->add_option("--preset", cmd.preset, "ruleset preset (fixed)");
  outcome->add_option("--sets", sets, "subtraction set, repeat for player 2")->required();
  outcome->add_option("--variant", cmd.variant, "zs or si")->check(CLI::IsMember({"zs", "si"}));
  outcome->add_option("--max-heap", cmd.max_heap, "largest heap size");
  add_tie(outcome);
  add_format(outcome);

  auto* pspe = app.add_subcommand("pspe", "equilibrium value and line of a game file");
  pspe->add_option("--file", cmd.files, "game document")->required();
  add_format(pspe);

  auto* play = app.add_subcommand("play", "replay a scripted line");
  play->add_option("--file", cmd.files, "game document")->required();
  play->add_option("--script", cmd.script, "script document")->required();
  add_format(play);

  auto* convert = app.add_subcommand("convert", "convert between games and efg documents");
  convert->add_option("--file", cmd.files, "game or efg document")->required();
  convert->add_option("--to", cmd.to, "efg or cg")->check(CLI::IsMember({"efg", "cg"}));
  convert->add_option("--method", cmd.method, "preorder or cyclic");
  convert->add_flag("--tree", cmd.tree, "do not merge equal positions");
  add_format(convert);

  auto* sum = app.add_subcommand("sum", "outcome matrix of a disjunctive sum");
  sum->add_option("--file", cmd.files, "component game documents")->required();
  sum->add_option("--previous", cmd.previous, "also solve with this previous player");
  add_format(sum);

  auto* compare = app.add_subcommand("compare", "compare two positions");
  compare->add_option("--file", cmd.files, "G then H game documents");
  compare->add_option("--np-g", cmd.np_g, "normal play G as 'heap;left;right'");
  compare->add_option("--np-h", cmd.np_h, "normal play H as 'heap;left;right'");
  compare->add_option("--player", cmd.player, "player whose outcome is compared");
  compare->add_option("--max-x", cmd.max_x, "largest heap in the X family");
  compare->add_option("--threads", cmd.threads, "worker threads");
  add_format(compare);

  auto* np = app.add_subcommand("np", "normal play outcome classes");
  np->add_option("--sets", sets, "Left's set, then Right's (or one shared set)")->required();
  np->add_option("--max-heap", cmd.max_heap, "largest heap size");
  add_format(np);

  auto* lab = app.add_subcommand("lab", "experiments");
  lab->require_subcommand(1);
  auto* census = lab->add_subcommand("census", "zero-sum versus self-interest critical sets");
  census->add_option("--max-value", cmd.max_value, "largest set element");
  census->add_option("--sizes", sizes, "set sizes, e.g. 2,3");
  census->add_option("--heap-bound", cmd.heap_bound, "largest heap scanned");
  census->add_option("--bounds", bounds, "report counts at these heap bounds");
  census->add_option("--checkpoint", cmd.checkpoint, "JSON lines file for resuming");
  census->add_option("--threads", cmd.threads, "worker threads");
  add_tie(census);
  add_format(census);
  auto* greedy = lab->add_subcommand("greedy", "last heap where greedy play is not optimal");
  greedy->add_option("--max-value", cmd.max_value, "largest set element");
  greedy->add_option("--sizes", sizes, "set sizes, e.g. 2,3");
  greedy->add_option("--heap-bound", cmd.heap_bound, "largest heap scanned");
  add_tie(greedy);
  add_format(greedy);
  for (const char* name : {"pareto", "repair", "brute"}) {
    auto* sub = lab->add_subcommand(name, std::string(name) + " report for a game file");
    sub->add_option("--file", cmd.files, "game document")->required();
    add_format(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    for (const auto& s : sets) cmd.sets.push_back(parse_list(s, "sets"));
    if (!bounds.empty()) cmd.bounds = parse_list(bounds, "bounds");
    if (!sizes.empty()) {
      cmd.sizes.clear();
      for (Heap s : parse_list(sizes, "sizes")) cmd.sizes.push_back(static_cast<int>(s));
    }
  } catch (const ValidationError& e) {
    err << "validation error:\n";
    for (const auto& f : e.fields()) err << "  " << f << '\n';
    return kExitValidation;
  }
  cmd.format = format == "csv" ? OutputFormat::csv
               : format == "json" ? OutputFormat::json
                                  : OutputFormat::text;
  cmd.tie = parse_tie_mode(tie);
  for (auto* sub : app.get_subcommands()) {
    cmd.subcommand = sub->get_name();
    for (auto* inner : sub->get_subcommands()) cmd.lab_task = inner->get_name();
  }
  return run(cmd, out, err);
}

}  // namespace cumulant
