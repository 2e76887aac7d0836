// tadi — checks tccp programs against temporal specifications, simulates
// bounded runs, and decides single formulas.  Verdict-style exits: 0 means
// PartiallyCorrect/answered, 1 Incorrect, 2 Inconclusive; 64 usage, 65
// malformed input, 66 unreadable file.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tadi/diagnosis.hpp"
#include "tadi/interp.hpp"

using namespace tadi;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIncorrect = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;

struct FileError : std::runtime_error {
  explicit FileError(const std::string& path)
      : std::runtime_error("cannot read " + path) {}
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int exit_of(Verdict v) {
  switch (v) {
    case Verdict::PartiallyCorrect:
      return kExitOk;
    case Verdict::Incorrect:
      return kExitIncorrect;
    default:
      return kExitInconclusive;
  }
}

/// Declarations inferred from a bare formula string, so one-off formulas
/// don't need a system file: values after `=[` and second arguments of
/// `last(...)` are tokens, every other lowercase identifier heads a
/// proposition whose arity is read off its argument list.
ConstraintSystem infer_system(const std::string& src) {
  auto is_id = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '\'';
  };
  auto is_start = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  };

  ConstraintSystem sys;
  std::set<std::size_t> claimed;  // identifier starts already classified

  auto ident_at = [&](std::size_t i) {
    std::size_t j = i;
    while (j < src.size() && is_id(src[j])) ++j;
    return src.substr(i, j - i);
  };
  auto skip_ws = [&](std::size_t i) {
    while (i < src.size() &&
           std::isspace(static_cast<unsigned char>(src[i])))
      ++i;
    return i;
  };

  for (std::size_t i = 0; i + 1 < src.size(); ++i) {
    if (src[i] == '=' && src[i + 1] == '[') {
      std::size_t k = skip_ws(i + 2);
      if (k < src.size() && is_start(src[k])) {
        sys.tokens.insert(ident_at(k));
        claimed.insert(k);
      }
    }
    if (src.compare(i, 5, "last(") == 0 &&
        (i == 0 || !is_id(src[i - 1]))) {
      std::size_t k = skip_ws(i + 5);
      std::size_t j = k;
      while (j < src.size() && is_id(src[j])) ++j;
      j = skip_ws(j);
      if (j < src.size() && src[j] == ',') {
        j = skip_ws(j + 1);
        if (j < src.size() && is_start(src[j]) &&
            std::islower(static_cast<unsigned char>(src[j]))) {
          sys.tokens.insert(ident_at(j));
          claimed.insert(j);
        }
      }
    }
  }

  static const std::set<std::string> kKeywords{"true", "false", "exists",
                                               "last"};
  for (std::size_t i = 0; i < src.size();) {
    if (!is_start(src[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::string id = ident_at(i);
    i += id.size();
    if (claimed.count(start) || kKeywords.count(id) ||
        !std::islower(static_cast<unsigned char>(id[0])))
      continue;
    std::size_t k = skip_ws(i);
    std::size_t arity = 0;
    if (k < src.size() && src[k] == '(') {
      arity = 1;
      int depth = 1;
      for (std::size_t j = k + 1; j < src.size() && depth > 0; ++j) {
        if (src[j] == '(') ++depth;
        if (src[j] == ')') --depth;
        if (src[j] == ',' && depth == 1) ++arity;
      }
    }
    sys.props.insert({id, arity});
  }
  return sys;
}

// ── check ────────────────────────────────────────────────────────────────────

struct CheckArgs {
  std::string program_path;
  std::string spec_path;
  std::string proc;  // empty: all declarations
  bool dump_steps = false;
};

Report filtered_report(const Program& prog, const Interpretation& s,
                       const std::string& proc, const BuildOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  Report rep;
  for (std::size_t i = 0; i < prog.decls.size(); ++i) {
    if (prog.decls[i].name != proc) continue;
    DeclCheck c = check_declaration(prog.system, prog.decls[i], s, opts);
    c.decl_index = i;
    rep.nodes += c.nodes;
    rep.overall = detail::worse(rep.overall, c.verdict);
    auto [it, inserted] = rep.symbols.emplace(c.proc, c.verdict);
    if (!inserted) it->second = detail::worse(it->second, c.verdict);
    rep.decls.push_back(std::move(c));
  }
  rep.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
                   .count();
  return rep;
}

int cmd_check(const CheckArgs& a, const BuildOptions& opts,
              const std::string& format) {
  Program prog = parse_program(slurp(a.program_path));
  Interpretation s =
      interp_of_specs(parse_specs(prog.system, slurp(a.spec_path)));

  if (a.dump_steps) {
    std::size_t fresh = 0;
    Interpretation stepped = abstract_step(prog, s, fresh);
    std::set<std::string> done;
    for (const Declaration& d : prog.decls) {
      if (!done.insert(d.name).second) continue;
      if (!a.proc.empty() && d.name != a.proc) continue;
      std::cerr << "step(" << d.name << ") = "
                << formula_str(
                       stepped.lookup(prog.system, d.name, d.params, fresh))
                << "\n";
    }
  }

  Report rep = a.proc.empty() ? check_program(prog, s, opts)
                              : filtered_report(prog, s, a.proc, opts);

  if (format == "json") {
    json out{{"version", 1},
             {"command", "check"},
             {"verdict", verdict_str(rep.overall)},
             {"declarations", json::array()},
             {"resources", {{"nodes", rep.nodes}, {"millis", rep.millis}}}};
    for (const DeclCheck& c : rep.decls) {
      json d{{"proc", c.proc},
             {"decl_index", c.decl_index},
             {"verdict", verdict_str(c.verdict)}};
      if (c.testimony)
        d["testimony"] =
            formula_str(present_witnesses(prog.system, c.testimony));
      out["declarations"].push_back(std::move(d));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const DeclCheck& c : rep.decls) {
      std::cout << "declaration " << c.decl_index << " (" << c.proc
                << "): " << verdict_str(c.verdict) << "\n";
      if (c.testimony)
        std::cout << "  testimony: "
                  << formula_str(present_witnesses(prog.system, c.testimony))
                  << "\n";
    }
    std::cout << "overall: " << verdict_str(rep.overall) << " (nodes "
              << rep.nodes << ", millis " << rep.millis << ")\n";
  }
  return exit_of(rep.overall);
}

// ── simulate ─────────────────────────────────────────────────────────────────

struct SimulateArgs {
  std::string program_path;
  std::string init;   // constraint atoms, empty for the top store
  std::string entry;  // call syntax, empty for the first declaration
  std::size_t steps = 10;
  std::size_t frontier = kDefaultRunCap;
  bool trace = false;
};

int cmd_simulate(const SimulateArgs& a, const std::string& format) {
  Program prog = parse_program(slurp(a.program_path));
  if (prog.decls.empty()) throw ParseError("program declares no process", 1);

  Constraint store = Constraint::top();
  if (!a.init.empty()) {
    detail::Cursor cur(a.init);
    store = detail::parse_constraint_atoms(prog.system, cur);
    if (!cur.done()) throw ParseError("trailing input in --init", cur.line());
  }

  RtPtr agent;
  if (a.entry.empty()) {
    const Declaration& lead = prog.decls.front();
    agent = rt_call(lead.name, lead.params);
  } else {
    detail::Cursor cur(a.entry);
    AgentPtr parsed = detail::parse_agent(prog.system, cur);
    if (!cur.done()) throw ParseError("trailing input in --entry", cur.line());
    agent = rt_of(parsed);
  }

  RunSet rs = run_bounded(prog, Config{agent, store}, a.steps, a.frontier);

  if (format == "json") {
    json out{{"version", 1},
             {"command", "simulate"},
             {"truncated", rs.truncated},
             {"runs", json::array()}};
    for (const Run& r : rs.runs) {
      json jr{{"terminated", r.terminated}, {"stores", json::array()}};
      for (const Constraint& c : r.stores) jr["stores"].push_back(c.str());
      if (a.trace) jr["trace"] = run_to_trace(r).str();
      out["runs"].push_back(std::move(jr));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::size_t n = 0;
    for (const Run& r : rs.runs) {
      std::cout << "run " << ++n << " ("
                << (r.terminated ? "terminated" : "cut") << "):";
      for (const Constraint& c : r.stores) std::cout << " " << c.str();
      std::cout << "\n";
      if (a.trace) std::cout << "  trace: " << run_to_trace(r).str() << "\n";
    }
    if (rs.truncated) std::cout << "frontier truncated\n";
  }
  return rs.truncated ? kExitInconclusive : kExitOk;
}

// ── tableau ──────────────────────────────────────────────────────────────────

struct TableauArgs {
  std::string formula;  // literal text, or @path to read a file
  std::string mode;     // "valid" or "sat"
  std::string system_path;
};

int cmd_tableau(const TableauArgs& a, const BuildOptions& opts,
                const std::string& format) {
  std::string src =
      a.formula.rfind('@', 0) == 0 ? slurp(a.formula.substr(1)) : a.formula;
  ConstraintSystem sys = a.system_path.empty()
                             ? infer_system(src)
                             : parse_program(slurp(a.system_path)).system;
  FormulaPtr f = parse_formula(sys, src);

  std::string verdict;
  FormulaPtr shown;
  const char* shown_key = nullptr;
  std::size_t nodes = 0;
  bool answered = true;
  if (a.mode == "valid") {
    ValidityResult v = is_valid(sys, f, opts);
    nodes = v.nodes;
    switch (v.verdict) {
      case Validity::Valid:
        verdict = "Valid";
        break;
      case Validity::NotValid:
        verdict = "NotValid";
        shown = v.testimony;
        shown_key = "testimony";
        break;
      default:
        verdict = "Inconclusive";
        answered = false;
    }
  } else {
    SatResult v = check_sat(sys, {f}, opts);
    nodes = v.nodes;
    switch (v.verdict) {
      case Satisfiability::Satisfiable:
        verdict = "Satisfiable";
        shown = v.model;
        shown_key = "model";
        break;
      case Satisfiability::Unsatisfiable:
        verdict = "Unsatisfiable";
        break;
      default:
        verdict = "Inconclusive";
        answered = false;
    }
  }

  if (format == "json") {
    json out{{"version", 1},
             {"command", "tableau"},
             {"mode", a.mode},
             {"verdict", verdict},
             {"resources", {{"nodes", nodes}, {"millis", 0}}}};
    if (shown) out[shown_key] = formula_str(present_witnesses(sys, shown));
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << verdict << "\n";
    if (shown)
      std::cout << shown_key << ": "
                << formula_str(present_witnesses(sys, shown)) << "\n";
  }
  return answered ? kExitOk : kExitInconclusive;
}

// ── parse ────────────────────────────────────────────────────────────────────

int cmd_parse(const std::string& path, const std::string& format) {
  Program prog = parse_program(slurp(path));
  if (format == "json") {
    json out{{"version", 1},
             {"command", "parse"},
             {"ok", true},
             {"declarations", prog.decls.size()}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "ok: " << prog.decls.size() << " declaration(s)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tccp program checking, simulation, and formula decisions"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  std::size_t node_cap = 0;  // 0: keep the environment/default cap
  app.add_option("--node-cap", node_cap, "tableau node budget")
      ->check(CLI::PositiveNumber);

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "check a program against its specifications");
  check->add_option("program", check_args.program_path, "tccp program file")
      ->required();
  check->add_option("spec", check_args.spec_path, "specification file")
      ->required();
  check->add_option("--proc", check_args.proc,
                    "check only this process symbol");
  check->add_flag("--dump-steps", check_args.dump_steps,
                  "print each step formula to stderr");

  SimulateArgs sim_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "enumerate bounded runs");
  simulate->add_option("program", sim_args.program_path, "tccp program file")
      ->required();
  simulate->add_option("--init", sim_args.init, "initial store atoms");
  simulate->add_option("--entry", sim_args.entry,
                       "initial agent (defaults to the first declaration)");
  simulate->add_option("--steps", sim_args.steps, "time bound");
  simulate->add_option("--frontier", sim_args.frontier, "exploration cap")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--trace", sim_args.trace,
                     "also print condition/store traces");

  TableauArgs tab_args;
  CLI::App* tableau =
      app.add_subcommand("tableau", "decide one formula");
  tableau->add_option("formula", tab_args.formula,
                      "formula text, or @file to read one")
      ->required();
  tableau->add_option("--mode", tab_args.mode, "what to decide")
      ->required()
      ->check(CLI::IsMember({"valid", "sat"}));
  tableau->add_option("--system", tab_args.system_path,
                      "program file declaring tokens and propositions");

  std::string parse_path;
  CLI::App* parse = app.add_subcommand("parse", "syntax-check a program");
  parse->add_option("program", parse_path, "tccp program file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  BuildOptions opts;
  if (node_cap > 0) opts.node_cap = node_cap;

  try {
    if (check->parsed()) return cmd_check(check_args, opts, format);
    if (simulate->parsed()) return cmd_simulate(sim_args, format);
    if (tableau->parsed()) return cmd_tableau(tab_args, opts, format);
    return cmd_parse(parse_path, format);
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
