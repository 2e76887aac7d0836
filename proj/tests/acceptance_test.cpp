// Acceptance gate: end-to-end checks of the toolkit's core promises, one
// printed line per criterion.  Exits nonzero if any criterion fails.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "tadi/absem.hpp"
#include "tadi/diagnosis.hpp"
#include "tadi/interp.hpp"

using namespace tadi;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& why = "") {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
  if (!ok && !why.empty()) std::cout << " — " << why;
  std::cout << "\n";
  if (!ok) ++g_failures;
}

std::string sample(const std::string& name) {
  return std::string(TADI_SAMPLES_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Interpretation spec_of(const ConstraintSystem& sys, const std::string& path) {
  return interp_of_specs(parse_specs(sys, slurp(path)));
}

bool mentions(const FormulaPtr& f, const std::string& needle) {
  return formula_str(f).find(needle) != std::string::npos;
}

// ── 1: the railway controller is accepted, quickly ──────────────────────────

void criterion_accept_controller() {
  auto t0 = std::chrono::steady_clock::now();
  Program p = parse_program(slurp(sample("railway.tccp")));
  Interpretation s = spec_of(p.system, sample("down.cltl"));
  DeclCheck c = check_declaration(p.system, p.decls[0], s);
  auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
  std::ostringstream why;
  why << "verdict " << verdict_str(c.verdict) << ", " << secs << "s";
  report("controller accepted against its liveness contract",
         c.verdict == Verdict::PartiallyCorrect && !c.truncated && secs < 10.0,
         why.str());
}

// ── 2: the broken controller is convicted with a usable testimony ───────────

void criterion_convict_broken() {
  Program p = parse_program(slurp(sample("railway_buggy.tccp")));
  Interpretation s = spec_of(p.system, sample("up.cltl"));
  Report rep = check_program(p, s);

  bool named = rep.overall == Verdict::Incorrect && !rep.decls.empty() &&
               rep.decls[0].proc == "master" &&
               rep.decls[0].verdict == Verdict::Incorrect &&
               rep.decls[0].testimony != nullptr;
  bool pointed = false, sat_alone = false, clashes = false;
  if (named) {
    const FormulaPtr& t = rep.decls[0].testimony;
    pointed = mentions(t, "C=[out") && !mentions(t, "G=[up");
    sat_alone =
        check_sat(p.system, {t}).verdict == Satisfiability::Satisfiable;
    std::size_t fresh = 900;
    FormulaPtr contract = s.lookup(p.system, "master", {"C", "G"}, fresh);
    clashes = check_sat(p.system, {t, contract}).verdict ==
              Satisfiability::Unsatisfiable;
  }
  std::ostringstream why;
  why << "named=" << named << " pointed=" << pointed << " sat=" << sat_alone
      << " clashes=" << clashes;
  report("broken controller convicted with a consistent, pointed testimony",
         named && pointed && sat_alone && clashes, why.str());
}

// ── 3: the non-producing guarded loop stays accepted ─────────────────────────

void criterion_pathological_loop() {
  Program p = parse_program(slurp(sample("pathological.tccp")));
  Interpretation s = spec_of(p.system, sample("pathological.cltl"));
  Report rep = check_program(p, s);
  report("guarded self-loop accepted (documented blind spot)",
         rep.overall == Verdict::PartiallyCorrect,
         std::string("verdict ") + verdict_str(rep.overall));
}

// ── 4: tableau verdicts agree with the bounded-trace oracle ─────────────────

void criterion_oracle_agreement() {
  auto sys = testutil::small_system();
  testutil::SuiteGen gen(77001u);
  int sat_n = 0, unsat_n = 0, disagreements = 0, indefinite = 0;
  for (int i = 0; i < 600; ++i) {
    FormulaPtr f = gen.gen();
    SatResult r = check_sat(sys, {f});
    if (r.verdict == Satisfiability::Inconclusive) {
      ++indefinite;
      continue;
    }
    bool got = r.verdict == Satisfiability::Satisfiable;
    bool want = testutil::lasso::satisfiable(sys, f);
    if (got != want) {
      ++disagreements;
      std::cout << "  disagree on: " << formula_str(f) << "\n";
    }
    (got ? sat_n : unsat_n)++;
  }
  std::ostringstream why;
  why << "sat " << sat_n << ", unsat " << unsat_n << ", disagreements "
      << disagreements << ", indefinite " << indefinite;
  report("tableau agrees with the trace-enumeration oracle on 600 formulas",
         disagreements == 0 && indefinite == 0 && sat_n >= 50 && unsat_n >= 50,
         why.str());
}

// ── 5: store algebra laws over random constraints ────────────────────────────

struct ConGen {
  std::mt19937 rng{424242};
  ConstraintSystem sys;
  std::vector<std::string> vars{"X", "Y", "Z", "W"};
  std::vector<std::string> toks{"a", "b"};

  ConGen() {
    sys.tokens = {"a", "b"};
    sys.props = {{"p", 1}, {"q", 1}};
  }
  std::string var() { return vars[rng() % vars.size()]; }
  std::string tok() { return toks[rng() % toks.size()]; }
  Atom atom() {
    switch (rng() % 8) {
      case 0:
      case 1:
      case 2:
        return Atom::stream_eq(var(), tok(), var());
      case 3:
      case 4:
        return Atom::stream_any(var(), tok());
      case 5:
      case 6:
        return Atom::last(var(), tok());
      default:
        return Atom::prop(rng() % 2 ? "p" : "q", {var()});
    }
  }
  Constraint constraint() {
    std::vector<Atom> atoms;
    std::size_t n = rng() % 5;
    for (std::size_t i = 0; i < n; ++i) atoms.push_back(atom());
    return Constraint::make(sys, std::move(atoms));
  }
};

void criterion_store_laws() {
  ConGen gen;
  const ConstraintSystem& sys = gen.sys;
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    Constraint a = gen.constraint();
    Constraint b = gen.constraint();
    Constraint c = gen.constraint();

    Constraint ab = merge(sys, a, b);
    if (!(merge(sys, a, a) == a)) ++violations;
    if (!(ab == merge(sys, b, a))) ++violations;
    if (!(merge(sys, ab, c) == merge(sys, a, merge(sys, b, c)))) ++violations;
    if (!entails(sys, ab, a) || !entails(sys, ab, b)) ++violations;
    if (!entails(sys, a, a)) ++violations;

    std::string x = gen.var(), y = gen.var();
    Constraint hx = hide(sys, x, a);
    if (!entails(sys, a, hx)) ++violations;
    if (hx.mentions(x)) ++violations;
    if (!(hide(sys, y, hx) == hide(sys, x, hide(sys, y, a)))) ++violations;
    if (!(hide(sys, x, hx) == hx)) ++violations;

    if (entails(sys, a, b) && entails(sys, b, a) &&
        !(a.canonical(sys) == b.canonical(sys)))
      ++violations;
  }
  report("store algebra laws hold over 1000 random constraints",
         violations == 0,
         std::to_string(violations) + " violations");
}

// ── 6 & 7: the program corpus ────────────────────────────────────────────────

bool has_branching_choice(const AgentPtr& a) {
  if (a->kind == AgentKind::Choice && a->arms.size() > 1) return true;
  for (const auto& s : a->subs)
    if (has_branching_choice(s)) return true;
  for (const auto& arm : a->arms)
    if (has_branching_choice(arm.body)) return true;
  return false;
}

struct CorpusEntry {
  Program prog;
  RtPtr entry;
  std::string entry_name;
  std::vector<std::string> entry_args;
  std::vector<Constraint> inits;
  std::vector<std::size_t> pinned_runs;  // empty when not pinned
  bool branching = false;
  bool has_spec = false;
  Interpretation spec;
  std::string expect;  // expected overall verdict, may be empty
};

std::vector<CorpusEntry> load_corpus() {
  const std::string dir = std::string(TADI_SAMPLES_DIR) + "/corpus/";
  json man = json::parse(slurp(dir + "manifest.json"));
  std::vector<CorpusEntry> out;
  for (const json& e : man["entries"]) {
    CorpusEntry ce;
    ce.prog = parse_program(slurp(dir + e["program"].get<std::string>()));
    for (const auto& d : ce.prog.decls)
      ce.branching = ce.branching || has_branching_choice(d.body);

    detail::Cursor cur(e["entry"].get<std::string>());
    AgentPtr call = detail::parse_agent(ce.prog.system, cur);
    const Agent* leaf = call.get();
    while (leaf->kind == AgentKind::Par && leaf->subs.size() == 1)
      leaf = leaf->subs[0].get();
    ce.entry_name = leaf->callee;
    ce.entry_args = leaf->args;
    ce.entry = rt_of(call);

    for (const json& ji : e["inits"]) {
      std::string src = ji.get<std::string>();
      if (src.empty()) {
        ce.inits.push_back(Constraint::top());
      } else {
        detail::Cursor c2(src);
        ce.inits.push_back(detail::parse_constraint_atoms(ce.prog.system, c2));
      }
    }
    if (e.contains("runs"))
      for (const json& jr : e["runs"])
        ce.pinned_runs.push_back(jr.get<std::size_t>());
    if (e.contains("spec")) {
      ce.has_spec = true;
      ce.spec = spec_of(ce.prog.system, dir + e["spec"].get<std::string>());
    }
    if (e.contains("expect")) ce.expect = e["expect"].get<std::string>();
    out.push_back(std::move(ce));
  }
  return out;
}

void criterion_interpreter_discipline(const std::vector<CorpusEntry>& corpus) {
  int bad_mono = 0, bad_closed = 0, bad_det = 0, bad_pin = 0, truncated = 0;
  for (const CorpusEntry& ce : corpus) {
    for (std::size_t k = 0; k < ce.inits.size(); ++k) {
      RunSet rs = run_bounded(ce.prog, Config{ce.entry, ce.inits[k]}, 50, 512);
      if (rs.truncated) ++truncated;
      for (const Run& r : rs.runs) {
        for (std::size_t i = 0; i + 1 < r.stores.size(); ++i)
          if (!entails(ce.prog.system, r.stores[i + 1], r.stores[i]))
            ++bad_mono;
        if (!trace_closed(ce.prog.system, run_to_trace(r))) ++bad_closed;
      }
      if (!ce.branching && rs.runs.size() != 1) ++bad_det;
      if (k < ce.pinned_runs.size() && rs.runs.size() != ce.pinned_runs[k])
        ++bad_pin;
    }
  }
  std::ostringstream why;
  why << "programs " << corpus.size() << ", monotone breaks " << bad_mono
      << ", open traces " << bad_closed << ", nondet " << bad_det
      << ", run-count misses " << bad_pin << ", truncations " << truncated;
  report(
      "bounded runs are monotone, closed, and deterministic without choice",
      corpus.size() == 20 && bad_mono == 0 && bad_closed == 0 &&
          bad_det == 0 && bad_pin == 0 && truncated == 0,
      why.str());
}

void criterion_empirical_soundness(const std::vector<CorpusEntry>& corpus) {
  int accepted = 0, false_traces = 0, verdict_misses = 0;
  for (const CorpusEntry& ce : corpus) {
    if (!ce.has_spec) continue;
    Report rep = check_program(ce.prog, ce.spec);
    if (!ce.expect.empty() && verdict_str(rep.overall) != ce.expect)
      ++verdict_misses;
    if (rep.overall != Verdict::PartiallyCorrect) continue;
    ++accepted;
    std::size_t fresh = 900;
    FormulaPtr contract =
        ce.spec.lookup(ce.prog.system, ce.entry_name, ce.entry_args, fresh);
    for (const Constraint& init : ce.inits) {
      RunSet rs = run_bounded(ce.prog, Config{ce.entry, init}, 20, 512);
      for (const Run& r : rs.runs)
        if (satisfies(ce.prog.system, run_to_trace(r), contract) ==
            Truth::False)
          ++false_traces;
    }
  }
  std::ostringstream why;
  why << accepted << " accepted pairs, " << false_traces
      << " falsifying traces, " << verdict_misses << " verdict misses";
  report("no bounded run falsifies an accepted contract",
         accepted >= 10 && false_traces == 0 && verdict_misses == 0,
         why.str());
}

// ── 8: the controller body's canonical three-branch shape ───────────────────

void criterion_structural_golden() {
  Program p = parse_program(
      "tokens near, out, up, down. "
      "props m/2. "
      "master(C, G) :- "
      "  now C=[near|_] then "
      "    exists C', G' ( tell(C=[near|C']) || tell(G=[down|G']) || "
      "                    master(C', G') ) "
      "  else now C=[out|_] then "
      "    exists C', G' ( tell(C=[out|C']) || tell(G=[up|G']) || "
      "                    master(C', G') ) "
      "  else master(C, G).");
  Interpretation i;
  i.bind("master", {"A", "B"},
         f_atom(Constraint::make(p.system, {Atom::prop("m", {"A", "B"})})));

  std::size_t fresh = 0;
  FormulaPtr got =
      canonicalize(abstract_agent(p.system, p.decls[0].body, i, fresh));

  auto cs = [&](const std::string& s) {
    detail::Cursor cur(s);
    return f_atom(detail::parse_constraint_atoms(p.system, cur));
  };
  FormulaPtr hop_rec =
      f_next(f_atom(Constraint::make(p.system, {Atom::prop("m", {"C'", "G'"})})));
  FormulaPtr hop_same =
      f_next(f_atom(Constraint::make(p.system, {Atom::prop("m", {"C", "G"})})));
  FormulaPtr branch_near = f_exists(
      "C'", f_exists("G'", f_and({cs("C=[near|_]"), f_next(cs("C=[near|C']")),
                                  f_next(cs("G=[down|G']")), hop_rec})));
  FormulaPtr branch_out = f_exists(
      "C'",
      f_exists("G'", f_and({f_not(cs("C=[near|_]")), cs("C=[out|_]"),
                            f_next(cs("C=[out|C']")), f_next(cs("G=[up|G']")),
                            hop_rec})));
  FormulaPtr branch_wait =
      f_and({f_not(cs("C=[near|_]")), f_not(cs("C=[out|_]")), hop_same});
  FormulaPtr want = f_or(branch_near, f_or(branch_out, branch_wait));

  report("controller body canonicalizes to the three-branch form",
         formula_eq(got, want) && formula_str(got) == formula_str(want),
         "got " + formula_str(got));
}

}  // namespace

int main() {
  auto guard = [](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("exception: ") + e.what());
    }
  };

  guard("controller accepted against its liveness contract",
        [] { criterion_accept_controller(); });
  guard("broken controller convicted with a consistent, pointed testimony",
        [] { criterion_convict_broken(); });
  guard("guarded self-loop accepted (documented blind spot)",
        [] { criterion_pathological_loop(); });
  guard("tableau agrees with the trace-enumeration oracle on 600 formulas",
        [] { criterion_oracle_agreement(); });
  guard("store algebra laws hold over 1000 random constraints",
        [] { criterion_store_laws(); });
  try {
    std::vector<CorpusEntry> corpus = load_corpus();
    guard("bounded runs are monotone, closed, and deterministic without choice",
          [&] { criterion_interpreter_discipline(corpus); });
    guard("no bounded run falsifies an accepted contract",
          [&] { criterion_empirical_soundness(corpus); });
  } catch (const std::exception& e) {
    report("bounded runs are monotone, closed, and deterministic without choice",
           false, std::string("corpus load failed: ") + e.what());
    report("no bounded run falsifies an accepted contract", false,
           "corpus load failed");
  }
  guard("controller body canonicalizes to the three-branch form",
        [] { criterion_structural_golden(); });

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASS"
                                : std::to_string(g_failures) + " FAILURES")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
