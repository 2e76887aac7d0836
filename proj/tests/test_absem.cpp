#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "tadi/absem.hpp"
#include "tadi/cltl.hpp"
#include "tadi/lang.hpp"

using namespace tadi;

namespace {

Program prog_of(const std::string& src) { return parse_program(src); }

AgentPtr agent_of(const ConstraintSystem& sys, const std::string& src) {
  detail::Cursor cur(src);
  AgentPtr a = detail::parse_agent(sys, cur);
  REQUIRE(cur.done());
  return a;
}

Constraint con_of(const ConstraintSystem& sys, const std::string& src) {
  detail::Cursor cur(src);
  return detail::parse_constraint_atoms(sys, cur);
}

FormulaPtr form_of(const ConstraintSystem& sys, const std::string& src) {
  return parse_formula(sys, src);
}

const std::string kMasterSrc =
    "tokens near, out, up, down. "
    "props m/2. "
    "master(C, G) :- "
    "  now C=[near|_] then "
    "    exists C', G' ( tell(C=[near|C']) || tell(G=[down|G']) || "
    "                    master(C', G') ) "
    "  else now C=[out|_] then "
    "    exists C', G' ( tell(C=[out|C']) || tell(G=[up|G']) || "
    "                    master(C', G') ) "
    "  else master(C, G).";

/// Placeholder interpretation: master(A,B) |-> the atom m(A,B), standing in
/// for the symbolic lookup in the expected shapes.
Interpretation placeholder_master(const ConstraintSystem& sys) {
  Interpretation i;
  i.bind("master", {"A", "B"},
         f_atom(Constraint::make(sys, {Atom::prop("m", {"A", "B"})})));
  return i;
}

}  // namespace

// ── transformer clauses ────────────────────────────────────────────────────

TEST_CASE("skip abstracts to true") {
  Program p = prog_of("tokens a.");
  Interpretation i;
  std::size_t fresh = 0;
  CHECK(formula_eq(abstract_agent(p.system, mk_skip(), i, fresh), f_true()));
}

TEST_CASE("tell abstracts to next of its constraint") {
  Program p = prog_of("tokens a. props p/0.");
  Interpretation i;
  std::size_t fresh = 0;
  Constraint c = con_of(p.system, "p");
  FormulaPtr got = abstract_agent(p.system, mk_tell(c), i, fresh);
  CHECK(formula_eq(got, f_next(f_atom(c))));
}

TEST_CASE("parallel composition abstracts to conjunction") {
  Program p = prog_of("tokens a. props p/0, q/0.");
  Interpretation i;
  std::size_t fresh = 0;
  AgentPtr a = agent_of(p.system, "tell(p) || tell(q)");
  FormulaPtr got = abstract_agent(p.system, a, i, fresh);
  FormulaPtr want = f_and(f_next(f_atom(con_of(p.system, "p"))),
                          f_next(f_atom(con_of(p.system, "q"))));
  CHECK(formula_eq(got, want));
}

TEST_CASE("hiding abstracts to existential quantification") {
  Program p = prog_of("tokens a. props p/1.");
  Interpretation i;
  std::size_t fresh = 0;
  AgentPtr a = agent_of(p.system, "exists X, Y (tell(p(X)) || tell(p(Y)))");
  FormulaPtr got = abstract_agent(p.system, a, i, fresh);
  FormulaPtr body = f_and(
      f_next(f_atom(Constraint::make(p.system, {Atom::prop("p", {"X"})}))),
      f_next(f_atom(Constraint::make(p.system, {Atom::prop("p", {"Y"})}))));
  CHECK(formula_eq(got, f_exists("X", f_exists("Y", body))));
}

TEST_CASE("a call abstracts to next of the interpretation lookup") {
  Program p = prog_of(kMasterSrc);
  Interpretation i = placeholder_master(p.system);
  std::size_t fresh = 0;
  AgentPtr a = agent_of(p.system, "master(C, G)");
  FormulaPtr got = abstract_agent(p.system, a, i, fresh);
  FormulaPtr want = f_next(
      f_atom(Constraint::make(p.system, {Atom::prop("m", {"C", "G"})})));
  CHECK(formula_eq(got, want));
}

TEST_CASE("choice abstracts to the wait-or-fire disjunction") {
  Program p = prog_of("tokens a. props p/0, q/0, r/0.");
  Interpretation i;
  std::size_t fresh = 0;
  AgentPtr a = agent_of(
      p.system, "choice ask(p) -> tell(q) [] ask(q) -> tell(r) end");
  FormulaPtr got = abstract_agent(p.system, a, i, fresh);

  FormulaPtr cp = f_atom(con_of(p.system, "p"));
  FormulaPtr cq = f_atom(con_of(p.system, "q"));
  FormulaPtr cr = f_atom(con_of(p.system, "r"));
  FormulaPtr silent = f_and(f_not(cp), f_not(cq));
  FormulaPtr fire = f_or(f_and(cp, f_next(f_next(cq))),
                         f_and(cq, f_next(f_next(cr))));
  FormulaPtr want = f_or(f_always(silent), f_until(silent, fire));
  CHECK(formula_eq(got, want));
}

TEST_CASE("now abstracts to the guarded disjunction") {
  Program p = prog_of("tokens a. props p/0, q/0, r/0.");
  Interpretation i;
  std::size_t fresh = 0;
  AgentPtr a = agent_of(p.system, "now p then tell(q) else tell(r)");
  FormulaPtr got = abstract_agent(p.system, a, i, fresh);
  FormulaPtr cp = f_atom(con_of(p.system, "p"));
  FormulaPtr want =
      f_or(f_and(cp, f_next(f_atom(con_of(p.system, "q")))),
           f_and(f_not(cp), f_next(f_atom(con_of(p.system, "r")))));
  CHECK(formula_eq(got, want));
}

// ── interpretations ────────────────────────────────────────────────────────

TEST_CASE("lookups rename formals to actuals, capture-avoidingly") {
  Program p = prog_of("tokens a. props p/1, q/1.");
  Interpretation i;
  std::size_t fresh = 0;
  i.bind("w", {"X"},
         form_of(p.system, "{p(X)} /\\ exists Y. ({q(Y)})"));

  FormulaPtr at_z = i.lookup(p.system, "w", {"Z"}, fresh);
  CHECK(formula_eq(at_z, form_of(p.system, "{p(Z)} /\\ exists Y. ({q(Y)})")));

  // Renaming to the bound name must not capture.
  FormulaPtr at_y = i.lookup(p.system, "w", {"Y"}, fresh);
  CHECK(formula_free_vars(at_y) == std::set<std::string>{"Y"});
  CHECK_FALSE(formula_eq(at_y, form_of(p.system, "{p(Y)} /\\ exists Y. ({q(Y)})")));
}

TEST_CASE("variance: lookups at different argument tuples are renamings") {
  Program p = prog_of("tokens a. props p/2.");
  Interpretation i;
  std::size_t fresh = 0;
  i.bind("w", {"X", "Y"}, form_of(p.system, "{p(X,Y)} U {p(Y,X)}"));

  FormulaPtr at_ab = i.lookup(p.system, "w", {"A", "B"}, fresh);
  FormulaPtr at_uv = i.lookup(p.system, "w", {"U", "V"}, fresh);
  std::map<std::string, std::string> m{{"A", "U"}, {"B", "V"}};
  CHECK(formula_eq(formula_subst(p.system, at_ab, m, fresh), at_uv));
}

TEST_CASE("unbound lookups throw; a fallback makes them total") {
  Program p = prog_of("tokens a.");
  Interpretation i;
  std::size_t fresh = 0;
  CHECK_THROWS_AS(i.lookup(p.system, "ghost", {}, fresh),
                  UnboundProcessError);
  i.set_fallback(f_false());
  CHECK(formula_eq(i.lookup(p.system, "ghost", {}, fresh), f_false()));

  i.bind("w", {"X"}, f_true());
  CHECK_THROWS_AS(i.lookup(p.system, "w", {"A", "B"}, fresh),
                  UnboundProcessError);  // arity mismatch
}

// ── one-step consequence operator ──────────────────────────────────────────

TEST_CASE("the empty program maps every symbol to false") {
  Program p = prog_of("tokens a.");
  Interpretation i;
  std::size_t fresh = 0;
  Interpretation out = abstract_step(p, i, fresh);
  CHECK(formula_eq(out.lookup(p.system, "anything", {"X"}, fresh), f_false()));
}

TEST_CASE("overloaded declarations disjoin, renamed to one parameter tuple") {
  Program p = prog_of(
      "tokens a. props p/1, q/1. "
      "w(X) :- tell(p(X)). "
      "w(Y) :- tell(q(Y)).");
  Interpretation i;
  std::size_t fresh = 0;
  Interpretation out = abstract_step(p, i, fresh);
  FormulaPtr got = out.lookup(p.system, "w", {"X"}, fresh);
  FormulaPtr want = f_or(form_of(p.system, "X {p(X)}"),
                         form_of(p.system, "X {q(X)}"));
  CHECK(formula_eq(got, want));
}

TEST_CASE("recursion consults the interpretation, never unfolds") {
  Program p = prog_of("tokens a. props p/0. w :- tell(p) || w.");
  Interpretation i;
  i.bind("w", {}, form_of(p.system, "F {p}"));
  std::size_t fresh = 0;
  Interpretation out = abstract_step(p, i, fresh);
  FormulaPtr got = out.lookup(p.system, "w", {}, fresh);
  FormulaPtr want = f_and(f_next(f_atom(con_of(p.system, "p"))),
                          f_next(form_of(p.system, "F {p}")));
  CHECK(formula_eq(got, want));
}

TEST_CASE("the pathological guarded-recursion shape") {
  Program p = prog_of(
      "tokens a. props is1/1. "
      "q(Y) :- now is1(Y) then q(Y) else q(Y).");
  Interpretation s;
  s.bind("q", {"Y"}, form_of(p.system, "F {is1(Y)}"));
  std::size_t fresh = 0;
  Interpretation out = abstract_step(p, s, fresh);
  FormulaPtr got = out.lookup(p.system, "q", {"Y"}, fresh);

  FormulaPtr c = f_atom(con_of(p.system, "is1(Y)"));
  FormulaPtr hop = f_next(form_of(p.system, "F {is1(Y)}"));
  FormulaPtr want = f_or(f_and(c, hop), f_and(f_not(c), hop));
  CHECK(formula_eq(got, want));
}

// ── canonical presentation ─────────────────────────────────────────────────

TEST_CASE("canonicalize flattens guarded cascades into disjuncts") {
  Program p = prog_of("tokens a. props p/0, q/0, r/0.");
  FormulaPtr f = form_of(
      p.system, "({p} /\\ X {q}) \\/ (~{p} /\\ (({q} /\\ X {r}) \\/ (~{q} /\\ X {p})))");
  FormulaPtr want = f_or(
      form_of(p.system, "{p} /\\ X {q}"),
      f_or(form_of(p.system, "~{p} /\\ {q} /\\ X {r}"),
           form_of(p.system, "~{p} /\\ ~{q} /\\ X {p}")));
  CHECK(formula_eq(canonicalize(f), want));
}

TEST_CASE("canonicalize absorbs conjuncts into a sole quantifier block") {
  Program p = prog_of("tokens a. props p/1, q/0.");
  FormulaPtr f = form_of(p.system, "{q} /\\ exists X. (X {p(X)})");
  FormulaPtr want = form_of(p.system, "exists X. ({q} /\\ X {p(X)})");
  CHECK(formula_eq(canonicalize(f), want));

  // ... but never captures a free occurrence of the bound name.
  FormulaPtr g = form_of(p.system, "{p(X)} /\\ exists X. (X {p(X)})");
  CHECK(formula_eq(canonicalize(g), g));
}

TEST_CASE("the master body canonicalizes to the three-disjunct shape") {
  Program p = prog_of(kMasterSrc);
  REQUIRE(p.decls.size() == 1);
  Interpretation i = placeholder_master(p.system);
  std::size_t fresh = 0;

  FormulaPtr raw = abstract_agent(p.system, p.decls[0].body, i, fresh);
  FormulaPtr got = canonicalize(raw);

  auto cs = [&](const std::string& s) { return f_atom(con_of(p.system, s)); };
  FormulaPtr hop_rec = f_next(
      f_atom(Constraint::make(p.system, {Atom::prop("m", {"C'", "G'"})})));
  FormulaPtr hop_same = f_next(
      f_atom(Constraint::make(p.system, {Atom::prop("m", {"C", "G"})})));

  FormulaPtr phi_near = f_exists(
      "C'", f_exists("G'", f_and({cs("C=[near|_]"), f_next(cs("C=[near|C']")),
                                  f_next(cs("G=[down|G']")), hop_rec})));
  FormulaPtr phi_out = f_exists(
      "C'",
      f_exists("G'", f_and({f_not(cs("C=[near|_]")), cs("C=[out|_]"),
                            f_next(cs("C=[out|C']")), f_next(cs("G=[up|G']")),
                            hop_rec})));
  FormulaPtr phi_cwait =
      f_and({f_not(cs("C=[near|_]")), f_not(cs("C=[out|_]")), hop_same});
  FormulaPtr want = f_or(phi_near, f_or(phi_out, phi_cwait));

  CHECK(formula_eq(got, want));
  INFO("got:  " << formula_str(got));
  INFO("want: " << formula_str(want));
  CHECK(formula_str(got) == formula_str(want));
}
