#pragma once

// Process language: agents, declarations, programs, and their parser.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tadi/cstore.hpp"
#include "tadi/parse.hpp"

namespace tadi {

// ── agents ───────────────────────────────────────────────────────────────────

enum class AgentKind : std::uint8_t { Skip, Tell, Par, Exists, Choice, Now, Call };

struct Agent;
using AgentPtr = std::shared_ptr<const Agent>;

struct ChoiceArm {
  Constraint guard;
  AgentPtr body;
};

struct Agent {
  AgentKind kind{};
  Constraint c;                    // Tell payload / Now condition
  std::vector<AgentPtr> subs;      // Par (>= 2), Now (then, else), Exists (1)
  std::vector<std::string> bound;  // Exists binders
  std::vector<ChoiceArm> arms;     // Choice
  std::string callee;              // Call
  std::vector<std::string> args;   // Call
};

inline AgentPtr mk_skip() {
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Skip;
  return a;
}

inline AgentPtr mk_tell(Constraint c) {
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Tell;
  a->c = std::move(c);
  return a;
}

inline AgentPtr mk_par(std::vector<AgentPtr> subs) {
  std::vector<AgentPtr> flat;
  for (auto& s : subs) {
    if (s->kind == AgentKind::Par)
      flat.insert(flat.end(), s->subs.begin(), s->subs.end());
    else
      flat.push_back(std::move(s));
  }
  if (flat.size() == 1) return flat[0];
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Par;
  a->subs = std::move(flat);
  return a;
}

inline AgentPtr mk_exists(std::vector<std::string> bound, AgentPtr body) {
  if (bound.empty()) return body;
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Exists;
  a->bound = std::move(bound);
  a->subs = {std::move(body)};
  return a;
}

inline AgentPtr mk_choice(std::vector<ChoiceArm> arms) {
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Choice;
  a->arms = std::move(arms);
  return a;
}

inline AgentPtr mk_now(Constraint c, AgentPtr then_arm, AgentPtr else_arm) {
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Now;
  a->c = std::move(c);
  a->subs = {std::move(then_arm), std::move(else_arm)};
  return a;
}

inline AgentPtr mk_call(std::string callee, std::vector<std::string> args) {
  auto a = std::make_shared<Agent>();
  a->kind = AgentKind::Call;
  a->callee = std::move(callee);
  a->args = std::move(args);
  return a;
}

// ── agent inspection ─────────────────────────────────────────────────────────

inline std::set<std::string> agent_free_vars(const AgentPtr& a) {
  std::set<std::string> out;
  switch (a->kind) {
    case AgentKind::Skip:
      break;
    case AgentKind::Tell: {
      auto vs = a->c.vars();
      out.insert(vs.begin(), vs.end());
      break;
    }
    case AgentKind::Par:
      for (const auto& s : a->subs) {
        auto vs = agent_free_vars(s);
        out.insert(vs.begin(), vs.end());
      }
      break;
    case AgentKind::Exists: {
      out = agent_free_vars(a->subs[0]);
      for (const auto& b : a->bound) out.erase(b);
      break;
    }
    case AgentKind::Choice:
      for (const auto& arm : a->arms) {
        auto gs = arm.guard.vars();
        out.insert(gs.begin(), gs.end());
        auto vs = agent_free_vars(arm.body);
        out.insert(vs.begin(), vs.end());
      }
      break;
    case AgentKind::Now: {
      auto cs = a->c.vars();
      out.insert(cs.begin(), cs.end());
      for (const auto& s : a->subs) {
        auto vs = agent_free_vars(s);
        out.insert(vs.begin(), vs.end());
      }
      break;
    }
    case AgentKind::Call:
      out.insert(a->args.begin(), a->args.end());
      break;
  }
  return out;
}

inline std::string agent_str(const AgentPtr& a) {
  std::ostringstream os;
  auto paren_par = [](const AgentPtr& s) {
    return s->kind == AgentKind::Par ? "(" + agent_str(s) + ")" : agent_str(s);
  };
  switch (a->kind) {
    case AgentKind::Skip:
      os << "skip";
      break;
    case AgentKind::Tell:
      os << "tell(" << a->c.str() << ")";
      break;
    case AgentKind::Par:
      for (std::size_t i = 0; i < a->subs.size(); ++i) {
        if (i) os << " || ";
        os << paren_par(a->subs[i]);
      }
      break;
    case AgentKind::Exists: {
      os << "exists ";
      for (std::size_t i = 0; i < a->bound.size(); ++i) {
        if (i) os << ", ";
        os << a->bound[i];
      }
      os << " (" << agent_str(a->subs[0]) << ")";
      break;
    }
    case AgentKind::Choice:
      os << "choice ";
      for (std::size_t i = 0; i < a->arms.size(); ++i) {
        if (i) os << " [] ";
        os << "ask(" << a->arms[i].guard.str() << ") -> "
           << agent_str(a->arms[i].body);
      }
      os << " end";
      break;
    case AgentKind::Now:
      os << "now " << a->c.str() << " then " << paren_par(a->subs[0])
         << " else " << paren_par(a->subs[1]);
      break;
    case AgentKind::Call:
      os << a->callee;
      if (!a->args.empty()) {
        os << "(";
        for (std::size_t i = 0; i < a->args.size(); ++i) {
          if (i) os << ", ";
          os << a->args[i];
        }
        os << ")";
      }
      break;
  }
  return os.str();
}

/// Capture-avoiding variable substitution; `fresh` feeds alpha-renaming of
/// binders that would capture a substituted name.
inline AgentPtr agent_subst(const ConstraintSystem& sys, const AgentPtr& a,
                            std::map<std::string, std::string> m,
                            std::size_t& fresh) {
  // Drop identity entries early.
  for (auto it = m.begin(); it != m.end();)
    it = it->first == it->second ? m.erase(it) : std::next(it);
  if (m.empty()) return a;
  switch (a->kind) {
    case AgentKind::Skip:
      return a;
    case AgentKind::Tell:
      return mk_tell(a->c.renamed(sys, m));
    case AgentKind::Par: {
      std::vector<AgentPtr> subs;
      for (const auto& s : a->subs) subs.push_back(agent_subst(sys, s, m, fresh));
      return mk_par(std::move(subs));
    }
    case AgentKind::Exists: {
      std::map<std::string, std::string> inner = m;
      for (const auto& b : a->bound) inner.erase(b);
      // Alpha-rename binders that collide with substitution targets.
      std::set<std::string> targets;
      for (const auto& [from, to] : inner) {
        (void)from;
        targets.insert(to);
      }
      std::vector<std::string> bound = a->bound;
      AgentPtr body = a->subs[0];
      for (auto& b : bound) {
        if (targets.count(b)) {
          std::string nb = "#" + std::to_string(++fresh);
          std::size_t unused = 0;
          body = agent_subst(sys, body, {{b, nb}}, unused);
          b = nb;
        }
      }
      return mk_exists(std::move(bound), agent_subst(sys, body, inner, fresh));
    }
    case AgentKind::Choice: {
      std::vector<ChoiceArm> arms;
      for (const auto& arm : a->arms)
        arms.push_back(
            {arm.guard.renamed(sys, m), agent_subst(sys, arm.body, m, fresh)});
      return mk_choice(std::move(arms));
    }
    case AgentKind::Now:
      return mk_now(a->c.renamed(sys, m), agent_subst(sys, a->subs[0], m, fresh),
                    agent_subst(sys, a->subs[1], m, fresh));
    case AgentKind::Call: {
      std::vector<std::string> args;
      for (const auto& x : a->args) {
        auto it = m.find(x);
        args.push_back(it == m.end() ? x : it->second);
      }
      return mk_call(a->callee, std::move(args));
    }
  }
  return a;
}

// ── programs ─────────────────────────────────────────────────────────────────

struct Declaration {
  std::string name;
  std::vector<std::string> params;
  AgentPtr body;
};

struct Program {
  ConstraintSystem system;
  std::vector<Declaration> decls;

  std::vector<const Declaration*> decls_for(const std::string& name) const {
    std::vector<const Declaration*> out;
    for (const auto& d : decls)
      if (d.name == name) out.push_back(&d);
    return out;
  }

  bool declares(const std::string& name) const {
    return !decls_for(name).empty();
  }
};

// ── program parser ───────────────────────────────────────────────────────────

namespace detail {

inline Constraint parse_constraint_atoms(const ConstraintSystem& sys,
                                         Cursor& cur) {
  int line = cur.line();
  std::vector<Atom> atoms;
  if (cur.eat_punct("{")) {
    if (!cur.eat_punct("}")) {
      atoms = parse_atom_list(cur, false);
      cur.expect_punct("}");
    }
  } else {
    atoms = parse_atom_list(cur, false);
  }
  try {
    return Constraint::make(sys, std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line);
  }
}

inline AgentPtr parse_agent(const ConstraintSystem& sys, Cursor& cur);

inline AgentPtr parse_agent_prefix(const ConstraintSystem& sys, Cursor& cur) {
  if (cur.eat_ident("skip")) return mk_skip();
  if (cur.eat_ident("tell")) {
    cur.expect_punct("(");
    Constraint c = parse_constraint_atoms(sys, cur);
    cur.expect_punct(")");
    return mk_tell(std::move(c));
  }
  if (cur.eat_ident("exists")) {
    std::vector<std::string> bound;
    do {
      bound.push_back(cur.expect_var());
    } while (cur.eat_punct(","));
    cur.expect_punct("(");
    AgentPtr body = parse_agent(sys, cur);
    cur.expect_punct(")");
    return mk_exists(std::move(bound), std::move(body));
  }
  if (cur.eat_ident("choice")) {
    std::vector<ChoiceArm> arms;
    do {
      if (!cur.eat_ident("ask"))
        throw ParseError("expected 'ask' in choice arm", cur.line());
      cur.expect_punct("(");
      Constraint g = parse_constraint_atoms(sys, cur);
      cur.expect_punct(")");
      cur.expect_punct("->");
      AgentPtr body = parse_agent(sys, cur);
      arms.push_back({std::move(g), std::move(body)});
    } while (cur.eat_punct("[]"));
    if (!cur.eat_ident("end"))
      throw ParseError("expected 'end' closing choice", cur.line());
    return mk_choice(std::move(arms));
  }
  if (cur.eat_ident("ask")) {  // single-arm choice sugar
    cur.expect_punct("(");
    Constraint g = parse_constraint_atoms(sys, cur);
    cur.expect_punct(")");
    cur.expect_punct("->");
    AgentPtr body = parse_agent_prefix(sys, cur);
    return mk_choice({{std::move(g), std::move(body)}});
  }
  if (cur.eat_ident("now")) {
    Constraint c = parse_constraint_atoms(sys, cur);
    if (!cur.eat_ident("then"))
      throw ParseError("expected 'then' after now condition", cur.line());
    AgentPtr then_arm = parse_agent_prefix(sys, cur);
    AgentPtr else_arm =
        cur.eat_ident("else") ? parse_agent_prefix(sys, cur) : mk_skip();
    return mk_now(std::move(c), std::move(then_arm), std::move(else_arm));
  }
  if (cur.eat_punct("(")) {
    AgentPtr a = parse_agent(sys, cur);
    cur.expect_punct(")");
    return a;
  }
  if (cur.peek().kind == TokKind::Ident) {
    std::string name = cur.eat().text;
    std::vector<std::string> args;
    if (cur.eat_punct("(")) {
      if (!cur.eat_punct(")")) {
        do {
          args.push_back(cur.expect_var());
        } while (cur.eat_punct(","));
        cur.expect_punct(")");
      }
    }
    return mk_call(std::move(name), std::move(args));
  }
  throw ParseError("expected an agent, found '" + cur.peek().text + "'",
                   cur.line());
}

inline AgentPtr parse_agent(const ConstraintSystem& sys, Cursor& cur) {
  std::vector<AgentPtr> subs{parse_agent_prefix(sys, cur)};
  while (cur.eat_punct("||")) subs.push_back(parse_agent_prefix(sys, cur));
  return mk_par(std::move(subs));
}

}  // namespace detail

inline Program parse_program(const std::string& src) {
  detail::Cursor cur(src);
  Program prog;
  const std::set<std::string> keywords = {
      "tokens", "props", "rule",   "skip", "tell", "exists", "choice",
      "ask",    "end",   "now",    "then", "else", "false",  "last"};

  while (!cur.done()) {
    if (cur.eat_ident("tokens")) {
      do {
        prog.system.tokens.insert(cur.expect_ident());
      } while (cur.eat_punct(","));
      cur.expect_punct(".");
      continue;
    }
    if (cur.eat_ident("props")) {
      do {
        std::string name = cur.expect_ident();
        cur.expect_punct("/");
        if (cur.peek().kind != detail::TokKind::Int)
          throw ParseError("expected an arity", cur.line());
        prog.system.props[name] =
            static_cast<std::size_t>(std::stoul(cur.eat().text));
      } while (cur.eat_punct(","));
      cur.expect_punct(".");
      continue;
    }
    if (cur.eat_ident("rule")) {
      int line = cur.line();
      HornRule r;
      if (!cur.eat_ident("false")) {
        Atom head = detail::parse_atom(cur, true);
        if (head.kind != AtomKind::Prop)
          throw ParseError("rule heads must be propositions or 'false'", line);
        r.head = std::move(head);
      }
      cur.expect_punct(":-");
      r.body = detail::parse_atom_list(cur, true);
      cur.expect_punct(".");
      // Range restriction: head variables must occur in the body.
      if (r.head) {
        std::set<std::string> body_vars;
        for (const Atom& b : r.body) {
          auto vs = b.vars();
          body_vars.insert(vs.begin(), vs.end());
          if (b.kind != AtomKind::Prop && is_var_name(b.value))
            body_vars.insert(b.value);
        }
        for (const std::string& v : r.head->args)
          if (is_var_name(v) && !body_vars.count(v))
            throw ParseError("rule head variable " + v + " not bound in body",
                             line);
      }
      prog.system.rules.push_back(std::move(r));
      continue;
    }

    // Process declaration: name(params) :- agent.
    int line = cur.line();
    std::string name = cur.expect_ident();
    if (keywords.count(name))
      throw ParseError("unexpected keyword '" + name + "'", line);
    std::vector<std::string> params;
    if (cur.eat_punct("(")) {
      if (!cur.eat_punct(")")) {
        do {
          params.push_back(cur.expect_var());
        } while (cur.eat_punct(","));
        cur.expect_punct(")");
      }
    }
    cur.expect_punct(":-");
    AgentPtr body = detail::parse_agent(prog.system, cur);
    cur.expect_punct(".");

    std::set<std::string> pset(params.begin(), params.end());
    if (pset.size() != params.size())
      throw ParseError("duplicate parameter in declaration of " + name, line);
    for (const std::string& v : agent_free_vars(body))
      if (!pset.count(v))
        throw ParseError("free variable " + v + " in body of " + name, line);
    for (const auto& d : prog.decls)
      if (d.name == name && d.params.size() != params.size())
        throw ParseError("conflicting arity for " + name, line);
    prog.decls.push_back({std::move(name), std::move(params), std::move(body)});
  }

  // Calls must match the arity of some declaration when one exists.
  for (const auto& d : prog.decls) {
    std::vector<const Agent*> stack{d.body.get()};
    while (!stack.empty()) {
      const Agent* a = stack.back();
      stack.pop_back();
      for (const auto& s : a->subs) stack.push_back(s.get());
      for (const auto& arm : a->arms) stack.push_back(arm.body.get());
      if (a->kind == AgentKind::Call && prog.declares(a->callee) &&
          prog.decls_for(a->callee)[0]->params.size() != a->args.size())
        throw ParseError("call to " + a->callee + " with wrong arity", 1);
    }
  }
  return prog;
}

}  // namespace tadi
