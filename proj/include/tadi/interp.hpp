#pragma once

// Small-step interpreter: one transition per clock tick, synchronous parallel
// steps, deterministic store growth, and local stores for hidden variables.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tadi/cstore.hpp"
#include "tadi/lang.hpp"
#include "tadi/traces.hpp"

namespace tadi {

// ── runtime agents ───────────────────────────────────────────────────────────

struct RtAgent;
using RtPtr = std::shared_ptr<const RtAgent>;

struct RtChoiceArm {
  Constraint guard;
  RtPtr body;
};

/// Like Agent, but hiding is single-variable and carries its local store.
struct RtAgent {
  AgentKind kind{};
  Constraint c;       // Tell / Now condition
  std::vector<RtPtr> subs;
  std::string bound;  // Exists
  Constraint local;   // Exists
  std::vector<RtChoiceArm> arms;
  std::string callee;
  std::vector<std::string> args;
};

inline RtPtr rt_skip() {
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Skip;
  return a;
}

inline RtPtr rt_tell(Constraint c) {
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Tell;
  a->c = std::move(c);
  return a;
}

inline RtPtr rt_par(std::vector<RtPtr> subs) {
  std::vector<RtPtr> flat;
  for (auto& s : subs) {
    if (s->kind == AgentKind::Par)
      flat.insert(flat.end(), s->subs.begin(), s->subs.end());
    else if (s->kind != AgentKind::Skip)
      flat.push_back(std::move(s));
  }
  if (flat.empty()) return rt_skip();
  if (flat.size() == 1) return flat[0];
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Par;
  a->subs = std::move(flat);
  return a;
}

inline RtPtr rt_exists(std::string x, Constraint local, RtPtr body) {
  if (body->kind == AgentKind::Skip) return body;
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Exists;
  a->bound = std::move(x);
  a->local = std::move(local);
  a->subs = {std::move(body)};
  return a;
}

inline RtPtr rt_choice(std::vector<RtChoiceArm> arms) {
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Choice;
  a->arms = std::move(arms);
  return a;
}

inline RtPtr rt_now(Constraint c, RtPtr then_arm, RtPtr else_arm) {
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Now;
  a->c = std::move(c);
  a->subs = {std::move(then_arm), std::move(else_arm)};
  return a;
}

inline RtPtr rt_call(std::string callee, std::vector<std::string> args) {
  auto a = std::make_shared<RtAgent>();
  a->kind = AgentKind::Call;
  a->callee = std::move(callee);
  a->args = std::move(args);
  return a;
}

inline RtPtr rt_of(const AgentPtr& a) {
  switch (a->kind) {
    case AgentKind::Skip:
      return rt_skip();
    case AgentKind::Tell:
      return rt_tell(a->c);
    case AgentKind::Par: {
      std::vector<RtPtr> subs;
      for (const auto& s : a->subs) subs.push_back(rt_of(s));
      return rt_par(std::move(subs));
    }
    case AgentKind::Exists: {
      RtPtr body = rt_of(a->subs[0]);
      for (auto it = a->bound.rbegin(); it != a->bound.rend(); ++it)
        body = rt_exists(*it, Constraint::top(), std::move(body));
      return body;
    }
    case AgentKind::Choice: {
      std::vector<RtChoiceArm> arms;
      for (const auto& arm : a->arms) arms.push_back({arm.guard, rt_of(arm.body)});
      return rt_choice(std::move(arms));
    }
    case AgentKind::Now:
      return rt_now(a->c, rt_of(a->subs[0]), rt_of(a->subs[1]));
    case AgentKind::Call:
      return rt_call(a->callee, a->args);
  }
  return rt_skip();
}

inline RtPtr rt_subst(const ConstraintSystem& sys, const RtPtr& a,
                      std::map<std::string, std::string> m,
                      std::size_t& fresh) {
  for (auto it = m.begin(); it != m.end();)
    it = it->first == it->second ? m.erase(it) : std::next(it);
  if (m.empty()) return a;
  switch (a->kind) {
    case AgentKind::Skip:
      return a;
    case AgentKind::Tell:
      return rt_tell(a->c.renamed(sys, m));
    case AgentKind::Par: {
      std::vector<RtPtr> subs;
      for (const auto& s : a->subs) subs.push_back(rt_subst(sys, s, m, fresh));
      return rt_par(std::move(subs));
    }
    case AgentKind::Exists: {
      std::map<std::string, std::string> inner = m;
      inner.erase(a->bound);
      std::string bound = a->bound;
      RtPtr body = a->subs[0];
      for (const auto& [from, to] : inner) {
        (void)from;
        if (to == bound) {
          std::string nb = "#" + std::to_string(++fresh);
          std::size_t unused = 0;
          body = rt_subst(sys, body, {{bound, nb}}, unused);
          bound = nb;
          break;
        }
      }
      Constraint local = a->local.renamed(sys, inner);
      return rt_exists(bound, std::move(local),
                       rt_subst(sys, body, inner, fresh));
    }
    case AgentKind::Choice: {
      std::vector<RtChoiceArm> arms;
      for (const auto& arm : a->arms)
        arms.push_back(
            {arm.guard.renamed(sys, m), rt_subst(sys, arm.body, m, fresh)});
      return rt_choice(std::move(arms));
    }
    case AgentKind::Now:
      return rt_now(a->c.renamed(sys, m), rt_subst(sys, a->subs[0], m, fresh),
                    rt_subst(sys, a->subs[1], m, fresh));
    case AgentKind::Call: {
      std::vector<std::string> args;
      for (const auto& x : a->args) {
        auto it = m.find(x);
        args.push_back(it == m.end() ? x : it->second);
      }
      return rt_call(a->callee, std::move(args));
    }
  }
  return a;
}

inline std::string rt_str(const RtPtr& a) {
  std::ostringstream os;
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
        bool paren = a->subs[i]->kind == AgentKind::Par;
        os << (paren ? "(" : "") << rt_str(a->subs[i]) << (paren ? ")" : "");
      }
      break;
    case AgentKind::Exists:
      os << "exists " << a->bound << " [" << a->local.str() << "] ("
         << rt_str(a->subs[0]) << ")";
      break;
    case AgentKind::Choice:
      os << "choice ";
      for (std::size_t i = 0; i < a->arms.size(); ++i) {
        if (i) os << " [] ";
        os << "ask(" << a->arms[i].guard.str() << ") -> "
           << rt_str(a->arms[i].body);
      }
      os << " end";
      break;
    case AgentKind::Now:
      os << "now " << a->c.str() << " then " << rt_str(a->subs[0]) << " else "
         << rt_str(a->subs[1]);
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

// ── transitions ──────────────────────────────────────────────────────────────

struct UnknownProcessError : std::runtime_error {
  explicit UnknownProcessError(const std::string& name)
      : std::runtime_error("unknown process: " + name) {}
};

struct Config {
  RtPtr agent;
  Constraint store;

  std::string key() const { return rt_str(agent) + " @ " + store.str(); }
};

/// All one-tick successors of a configuration.  An empty result means the
/// configuration is terminal: finished (skip) or suspended.
inline std::vector<Config> step(const Program& prog, const Config& cfg,
                                std::size_t& fresh) {
  const ConstraintSystem& sys = prog.system;
  const RtPtr& a = cfg.agent;
  const Constraint& d = cfg.store;
  if (d.is_false()) return {};

  switch (a->kind) {
    case AgentKind::Skip:
      return {};
    case AgentKind::Tell:
      return {{rt_skip(), merge(sys, d, a->c)}};
    case AgentKind::Choice: {
      std::vector<Config> out;
      for (const auto& arm : a->arms)
        if (entails(sys, d, arm.guard)) out.push_back({arm.body, d});
      return out;  // empty: suspended
    }
    case AgentKind::Now: {
      const RtPtr& branch = entails(sys, d, a->c) ? a->subs[0] : a->subs[1];
      std::vector<Config> inner = step(prog, {branch, d}, fresh);
      if (inner.empty()) return {{branch, d}};  // branch frozen, time passes
      return inner;
    }
    case AgentKind::Par: {
      // Components step synchronously; those that cannot step stay.  At
      // least one must move.
      std::vector<std::vector<Config>> options;
      bool any = false;
      for (const auto& s : a->subs) {
        auto opts = step(prog, {s, d}, fresh);
        if (opts.empty())
          options.push_back({{s, d}});
        else
          any = true, options.push_back(std::move(opts));
      }
      if (!any) return {};
      std::vector<Config> out{{rt_par({}), d}};
      for (const auto& opts : options) {
        std::vector<Config> next;
        for (const auto& acc : out)
          for (const auto& o : opts) {
            Constraint st = merge(sys, acc.store, o.store);
            next.push_back({rt_par({acc.agent, o.agent}), std::move(st)});
          }
        out = std::move(next);
      }
      return out;
    }
    case AgentKind::Exists: {
      // The body runs against its local store extended with the global
      // information about everything except the hidden variable.
      Constraint lstore = merge(sys, a->local, hide(sys, a->bound, d));
      std::vector<Config> inner = step(prog, {a->subs[0], lstore}, fresh);
      std::vector<Config> out;
      for (auto& o : inner) {
        Constraint g = merge(sys, d, hide(sys, a->bound, o.store));
        out.push_back(
            {rt_exists(a->bound, std::move(o.store), o.agent), std::move(g)});
      }
      return out;
    }
    case AgentKind::Call: {
      if (!prog.declares(a->callee)) throw UnknownProcessError(a->callee);
      std::vector<Config> out;
      for (const Declaration* decl : prog.decls_for(a->callee)) {
        if (decl->params.size() != a->args.size()) continue;
        std::map<std::string, std::string> m;
        for (std::size_t i = 0; i < decl->params.size(); ++i)
          m[decl->params[i]] = a->args[i];
        RtPtr body = rt_subst(sys, rt_of(decl->body), std::move(m), fresh);
        out.push_back({std::move(body), d});
      }
      return out;
    }
  }
  return {};
}

// ── bounded runs ─────────────────────────────────────────────────────────────

struct Run {
  std::vector<Constraint> stores;  // one per instant, starting with the input
  bool terminated = false;         // no successors before the bound
};

struct RunSet {
  std::vector<Run> runs;
  bool truncated = false;  // exploration hit the resource cap
};

inline constexpr std::size_t kDefaultRunCap = 10000;

inline RunSet run_bounded(const Program& prog, const Config& init,
                          std::size_t max_steps,
                          std::size_t cap = kDefaultRunCap) {
  RunSet out;
  std::size_t fresh = 0;
  std::size_t visited = 0;

  struct Frame {
    Config cfg;
    std::vector<Constraint> path;
  };
  std::vector<Frame> stack{{init, {init.store}}};
  while (!stack.empty()) {
    if (out.runs.size() >= cap || ++visited > cap * 10) {
      out.truncated = true;
      break;
    }
    Frame fr = std::move(stack.back());
    stack.pop_back();

    std::vector<Config> succs = step(prog, fr.cfg, fresh);
    if (succs.empty()) {
      Run r;
      r.stores = std::move(fr.path);
      r.terminated = true;
      out.runs.push_back(std::move(r));
      continue;
    }
    if (fr.path.size() > max_steps) {
      Run r;
      r.stores = std::move(fr.path);
      r.terminated = false;
      out.runs.push_back(std::move(r));
      continue;
    }
    std::set<std::string> seen;
    for (auto& s : succs) {
      if (!seen.insert(s.key()).second) continue;  // identical successor
      Frame nf;
      nf.path = fr.path;
      nf.path.push_back(s.store);
      nf.cfg = std::move(s);
      stack.push_back(std::move(nf));
    }
  }
  std::sort(out.runs.begin(), out.runs.end(), [](const Run& a, const Run& b) {
    if (a.stores.size() != b.stores.size())
      return a.stores.size() < b.stores.size();
    for (std::size_t i = 0; i < a.stores.size(); ++i)
      if (!(a.stores[i] == b.stores[i])) return a.stores[i] < b.stores[i];
    return a.terminated < b.terminated;
  });
  out.runs.erase(std::unique(out.runs.begin(), out.runs.end(),
                             [](const Run& a, const Run& b) {
                               return a.terminated == b.terminated &&
                                      a.stores == b.stores;
                             }),
                 out.runs.end());
  return out;
}

/// A run [d0..dk] becomes the conditional trace
/// <(true)->d1> <(d1)->d2> ... <(d_{k-1})->dk>, ending with End when the run
/// terminated (the final store replicates) and Cut when the bound intervened.
/// A one-store run becomes the single state <(true)->d0>.
inline Trace run_to_trace(const Run& run) {
  Trace t;
  if (run.stores.size() == 1) {
    t.states.push_back(
        TraceState::cond(Constraint::top(), {}, run.stores[0]));
  } else {
    for (std::size_t i = 1; i < run.stores.size(); ++i) {
      Constraint cond = i == 1 ? Constraint::top() : run.stores[i - 1];
      t.states.push_back(TraceState::cond(std::move(cond), {}, run.stores[i]));
    }
  }
  t.ending = run.terminated ? TraceEnd::End : TraceEnd::Cut;
  return t;
}

}  // namespace tadi
