#include "ppw/analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace ppw {
namespace {

void collect_evals(const Term& t, std::vector<Occurrence>& out) {
  if (t.is_eval()) {
    out.push_back({&t.inner(), false, false, true});
    collect_evals(t.inner(), out);
    return;
  }
  for (const auto& a : t.args()) collect_evals(a, out);
}

struct Graph {
  std::map<PredKey, std::size_t> ids;
  std::vector<PredKey> keys;
  struct Edge {
    std::size_t to;
    bool negative;
  };
  std::vector<std::vector<Edge>> edges;

  std::size_t node(const PredKey& k) {
    auto [it, inserted] = ids.emplace(k, keys.size());
    if (inserted) {
      keys.push_back(k);
      edges.emplace_back();
    }
    return it->second;
  }
};

// Tarjan's algorithm; returns components in reverse topological order of
// the edge direction (sinks first).
std::vector<std::vector<std::size_t>> components(const Graph& g) {
  std::size_t n = g.keys.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& e : g.edges[v]) {
      if (index[e.to] < 0) {
        visit(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack[e.to]) {
        low[v] = std::min(low[v], index[e.to]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return out;
}

std::vector<Stratum> stratify(const Graph& g, const std::vector<Clause>& clauses,
                              const std::vector<std::size_t>& members, std::vector<Diagnostic>& diags) {
  auto comps = components(g);
  std::vector<std::size_t> comp_of(g.keys.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (auto v : comps[c]) comp_of[v] = c;
  }
  std::vector<Stratum> strata(comps.size());
  for (std::size_t v = 0; v < g.keys.size(); ++v) {
    for (const auto& e : g.edges[v]) {
      if (comp_of[e.to] != comp_of[v]) continue;
      strata[comp_of[v]].recursive = true;
      if (e.negative) {
        diags.push_back({Severity::Error,
                         "negation inside a recursive cycle within one time layer involving " +
                             to_string(g.keys[v]),
                         {}});
      }
    }
  }
  for (auto ci : members) {
    const Term& head = clauses[ci].head;
    strata[comp_of[g.ids.at(pred_key(head))]].clauses.push_back(ci);
  }
  // Tarjan emits sinks first; evaluation needs sources first.
  std::reverse(strata.begin(), strata.end());
  std::erase_if(strata, [](const Stratum& s) { return s.clauses.empty(); });
  return strata;
}

}  // namespace

TimeArg time_arg(const Term& atom) {
  TimeArg out;
  if (!atom.is_compound() || atom.args().empty()) return out;
  const Term& last = atom.args().back();
  if (last.is_variable()) {
    out.kind = TimeArg::Kind::Var;
    out.var = last.name();
    return out;
  }
  if (last.kind() == TermKind::Integer) {
    out.kind = TimeArg::Kind::Const;
    out.offset = last.as_int();
    return out;
  }
  if (last.is_arithmetic() && last.name() != sym::times() && last.args()[0].is_variable() &&
      last.args()[1].kind() == TermKind::Integer) {
    out.kind = TimeArg::Kind::Var;
    out.var = last.args()[0].name();
    out.offset = last.name() == sym::plus() ? last.args()[1].as_int() : -last.args()[1].as_int();
    return out;
  }
  out.kind = TimeArg::Kind::Other;
  return out;
}

std::vector<Occurrence> occurrences(const Clause& c) {
  std::vector<Occurrence> out;
  out.push_back({&c.head, true, false, false});
  collect_evals(c.head, out);
  if (c.dist) {
    for (const auto& p : c.dist->params) collect_evals(p, out);
    for (const auto& o : c.dist->outcomes) {
      collect_evals(o.weight, out);
      collect_evals(o.value, out);
    }
  }
  for (const auto& lit : c.body) {
    if (lit.kind != Literal::Kind::Compare) {
      out.push_back({&lit.atom, false, lit.kind == Literal::Kind::Negative, false});
    }
    collect_evals(lit.atom, out);
    collect_evals(lit.rhs, out);
  }
  return out;
}

ProgramAnalysis analyze(const std::vector<Clause>& clauses) {
  ProgramAnalysis out;
  out.dynamic.insert(PredKey{sym::poss(), 2});
  out.dynamic.insert(PredKey{sym::reward(), 2});

  std::vector<std::vector<Occurrence>> occ;
  occ.reserve(clauses.size());
  for (const auto& c : clauses) occ.push_back(occurrences(c));

  // Seeds: clauses that advance time.
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    TimeArg h = time_arg(clauses[i].head);
    if (h.kind != TimeArg::Kind::Var || h.offset <= 0) continue;
    bool anchored = false;
    for (const auto& o : occ[i]) {
      if (o.in_head) continue;
      TimeArg b = time_arg(*o.atom);
      if (b.kind == TimeArg::Kind::Var && b.var == h.var && b.offset < h.offset) {
        out.dynamic.insert(pred_key(*o.atom));
        anchored = true;
      }
    }
    if (anchored) out.dynamic.insert(pred_key(clauses[i].head));
  }

  // Propagate along shared time variables.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      std::set<Symbol> time_vars;
      for (const auto& o : occ[i]) {
        TimeArg t = time_arg(*o.atom);
        if (t.kind == TimeArg::Kind::Var && out.is_dynamic(pred_key(*o.atom))) time_vars.insert(t.var);
      }
      for (const auto& o : occ[i]) {
        TimeArg t = time_arg(*o.atom);
        if (t.kind == TimeArg::Kind::Var && time_vars.count(t.var) != 0) {
          changed |= out.dynamic.insert(pred_key(*o.atom)).second;
        }
      }
    }
  }

  Graph static_graph, dynamic_graph;
  std::vector<std::size_t> static_members, dynamic_members;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const Clause& c = clauses[i];
    PredKey hk = pred_key(c.head);
    bool head_dynamic = out.is_dynamic(hk);
    Graph& g = head_dynamic ? dynamic_graph : static_graph;
    std::size_t head_node = g.node(hk);
    (head_dynamic ? dynamic_members : static_members).push_back(i);
    TimeArg h = time_arg(c.head);
    for (const auto& o : occ[i]) {
      if (o.in_head) continue;
      PredKey bk = pred_key(*o.atom);
      bool body_dynamic = out.is_dynamic(bk);
      if (!head_dynamic) {
        if (body_dynamic) {
          out.diagnostics.push_back({Severity::Error,
                                     "time-independent " + to_string(hk) + " depends on time-indexed " +
                                         to_string(bk),
                                     c.loc});
          continue;
        }
        g.edges[g.node(bk)].push_back({head_node, o.negated});
        continue;
      }
      if (!body_dynamic) continue;  // static facts are complete before layer 0
      TimeArg b = time_arg(*o.atom);
      bool same_layer = true;
      if (h.kind == b.kind && (h.kind == TimeArg::Kind::Const ||
                               (h.kind == TimeArg::Kind::Var && h.var == b.var))) {
        if (b.offset > h.offset) {
          out.diagnostics.push_back(
              {Severity::Error, "clause for " + to_string(hk) + " refers to a later time through " + to_string(bk),
               c.loc});
        }
        same_layer = b.offset == h.offset;
      }
      if (same_layer) dynamic_graph.edges[dynamic_graph.node(bk)].push_back({head_node, o.negated});
    }
  }
  out.static_strata = stratify(static_graph, clauses, static_members, out.diagnostics);
  out.dynamic_strata = stratify(dynamic_graph, clauses, dynamic_members, out.diagnostics);
  return out;
}

}  // namespace ppw
