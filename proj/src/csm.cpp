#include "cosma/csm.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace cosma {

int Clg::node_index(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

Clg make_clg(std::vector<Node> nodes,
             std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges) {
  Clg g;
  g.nodes = std::move(nodes);
  std::set<std::string> seen;
  for (const auto& n : g.nodes)
    if (!seen.insert(n.name).second)
      throw ModelError("duplicate node name '" + n.name + "'");
  for (auto& [src, dst, guard] : edges) {
    int si = g.node_index(src);
    int di = g.node_index(dst);
    if (si < 0) throw ModelError("edge source '" + src + "' is not a node");
    if (di < 0) throw ModelError("edge target '" + dst + "' is not a node");
    g.edges.push_back(Edge{si, di, std::move(guard)});
  }
  return g;
}

Machine make_machine(std::string name, Clg graph, std::string_view initial_node) {
  int init = graph.node_index(initial_node);
  if (init < 0)
    throw ModelError("machine '" + name + "': unknown initial node '" +
                     std::string(initial_node) + "'");
  Machine m{std::move(name), std::move(graph), init, {}};
  m.outgoing.resize(m.graph.nodes.size());
  for (std::size_t e = 0; e < m.graph.edges.size(); ++e)
    m.outgoing[static_cast<std::size_t>(m.graph.edges[e].src)].push_back(static_cast<int>(e));
  return m;
}

System System::make(std::vector<Machine> machines, std::optional<SymbolSet> declared_env) {
  if (machines.empty()) throw ModelError("a system needs at least one machine");
  std::set<std::string> names;
  for (const auto& m : machines)
    if (!names.insert(m.name).second)
      throw ModelError("duplicate machine name '" + m.name + "'");

  System s;
  s.machines_ = std::move(machines);
  s.declared_env_ = std::move(declared_env);

  for (std::size_t i = 0; i < s.machines_.size(); ++i) {
    for (const auto& n : s.machines_[i].graph.nodes) {
      for (Symbol sym : n.outputs) {
        s.internal_.insert(sym);
        auto [it, inserted] = s.producers_.try_emplace(sym.id(), i);
        if (!inserted && it->second != i) {
          auto dup = std::find_if(s.duplicate_producers_.begin(), s.duplicate_producers_.end(),
                                  [&](const auto& p) { return p.first == sym; });
          if (dup == s.duplicate_producers_.end()) {
            s.duplicate_producers_.push_back({sym, {it->second, i}});
          } else if (std::find(dup->second.begin(), dup->second.end(), i) == dup->second.end()) {
            dup->second.push_back(i);
          }
        }
      }
    }
  }
  for (const auto& m : s.machines_)
    for (const auto& e : m.graph.edges)
      for (Symbol sym : support(e.guard))
        if (!s.internal_.count(sym)) s.environment_.insert(sym);
  return s;
}

int System::machine_index(std::string_view name) const {
  for (std::size_t i = 0; i < machines_.size(); ++i)
    if (machines_[i].name == name) return static_cast<int>(i);
  return -1;
}

GlobalState System::initial_state() const {
  GlobalState g(machines_.size());
  for (std::size_t i = 0; i < machines_.size(); ++i)
    g[i] = machines_[i].initial;
  return g;
}

SymbolSet System::emitted(const GlobalState& g) const {
  SymbolSet out;
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    const auto& o = machines_[i].graph.node(g[i]).outputs;
    out.insert(o.begin(), o.end());
  }
  return out;
}

std::vector<Diagnostic> validate_system(const System& s) {
  std::vector<Diagnostic> diags;

  for (const auto& [sym, producers] : s.duplicate_producers_) {
    std::string who;
    for (std::size_t i : producers) {
      if (!who.empty()) who += ", ";
      who += s.machine(i).name;
    }
    diags.push_back({Diagnostic::Severity::Error,
                     "duplicate producer of symbol '" + sym.name() + "' (" + who + ")"});
  }

  if (s.declared_environment()) {
    for (Symbol sym : *s.declared_environment())
      if (s.internal_alphabet().count(sym))
        diags.push_back({Diagnostic::Severity::Error,
                         "symbol '" + sym.name() +
                             "' declared as environment but produced inside the system"});
    for (Symbol sym : s.environment_alphabet())
      if (!s.declared_environment()->count(sym))
        diags.push_back({Diagnostic::Severity::Error,
                         "guard symbol '" + sym.name() +
                             "' is not produced and not in the declared environment"});
  }

  // symbols produced but never looked at
  SymbolSet guarded;
  for (const auto& m : s.machines())
    for (const auto& e : m.graph.edges) {
      SymbolSet sup = support(e.guard);
      guarded.insert(sup.begin(), sup.end());
    }
  for (Symbol sym : s.internal_alphabet())
    if (!guarded.count(sym))
      diags.push_back({Diagnostic::Severity::Warning,
                       "symbol '" + sym.name() + "' is produced but never used in a guard"});

  for (const auto& m : s.machines()) {
    // non-total nodes: the machine may block there
    for (std::size_t ni = 0; ni < m.graph.nodes.size(); ++ni) {
      FormulaPtr any = Formula::make_false();
      for (int ei : m.outgoing[ni])
        any = Formula::make_or(any, m.graph.edges[static_cast<std::size_t>(ei)].guard);
      if (!is_tautology(any))
        diags.push_back({Diagnostic::Severity::Warning,
                         "machine '" + m.name + "': node '" + m.graph.nodes[ni].name +
                             "' may block (outgoing guards do not cover all inputs)"});
    }
    // unreachable nodes within the single machine, ignoring guards
    std::vector<bool> seen(m.graph.nodes.size(), false);
    std::queue<int> work;
    work.push(m.initial);
    seen[static_cast<std::size_t>(m.initial)] = true;
    while (!work.empty()) {
      int n = work.front();
      work.pop();
      for (int ei : m.outgoing[static_cast<std::size_t>(n)]) {
        int d = m.graph.edges[static_cast<std::size_t>(ei)].dst;
        if (!seen[static_cast<std::size_t>(d)]) {
          seen[static_cast<std::size_t>(d)] = true;
          work.push(d);
        }
      }
    }
    for (std::size_t ni = 0; ni < m.graph.nodes.size(); ++ni)
      if (!seen[ni])
        diags.push_back({Diagnostic::Severity::Warning,
                         "machine '" + m.name + "': node '" + m.graph.nodes[ni].name +
                             "' is unreachable from the initial node"});
  }
  return diags;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::Error;
  });
}

std::vector<std::pair<int, FormulaPtr>> enabled_edges(const Machine& m, int at,
                                                      const SymbolSet& received,
                                                      const SymbolSet& env_free) {
  if (at < 0 || static_cast<std::size_t>(at) >= m.graph.nodes.size())
    throw ModelError("machine '" + m.name + "': unknown node index");
  std::vector<std::pair<int, FormulaPtr>> out;
  for (int ei : m.outgoing[static_cast<std::size_t>(at)]) {
    const Edge& e = m.graph.edges[static_cast<std::size_t>(ei)];
    std::map<Symbol, bool> fixed;
    for (Symbol sym : support(e.guard))
      if (!env_free.count(sym)) fixed[sym] = received.count(sym) != 0;
    FormulaPtr residual = restrict_formula(e.guard, fixed);
    if (!is_unsatisfiable(residual)) out.push_back({ei, std::move(residual)});
  }
  return out;
}

} // namespace cosma
