#include "cosma/product.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace cosma {

namespace {

struct StateHash {
  std::size_t operator()(const GlobalState& g) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (auto v : g) h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ull;
    return h;
  }
};

using Candidates = std::vector<std::vector<std::pair<int, FormulaPtr>>>;

Candidates candidates_at(const System& s, const GlobalState& g) {
  SymbolSet received = s.emitted(g);
  Candidates cand(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    cand[i] = enabled_edges(s.machine(i), g[i], received, s.environment_alphabet());
  return cand;
}

void enumerate_tuples(const System& s, const GlobalState& g, const Candidates& cand,
                      std::size_t i, FormulaPtr conj, std::vector<std::int32_t>& choices,
                      std::vector<ProductEdge>& out) {
  if (i == s.size()) {
    GlobalState dst(s.size());
    for (std::size_t m = 0; m < s.size(); ++m)
      dst[m] = s.machine(m).graph.edges[static_cast<std::size_t>(choices[m])].dst;
    out.push_back(ProductEdge{0, 0, conj, choices});
    (void)g;
    return;
  }
  for (const auto& [ei, residual] : cand[i]) {
    FormulaPtr next = Formula::make_and(conj, residual);
    if (is_unsatisfiable(next)) continue; // void subtree
    choices[i] = ei;
    enumerate_tuples(s, g, cand, i + 1, next, choices, out);
  }
}

std::vector<ProductEdge> successors_impl(const System& s, const GlobalState& g,
                                         const Candidates& cand) {
  std::vector<ProductEdge> out;
  std::vector<std::int32_t> choices(s.size(), -1);
  enumerate_tuples(s, g, cand, 0, Formula::make_true(), choices, out);
  return out;
}

} // namespace

std::vector<ProductEdge> successors(const System& s, const GlobalState& g) {
  return successors_impl(s, g, candidates_at(s, g));
}

ReachabilityGraph build_product(const System& s, const ProductCaps& caps) {
  ReachabilityGraph rg;
  rg.system = s;

  // fairness set per component transition (ears excluded), in machine order
  std::vector<std::unordered_map<int, std::size_t>> set_index(s.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const auto& edges = s.machine(m).graph.edges;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].is_ear()) continue;
      set_index[m][static_cast<int>(e)] = rg.fairness.size();
      rg.fairness.push_back(FairnessSet{static_cast<std::uint32_t>(m), static_cast<std::int32_t>(e)});
    }
  }
  const std::size_t nsets = rg.fairness.size();

  std::unordered_map<GlobalState, std::uint32_t, StateHash> index;
  auto intern = [&](const GlobalState& g) {
    auto [it, inserted] = index.try_emplace(g, static_cast<std::uint32_t>(rg.states.size()));
    if (inserted) rg.states.push_back(g);
    return std::pair{it->second, inserted};
  };

  std::deque<std::uint32_t> work;
  rg.initial = intern(s.initial_state()).first;
  work.push_back(rg.initial);
  std::size_t expanded = 0;

  while (!work.empty()) {
    std::uint32_t si = work.front();
    work.pop_front();
    GlobalState g = rg.states[si];
    Candidates cand = candidates_at(s, g);
    std::vector<ProductEdge> succ = successors_impl(s, g, cand);
    if (succ.empty()) rg.deadlocks.push_back(si);

    for (ProductEdge& pe : succ) {
      if (rg.edges.size() >= caps.max_edges) {
        rg.complete = false;
        break;
      }
      GlobalState dst(s.size());
      for (std::size_t m = 0; m < s.size(); ++m)
        dst[m] = s.machine(m).graph.edges[static_cast<std::size_t>(pe.choices[m])].dst;
      auto [di, fresh] = intern(dst);
      if (fresh) {
        if (rg.states.size() > caps.max_states) {
          rg.complete = false;
          rg.states.pop_back();
          index.erase(dst);
          continue;
        }
        work.push_back(di);
      }
      pe.src = si;
      pe.dst = di;

      DynBitset bits(nsets);
      for (std::size_t m = 0; m < s.size(); ++m) {
        const auto& medges = s.machine(m).graph.edges;
        for (const auto& [ei, k] : set_index[m]) {
          if (pe.choices[m] == ei) {
            bits.set(k);
            continue;
          }
          if (medges[static_cast<std::size_t>(ei)].src != g[m]) {
            bits.set(k); // not an outgoing edge here, hence not enabled
            continue;
          }
          auto it = std::find_if(cand[m].begin(), cand[m].end(),
                                 [&](const auto& p) { return p.first == ei; });
          if (it == cand[m].end()) {
            bits.set(k); // residual unsatisfiable at this state
            continue;
          }
          if (is_unsatisfiable(Formula::make_and(it->second, pe.residual)))
            bits.set(k); // disabled under this edge's environment condition
        }
      }
      rg.edge_fairness.push_back(std::move(bits));
      rg.edges.push_back(std::move(pe));
    }
    ++expanded;
    if (!rg.complete) break;
  }

  rg.out_edges.assign(rg.states.size(), {});
  rg.in_edges.assign(rg.states.size(), {});
  for (std::size_t e = 0; e < rg.edges.size(); ++e) {
    rg.out_edges[rg.edges[e].src].push_back(static_cast<std::uint32_t>(e));
    rg.in_edges[rg.edges[e].dst].push_back(static_cast<std::uint32_t>(e));
  }
  return rg;
}

std::string ReachabilityGraph::state_name(std::uint32_t s) const {
  std::string out = "(";
  const GlobalState& g = states[s];
  for (std::size_t m = 0; m < system.size(); ++m) {
    if (m) out += ",";
    out += system.machine(m).graph.node(g[m]).name;
  }
  out += ")";
  return out;
}

std::vector<std::uint32_t> ReachabilityGraph::fairness_members(std::size_t k) const {
  std::vector<std::uint32_t> out;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edge_fairness[e].test(k)) out.push_back(static_cast<std::uint32_t>(e));
  return out;
}

Stats stats(const ReachabilityGraph& rg) {
  return Stats{rg.states.size(),
               rg.edges.size(),
               rg.deadlocks.size(),
               rg.fairness.size(),
               rg.system.environment_alphabet().size(),
               rg.complete};
}

System add_observer(const System& s, Machine observer) {
  for (const auto& n : observer.graph.nodes)
    if (!n.outputs.empty())
      throw ModelError("observer '" + observer.name + "' must not emit symbols (node '" +
                       n.name + "' emits '" + n.outputs.begin()->name() + "')");
  std::vector<Machine> machines = s.machines();
  machines.push_back(std::move(observer));
  return System::make(std::move(machines), s.declared_environment());
}

} // namespace cosma
