#ifndef COSMA_PRODUCT_HPP
#define COSMA_PRODUCT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cosma/bitset.hpp"
#include "cosma/csm.hpp"

namespace cosma {

struct ProductEdge {
  std::uint32_t src;
  std::uint32_t dst;
  FormulaPtr residual;               // over the environment alphabet only
  std::vector<std::int32_t> choices; // per-machine edge index (ear or transition)
};

// Weak fairness per component transition: a fair path traverses a member of
// every fairness set infinitely often. An edge is a member of the set owned
// by (machine, edge) iff that transition is taken by the edge, or is not
// enabled at the edge's source under the edge's residual.
struct FairnessSet {
  std::uint32_t machine;
  std::int32_t machine_edge; // index into machine's edge list; never an ear
};

struct ReachabilityGraph {
  System system;
  std::vector<GlobalState> states;
  std::uint32_t initial = 0;
  std::vector<ProductEdge> edges;
  std::vector<std::uint32_t> deadlocks;
  std::vector<FairnessSet> fairness;
  // edge_fairness[e].test(k): edge e is a member of fairness set k
  std::vector<DynBitset> edge_fairness;
  bool complete = true; // false when an exploration cap was hit

  std::vector<std::vector<std::uint32_t>> out_edges; // per state
  std::vector<std::vector<std::uint32_t>> in_edges;

  std::string state_name(std::uint32_t s) const;
  // edge indices of fairness set k (derived from edge_fairness)
  std::vector<std::uint32_t> fairness_members(std::size_t k) const;
};

struct ProductCaps {
  std::size_t max_states = 1u << 20;
  std::size_t max_edges = 1u << 23;
};

struct Stats {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t deadlocks = 0;
  std::size_t fairness_sets = 0;
  std::size_t env_alphabet_size = 0;
  bool complete = true;
};

// All product edges out of `g`: one per surviving tuple of per-machine
// enabled edges, with the tuple residual conjunction as label. Void tuples
// (unsatisfiable conjunction) are pruned incrementally.
std::vector<ProductEdge> successors(const System& s, const GlobalState& g);

// BFS worklist closure from the initial vector; deterministic indices in
// first-discovery order. Returns with complete=false when a cap is hit.
ReachabilityGraph build_product(const System& s, const ProductCaps& caps = {});

Stats stats(const ReachabilityGraph& rg);

// Appends a silent observer machine; rejects observers with outputs.
System add_observer(const System& s, Machine observer);

} // namespace cosma

#endif
