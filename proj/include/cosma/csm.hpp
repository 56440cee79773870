#ifndef COSMA_CSM_HPP
#define COSMA_CSM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cosma/boolform.hpp"

namespace cosma {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string name;
  SymbolSet outputs; // may be empty
};

struct Edge {
  int src;
  int dst;
  FormulaPtr guard;
  // src == dst is an "ear" (may remain in the state); src != dst a transition.
  bool is_ear() const { return src == dst; }
};

struct Clg {
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  int node_index(std::string_view name) const;
  const Node& node(int i) const { return nodes[static_cast<std::size_t>(i)]; }
};

// Throws ModelError on duplicate node names or dangling edge endpoints.
Clg make_clg(std::vector<Node> nodes, std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges);

struct Machine {
  std::string name;
  Clg graph;
  int initial;

  // edge indices of outgoing edges, per node
  std::vector<std::vector<int>> outgoing;
};

Machine make_machine(std::string name, Clg graph, std::string_view initial_node);

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string message;
};

// One node index per machine, in machine-list order.
using GlobalState = std::vector<std::int32_t>;

class System {
public:
  // `declared_env`: optional explicit environment alphabet; validation
  // reports a mismatch against the inferred one.
  static System make(std::vector<Machine> machines,
                     std::optional<SymbolSet> declared_env = std::nullopt);

  const std::vector<Machine>& machines() const { return machines_; }
  const Machine& machine(std::size_t i) const { return machines_[i]; }
  std::size_t size() const { return machines_.size(); }
  int machine_index(std::string_view name) const; // -1 if absent

  const SymbolSet& internal_alphabet() const { return internal_; }
  const SymbolSet& environment_alphabet() const { return environment_; }
  const std::optional<SymbolSet>& declared_environment() const { return declared_env_; }

  // machine index emitting the symbol (first producer if the model is invalid)
  const std::unordered_map<std::uint32_t, std::size_t>& producers() const { return producers_; }

  GlobalState initial_state() const;
  SymbolSet emitted(const GlobalState& g) const;

private:
  std::vector<Machine> machines_;
  SymbolSet internal_, environment_;
  std::optional<SymbolSet> declared_env_;
  std::unordered_map<std::uint32_t, std::size_t> producers_;
  std::vector<std::pair<Symbol, std::vector<std::size_t>>> duplicate_producers_;

  friend std::vector<Diagnostic> validate_system(const System&);
};

std::vector<Diagnostic> validate_system(const System& s);
bool has_errors(const std::vector<Diagnostic>& diags);

// Outgoing edges of `m` at node `at`, with guards restricted by membership in
// `received` for every atom except those in `env_free`, which stay symbolic.
// Pairs whose residual is unsatisfiable are dropped.
std::vector<std::pair<int, FormulaPtr>> enabled_edges(const Machine& m, int at,
                                                      const SymbolSet& received,
                                                      const SymbolSet& env_free);

} // namespace cosma

#endif
