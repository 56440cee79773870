#ifndef COSMA_CTL_HPP
#define COSMA_CTL_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cosma/product.hpp"

namespace cosma {

struct CtlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Ctl;
using CtlPtr = std::shared_ptr<const Ctl>;

// CTL with `in Machine.Node` and `emits sym` state predicates. Sugar (AX, AF,
// AG, AU, EF) is kept in the tree and expanded at check time.
class Ctl {
public:
  enum class Kind {
    True, False, InState, Emits,
    Not, And, Or,
    EX, EG, EU, AX, AF, AG, AU, EF
  };

  Kind kind;
  std::string machine, node; // InState
  std::optional<Symbol> symbol; // Emits
  CtlPtr lhs, rhs;

  static CtlPtr make(Kind k, CtlPtr l = nullptr, CtlPtr r = nullptr);
  static CtlPtr make_in(std::string machine, std::string node);
  static CtlPtr make_emits(Symbol s);

  bool is_state_predicate() const; // no temporal operators
};

// Grammar: ctl := 'AG' ctl | 'AF' ctl | 'AX' ctl | 'EG' ctl | 'EF' ctl
//   | 'EX' ctl | 'A' '[' ctl 'U' ctl ']' | 'E' '[' ctl 'U' ctl ']'
//   | ctl '|' ctl | ctl '&' ctl | '!' ctl | '(' ctl ')'
//   | 'in' '(' IDENT '.' IDENT ')' | 'emits' '(' IDENT ')' | 'true' | 'false'
// Precedence ! > & > |; temporal operators bind tighter than & and |.
CtlPtr parse_ctl(std::string_view text);
std::string print_ctl(const Ctl& f);
inline std::string print_ctl(const CtlPtr& f) { return print_ctl(*f); }

struct Trace {
  enum class Kind { Path, Lasso };
  Kind kind = Kind::Path;
  std::vector<std::uint32_t> prefix; // product-edge indices
  std::vector<std::uint32_t> cycle;  // non-empty iff Lasso
};

struct CheckResult {
  bool holds_at_initial = false;
  DynBitset satisfying;
  bool satisfying_complete = true;
  std::optional<Trace> witness;
  bool deadlocks_patched = false;
};

struct CheckOptions {
  bool fair = false;
  bool allow_deadlock = false; // patch deadlocks with stutter self-loops
  bool want_witness = false;
};

// Full fixpoint labeling; fair=true restricts path quantifiers to weakly
// fair paths (generalized-Büchi membership of every fairness set).
// Throws CtlError on unresolved InState or on deadlocks without
// allow_deadlock, and on incomplete (capped) graphs.
CheckResult check(const ReachabilityGraph& rg, const Ctl& f, const CheckOptions& opts = {});

// States admitting a fair path: those reaching a nontrivial SCC whose
// internal edges cover every fairness set.
DynBitset fair_states(const ReachabilityGraph& rg);

struct OnTheFlyResult {
  CheckResult result;
  ReachabilityGraph explored; // partial product (the BFS frontier reached)
  std::size_t layers_expanded = 0;
  bool complete = true; // false when a cap was hit before a verdict
};

// Evaluates AG p during product BFS; p must be a state predicate. Stops at
// the first violating state with a shortest counterexample path.
OnTheFlyResult check_on_the_fly(const System& s, const Ctl& p, const ProductCaps& caps = {});

// Witness extraction for the supported shapes: failed AG p (shortest path to
// a violating state), failed fair AG AF p (fair lasso inside !p), true EF p
// (shortest path to a p-state). Returns nullopt for other shapes.
std::optional<Trace> witness(const ReachabilityGraph& rg, const Ctl& f,
                             const CheckResult& result, bool fair);

// Copy of `rg` with a stutter self-loop (member of no fairness set) added at
// every deadlock state; witnesses produced under allow_deadlock index this
// patched graph.
ReachabilityGraph with_stutter_loops(const ReachabilityGraph& rg);

// Contiguity, initial anchoring, lasso closure, and (when required) coverage
// of every fairness set by the cycle.
bool validate_trace(const ReachabilityGraph& rg, const Trace& t, bool require_fair_coverage);

std::string render_trace(const ReachabilityGraph& rg, const Trace& t);

} // namespace cosma

#endif
