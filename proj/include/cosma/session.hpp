#ifndef COSMA_SESSION_HPP
#define COSMA_SESSION_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cosma/ctl.hpp"
#include "cosma/modelfmt.hpp"

namespace cosma {

struct RunOptions {
  bool want_witness = false;
  bool on_the_fly = false; // only valid for top-level AG of a state predicate
  bool allow_deadlock = false;
  ProductCaps caps;
  bool collect_stats = true;
};

struct CheckOutcome {
  CheckSpec spec;
  bool verdict = false;
  bool has_verdict = false;    // false when the run aborted (cap, deadlock)
  bool expect_matched = true;  // vacuously true without an expect annotation
  double millis = 0.0;
  std::string error;           // aborts and evaluation errors
  std::string witness_text;
  bool witness_valid = false;
  bool used_on_the_fly = false;
  std::size_t layers_expanded = 0;
};

struct SystemReport {
  std::string system;
  Stats product_stats;
  std::vector<Diagnostic> diagnostics;
  double build_millis = 0.0;
  bool capped = false;
  std::vector<std::string> deadlock_states; // nonempty without allow_deadlock
};

struct RunReport {
  std::vector<SystemReport> systems;
  std::vector<CheckOutcome> checks;

  bool has_validation_errors() const;
  bool has_cap_abort() const;
  bool has_deadlock_abort() const;
  // all verdicts produced and matching their expect annotations, no errors
  bool ok() const;

  // `with_timing=false` yields byte-identical output across runs
  void render(std::ostream& os, bool with_timing) const;
  std::string to_json(bool with_timing) const;
};

// Runs `checks` against the systems of `m`; products are built once per
// system and reused across checks.
RunReport run_checks(const ModelFile& m, const std::vector<CheckSpec>& checks,
                     const RunOptions& opts = {});

} // namespace cosma

#endif
