#include "cosma/session.hpp"

#include <chrono>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace cosma {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool is_on_the_fly_shape(const Ctl& f) {
  return f.kind == Ctl::Kind::AG && f.lhs->is_state_predicate();
}

} // namespace

bool RunReport::has_validation_errors() const {
  for (const auto& s : systems)
    if (has_errors(s.diagnostics)) return true;
  return false;
}

bool RunReport::has_cap_abort() const {
  for (const auto& s : systems)
    if (s.capped) return true;
  return false;
}

bool RunReport::has_deadlock_abort() const {
  for (const auto& s : systems)
    if (!s.deadlock_states.empty()) return true;
  return false;
}

bool RunReport::ok() const {
  if (has_validation_errors() || has_cap_abort() || has_deadlock_abort()) return false;
  for (const auto& c : checks)
    if (!c.has_verdict || !c.expect_matched || !c.error.empty()) return false;
  return true;
}

void RunReport::render(std::ostream& os, bool with_timing) const {
  for (const auto& s : systems) {
    os << "system " << s.system << ": " << s.product_stats.states << " states, "
       << s.product_stats.edges << " edges, " << s.product_stats.deadlocks << " deadlocks, "
       << s.product_stats.fairness_sets << " fairness sets, env alphabet "
       << s.product_stats.env_alphabet_size;
    if (!s.product_stats.complete) os << " (INCOMPLETE: exploration cap hit)";
    if (with_timing) os << "  [" << s.build_millis << " ms]";
    os << "\n";
    for (const auto& d : s.diagnostics)
      os << "  " << (d.severity == Diagnostic::Severity::Error ? "error: " : "warning: ")
         << d.message << "\n";
    for (const auto& dl : s.deadlock_states) os << "  deadlock state: " << dl << "\n";
  }
  for (const auto& c : checks) {
    os << "check " << c.spec.system << (c.spec.fair ? " fair " : " ") << "\"" << c.spec.formula
       << "\": ";
    if (!c.has_verdict) {
      os << "ABORTED (" << c.error << ")";
    } else {
      os << (c.verdict ? "TRUE" : "FALSE");
      if (c.spec.expect) os << (c.expect_matched ? " (as expected)" : " (EXPECTED " + std::string(*c.spec.expect ? "TRUE" : "FALSE") + ")");
    }
    if (c.used_on_the_fly) os << " [on-the-fly, " << c.layers_expanded << " layers]";
    if (with_timing) os << "  [" << c.millis << " ms]";
    os << "\n";
    if (!c.witness_text.empty()) {
      os << (c.verdict ? "witness" : "counterexample")
         << (c.witness_valid ? " (validated):\n" : " (INVALID):\n");
      os << c.witness_text;
    }
  }
}

std::string RunReport::to_json(bool with_timing) const {
  nlohmann::json j;
  j["systems"] = nlohmann::json::array();
  for (const auto& s : systems) {
    nlohmann::json js;
    js["name"] = s.system;
    js["states"] = s.product_stats.states;
    js["edges"] = s.product_stats.edges;
    js["deadlocks"] = s.product_stats.deadlocks;
    js["fairness_sets"] = s.product_stats.fairness_sets;
    js["env_alphabet_size"] = s.product_stats.env_alphabet_size;
    js["complete"] = s.product_stats.complete;
    if (with_timing) js["build_ms"] = s.build_millis;
    js["diagnostics"] = nlohmann::json::array();
    for (const auto& d : s.diagnostics)
      js["diagnostics"].push_back(
          {{"severity", d.severity == Diagnostic::Severity::Error ? "error" : "warning"},
           {"message", d.message}});
    j["systems"].push_back(js);
  }
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc;
    jc["system"] = c.spec.system;
    jc["formula"] = c.spec.formula;
    jc["fair"] = c.spec.fair;
    if (c.has_verdict) jc["verdict"] = c.verdict;
    if (c.spec.expect) jc["expect"] = *c.spec.expect;
    if (!c.error.empty()) jc["error"] = c.error;
    if (!c.witness_text.empty()) {
      jc["witness"] = c.witness_text;
      jc["witness_valid"] = c.witness_valid;
    }
    if (with_timing) jc["ms"] = c.millis;
    j["checks"].push_back(jc);
  }
  j["ok"] = ok();
  return j.dump(2);
}

RunReport run_checks(const ModelFile& m, const std::vector<CheckSpec>& checks,
                     const RunOptions& opts) {
  RunReport report;
  std::map<std::string, std::size_t> sys_report;
  std::map<std::string, System> systems;
  std::map<std::string, ReachabilityGraph> products;

  auto system_for = [&](const std::string& name) -> System& {
    auto it = systems.find(name);
    if (it == systems.end()) {
      it = systems.emplace(name, m.make_system(name)).first;
      SystemReport sr;
      sr.system = name;
      sr.diagnostics = validate_system(it->second);
      sys_report[name] = report.systems.size();
      report.systems.push_back(std::move(sr));
    }
    return it->second;
  };

  auto product_for = [&](const std::string& name) -> ReachabilityGraph& {
    auto it = products.find(name);
    if (it == products.end()) {
      auto t0 = std::chrono::steady_clock::now();
      it = products.emplace(name, build_product(system_for(name), opts.caps)).first;
      SystemReport& sr = report.systems[sys_report[name]];
      sr.build_millis = ms_since(t0);
      sr.product_stats = stats(it->second);
      sr.capped = !it->second.complete;
      if (!opts.allow_deadlock)
        for (std::uint32_t s : it->second.deadlocks)
          sr.deadlock_states.push_back(it->second.state_name(s));
    }
    return it->second;
  };

  for (const CheckSpec& spec : checks) {
    CheckOutcome out;
    out.spec = spec;
    auto t0 = std::chrono::steady_clock::now();
    try {
      System& sys = system_for(spec.system);
      const SystemReport& sr = report.systems[sys_report[spec.system]];
      if (has_errors(sr.diagnostics)) {
        out.error = "system has validation errors";
        report.checks.push_back(std::move(out));
        continue;
      }
      CtlPtr f = parse_ctl(spec.formula);

      if (opts.on_the_fly && !spec.fair && is_on_the_fly_shape(*f)) {
        OnTheFlyResult r = check_on_the_fly(sys, *f->lhs, opts.caps);
        out.used_on_the_fly = true;
        out.layers_expanded = r.layers_expanded;
        if (!r.complete && !r.result.witness) {
          out.error = "exploration cap hit before a verdict";
        } else {
          out.verdict = r.result.holds_at_initial;
          out.has_verdict = true;
          if (r.result.witness && opts.want_witness) {
            out.witness_text = render_trace(r.explored, *r.result.witness);
            out.witness_valid = validate_trace(r.explored, *r.result.witness, false);
          }
        }
      } else {
        ReachabilityGraph& rg = product_for(spec.system);
        const SystemReport& sr2 = report.systems[sys_report[spec.system]];
        if (sr2.capped) {
          out.error = "exploration cap hit";
        } else if (!sr2.deadlock_states.empty()) {
          out.error = "product has deadlock states (use --allow-deadlock)";
        } else {
          CheckOptions copts;
          copts.fair = spec.fair;
          copts.allow_deadlock = opts.allow_deadlock;
          copts.want_witness = opts.want_witness;
          CheckResult r = check(rg, *f, copts);
          out.verdict = r.holds_at_initial;
          out.has_verdict = true;
          if (r.witness) {
            // traces from deadlock-patched graphs index the patched copy
            ReachabilityGraph patched;
            const ReachabilityGraph* view = &rg;
            if (r.deadlocks_patched) {
              patched = with_stutter_loops(rg);
              view = &patched;
            }
            out.witness_text = render_trace(*view, *r.witness);
            out.witness_valid = validate_trace(
                *view, *r.witness, spec.fair && r.witness->kind == Trace::Kind::Lasso);
          }
        }
      }
    } catch (const std::exception& e) {
      out.error = e.what();
      out.has_verdict = false;
    }
    out.millis = ms_since(t0);
    if (out.has_verdict && spec.expect) out.expect_matched = (*spec.expect == out.verdict);
    report.checks.push_back(std::move(out));
  }
  return report;
}

} // namespace cosma
