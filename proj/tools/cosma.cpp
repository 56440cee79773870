#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cosma/casestudy.hpp"
#include "cosma/session.hpp"

namespace {

// exit-code contract: 0 ok / 1 validation / 2 I-O or parse / 3 resource cap
// / 4 deadlock / 5 internal
enum ExitCode {
  kOk = 0,
  kValidation = 1,
  kIoOrParse = 2,
  kResourceCap = 3,
  kDeadlock = 4,
  kInternal = 5,
};

std::string read_files(const std::vector<std::string>& paths) {
  std::string text;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open '" + p + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text += ss.str();
    text += "\n";
  }
  return text;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

int report_exit(const cosma::RunReport& report) {
  if (report.has_validation_errors()) return kValidation;
  if (report.has_cap_abort()) return kResourceCap;
  if (report.has_deadlock_abort()) return kDeadlock;
  return report.ok() ? kOk : kValidation;
}

int cmd_validate(const std::vector<std::string>& files) {
  cosma::ModelFile m = cosma::parse_model(read_files(files));
  std::size_t errors = 0, warnings = 0;
  for (const auto& sys : m.systems) {
    cosma::System s = m.make_system(sys.name);
    for (const auto& d : cosma::validate_system(s)) {
      bool is_err = d.severity == cosma::Diagnostic::Severity::Error;
      (is_err ? errors : warnings) += 1;
      std::cerr << sys.name << ": " << (is_err ? "error: " : "warning: ") << d.message << "\n";
    }
  }
  std::cout << errors << " errors, " << warnings << " warnings\n";
  return errors ? kValidation : kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cosma - explicit-state model checker for Concurrent State Machines"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string system_name, formula, dot_path, json_path, machine_name;
  bool fair = false, want_witness = false, on_the_fly = false, allow_deadlock = false;
  bool show_stats = false, no_timing = false;
  cosma::ProductCaps caps;

  auto* validate = app.add_subcommand("validate", "Parse a model and report diagnostics");
  validate->add_option("files", files, "model files (*.csm)")->required();

  auto* product = app.add_subcommand("product", "Build the reachability graph of a system");
  product->add_option("files", files, "model files (*.csm)")->required();
  product->add_option("--system", system_name, "system to build")->required();
  product->add_flag("--stats", show_stats, "print state/edge statistics");
  product->add_option("--dot", dot_path, "write the product graph in DOT format");
  product->add_option("--json", json_path, "write a machine-readable stats record");
  product->add_option("--max-states", caps.max_states, "state cap");
  product->add_option("--max-edges", caps.max_edges, "edge cap");

  auto* check = app.add_subcommand("check", "Evaluate CTL formulas against a system");
  check->add_option("files", files, "model files (*.csm, *.checks)")->required();
  check->add_option("--system", system_name, "system to check (with --formula, or as filter)");
  check->add_option("--formula", formula, "CTL formula (default: embedded check lines)");
  check->add_flag("--fair", fair, "restrict path quantifiers to fair paths");
  check->add_flag("--witness", want_witness, "emit witness / counterexample traces");
  check->add_flag("--on-the-fly", on_the_fly,
                  "early-terminating evaluation (top-level AG of a state predicate)");
  check->add_flag("--allow-deadlock", allow_deadlock,
                  "patch deadlock states with stutter self-loops");
  check->add_option("--json", json_path, "write the report as JSON");
  check->add_flag("--no-timing", no_timing, "omit wall times from the report");
  check->add_option("--max-states", caps.max_states, "state cap");
  check->add_option("--max-edges", caps.max_edges, "edge cap");

  auto* dot = app.add_subcommand("dot", "Export a machine as DOT");
  dot->add_option("files", files, "model files (*.csm)")->required();
  dot->add_option("--machine", machine_name, "machine to export")->required();
  dot->add_option("-o,--output", dot_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(files);

    if (product->parsed()) {
      cosma::ModelFile m = cosma::parse_model(read_files(files));
      cosma::System s = m.make_system(system_name);
      auto diags = cosma::validate_system(s);
      for (const auto& d : diags)
        std::cerr << (d.severity == cosma::Diagnostic::Severity::Error ? "error: " : "warning: ")
                  << d.message << "\n";
      if (cosma::has_errors(diags)) return kValidation;
      cosma::ReachabilityGraph rg = cosma::build_product(s, caps);
      cosma::Stats st = cosma::stats(rg);
      if (show_stats || !rg.complete)
        std::cout << "states " << st.states << "\nedges " << st.edges << "\ndeadlocks "
                  << st.deadlocks << "\nfairness_sets " << st.fairness_sets
                  << "\nenv_alphabet " << st.env_alphabet_size << "\ncomplete "
                  << (st.complete ? "yes" : "no") << "\n";
      if (!dot_path.empty()) write_file(dot_path, cosma::export_dot(rg));
      if (!json_path.empty()) {
        std::ostringstream js;
        js << "{\n  \"states\": " << st.states << ",\n  \"edges\": " << st.edges
           << ",\n  \"deadlocks\": " << st.deadlocks << ",\n  \"fairness_sets\": "
           << st.fairness_sets << ",\n  \"env_alphabet_size\": " << st.env_alphabet_size
           << ",\n  \"complete\": " << (st.complete ? "true" : "false") << "\n}\n";
        write_file(json_path, js.str());
      }
      return rg.complete ? kOk : kResourceCap;
    }

    if (check->parsed()) {
      cosma::ModelFile m = cosma::parse_model(read_files(files));
      std::vector<cosma::CheckSpec> specs;
      if (!formula.empty()) {
        if (system_name.empty()) {
          std::cerr << "--formula requires --system\n";
          return kIoOrParse;
        }
        specs.push_back(cosma::CheckSpec{system_name, formula, fair, std::nullopt});
      } else {
        for (const auto& c : m.checks)
          if (system_name.empty() || c.system == system_name) specs.push_back(c);
        if (specs.empty()) {
          std::cerr << "no checks to run\n";
          return kIoOrParse;
        }
      }
      cosma::RunOptions opts;
      opts.want_witness = want_witness;
      opts.on_the_fly = on_the_fly;
      opts.allow_deadlock = allow_deadlock;
      opts.caps = caps;
      cosma::RunReport report = cosma::run_checks(m, specs, opts);
      report.render(std::cout, !no_timing);
      if (!json_path.empty()) write_file(json_path, report.to_json(!no_timing));
      return report_exit(report);
    }

    if (dot->parsed()) {
      cosma::ModelFile m = cosma::parse_model(read_files(files));
      const cosma::Machine* mm = m.find_machine(machine_name);
      if (!mm) {
        std::cerr << "unknown machine '" << machine_name << "'\n";
        return kIoOrParse;
      }
      std::string text = cosma::export_dot(*mm);
      if (dot_path.empty())
        std::cout << text;
      else
        write_file(dot_path, text);
      return kOk;
    }
  } catch (const cosma::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kIoOrParse;
  } catch (const cosma::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoOrParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
