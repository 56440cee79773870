#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cosma/casestudy.hpp"
#include "cosma/session.hpp"

namespace py = pybind11;
using namespace cosma;

namespace {

py::dict result_to_dict(const ReachabilityGraph& rg, const CheckResult& r) {
  py::dict d;
  d["holds"] = r.holds_at_initial;
  if (r.witness) {
    d["witness"] = render_trace(rg, *r.witness);
    d["witness_is_lasso"] = r.witness->kind == Trace::Kind::Lasso;
  }
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "explicit-state model checker for Concurrent State Machines";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ModelError>(m, "ModelError");
  py::register_exception<CtlError>(m, "CtlError");

  py::class_<System>(m, "System")
      .def_property_readonly("machine_names",
                             [](const System& s) {
                               std::vector<std::string> out;
                               for (const auto& mm : s.machines()) out.push_back(mm.name);
                               return out;
                             })
      .def_property_readonly("environment_alphabet",
                             [](const System& s) {
                               std::vector<std::string> out;
                               for (Symbol sym : s.environment_alphabet())
                                 out.push_back(sym.name());
                               return out;
                             })
      .def("validate", [](const System& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& d : validate_system(s))
          out.push_back({d.severity == Diagnostic::Severity::Error ? "error" : "warning",
                         d.message});
        return out;
      });

  py::class_<ReachabilityGraph>(m, "ReachabilityGraph")
      .def_property_readonly("num_states",
                             [](const ReachabilityGraph& g) { return g.states.size(); })
      .def_property_readonly("num_edges",
                             [](const ReachabilityGraph& g) { return g.edges.size(); })
      .def_property_readonly("num_deadlocks",
                             [](const ReachabilityGraph& g) { return g.deadlocks.size(); })
      .def_property_readonly("num_fairness_sets",
                             [](const ReachabilityGraph& g) { return g.fairness.size(); })
      .def_property_readonly("complete",
                             [](const ReachabilityGraph& g) { return g.complete; })
      .def("state_name", &ReachabilityGraph::state_name)
      .def("to_dot", [](const ReachabilityGraph& g) { return export_dot(g); })
      .def("check",
           [](const ReachabilityGraph& g, const std::string& formula, bool fair,
              bool allow_deadlock, bool witness) {
             CheckOptions opts;
             opts.fair = fair;
             opts.allow_deadlock = allow_deadlock;
             opts.want_witness = witness;
             CtlPtr f = parse_ctl(formula);
             CheckResult r = check(g, *f, opts);
             if (r.witness && r.deadlocks_patched)
               return result_to_dict(with_stutter_loops(g), r);
             return result_to_dict(g, r);
           },
           py::arg("formula"), py::arg("fair") = false, py::arg("allow_deadlock") = false,
           py::arg("witness") = false);

  py::class_<ModelFile>(m, "Model")
      .def_property_readonly("machine_names",
                             [](const ModelFile& mf) {
                               std::vector<std::string> out;
                               for (const auto& mm : mf.machines) out.push_back(mm.name);
                               return out;
                             })
      .def_property_readonly("system_names",
                             [](const ModelFile& mf) {
                               std::vector<std::string> out;
                               for (const auto& s : mf.systems) out.push_back(s.name);
                               return out;
                             })
      .def("make_system",
           [](const ModelFile& mf, const std::string& name) { return mf.make_system(name); })
      .def("machine_dot",
           [](const ModelFile& mf, const std::string& name) {
             const Machine* mm = mf.find_machine(name);
             if (!mm) throw ModelError("unknown machine '" + name + "'");
             return export_dot(*mm);
           })
      .def("__str__", [](const ModelFile& mf) { return print_model(mf); });

  m.def("parse_model", [](const std::string& text) { return parse_model(text); });
  m.def("parse_model_file", &parse_model_file);
  m.def("build_product",
        [](const System& s, std::size_t max_states, std::size_t max_edges) {
          ProductCaps caps;
          caps.max_states = max_states;
          caps.max_edges = max_edges;
          return build_product(s, caps);
        },
        py::arg("system"), py::arg("max_states") = std::size_t{1} << 20,
        py::arg("max_edges") = std::size_t{1} << 23);
  m.def("normalize_formula",
        [](const std::string& text) { return print_formula(parse_formula(text)); });
  m.def("normalize_ctl", [](const std::string& text) { return print_ctl(parse_ctl(text)); });

  m.def("pipeline_model_text", [] { return casestudy::pipeline_model_text(); });
  m.def("run_paper_session", [](bool witness) {
    RunOptions opts;
    opts.want_witness = witness;
    RunReport report = casestudy::run_paper_session(opts);
    std::ostringstream os;
    report.render(os, false);
    py::dict d;
    d["ok"] = report.ok();
    d["report"] = os.str();
    d["json"] = report.to_json(false);
    return d;
  }, py::arg("witness") = true);
}
