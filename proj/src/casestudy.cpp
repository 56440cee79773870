#include "cosma/casestudy.hpp"

namespace cosma::casestudy {

ModelFile build_pipeline_model() {
  return parse_model(pipeline_model_text() + "\n" + pipeline_checks_text());
}

Machine build_invariant() {
  ModelFile m = build_pipeline_model();
  return *m.find_machine("Invariant");
}

RunOptions default_session_options() {
  RunOptions opts;
  opts.want_witness = true;
  return opts;
}

RunReport run_paper_session(const RunOptions& opts) {
  ModelFile m = build_pipeline_model();
  return run_checks(m, m.checks, opts);
}

} // namespace cosma::casestudy
