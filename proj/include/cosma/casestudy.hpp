#ifndef COSMA_CASESTUDY_HPP
#define COSMA_CASESTUDY_HPP

#include "cosma/modelfmt.hpp"
#include "cosma/session.hpp"

namespace cosma::casestudy {

// Text of models/pipeline.csm / models/pipeline.checks, compiled in so the
// session is runnable without locating the files on disk.
const std::string& pipeline_model_text();
const std::string& pipeline_checks_text();

// The 21-machine pipeline plus the Invariant observer.
ModelFile build_pipeline_model();

// The token-counting observer alone (silent; s0..s3 plus absorbing Error).
Machine build_invariant();

RunOptions default_session_options();

// Builds the observed product and evaluates the verification session:
// safety (Error unreachable), both fair liveness formulas, mutual
// exclusion, and the one-message sanity check.
RunReport run_paper_session(const RunOptions& opts = default_session_options());

} // namespace cosma::casestudy

#endif
