#ifndef COSMA_TESTS_FIXTURES_HPP
#define COSMA_TESTS_FIXTURES_HPP

#include <string>

#include "cosma/csm.hpp"

namespace fixtures {

using namespace cosma;

// The five-node spontaneous-exit processor: Ni waits for stProc_2, Take and
// Put emit the queue symbols, Process has an unconditional ear plus an
// unconditional exit, Wait holds doneProc_2 until relProc_2 arrives.
inline Machine proc2(const std::string& initial = "Ni") {
  std::vector<Node> nodes = {
      {"Ni", {}},
      {"Take", {Symbol("getInpQ_2")}},
      {"Process", {}},
      {"Put", {Symbol("putOutQ_2")}},
      {"Wait", {Symbol("doneProc_2")}},
  };
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges = {
      {"Ni", "Ni", parse_formula("!stProc_2")},
      {"Ni", "Take", parse_formula("stProc_2")},
      {"Take", "Process", parse_formula("1")},
      {"Process", "Process", parse_formula("1")},
      {"Process", "Put", parse_formula("1")},
      {"Put", "Wait", parse_formula("1")},
      {"Wait", "Wait", parse_formula("!relProc_2")},
      {"Wait", "Ni", parse_formula("relProc_2")},
  };
  return make_machine("Proc_2", make_clg(nodes, edges), initial);
}

// one-shot driver: emits stProc_2 in its initial node, then stays silent
inline Machine starter() {
  std::vector<Node> nodes = {{"s0", {Symbol("stProc_2")}}, {"s1", {}}};
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges = {
      {"s0", "s1", parse_formula("1")},
      {"s1", "s1", parse_formula("1")},
  };
  return make_machine("St", make_clg(nodes, edges), "s0");
}

// single node, ear `1`, no outputs
inline Machine idle(const std::string& name = "Idle") {
  std::vector<Node> nodes = {{"only", {}}};
  std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges = {
      {"only", "only", parse_formula("1")},
  };
  return make_machine(name, make_clg(nodes, edges), "only");
}

} // namespace fixtures

#endif
