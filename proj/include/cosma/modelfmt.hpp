#ifndef COSMA_MODELFMT_HPP
#define COSMA_MODELFMT_HPP

#include <optional>
#include <string>
#include <vector>

#include "cosma/csm.hpp"
#include "cosma/product.hpp"

namespace cosma {

struct TemplateDef {
  std::string name;
  std::vector<std::string> params;
  std::string body; // raw text between (and including) the braces
};

struct SystemDef {
  std::string name;
  std::vector<std::string> machine_names;
  std::optional<SymbolSet> declared_env;
};

struct CheckSpec {
  std::string system;
  std::string formula;
  bool fair = false;
  std::optional<bool> expect;
};

// Parsed, fully resolved model file: template instantiations have been
// expanded into concrete machines, and all references checked.
struct ModelFile {
  std::vector<Machine> machines;
  std::vector<TemplateDef> templates;
  std::vector<SystemDef> systems;
  std::vector<CheckSpec> checks;

  const Machine* find_machine(std::string_view name) const;
  const SystemDef* find_system(std::string_view name) const;
  System make_system(std::string_view name) const;
};

ModelFile parse_model(std::string_view text);
ModelFile parse_model_file(const std::string& path);

// Concrete syntax for the resolved model; templates print as their
// instantiated machines. parse(print(m)) is structurally equal to m.
std::string print_model(const ModelFile& m);

// Textual substitution of $param in node names, symbols, and guards.
Machine instantiate(const TemplateDef& tpl, const std::vector<std::string>& args);
Machine instantiate(const TemplateDef& tpl, const std::vector<std::string>& args,
                    const std::string& machine_name);

std::string export_dot(const Machine& m);
std::string export_dot(const ReachabilityGraph& rg);

} // namespace cosma

#endif
