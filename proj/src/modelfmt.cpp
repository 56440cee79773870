#include "cosma/modelfmt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cosma/ctl.hpp"

namespace cosma {

namespace {

struct Token {
  enum class Kind { Ident, String, Punct, End };
  Kind kind;
  std::string text;
  int line;
  int col;
  std::size_t offset; // into the source text
};

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip();
    Token t{Token::Kind::End, "", line_, col_, pos_};
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
              text_[pos_] == '$'))
        advance();
      t.kind = Token::Kind::Ident;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (c == '"') {
      advance();
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') advance();
      if (pos_ >= text_.size()) throw ParseError("unterminated string", t.line, t.col);
      t.kind = Token::Kind::String;
      t.text = std::string(text_.substr(start, pos_ - start));
      advance();
      return t;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      advance();
      advance();
      t.kind = Token::Kind::Punct;
      t.text = "->";
      return t;
    }
    advance();
    t.kind = Token::Kind::Punct;
    t.text = std::string(1, c);
    return t;
  }

  std::size_t offset() const { return pos_; }
  std::string_view source() const { return text_; }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class ModelParser {
public:
  explicit ModelParser(std::string_view text) : lex_(text) { bump(); }

  ModelFile parse() {
    ModelFile m;
    while (cur_.kind != Token::Kind::End) {
      if (is_word("machine")) {
        parse_machine_or_instantiation(m);
      } else if (is_word("template")) {
        parse_template(m);
      } else if (is_word("system")) {
        parse_system(m);
      } else if (is_word("check")) {
        parse_check(m);
      } else {
        fail("expected 'machine', 'template', 'system' or 'check'");
      }
    }
    resolve(m);
    return m;
  }

private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " (got '" + cur_.text + "')", cur_.line, cur_.col);
  }

  void bump() { cur_ = lex_.next(); }

  bool is_word(std::string_view w) const {
    return cur_.kind == Token::Kind::Ident && cur_.text == w;
  }

  std::string expect_ident() {
    if (cur_.kind != Token::Kind::Ident) fail("expected identifier");
    std::string s = cur_.text;
    bump();
    return s;
  }

  std::string expect_string() {
    if (cur_.kind != Token::Kind::String) fail("expected quoted string");
    std::string s = cur_.text;
    int line = cur_.line, col = cur_.col;
    bump();
    guard_loc_ = {line, col};
    return s;
  }

  void expect_punct(std::string_view p) {
    if (cur_.kind != Token::Kind::Punct || cur_.text != p)
      fail("expected '" + std::string(p) + "'");
    bump();
  }

  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected '" + std::string(w) + "'");
    bump();
  }

  std::vector<std::string> ident_list() {
    std::vector<std::string> out{expect_ident()};
    while (cur_.kind == Token::Kind::Punct && cur_.text == ",") {
      bump();
      out.push_back(expect_ident());
    }
    return out;
  }

  // body: '{' init/node/edge statements '}', cursor past '{' on entry? No:
  // cursor at '{'.
  std::pair<Clg, std::string> parse_machine_body(const std::string& machine_name) {
    expect_punct("{");
    expect_word("init");
    std::string initial = expect_ident();
    expect_punct(";");

    std::vector<Node> nodes;
    std::vector<std::tuple<std::string, std::string, FormulaPtr>> edges;
    while (!(cur_.kind == Token::Kind::Punct && cur_.text == "}")) {
      if (is_word("node")) {
        bump();
        Node n;
        n.name = expect_ident();
        if (cur_.kind == Token::Kind::Punct && cur_.text == ";") {
          bump();
        } else {
          expect_punct("{");
          if (is_word("emit")) {
            bump();
            for (const std::string& s : ident_list()) n.outputs.insert(Symbol(s));
            expect_punct(";");
          }
          expect_punct("}");
        }
        nodes.push_back(std::move(n));
      } else if (is_word("edge")) {
        bump();
        std::string src = expect_ident();
        expect_punct("->");
        std::string dst = expect_ident();
        expect_word("when");
        std::string guard = expect_string();
        FormulaPtr f = parse_formula(guard, guard_loc_.first, guard_loc_.second + 1);
        expect_punct(";");
        edges.emplace_back(std::move(src), std::move(dst), std::move(f));
      } else {
        fail("expected 'node', 'edge' or '}' in machine '" + machine_name + "'");
      }
    }
    bump(); // '}'
    return {make_clg(std::move(nodes), std::move(edges)), initial};
  }

  void parse_machine_or_instantiation(ModelFile& m) {
    bump(); // 'machine'
    std::string name = expect_ident();
    if (cur_.kind == Token::Kind::Punct && cur_.text == "=") {
      bump();
      std::string tpl = expect_ident();
      expect_punct("(");
      std::vector<std::string> args;
      if (!(cur_.kind == Token::Kind::Punct && cur_.text == ")")) args = ident_or_number_list();
      expect_punct(")");
      expect_punct(";");
      pending_instances_.push_back({name, tpl, args, cur_.line});
      return;
    }
    auto [clg, initial] = parse_machine_body(name);
    add_machine(m, make_machine(name, std::move(clg), initial));
  }

  std::vector<std::string> ident_or_number_list() {
    auto one = [&]() -> std::string {
      if (cur_.kind == Token::Kind::Ident) {
        std::string s = cur_.text;
        bump();
        return s;
      }
      if (cur_.kind == Token::Kind::Punct && std::isdigit(static_cast<unsigned char>(cur_.text[0]))) {
        std::string s = cur_.text;
        bump();
        // glue consecutive digits lexed as single punct chars
        while (cur_.kind == Token::Kind::Punct &&
               std::isdigit(static_cast<unsigned char>(cur_.text[0]))) {
          s += cur_.text;
          bump();
        }
        return s;
      }
      fail("expected template argument");
    };
    std::vector<std::string> out{one()};
    while (cur_.kind == Token::Kind::Punct && cur_.text == ",") {
      bump();
      out.push_back(one());
    }
    return out;
  }

  void parse_template(ModelFile& m) {
    bump(); // 'template'
    TemplateDef t;
    t.name = expect_ident();
    expect_punct("(");
    t.params = ident_list();
    expect_punct(")");
    if (!(cur_.kind == Token::Kind::Punct && cur_.text == "{")) fail("expected '{'");
    // capture the raw body text up to the matching brace
    std::size_t start = cur_.offset;
    int depth = 0;
    std::size_t end = start;
    std::string_view src = lex_.source();
    for (std::size_t p = start; p < src.size(); ++p) {
      if (src[p] == '#') {
        while (p < src.size() && src[p] != '\n') ++p;
        if (p >= src.size()) break;
        continue;
      }
      if (src[p] == '"') {
        ++p;
        while (p < src.size() && src[p] != '"') ++p;
        continue;
      }
      if (src[p] == '{') ++depth;
      if (src[p] == '}') {
        --depth;
        if (depth == 0) {
          end = p + 1;
          break;
        }
      }
    }
    if (end == start) fail("unterminated template body");
    t.body = std::string(src.substr(start, end - start));
    // re-sync the lexer past the body
    while (cur_.kind != Token::Kind::End && cur_.offset < end) bump();
    for (const auto& other : m.templates)
      if (other.name == t.name)
        throw ParseError("duplicate template '" + t.name + "'", cur_.line, cur_.col);
    m.templates.push_back(std::move(t));
  }

  void parse_system(ModelFile& m) {
    bump(); // 'system'
    SystemDef s;
    s.name = expect_ident();
    expect_punct("{");
    while (!(cur_.kind == Token::Kind::Punct && cur_.text == "}")) {
      if (is_word("use")) {
        bump();
        for (auto& n : ident_list()) s.machine_names.push_back(std::move(n));
        expect_punct(";");
      } else if (is_word("env")) {
        bump();
        if (!s.declared_env) s.declared_env = SymbolSet{};
        for (const auto& n : ident_list()) s.declared_env->insert(Symbol(n));
        expect_punct(";");
      } else {
        fail("expected 'use', 'env' or '}'");
      }
    }
    bump();
    for (const auto& other : m.systems)
      if (other.name == s.name)
        throw ParseError("duplicate system '" + s.name + "'", cur_.line, cur_.col);
    m.systems.push_back(std::move(s));
  }

  void parse_check(ModelFile& m) {
    bump(); // 'check'
    CheckSpec c;
    c.system = expect_ident();
    if (is_word("fair")) {
      c.fair = true;
      bump();
    }
    c.formula = expect_string();
    parse_ctl(c.formula); // syntax check now, with a location-free error
    if (is_word("expect")) {
      bump();
      if (is_word("TRUE")) {
        c.expect = true;
      } else if (is_word("FALSE")) {
        c.expect = false;
      } else {
        fail("expected TRUE or FALSE");
      }
      bump();
    }
    expect_punct(";");
    m.checks.push_back(std::move(c));
  }

  void add_machine(ModelFile& m, Machine machine) {
    if (m.find_machine(machine.name))
      throw ParseError("duplicate machine '" + machine.name + "'", cur_.line, cur_.col);
    m.machines.push_back(std::move(machine));
  }

  void resolve(ModelFile& m) {
    for (const auto& inst : pending_instances_) {
      const TemplateDef* tpl = nullptr;
      for (const auto& t : m.templates)
        if (t.name == inst.tpl) tpl = &t;
      if (!tpl)
        throw ParseError("unknown template '" + inst.tpl + "'", inst.line, 1);
      add_machine(m, instantiate(*tpl, inst.args, inst.name));
    }
    for (const auto& s : m.systems)
      for (const auto& name : s.machine_names)
        if (!m.find_machine(name))
          throw ParseError("system '" + s.name + "' uses unknown machine '" + name + "'", 1, 1);
    for (const auto& c : m.checks)
      if (!m.find_system(c.system))
        throw ParseError("check references unknown system '" + c.system + "'", 1, 1);
  }

  struct PendingInstance {
    std::string name;
    std::string tpl;
    std::vector<std::string> args;
    int line;
  };

  Lexer lex_;
  Token cur_{};
  std::pair<int, int> guard_loc_{1, 1};
  std::vector<PendingInstance> pending_instances_;
};

std::string substitute(const std::string& body, const std::vector<std::string>& params,
                       const std::vector<std::string>& args) {
  // longest parameter first, so $ab is not clobbered by $a
  std::vector<std::size_t> order(params.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return params[a].size() > params[b].size(); });
  std::string out = body;
  for (std::size_t i : order) {
    std::string from = "$" + params[i];
    std::size_t pos = 0;
    while ((pos = out.find(from, pos)) != std::string::npos) {
      out.replace(pos, from.size(), args[i]);
      pos += args[i].size();
    }
  }
  return out;
}

} // namespace

const Machine* ModelFile::find_machine(std::string_view name) const {
  for (const auto& m : machines)
    if (m.name == name) return &m;
  return nullptr;
}

const SystemDef* ModelFile::find_system(std::string_view name) const {
  for (const auto& s : systems)
    if (s.name == name) return &s;
  return nullptr;
}

System ModelFile::make_system(std::string_view name) const {
  const SystemDef* def = find_system(name);
  if (!def) throw ModelError("unknown system '" + std::string(name) + "'");
  std::vector<Machine> ms;
  for (const auto& n : def->machine_names) ms.push_back(*find_machine(n));
  return System::make(std::move(ms), def->declared_env);
}

ModelFile parse_model(std::string_view text) { return ModelParser(text).parse(); }

ModelFile parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

Machine instantiate(const TemplateDef& tpl, const std::vector<std::string>& args,
                    const std::string& machine_name) {
  if (args.size() != tpl.params.size())
    throw ModelError("template '" + tpl.name + "' expects " +
                     std::to_string(tpl.params.size()) + " argument(s), got " +
                     std::to_string(args.size()));
  std::string text = "machine " + machine_name + " " + substitute(tpl.body, tpl.params, args);
  ModelFile m = parse_model(text);
  return std::move(m.machines.at(0));
}

Machine instantiate(const TemplateDef& tpl, const std::vector<std::string>& args) {
  std::string name = tpl.name;
  for (const auto& a : args) name += "_" + a;
  return instantiate(tpl, args, name);
}

namespace {

void print_machine(const Machine& m, std::string& out) {
  out += "machine " + m.name + " {\n";
  out += "  init " + m.graph.node(m.initial).name + ";\n";
  for (const auto& n : m.graph.nodes) {
    out += "  node " + n.name;
    if (n.outputs.empty()) {
      out += " {}\n";
    } else {
      out += " { emit ";
      bool first = true;
      for (Symbol s : n.outputs) {
        if (!first) out += ", ";
        first = false;
        out += s.name();
      }
      out += "; }\n";
    }
  }
  for (const auto& e : m.graph.edges)
    out += "  edge " + m.graph.node(e.src).name + " -> " + m.graph.node(e.dst).name +
           " when \"" + print_formula(e.guard) + "\";\n";
  out += "}\n";
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

} // namespace

std::string print_model(const ModelFile& m) {
  std::string out;
  for (const auto& machine : m.machines) {
    print_machine(machine, out);
    out += "\n";
  }
  for (const auto& s : m.systems) {
    out += "system " + s.name + " {\n  use ";
    for (std::size_t i = 0; i < s.machine_names.size(); ++i) {
      if (i) out += ", ";
      out += s.machine_names[i];
    }
    out += ";\n";
    if (s.declared_env) {
      out += "  env ";
      bool first = true;
      for (Symbol sym : *s.declared_env) {
        if (!first) out += ", ";
        first = false;
        out += sym.name();
      }
      out += ";\n";
    }
    out += "}\n\n";
  }
  for (const auto& c : m.checks) {
    out += "check " + c.system;
    if (c.fair) out += " fair";
    out += " \"" + c.formula + "\"";
    if (c.expect) out += std::string(" expect ") + (*c.expect ? "TRUE" : "FALSE");
    out += ";\n";
  }
  return out;
}

std::string export_dot(const Machine& m) {
  std::string out = "digraph \"" + dot_escape(m.name) + "\" {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < m.graph.nodes.size(); ++i) {
    const Node& n = m.graph.nodes[i];
    std::string label = n.name;
    if (!n.outputs.empty()) {
      label += "\\n{";
      bool first = true;
      for (Symbol s : n.outputs) {
        if (!first) label += ",";
        first = false;
        label += s.name();
      }
      label += "}";
    }
    out += "  n" + std::to_string(i) + " [label=\"" + dot_escape(label) + "\", shape=box, style=rounded";
    if (static_cast<int>(i) == m.initial) out += ", peripheries=2";
    out += "];\n";
  }
  for (const auto& e : m.graph.edges)
    out += "  n" + std::to_string(e.src) + " -> n" + std::to_string(e.dst) + " [label=\"" +
           dot_escape(print_formula(e.guard)) + "\"];\n";
  out += "}\n";
  return out;
}

std::string export_dot(const ReachabilityGraph& rg) {
  std::string out = "digraph product {\n";
  for (std::uint32_t s = 0; s < rg.states.size(); ++s) {
    out += "  s" + std::to_string(s) + " [label=\"" + dot_escape(rg.state_name(s)) + "\"";
    if (s == rg.initial) out += ", peripheries=2";
    out += "];\n";
  }
  for (const auto& e : rg.edges)
    out += "  s" + std::to_string(e.src) + " -> s" + std::to_string(e.dst) + " [label=\"" +
           dot_escape(print_formula(e.residual)) + "\"];\n";
  out += "}\n";
  return out;
}

} // namespace cosma
