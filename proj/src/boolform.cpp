#include "cosma/boolform.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <unordered_map>

namespace cosma {

namespace {

struct Interner {
  std::mutex mu;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string> names;
};

Interner& interner() {
  static Interner it;
  return it;
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

} // namespace

Symbol::Symbol(std::string_view name) {
  if (!valid_identifier(name))
    throw std::invalid_argument("invalid symbol name: '" + std::string(name) + "'");
  auto& it = interner();
  std::lock_guard lock(it.mu);
  auto [pos, inserted] = it.ids.try_emplace(std::string(name),
                                            static_cast<std::uint32_t>(it.names.size()));
  if (inserted) it.names.push_back(pos->first);
  id_ = pos->second;
}

const std::string& Symbol::name() const {
  auto& it = interner();
  std::lock_guard lock(it.mu);
  return it.names[id_];
}

FormulaPtr Formula::make_true() {
  static const FormulaPtr t(new Formula(Kind::True, std::nullopt, nullptr, nullptr));
  return t;
}

FormulaPtr Formula::make_false() {
  static const FormulaPtr f(new Formula(Kind::False, std::nullopt, nullptr, nullptr));
  return f;
}

FormulaPtr Formula::make_atom(Symbol s) {
  return FormulaPtr(new Formula(Kind::Atom, s, nullptr, nullptr));
}

FormulaPtr Formula::make_not(FormulaPtr f) {
  switch (f->kind()) {
    case Kind::True: return make_false();
    case Kind::False: return make_true();
    case Kind::Not: return f->left_ptr();
    default: return FormulaPtr(new Formula(Kind::Not, std::nullopt, std::move(f), nullptr));
  }
}

FormulaPtr Formula::make_and(FormulaPtr a, FormulaPtr b) {
  if (a->is_const_false() || b->is_const_false()) return make_false();
  if (a->is_const_true()) return b;
  if (b->is_const_true()) return a;
  if (a == b) return a;
  return FormulaPtr(new Formula(Kind::And, std::nullopt, std::move(a), std::move(b)));
}

FormulaPtr Formula::make_or(FormulaPtr a, FormulaPtr b) {
  if (a->is_const_true() || b->is_const_true()) return make_true();
  if (a->is_const_false()) return b;
  if (b->is_const_false()) return a;
  if (a == b) return a;
  return FormulaPtr(new Formula(Kind::Or, std::nullopt, std::move(a), std::move(b)));
}

namespace {

class FormulaParser {
public:
  FormulaParser(std::string_view text, int line, int col)
      : text_(text), line_(line), col_(col) {}

  FormulaPtr parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty formula");
    FormulaPtr f = parse_or();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing input");
    return f;
  }

private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance();
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      advance();
      return true;
    }
    return false;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (eat('+')) f = Formula::make_or(f, parse_and());
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_factor();
    while (eat('*')) f = Formula::make_and(f, parse_factor());
    return f;
  }

  FormulaPtr parse_factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected factor");
    char c = text_[pos_];
    if (c == '!') {
      advance();
      return Formula::make_not(parse_factor());
    }
    if (c == '(') {
      advance();
      FormulaPtr f = parse_or();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    if (c == '1') {
      advance();
      return Formula::make_true();
    }
    if (c == '0') {
      advance();
      return Formula::make_false();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      return Formula::make_atom(Symbol(text_.substr(start, pos_ - start)));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col_;
};

void print_rec(const Formula& f, std::string& out, int parent_prec) {
  // precedence: ! (3) > * (2) > + (1)
  switch (f.kind()) {
    case Formula::Kind::True: out += '1'; return;
    case Formula::Kind::False: out += '0'; return;
    case Formula::Kind::Atom: out += f.atom().name(); return;
    case Formula::Kind::Not:
      out += '!';
      print_rec(f.left(), out, 3);
      return;
    case Formula::Kind::And: {
      bool paren = parent_prec > 2;
      if (paren) out += '(';
      print_rec(f.left(), out, 2);
      out += '*';
      print_rec(f.right(), out, 2);
      if (paren) out += ')';
      return;
    }
    case Formula::Kind::Or: {
      bool paren = parent_prec > 1;
      if (paren) out += '(';
      print_rec(f.left(), out, 1);
      out += '+';
      print_rec(f.right(), out, 1);
      if (paren) out += ')';
      return;
    }
  }
}

void collect_support(const Formula& f, SymbolSet& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom: out.insert(f.atom()); return;
    case Formula::Kind::Not: collect_support(f.left(), out); return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      collect_support(f.left(), out);
      collect_support(f.right(), out);
      return;
    default: return;
  }
}

// Is any/every assignment of `atoms` satisfying? Exhaustive over the support;
// guard supports are small by construction.
bool exists_assignment(const Formula& f, const std::vector<Symbol>& atoms, bool target) {
  std::uint64_t n = 1ull << atoms.size();
  SymbolSet present;
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    present.clear();
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (mask & (1ull << i)) present.insert(atoms[i]);
    if (eval(f, present) == target) return true;
  }
  return false;
}

} // namespace

FormulaPtr parse_formula(std::string_view text, int line0, int col0) {
  return FormulaParser(text, line0, col0).parse();
}

std::string print_formula(const Formula& f) {
  std::string out;
  print_rec(f, out, 0);
  return out;
}

bool eval(const Formula& f, const SymbolSet& present) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return present.count(f.atom()) != 0;
    case Formula::Kind::Not: return !eval(f.left(), present);
    case Formula::Kind::And: return eval(f.left(), present) && eval(f.right(), present);
    case Formula::Kind::Or: return eval(f.left(), present) || eval(f.right(), present);
  }
  return false;
}

FormulaPtr restrict_formula(const FormulaPtr& f, const std::map<Symbol, bool>& fixed) {
  switch (f->kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return f;
    case Formula::Kind::Atom: {
      auto it = fixed.find(f->atom());
      if (it == fixed.end()) return f;
      return it->second ? Formula::make_true() : Formula::make_false();
    }
    case Formula::Kind::Not:
      return Formula::make_not(restrict_formula(f->left_ptr(), fixed));
    case Formula::Kind::And:
      return Formula::make_and(restrict_formula(f->left_ptr(), fixed),
                               restrict_formula(f->right_ptr(), fixed));
    case Formula::Kind::Or:
      return Formula::make_or(restrict_formula(f->left_ptr(), fixed),
                              restrict_formula(f->right_ptr(), fixed));
  }
  return f;
}

SymbolSet support(const Formula& f) {
  SymbolSet out;
  collect_support(f, out);
  return out;
}

bool is_unsatisfiable(const Formula& f) {
  SymbolSet s = support(f);
  std::vector<Symbol> atoms(s.begin(), s.end());
  return !exists_assignment(f, atoms, true);
}

bool is_tautology(const Formula& f) {
  SymbolSet s = support(f);
  std::vector<Symbol> atoms(s.begin(), s.end());
  return !exists_assignment(f, atoms, false);
}

bool equivalent(const Formula& a, const Formula& b) {
  SymbolSet s = support(a);
  SymbolSet sb = support(b);
  s.insert(sb.begin(), sb.end());
  std::vector<Symbol> atoms(s.begin(), s.end());
  std::uint64_t n = 1ull << atoms.size();
  SymbolSet present;
  for (std::uint64_t mask = 0; mask < n; ++mask) {
    present.clear();
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (mask & (1ull << i)) present.insert(atoms[i]);
    if (eval(a, present) != eval(b, present)) return false;
  }
  return true;
}

} // namespace cosma
