#ifndef COSMA_BOOLFORM_HPP
#define COSMA_BOOLFORM_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cosma {

// Interned identifier. Two symbols with the same name share one id, so
// equality and ordering are integer comparisons.
class Symbol {
public:
  explicit Symbol(std::string_view name);

  const std::string& name() const;
  std::uint32_t id() const { return id_; }

  bool operator==(const Symbol&) const = default;
  auto operator<=>(const Symbol&) const = default;

private:
  std::uint32_t id_;
};

using SymbolSet = std::set<Symbol>;

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" +
                           std::to_string(column)),
        line(line), column(column) {}
  int line;
  int column;
};

// Boolean guard over received symbols. Immutable tree; shareable across
// threads. Atoms not in the received set evaluate to false.
class Formula {
public:
  enum class Kind { True, False, Atom, Not, And, Or };

  Kind kind() const { return kind_; }
  Symbol atom() const { return *atom_; }
  const Formula& left() const { return *left_; }
  const Formula& right() const { return *right_; }
  std::shared_ptr<const Formula> left_ptr() const { return left_; }
  std::shared_ptr<const Formula> right_ptr() const { return right_; }

  bool is_const_true() const { return kind_ == Kind::True; }
  bool is_const_false() const { return kind_ == Kind::False; }

  static std::shared_ptr<const Formula> make_true();
  static std::shared_ptr<const Formula> make_false();
  static std::shared_ptr<const Formula> make_atom(Symbol s);
  // Constructors fold constants (unit laws, double negation); the result is
  // equivalent, not canonical.
  static std::shared_ptr<const Formula> make_not(std::shared_ptr<const Formula> f);
  static std::shared_ptr<const Formula> make_and(std::shared_ptr<const Formula> a,
                                                 std::shared_ptr<const Formula> b);
  static std::shared_ptr<const Formula> make_or(std::shared_ptr<const Formula> a,
                                                std::shared_ptr<const Formula> b);

private:
  Formula(Kind k, std::optional<Symbol> a, std::shared_ptr<const Formula> l,
          std::shared_ptr<const Formula> r)
      : kind_(k), atom_(a), left_(std::move(l)), right_(std::move(r)) {}

  Kind kind_;
  std::optional<Symbol> atom_;
  std::shared_ptr<const Formula> left_, right_;
};

using FormulaPtr = std::shared_ptr<const Formula>;

// Grammar: formula := term ('+' term)* ; term := factor ('*' factor)* ;
// factor := '!' factor | '(' formula ')' | '1' | '0' | IDENT.
// `line0` offsets reported error positions (guards embedded in model files).
FormulaPtr parse_formula(std::string_view text, int line0 = 1, int col0 = 1);

std::string print_formula(const Formula& f);
inline std::string print_formula(const FormulaPtr& f) { return print_formula(*f); }

bool eval(const Formula& f, const SymbolSet& present);
FormulaPtr restrict_formula(const FormulaPtr& f, const std::map<Symbol, bool>& fixed);
SymbolSet support(const Formula& f);
bool is_unsatisfiable(const Formula& f);
bool is_tautology(const Formula& f);
// Truth-table equivalence over the union of both supports.
bool equivalent(const Formula& a, const Formula& b);

inline bool eval(const FormulaPtr& f, const SymbolSet& present) { return eval(*f, present); }
inline SymbolSet support(const FormulaPtr& f) { return support(*f); }
inline bool is_unsatisfiable(const FormulaPtr& f) { return is_unsatisfiable(*f); }
inline bool is_tautology(const FormulaPtr& f) { return is_tautology(*f); }

} // namespace cosma

#endif
