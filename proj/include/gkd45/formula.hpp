#ifndef GKD45_FORMULA_HPP
#define GKD45_FORMULA_HPP

#include <compare>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gkd45 {

// Core connectives. Negation, top and bi-implication are surface sugar and
// are eliminated when a formula is built:
//   not f   == f -> bot
//   top     == bot -> bot
//   f <-> g == (f -> g) & (g -> f)
enum class Conn { Var, Bot, And, Or, Implies, Box, Diamond };

// Immutable formula handle with structural sharing. Equality and ordering
// are structural; the ordering is by node count first, printed form second.
class Formula {
 public:
  Formula() = delete;

  static Formula var(std::string name);
  static Formula bot();
  static Formula top();
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula impl(Formula a, Formula b);
  static Formula neg(Formula a);
  static Formula iff(Formula a, Formula b);
  static Formula box(Formula a);
  static Formula dia(Formula a);

  Conn kind() const;
  const std::string& var_name() const;  // kind() == Var only
  const Formula& lhs() const;           // binary nodes
  const Formula& rhs() const;           // binary nodes
  const Formula& child() const;         // box / diamond

  // Node count of the syntax tree.
  int size() const;
  // Printed form with minimal parentheses; parsing it back yields the
  // same tree.
  const std::string& text() const;

  // An atom for propositional reading: a variable or a modal-rooted tree.
  bool is_atom() const;
  // Contains no box / diamond anywhere.
  bool is_propositional() const;
  int modal_depth() const;

  bool operator==(const Formula& o) const;
  std::strong_ordering operator<=>(const Formula& o) const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make_binary(Conn k, Formula a, Formula b);
  static Formula make_unary(Conn k, Formula a);
  std::shared_ptr<const Node> node_;
};

struct parse_error : std::runtime_error {
  parse_error(std::string msg, std::size_t offset, std::vector<std::string> expected);
  std::size_t offset;
  std::vector<std::string> expected;
};

// Grammar: atoms [a-z][a-zA-Z0-9_]*, `bot`, `top`, `not`, `&`, `|`, `->`,
// `<->`, `[]`, `<>`, parentheses. Precedence: prefix operators bind
// tightest, then `&` / `|` (one level, left-associative), then `->`
// (right-associative), then `<->`.
Formula parse_formula(std::string_view text);

// All subformulas including the formula itself; bot is always a member.
// Deterministic order: size, then printed form.
std::vector<Formula> subformulas(const Formula& f);

// { box t, dia t : t a subformula of f }, ordered as subformulas are.
std::vector<Formula> fixed_points(const Formula& f);

// Maximal modal-rooted subtrees: the atoms a propositional reading of f
// sees in addition to its variables.
std::vector<Formula> modal_atoms(const Formula& f);

// Variable names occurring in f, sorted.
std::vector<std::string> variables(const Formula& f);

}  // namespace gkd45

#endif
