#include "gkd45/formula.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

namespace gkd45 {

struct Formula::Node {
  Conn kind;
  std::string name;          // Var
  std::optional<Formula> a;  // left / modal child
  std::optional<Formula> b;  // right
  int size = 1;
  int mdepth = 0;
  bool prop = true;
  std::string text;
};

namespace {

// Binding strength used by the printer: prefix > {&,|} > ->.
int level(Conn k) {
  switch (k) {
    case Conn::Var:
    case Conn::Bot:
      return 4;
    case Conn::Box:
    case Conn::Diamond:
      return 3;
    case Conn::And:
    case Conn::Or:
      return 2;
    case Conn::Implies:
      return 1;
  }
  return 0;
}

std::string wrap(const Formula& f, bool parens) {
  if (parens) return "(" + f.text() + ")";
  return f.text();
}

std::string render(Conn k, const std::string& name, const std::optional<Formula>& a,
                   const std::optional<Formula>& b) {
  switch (k) {
    case Conn::Var:
      return name;
    case Conn::Bot:
      return "bot";
    case Conn::Box:
      return "[] " + wrap(*a, level(a->kind()) < 3);
    case Conn::Diamond:
      return "<> " + wrap(*a, level(a->kind()) < 3);
    case Conn::And:
      return wrap(*a, level(a->kind()) < 2) + " & " + wrap(*b, level(b->kind()) <= 2);
    case Conn::Or:
      return wrap(*a, level(a->kind()) < 2) + " | " + wrap(*b, level(b->kind()) <= 2);
    case Conn::Implies:
      return wrap(*a, level(a->kind()) <= 1) + " -> " + wrap(*b, false);
  }
  return {};
}

}  // namespace

Formula Formula::var(std::string name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
    throw std::invalid_argument("variable name must start with a lowercase letter: '" + name + "'");
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw std::invalid_argument("bad character in variable name: '" + name + "'");
  if (name == "bot" || name == "top" || name == "not")
    throw std::invalid_argument("'" + name + "' is a reserved word");
  auto n = std::make_shared<Node>();
  n->kind = Conn::Var;
  n->name = std::move(name);
  n->text = n->name;
  return Formula(std::move(n));
}

Formula Formula::bot() {
  auto n = std::make_shared<Node>();
  n->kind = Conn::Bot;
  n->text = "bot";
  return Formula(std::move(n));
}

Formula Formula::top() { return impl(bot(), bot()); }

Formula Formula::make_binary(Conn k, Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->size = 1 + a.size() + b.size();
  n->mdepth = std::max(a.modal_depth(), b.modal_depth());
  n->prop = a.is_propositional() && b.is_propositional();
  n->a = std::move(a);
  n->b = std::move(b);
  n->text = render(k, {}, n->a, n->b);
  return Formula(std::move(n));
}

Formula Formula::make_unary(Conn k, Formula a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->size = 1 + a.size();
  n->mdepth = 1 + a.modal_depth();
  n->prop = false;
  n->a = std::move(a);
  n->text = render(k, {}, n->a, n->b);
  return Formula(std::move(n));
}

Formula Formula::conj(Formula a, Formula b) { return make_binary(Conn::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return make_binary(Conn::Or, std::move(a), std::move(b)); }
Formula Formula::impl(Formula a, Formula b) { return make_binary(Conn::Implies, std::move(a), std::move(b)); }
Formula Formula::neg(Formula a) { return impl(std::move(a), bot()); }
Formula Formula::iff(Formula a, Formula b) { return conj(impl(a, b), impl(b, a)); }
Formula Formula::box(Formula a) { return make_unary(Conn::Box, std::move(a)); }
Formula Formula::dia(Formula a) { return make_unary(Conn::Diamond, std::move(a)); }

Conn Formula::kind() const { return node_->kind; }

const std::string& Formula::var_name() const {
  if (node_->kind != Conn::Var) throw std::logic_error("var_name on non-variable");
  return node_->name;
}

const Formula& Formula::lhs() const {
  if (node_->kind != Conn::And && node_->kind != Conn::Or && node_->kind != Conn::Implies)
    throw std::logic_error("lhs on non-binary node");
  return *node_->a;
}

const Formula& Formula::rhs() const {
  if (node_->kind != Conn::And && node_->kind != Conn::Or && node_->kind != Conn::Implies)
    throw std::logic_error("rhs on non-binary node");
  return *node_->b;
}

const Formula& Formula::child() const {
  if (node_->kind != Conn::Box && node_->kind != Conn::Diamond)
    throw std::logic_error("child on non-modal node");
  return *node_->a;
}

int Formula::size() const { return node_->size; }
const std::string& Formula::text() const { return node_->text; }

bool Formula::is_atom() const {
  return node_->kind == Conn::Var || node_->kind == Conn::Box || node_->kind == Conn::Diamond;
}

bool Formula::is_propositional() const { return node_->prop; }
int Formula::modal_depth() const { return node_->mdepth; }

bool Formula::operator==(const Formula& o) const {
  if (node_ == o.node_) return true;
  return node_->size == o.node_->size && node_->text == o.node_->text;
}

std::strong_ordering Formula::operator<=>(const Formula& o) const {
  if (node_ == o.node_) return std::strong_ordering::equal;
  if (auto c = node_->size <=> o.node_->size; c != 0) return c;
  int c = node_->text.compare(o.node_->text);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

parse_error::parse_error(std::string msg, std::size_t off, std::vector<std::string> exp)
    : std::runtime_error(std::move(msg)), offset(off), expected(std::move(exp)) {}

namespace {

enum class Tok { Atom, Bot, Top, Not, BoxT, DiaT, Amp, Pipe, Arrow, Iff, LParen, RParen, End };

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  Tok tok = Tok::End;
  std::string ident;
  std::size_t tok_pos = 0;

  explicit Lexer(std::string_view s) : src(s) { advance(); }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> exp) const {
    throw parse_error("parse error at offset " + std::to_string(tok_pos) + ": " + what, tok_pos,
                      std::move(exp));
  }

  void advance() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) pos++;
    tok_pos = pos;
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    char c = src[pos];
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        pos++;
      ident.assign(src.substr(start, pos - start));
      if (ident == "bot")
        tok = Tok::Bot;
      else if (ident == "top")
        tok = Tok::Top;
      else if (ident == "not")
        tok = Tok::Not;
      else
        tok = Tok::Atom;
      return;
    }
    switch (c) {
      case '&':
        pos++;
        tok = Tok::Amp;
        return;
      case '|':
        pos++;
        tok = Tok::Pipe;
        return;
      case '(':
        pos++;
        tok = Tok::LParen;
        return;
      case ')':
        pos++;
        tok = Tok::RParen;
        return;
      case '-':
        if (pos + 1 < src.size() && src[pos + 1] == '>') {
          pos += 2;
          tok = Tok::Arrow;
          return;
        }
        fail("stray '-'", {"->"});
      case '<':
        if (pos + 2 < src.size() && src[pos + 1] == '-' && src[pos + 2] == '>') {
          pos += 3;
          tok = Tok::Iff;
          return;
        }
        if (pos + 1 < src.size() && src[pos + 1] == '>') {
          pos += 2;
          tok = Tok::DiaT;
          return;
        }
        fail("stray '<'", {"<>", "<->"});
      case '[':
        if (pos + 1 < src.size() && src[pos + 1] == ']') {
          pos += 2;
          tok = Tok::BoxT;
          return;
        }
        fail("stray '['", {"[]"});
      default:
        fail(std::string("unexpected character '") + c + "'", {});
    }
  }
};

struct Parser {
  Lexer lx;

  explicit Parser(std::string_view s) : lx(s) {}

  static const std::vector<std::string>& starters() {
    static const std::vector<std::string> v = {"atom", "bot", "top", "not", "[]", "<>", "("};
    return v;
  }

  Formula primary() {
    switch (lx.tok) {
      case Tok::Atom: {
        Formula f = Formula::var(lx.ident);
        lx.advance();
        return f;
      }
      case Tok::Bot:
        lx.advance();
        return Formula::bot();
      case Tok::Top:
        lx.advance();
        return Formula::top();
      case Tok::LParen: {
        lx.advance();
        Formula f = iff();
        if (lx.tok != Tok::RParen) lx.fail("expected ')'", {")"});
        lx.advance();
        return f;
      }
      default:
        lx.fail("expected a formula", starters());
    }
  }

  Formula prefix() {
    switch (lx.tok) {
      case Tok::Not:
        lx.advance();
        return Formula::neg(prefix());
      case Tok::BoxT:
        lx.advance();
        return Formula::box(prefix());
      case Tok::DiaT:
        lx.advance();
        return Formula::dia(prefix());
      default:
        return primary();
    }
  }

  Formula andor() {
    Formula f = prefix();
    while (lx.tok == Tok::Amp || lx.tok == Tok::Pipe) {
      bool isAnd = lx.tok == Tok::Amp;
      lx.advance();
      Formula g = prefix();
      f = isAnd ? Formula::conj(std::move(f), std::move(g))
                : Formula::disj(std::move(f), std::move(g));
    }
    return f;
  }

  Formula imp() {
    Formula f = andor();
    if (lx.tok == Tok::Arrow) {
      lx.advance();
      return Formula::impl(std::move(f), imp());
    }
    return f;
  }

  Formula iff() {
    Formula f = imp();
    while (lx.tok == Tok::Iff) {
      lx.advance();
      Formula g = imp();
      f = Formula::iff(std::move(f), std::move(g));
    }
    return f;
  }

  Formula run() {
    Formula f = iff();
    if (lx.tok != Tok::End) lx.fail("trailing input", {"&", "|", "->", "<->", "end of input"});
    return f;
  }
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).run(); }

namespace {

void collect_sub(const Formula& f, std::set<Formula>& out) {
  out.insert(f);
  switch (f.kind()) {
    case Conn::Var:
    case Conn::Bot:
      return;
    case Conn::Box:
    case Conn::Diamond:
      collect_sub(f.child(), out);
      return;
    default:
      collect_sub(f.lhs(), out);
      collect_sub(f.rhs(), out);
      return;
  }
}

void collect_modal_atoms(const Formula& f, std::set<Formula>& out) {
  switch (f.kind()) {
    case Conn::Var:
    case Conn::Bot:
      return;
    case Conn::Box:
    case Conn::Diamond:
      out.insert(f);
      return;
    default:
      collect_modal_atoms(f.lhs(), out);
      collect_modal_atoms(f.rhs(), out);
      return;
  }
}

void collect_vars(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Conn::Var:
      out.insert(f.var_name());
      return;
    case Conn::Bot:
      return;
    case Conn::Box:
    case Conn::Diamond:
      collect_vars(f.child(), out);
      return;
    default:
      collect_vars(f.lhs(), out);
      collect_vars(f.rhs(), out);
      return;
  }
}

}  // namespace

std::vector<Formula> subformulas(const Formula& f) {
  std::set<Formula> s;
  s.insert(Formula::bot());
  collect_sub(f, s);
  return {s.begin(), s.end()};
}

std::vector<Formula> fixed_points(const Formula& f) {
  std::set<Formula> s;
  for (const Formula& t : subformulas(f)) {
    s.insert(Formula::box(t));
    s.insert(Formula::dia(t));
  }
  return {s.begin(), s.end()};
}

std::vector<Formula> modal_atoms(const Formula& f) {
  std::set<Formula> s;
  collect_modal_atoms(f, s);
  return {s.begin(), s.end()};
}

std::vector<std::string> variables(const Formula& f) {
  std::set<std::string> s;
  collect_vars(f, s);
  return {s.begin(), s.end()};
}

}  // namespace gkd45
