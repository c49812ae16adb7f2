#include "gkd45/godel.hpp"

#include <set>

namespace gkd45 {

Rat g_implies(const Rat& x, const Rat& y) {
  if (x <= y) return Rat::one();
  return y;
}

const Rat& g_meet(const Rat& x, const Rat& y) { return min(x, y); }
const Rat& g_join(const Rat& x, const Rat& y) { return max(x, y); }

Rat g_neg(const Rat& x) { return g_implies(x, Rat::zero()); }

void Valuation::set(const Formula& atom, const Rat& value) {
  if (!atom.is_atom())
    throw std::invalid_argument("valuation key must be a variable or a modal atom, got '" +
                                atom.text() + "'");
  if (!value.in_unit())
    throw std::invalid_argument("truth value outside [0,1]: " + value.str());
  m_.insert_or_assign(atom, value);
}

const Rat& Valuation::at(const Formula& atom) const {
  auto it = m_.find(atom);
  if (it == m_.end()) throw missing_atom_error(atom.text());
  return it->second;
}

bool Valuation::has(const Formula& atom) const { return m_.find(atom) != m_.end(); }

Rat prop_eval(const Formula& f, const Valuation& v) {
  switch (f.kind()) {
    case Conn::Bot:
      return Rat::zero();
    case Conn::Var:
    case Conn::Box:
    case Conn::Diamond:
      return v.at(f);
    case Conn::And:
      return g_meet(prop_eval(f.lhs(), v), prop_eval(f.rhs(), v));
    case Conn::Or:
      return g_join(prop_eval(f.lhs(), v), prop_eval(f.rhs(), v));
    case Conn::Implies:
      return g_implies(prop_eval(f.lhs(), v), prop_eval(f.rhs(), v));
  }
  throw std::logic_error("unreachable");
}

bool godel_consequence(const std::vector<Formula>& T, const Formula& f) {
  std::set<Formula> atom_set;
  auto add_atoms = [&atom_set](const Formula& g) {
    for (const auto& name : variables(g)) atom_set.insert(Formula::var(name));
    for (const auto& m : modal_atoms(g)) atom_set.insert(m);
  };
  for (const Formula& t : T) add_atoms(t);
  add_atoms(f);
  std::vector<Formula> atoms(atom_set.begin(), atom_set.end());

  const int n = static_cast<int>(atoms.size());
  std::vector<Rat> chain;
  for (int i = 0; i <= n + 1; i++) chain.emplace_back(i, n + 1);

  std::vector<int> idx(atoms.size(), 0);
  while (true) {
    Valuation v;
    for (std::size_t i = 0; i < atoms.size(); i++) v.set(atoms[i], chain[idx[i]]);
    Rat bound = Rat::one();
    for (const Formula& t : T) bound = g_meet(bound, prop_eval(t, v));
    if (!(bound <= prop_eval(f, v))) return false;
    std::size_t i = 0;
    for (; i < idx.size(); i++) {
      if (++idx[i] < static_cast<int>(chain.size())) break;
      idx[i] = 0;
    }
    if (i == idx.size()) break;
  }
  return true;
}

}  // namespace gkd45
