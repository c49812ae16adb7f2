#ifndef GKD45_GODEL_HPP
#define GKD45_GODEL_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkd45/formula.hpp"
#include "gkd45/rational.hpp"

namespace gkd45 {

// Operations of the standard Goedel algebra on [0,1]:
//   x => y  =  1 if x <= y, else y
//   meet = min, join = max, neg x = x => 0.
Rat g_implies(const Rat& x, const Rat& y);
const Rat& g_meet(const Rat& x, const Rat& y);
const Rat& g_join(const Rat& x, const Rat& y);
Rat g_neg(const Rat& x);

struct missing_atom_error : std::runtime_error {
  explicit missing_atom_error(const std::string& atom_text)
      : std::runtime_error("valuation has no value for atom '" + atom_text + "'"),
        atom(atom_text) {}
  std::string atom;
};

// Finite map from atoms (variables and modal-rooted formulas) to truth
// values in [0,1]. Lookup outside the declared domain is an error, never a
// default.
class Valuation {
 public:
  Valuation() = default;

  // Throws std::invalid_argument if a key is not an atom or a value is
  // outside [0,1].
  void set(const Formula& atom, const Rat& value);

  const Rat& at(const Formula& atom) const;  // throws missing_atom_error
  bool has(const Formula& atom) const;
  std::size_t size() const { return m_.size(); }

  const std::map<Formula, Rat>& entries() const { return m_; }

 private:
  std::map<Formula, Rat> m_;
};

// Evaluates f as a propositional Goedel formula over Var plus modal atoms.
// Never descends below a modal operator: a box- or diamond-rooted subtree
// is looked up in v as an opaque atom.
Rat prop_eval(const Formula& f, const Valuation& v);

// Propositional Goedel consequence: min over T bounds f in every valuation.
// Decided by enumerating all valuations of the atoms of T and f into the
// chain {0, 1/(n+1), ..., 1} with n the number of atoms; the verdict for
// that chain agrees with the verdict over all of [0,1].
bool godel_consequence(const std::vector<Formula>& T, const Formula& f);

}  // namespace gkd45

#endif
