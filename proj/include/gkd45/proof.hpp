#ifndef GKD45_PROOF_HPP
#define GKD45_PROOF_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gkd45/formula.hpp"

namespace gkd45 {

// Axiom schema over metavariables. Templates are ordinary formulas whose
// variables named in `metavars` act as substitution holes; `phi`, `psi` and
// `chi` are reserved for this purpose.
struct AxiomSchema {
  std::string name;
  Formula tmpl;
  std::vector<std::string> metavars;
};

// The fixed axiomatization:
//  - propositional base: intuitionistic logic (then1, then2, and1..3,
//    or1..3, efq) plus prelinearity `lin`, i.e. Goedel-Dummett logic;
//  - modal schemata: K_box, K_dia, F_box, P, FS2, D, 4_box, 4_dia,
//    5_box, 5_dia.
// Rules: modus ponens and necessitation.
const std::vector<AxiomSchema>& axiom_catalogue();
const AxiomSchema* find_axiom(const std::string& name);

// Substitutes the schema's metavariables. Throws std::invalid_argument when
// the substitution misses a metavariable of the schema.
Formula instantiate(const AxiomSchema& schema, const std::map<std::string, Formula>& subst);

struct Justification {
  enum class Kind { Axiom, Premise, MP, Nec };
  Kind kind;
  std::string axiom_name;                 // Axiom
  std::map<std::string, Formula> subst;   // Axiom; may be empty (matched)
  std::size_t i = 0, j = 0;               // MP: i, j; Nec: i; Premise: i

  static Justification axiom(std::string name, std::map<std::string, Formula> subst = {});
  static Justification premise(std::size_t k);
  static Justification mp(std::size_t i, std::size_t j);
  static Justification nec(std::size_t i);
};

struct ProofStep {
  Formula formula;
  Justification just;
};

struct Proof {
  std::vector<Formula> premises;  // referenced 1-based by premise steps
  std::vector<ProofStep> steps;   // referenced 1-based
  Formula conclusion;
};

// step == 0 is a proof-level error (e.g. conclusion mismatch), otherwise
// the 1-based index of the offending step.
struct ProofError {
  std::size_t step = 0;
  std::string reason;
};

// Checks every step: axiom instances match their schema, mp references an
// implication of exactly the right shape, nec is applied only to
// premise-independent steps, and the last step is the conclusion.
std::optional<ProofError> check(const Proof& p);

// Text format, one step per line:
//   <n>. <formula> ; axiom <name> [<mv>=<formula>, ...]
//   <n>. <formula> ; premise <k>
//   <n>. <formula> ; mp <i> <j>
//   <n>. <formula> ; nec <i>
// with a trailing "qed <formula>" line. Lines starting with '#' are
// comments.
Proof parse_proof(const std::string& text);
std::string print_proof(const Proof& p);

// Derivations shipped with the tool, checkable as-is:
//   proof1: dia p -> dia dia p
//   proof2: box box p -> box p
//   proof3: box dia p -> dia p
//   proof4: box p -> dia box p
//   t5:     dia (p -> q) -> (box p -> dia q)
// proof3 and proof4 route through possibility of a proved implication (the
// D-step expanded to primitives) and an inlined instance of t5.
const std::vector<std::pair<std::string, Proof>>& builtin_derivations();
const Proof* find_builtin(const std::string& name);

}  // namespace gkd45

#endif
