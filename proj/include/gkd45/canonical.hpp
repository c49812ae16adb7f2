#ifndef GKD45_CANONICAL_HPP
#define GKD45_CANONICAL_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gkd45/formula.hpp"
#include "gkd45/godel.hpp"
#include "gkd45/model.hpp"
#include "gkd45/rational.hpp"

#include "json.hpp"

namespace gkd45 {

// True iff u and w agree on every fixed-point atom of f, i.e. on
// { box t, dia t : t a subformula of f }. A valuation that does not cover
// one of those atoms raises missing_atom_error.
bool equivalent_mod_phi(const Valuation& u, const Valuation& w, const Formula& f);

// Possibility degree of u relative to the reference valuation v:
//   min over subformulas s of f of
//     min( v(box s) => u(s),  u(s) => v(dia s) )
// where u(s) is the propositional value of s under u (modal subtrees read
// as atoms) and v supplies the fixed-point values. Coverage gaps raise
// missing_atom_error.
Rat pi_phi(const Valuation& v, const Valuation& u, const Formula& f);

// Strictly increasing piecewise-linear map through a list of breakpoints
// (x_i, y_i), exact over rationals. With isolated_one set, the final
// breakpoint must sit at x = 1 and acts only as the open-ended limit of the
// last segment; the value at x = 1 itself is 1.
class MonotoneMap {
 public:
  // Throws std::invalid_argument unless the breakpoints are strictly
  // increasing in both coordinates (and end at x = 1 when isolated_one).
  explicit MonotoneMap(std::vector<std::pair<Rat, Rat>> points, bool isolated_one = false);

  // Interpolates at x. Throws std::domain_error outside
  // [points.front().x, points.back().x].
  Rat apply(const Rat& x) const;

  const std::vector<std::pair<Rat, Rat>>& points() const { return pts_; }
  bool isolated_one() const { return isolated_one_; }

 private:
  std::vector<std::pair<Rat, Rat>> pts_;
  bool isolated_one_;
};

// A normalization input failed one of its named preconditions. `condition`
// is one of:
//   "condition b"       relative order of u and nu disagrees at low u-values
//   "condition c"       some atom with u above the declared alpha has nu < 1
//   "delta range"       delta outside (alpha, beta], or that interval is empty
//   "ill-formed B"      two fixed-point atoms share a nu-value below 1 but
//                       carry different u-values, so no single anchor exists
//   "anchor positivity" the lowest positive nu-anchor has u-value 0, which
//                       would collide with g(0) = 0
// witness1/witness2 carry the printed forms of the offending atoms where a
// pair (or single atom) is to blame.
struct precondition_error : std::runtime_error {
  precondition_error(std::string cond, std::string w1, std::string w2, const std::string& msg)
      : std::runtime_error(msg),
        condition(std::move(cond)),
        witness1(std::move(w1)),
        witness2(std::move(w2)) {}
  std::string condition;
  std::string witness1, witness2;
};

// The transform itself cannot proceed: delta == beta leaves h with no room
// strictly below beta, so any atom that would need h on [0, beta) is
// rejected here.
struct transform_error : std::runtime_error {
  transform_error(std::string atom_text, const std::string& msg)
      : std::runtime_error(msg), atom(std::move(atom_text)) {}
  std::string atom;
};

// One failed guarantee of the normalization transform, reported by index
// (1-6) with the printed target formulas involved.
struct PostconditionIssue {
  int index = 0;
  std::string lhs, rhs;
  std::string detail;
};

struct postcondition_error : std::runtime_error {
  postcondition_error(PostconditionIssue i, const std::string& msg)
      : std::runtime_error(msg), issue(std::move(i)) {}
  PostconditionIssue issue;
};

// Input to the normalization transform: two valuations u and nu over the
// atoms of interest (including all fixed-point atoms of phi), the pivot
// delta, and the derived thresholds
//   alpha = max { u(L) : L fixed-point atom, nu(L) < 1 }   (0 if none)
//   beta  = min { u(L) : L fixed-point atom, nu(L) = 1 }   (1 if none)
// `make` validates everything and precomputes the two maps:
//   g: anchored at (0,0), through (nu(L), u(L)) for each fixed-point atom L
//      with 0 < nu(L) < 1, ending with the open segment onto (alpha, delta)
//      and the isolated value g(1) = 1;
//   h: h(0) = delta, linear onto (delta, beta), identity on [beta, 1].
// When alpha is passed explicitly it must dominate every u-value of a
// nu < 1 fixed-point atom (condition c); otherwise alpha is the intrinsic
// maximum and condition c holds by construction. delta defaults to the
// midpoint (alpha + beta) / 2.
class NormalizationProblem {
 public:
  static NormalizationProblem make(Valuation u, Valuation nu, Formula phi,
                                   std::optional<Rat> delta = std::nullopt,
                                   std::optional<Rat> alpha = std::nullopt);

  const Valuation& u() const { return u_; }
  const Valuation& nu() const { return nu_; }
  const Formula& phi() const { return phi_; }
  const Rat& alpha() const { return alpha_; }
  const Rat& beta() const { return beta_; }
  const Rat& delta() const { return delta_; }
  bool explicit_alpha() const { return explicit_alpha_; }
  const MonotoneMap& g() const { return g_; }
  const MonotoneMap& h() const { return h_; }

  // {"u": {atom: value}, "nu": {...}, "delta": "a/b", "phi": "...",
  //  "alpha": "a/b" (only when explicit)} with rationals as strings.
  nlohmann::ordered_json to_json() const;
  static NormalizationProblem from_json(const nlohmann::json& j);

 private:
  NormalizationProblem(Valuation u, Valuation nu, Formula phi, Rat alpha, Rat beta, Rat delta,
                       bool explicit_alpha, MonotoneMap g, MonotoneMap h)
      : u_(std::move(u)),
        nu_(std::move(nu)),
        phi_(std::move(phi)),
        alpha_(std::move(alpha)),
        beta_(std::move(beta)),
        delta_(std::move(delta)),
        explicit_alpha_(explicit_alpha),
        g_(std::move(g)),
        h_(std::move(h)) {}

  Valuation u_, nu_;
  Formula phi_;
  Rat alpha_, beta_, delta_;
  bool explicit_alpha_;
  MonotoneMap g_, h_;
};

// The transform: maps every atom in nu's domain to
//   w(p) = g(nu(p))  if nu(p) < 1
//   w(p) = h(u(p))   if nu(p) = 1   (u must cover p)
// then verifies the six guarantees below on the target formulas and throws
// postcondition_error on any miss. Guarantees, with W = value under the
// returned valuation, N = value under nu, U = value under u, all values of
// compound targets read propositionally:
//   1  N(t)  = 1        implies W(t) >= delta
//   2  N(t)  < 1        implies W(t) <  delta
//   3  1 != N(s) <= N(t) implies W(s) <= W(t)
//   4  N(s)  < N(t)     implies W(s) <  W(t)
//   5  N(s) = N(t) = 1 and U(s) <= U(t) implies W(s) <= W(t)
//   6  N(s) = N(t) = 1 and U(s) <  U(t) implies W(s) <  W(t)
// The guarantees are assured for targets whose atoms are fixed-point atoms
// of phi (plus bot/top); targets over free variables may fail 5/6 when u
// and nu order those variables incompatibly, and then the error reports it.
Valuation normalize(const NormalizationProblem& p, const std::vector<Formula>& targets);

// The checks behind normalize's guarantees, exposed for direct use. Empty
// result means all six hold on all targets (and pairs of targets).
std::vector<PostconditionIssue> postcondition_violations(const NormalizationProblem& p,
                                                         const Valuation& w,
                                                         const std::vector<Formula>& targets);

// Bounded stand-in for "w validates the whole axiomatic theory": true iff
// every instance of every catalogued axiom schema, with metavariables
// instantiated from the subformulas and fixed-point atoms of f closed under
// box/diamond to the given extra depth, evaluates to 1 under w. Instances
// containing atoms outside w's domain are skipped rather than judged.
bool check_membership_approx(const Valuation& w, const Formula& f, int depth);

// The order-coding theory for psi relative to u: with L ranging over
// fixed-point atoms of f, t over subformulas of f, and a = u(box psi) < 1:
//   { L            : u(L) > a }
//   { L -> t       : u(L) <= u(box t) }
//   { (t -> L) -> L : u(L) < u(box t) < 1 }
//   { t -> L       : u(dia t) <= u(L) }
//   { (L -> t) -> t : u(dia t) < u(L) < 1 }
// Throws std::invalid_argument when u(box psi) = 1.
std::set<Formula> gamma_set(const Formula& psi, const Valuation& u, const Formula& f);

// Assembles a finite possibilistic model from valuations u_1..u_k around the
// reference v: worlds "u1".."uk", variables those of f, world i valued by
// u_i on them, pi(i) = pi_phi(v, u_i, f). Every u_i must agree with v on the
// fixed-point atoms of f (std::invalid_argument otherwise), and some u_i
// must reach pi_phi = 1, else normalization_error: the construction refuses
// to rescale.
PossModel snapshot_model(const Valuation& v, const std::vector<Valuation>& us, const Formula& f);

}  // namespace gkd45

#endif
