#ifndef GKD45_MODEL_HPP
#define GKD45_MODEL_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gkd45/godel.hpp"

namespace gkd45 {

struct model_error : std::runtime_error {
  model_error(const std::string& msg, std::string p)
      : std::runtime_error(msg + " (at " + p + ")"), path(std::move(p)) {}
  std::string path;
};

// A possibilistic model was built with max pi < 1. Kept distinct from
// model_error so callers can tell a shape problem from a normalization
// problem.
struct normalization_error : std::runtime_error {
  explicit normalization_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Relational many-valued Kripke model: R : W x W -> [0,1],
// e : W x Var -> [0,1].
class GKModel {
 public:
  GKModel(std::vector<std::string> worlds, std::vector<std::string> vars,
          std::vector<std::vector<Rat>> R, std::vector<std::vector<Rat>> e);

  int world_count() const { return static_cast<int>(worlds_.size()); }
  int var_count() const { return static_cast<int>(vars_.size()); }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::vector<std::string>& vars() const { return vars_; }
  int world_index(const std::string& name) const;  // throws std::out_of_range
  std::optional<int> find_world(const std::string& name) const;
  int var_index(const std::string& name) const;

  const Rat& rel(int w, int v) const { return R_[w][v]; }
  const Rat& value(int w, int var) const { return e_[w][var]; }

  // The world's variable assignment as a Valuation.
  Valuation valuation_at(int w) const;

 private:
  std::vector<std::string> worlds_, vars_;
  std::vector<std::vector<Rat>> R_, e_;
};

// Possibilistic model: pi : W -> [0,1] with max pi = 1 exactly, enforced at
// construction. Induces the relational model R(w,w') = pi(w').
class PossModel {
 public:
  PossModel(std::vector<std::string> worlds, std::vector<std::string> vars,
            std::vector<Rat> pi, std::vector<std::vector<Rat>> e);

  int world_count() const { return static_cast<int>(worlds_.size()); }
  int var_count() const { return static_cast<int>(vars_.size()); }
  const std::vector<std::string>& worlds() const { return worlds_; }
  const std::vector<std::string>& vars() const { return vars_; }
  int world_index(const std::string& name) const;
  std::optional<int> find_world(const std::string& name) const;
  int var_index(const std::string& name) const;

  const Rat& pi(int w) const { return pi_[w]; }
  const Rat& value(int w, int var) const { return e_[w][var]; }

  Valuation valuation_at(int w) const;

 private:
  std::vector<std::string> worlds_, vars_;
  std::vector<Rat> pi_;
  std::vector<std::vector<Rat>> e_;
};

using AnyModel = std::variant<PossModel, GKModel>;

// Many-valued Kripke evaluation:
//   e(w, box f) = min over w' of R(w,w') => e(w',f)
//   e(w, dia f) = max over w' of min(R(w,w'), e(w',f))
// Over a possibilistic model the modal clauses read pi(w') for R(w,w'), so
// modal subformulas take the same value at every world.
Rat eval(const GKModel& m, int w, const Formula& f);
Rat eval(const PossModel& m, int w, const Formula& f);
Rat eval(const AnyModel& m, int w, const Formula& f);
Rat eval(const AnyModel& m, const std::string& world, const Formula& f);

// True when f evaluates to 1 at every world.
bool is_valid_in_model(const GKModel& m, const Formula& f);
bool is_valid_in_model(const PossModel& m, const Formula& f);
bool is_valid_in_model(const AnyModel& m, const Formula& f);

struct FrameCheck {
  bool ok = true;
  std::vector<std::string> witness;  // failing world / triple when !ok
};

// sup over w' of R(w,w') = 1 at every w.
FrameCheck is_serial(const GKModel& m);
// min(R(w,a), R(a,b)) <= R(w,b).
FrameCheck is_transitive(const GKModel& m);
// min(R(w,a), R(w,b)) <= R(a,b).
FrameCheck is_euclidean(const GKModel& m);

GKModel to_relational(const PossModel& m);

// Possibility and necessity of a propositional formula:
//   Pi(f) = max over w of min(pi(w), e_w(f))
//   N(f)  = min over w of pi(w) => e_w(f)
// Throw std::invalid_argument when f contains a modal operator.
Rat possibility_of(const PossModel& m, const Formula& f);
Rat necessity_of(const PossModel& m, const Formula& f);

// JSON:
//   {"kind":"possibilistic","worlds":[...],"pi":{...},"e":{w:{p:"a/b"}}}
//   {"kind":"relational","worlds":[...],"R":{w:{w':"a/b"}},"e":{...}}
// Rationals serialize as "0", "1" or reduced "a/b" strings. Validation
// failures throw model_error citing the JSON path; a possibilistic model
// with max pi < 1 throws normalization_error.
AnyModel load_model(const std::string& json_text);
std::string save_model(const AnyModel& m, int indent = -1);

}  // namespace gkd45

#endif
