#ifndef GKD45_SEARCH_HPP
#define GKD45_SEARCH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gkd45/formula.hpp"
#include "gkd45/model.hpp"

namespace gkd45 {

// Model classes searched:
//   PiG                possibilistic models (normalized pi)
//   KD45GK             relational models whose R is serial, transitive and
//                      euclidean
//   CrispSTE           KD45GK restricted to {0,1} values
//   CrispSemiUniversal crisp relations of the shape R = W x E, E nonempty
enum class ModelClass { PiG, KD45GK, CrispSTE, CrispSemiUniversal };

const char* class_name(ModelClass c);
std::optional<ModelClass> class_from_name(std::string_view name);

struct SearchBounds {
  int max_worlds = 3;
  // Chain {0, 1/m, ..., 1}. m <= 0 selects the default m = max_worlds * n + 1
  // (n = number of variables; m = 1 when n = 0), which is enough to realize
  // every order pattern of the free values of a model within the bounds.
  int chain_denominator = 0;
  // Extra variables beyond those of the formulas themselves.
  std::vector<std::string> variables;
  std::uint64_t seed = 0;     // echoed in reports; used by randomized phases
  std::uint64_t samples = 0;  // randomized phase size, when a caller runs one
  // Explicit value grid; overrides chain_denominator when nonempty. Must be
  // strictly increasing from 0 to 1.
  std::vector<Rat> grid;
};

// The value grid a search over `var_count` variables will enumerate.
std::vector<Rat> resolve_grid(const SearchBounds& b, std::size_t var_count,
                              ModelClass cls);

struct Witness {
  AnyModel model;
  std::string world;
  Rat value;              // eval at the witness world; < 1, re-verified exactly
  std::uint64_t ordinal;  // 0-based position in the deduplicated enumeration
};

struct SearchReport {
  Formula formula;
  ModelClass cls;
  int max_worlds = 0;
  int chain_denominator = 0;  // 0 when an explicit grid was supplied
  std::vector<Rat> grid;
  std::optional<Witness> witness;
  // Witness found: models enumerated up to and including the witness.
  // Exhausted: the full deduplicated model count. Deterministic either way.
  std::uint64_t models_examined = 0;
  std::string outcome;  // "countermodel" | "no countermodel within bounds"
  double wall_ms = 0.0;  // informational; excluded from serialized reports
};

// Exhaustive enumeration of the class within bounds, deduplicated up to
// world renaming, in a fixed deterministic order. visit returns false to
// stop. Returns the number of models visited.
std::uint64_t enumerate_models(const SearchBounds& b, ModelClass cls,
                               const std::function<bool(const AnyModel&)>& visit);
std::uint64_t count_models(const SearchBounds& b, ModelClass cls);

// First countermodel (minimal enumeration ordinal, then lowest world) with
// eval < 1, or exhaustion. Absence of a witness is evidence within the
// stated bounds only, never a validity proof.
SearchReport find_countermodel(const Formula& f, ModelClass cls, const SearchBounds& b);

// Decides the bounded countermodel status of every formula in one shared
// enumeration pass. Results, including witnesses and ordinals, do not
// depend on the thread count (threads = 0 picks the hardware default).
std::vector<SearchReport> sweep(const std::vector<Formula>& fs, ModelClass cls,
                                const SearchBounds& b, unsigned threads = 0);

struct rejection_error : std::runtime_error {
  rejection_error(const std::string& msg, std::uint64_t tries_);
  std::uint64_t tries;
};

// Deterministic function of the seed. PiG models get one world forced to
// pi = 1; KD45GK relations are rejection-sampled through the three frame
// checks and throw rejection_error when the budget runs out.
AnyModel random_model(ModelClass cls, int worlds, int chain_denominator,
                      const std::vector<std::string>& vars, std::uint64_t seed,
                      std::uint64_t budget = 100000);

struct ClassComparison {
  Formula formula;
  SearchReport possibilistic;  // ModelClass::PiG
  SearchReport relational;     // ModelClass::KD45GK
  bool agree = false;          // same countermodel status in both classes
};

struct CompareReport {
  std::vector<ClassComparison> entries;
  std::vector<std::size_t> discrepancies;  // indices of entries disagreeing
};

// Bounded countermodel status of each formula in both classes. A
// possibilistic witness is transported to the relational class via
// to_relational (and re-verified) instead of searching again; formulas
// without one get the exhaustive relational sweep.
CompareReport compare_classes(const std::vector<Formula>& corpus, const SearchBounds& b,
                              unsigned threads = 0);

// Crisp experiment over {0,1} values: serial-transitive-euclidean relations
// versus semi-universal relations W x E, both exhaustive up to max_worlds.
CompareReport crisp_reduction_check(const std::vector<Formula>& corpus, int max_worlds,
                                    unsigned threads = 0);

// Random formula of tree depth <= max_depth over the given variables.
Formula random_formula(std::mt19937_64& rng, int max_depth,
                       const std::vector<std::string>& vars);

}  // namespace gkd45

#endif
