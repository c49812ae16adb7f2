// Acceptance gate: one test case per criterion, each printing a PASS/FAIL
// line with the measured numbers. Bounds and tolerances are pinned here.
#include "doctest.h"
#include "gkd45/canonical.hpp"
#include "gkd45/godel.hpp"
#include "gkd45/model.hpp"
#include "gkd45/proof.hpp"
#include "gkd45/search.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

using gkd45::AnyModel;
using gkd45::Formula;
using gkd45::ModelClass;
using gkd45::parse_formula;
using gkd45::PossModel;
using gkd45::Rat;
using gkd45::SearchBounds;
using gkd45::Valuation;

namespace {

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[criterion %d] %s: %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

SearchBounds bounds(int worlds, int chain) {
  SearchBounds b;
  b.max_worlds = worlds;
  b.chain_denominator = chain;
  return b;
}

const std::array<const char*, 10> kModalSchemata = {
    "K_box", "K_dia", "F_box", "P", "FS2", "D", "4_box", "4_dia", "5_box", "5_dia"};

// Every instantiation of the named schemata with metavariables drawn from
// the pool.
std::vector<Formula> schema_instances(const std::vector<Formula>& pool) {
  std::vector<Formula> out;
  for (const char* name : kModalSchemata) {
    const gkd45::AxiomSchema* s = gkd45::find_axiom(name);
    REQUIRE(s != nullptr);
    const auto& mvs = s->metavars;
    if (mvs.empty()) {
      out.push_back(gkd45::instantiate(*s, {}));
    } else if (mvs.size() == 1) {
      for (const Formula& a : pool) out.push_back(gkd45::instantiate(*s, {{mvs[0], a}}));
    } else {
      for (const Formula& a : pool)
        for (const Formula& b : pool)
          out.push_back(gkd45::instantiate(*s, {{mvs[0], a}, {mvs[1], b}}));
    }
  }
  return out;
}

// Substitution instances of a closed-form statement over the same pool.
std::vector<Formula> statement_instances(const char* text, const std::vector<Formula>& pool) {
  Formula tmpl = parse_formula(text);
  std::vector<std::string> vars = gkd45::variables(tmpl);
  std::vector<Formula> out;
  if (vars.empty()) {
    out.push_back(tmpl);
  } else if (vars.size() == 1) {
    gkd45::AxiomSchema s{"stmt", tmpl, vars};
    for (const Formula& a : pool) out.push_back(gkd45::instantiate(s, {{vars[0], a}}));
  } else {
    gkd45::AxiomSchema s{"stmt", tmpl, vars};
    for (const Formula& a : pool)
      for (const Formula& b : pool)
        out.push_back(gkd45::instantiate(s, {{vars[0], a}, {vars[1], b}}));
  }
  return out;
}

const std::vector<Formula>& instance_pool() {
  static const std::vector<Formula> pool = {
      parse_formula("p"), parse_formula("q"), parse_formula("<> p"),
      parse_formula("[] q"), parse_formula("p & q"),
  };
  return pool;
}

const std::vector<Formula>& axiom_instances() {
  static const std::vector<Formula> v = schema_instances(instance_pool());
  return v;
}

const char* kStatements[] = {
    "not <> p <-> [] not p",
    "not not [] p -> [] not not p",
    "<> not not p -> not not <> p",
    "([] p -> <> q) | [] ((p -> q) -> q)",
    "<> (p -> q) -> ([] p -> <> q)",
    "<> [] top <-> [] <> top",
    "[] <> top <-> not bot",
    "<> <> p <-> <> p",
    "<> p <-> [] <> p",
    "[] [] p <-> [] p",
    "[] p <-> <> [] p",
};

const std::vector<Formula>& statement_instance_list() {
  static const std::vector<Formula> v = [] {
    std::vector<Formula> out;
    for (const char* s : kStatements) {
      auto in = statement_instances(s, instance_pool());
      out.insert(out.end(), in.begin(), in.end());
    }
    return out;
  }();
  return v;
}

// One shared exhaustive sweep decides criteria 1 and 2; the random phase
// shares its models the same way.
struct SoundnessRun {
  std::vector<gkd45::SearchReport> reports;  // axioms first, then statements
  std::uint64_t exhaustive_models = 0;
  std::size_t random_models = 0;
  std::size_t axiom_random_failures = 0;
  std::size_t statement_random_failures = 0;
};

const SoundnessRun& soundness_run() {
  static const SoundnessRun r = [] {
    SoundnessRun out;
    std::vector<Formula> corpus = axiom_instances();
    const auto& stmts = statement_instance_list();
    corpus.insert(corpus.end(), stmts.begin(), stmts.end());
    out.reports = gkd45::sweep(corpus, ModelClass::PiG, bounds(3, 7), 1);
    for (const auto& rep : out.reports)
      out.exhaustive_models = std::max(out.exhaustive_models, rep.models_examined);

    std::mt19937_64 meta(424242);
    for (int i = 0; i < 1000; ++i) {
      int worlds = 1 + static_cast<int>(meta() % 5);
      AnyModel m = gkd45::random_model(ModelClass::PiG, worlds, 11, {"p", "q"}, meta());
      ++out.random_models;
      for (const Formula& f : axiom_instances())
        if (!gkd45::is_valid_in_model(m, f)) ++out.axiom_random_failures;
      for (const Formula& f : stmts)
        if (!gkd45::is_valid_in_model(m, f)) ++out.statement_random_failures;
    }
    return out;
  }();
  return r;
}

}  // namespace

TEST_CASE("criterion 1: modal schema instances are valid across the search space") {
  const auto& axioms = axiom_instances();
  REQUIRE(axioms.size() == 122);
  const SoundnessRun& run = soundness_run();
  std::size_t refuted = 0;
  for (std::size_t i = 0; i < axioms.size(); ++i)
    if (run.reports[i].witness) ++refuted;
  bool ok = refuted == 0 && run.axiom_random_failures == 0 &&
            run.exhaustive_models == 7445280 && run.random_models == 1000;
  report(1, ok,
         std::to_string(axioms.size()) + " schema instances (10 schemata + necessitation), " +
             std::to_string(run.exhaustive_models) +
             " exhaustive models (3 worlds, 8-value chain), " +
             std::to_string(run.random_models) + " random models (<= 5 worlds): " +
             std::to_string(refuted + run.axiom_random_failures) + " failures");
  CHECK(ok);
}

TEST_CASE("criterion 2: derived statements are valid across the search space") {
  const auto& axioms = axiom_instances();
  const auto& stmts = statement_instance_list();
  REQUIRE(stmts.size() == 87);
  const SoundnessRun& run = soundness_run();
  std::size_t refuted = 0;
  for (std::size_t i = 0; i < stmts.size(); ++i)
    if (run.reports[axioms.size() + i].witness) ++refuted;
  bool ok = refuted == 0 && run.statement_random_failures == 0;
  report(2, ok,
         std::to_string(stmts.size()) + " statement instances over the same regime: " +
             std::to_string(refuted + run.statement_random_failures) + " failures");
  CHECK(ok);
}

TEST_CASE("criterion 3: classical principles fall to small countermodels, fast") {
  const char* targets[] = {"[] p -> p", "p -> [] p", "<> p -> [] p", "not not p -> p"};
  bool ok = true;
  std::string detail;
  for (const char* s : targets) {
    auto t0 = std::chrono::steady_clock::now();
    gkd45::SearchReport r =
        gkd45::find_countermodel(parse_formula(s), ModelClass::PiG, bounds(2, 2));
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    bool found = r.witness.has_value();
    int worlds = 0;
    if (found) {
      const auto& pm = std::get<PossModel>(r.witness->model);
      worlds = pm.world_count();
      Rat again = gkd45::eval(r.witness->model, pm.world_index(r.witness->world),
                              parse_formula(s));
      found = again == r.witness->value && again < Rat(1);
    }
    bool this_ok = found && worlds <= 2 && ms < 1000.0;
    ok = ok && this_ok;
    if (!detail.empty()) detail += "; ";
    detail += std::string("'") + s + "' " + (this_ok ? "refuted" : "NOT refuted") + " (" +
              std::to_string(worlds) + " worlds)";
  }
  report(3, ok, detail);
  CHECK(ok);
}

TEST_CASE("criterion 4: builtin derivations check and 20 mutations fail step-accurately") {
  using gkd45::Justification;
  using gkd45::Proof;
  const auto& builtins = gkd45::builtin_derivations();
  REQUIRE(builtins.size() == 5);

  std::size_t clean = 0;
  for (const auto& [name, proof] : builtins)
    if (!gkd45::check(proof)) ++clean;

  std::size_t probes = 0, accurate = 0;
  for (const auto& [name, original] : builtins) {
    {
      Proof m = original;  // tamper with the first line's formula
      m.steps[0].formula = parse_formula("bot -> bot");
      auto e = gkd45::check(m);
      ++probes;
      if (e && e->step == 1) ++accurate;
    }
    {
      Proof m = original;  // swap modus ponens operands
      std::size_t mp = 0;
      for (std::size_t i = 0; i < m.steps.size(); ++i)
        if (m.steps[i].just.kind == Justification::Kind::MP) {
          mp = i + 1;
          break;
        }
      REQUIRE(mp > 0);
      std::swap(m.steps[mp - 1].just.i, m.steps[mp - 1].just.j);
      auto e = gkd45::check(m);
      ++probes;
      if (e && e->step == mp) ++accurate;
    }
    {
      Proof m = original;  // mislabel the first axiom step
      std::size_t ax = 0;
      for (std::size_t i = 0; i < m.steps.size(); ++i)
        if (m.steps[i].just.kind == Justification::Kind::Axiom) {
          ax = i + 1;
          break;
        }
      REQUIRE(ax > 0);
      const std::string was = m.steps[ax - 1].just.axiom_name;
      std::size_t arity = gkd45::find_axiom(was)->metavars.size();
      for (const auto& s : gkd45::axiom_catalogue())
        if (s.name != was && s.metavars.size() == arity && !s.metavars.empty()) {
          m.steps[ax - 1].just.axiom_name = s.name;
          break;
        }
      auto e = gkd45::check(m);
      ++probes;
      if (e && e->step == ax) ++accurate;
    }
    {
      Proof m = original;  // truncate the closing step
      m.steps.pop_back();
      auto e = gkd45::check(m);
      ++probes;
      if (e && e->step == 0) ++accurate;
    }
  }
  bool ok = clean == 5 && probes == 20 && accurate == 20;
  report(4, ok,
         std::to_string(clean) + "/5 derivations check; " + std::to_string(accurate) + "/" +
             std::to_string(probes) + " mutation probes failed at the expected step");
  CHECK(ok);
}

TEST_CASE("criterion 5: possibilistic and relational verdicts agree on random formulas") {
  std::mt19937_64 rng(20250817);
  std::vector<Formula> corpus;
  for (int i = 0; i < 200; ++i) corpus.push_back(gkd45::random_formula(rng, 4, {"p", "q"}));
  auto rep = gkd45::compare_classes(corpus, bounds(3, 7), 1);
  std::size_t refuted = 0, sound = 0;
  for (const auto& e : rep.entries)
    if (e.possibilistic.witness)
      ++refuted;
    else
      ++sound;
  bool ok = rep.discrepancies.empty() && rep.entries.size() == 200;
  report(5, ok,
         "200 random formulas (depth <= 4): " + std::to_string(refuted) + " refuted, " +
             std::to_string(sound) + " countermodel-free in both classes, " +
             std::to_string(rep.discrepancies.size()) + " discrepancies");
  CHECK(ok);
}

TEST_CASE("criterion 6: the two crisp semantics agree") {
  std::vector<Formula> pool = {parse_formula("p"), parse_formula("q")};
  std::vector<Formula> corpus = schema_instances(pool);
  REQUIRE(corpus.size() == 26);
  std::mt19937_64 rng(606060);
  for (int i = 0; i < 100; ++i) corpus.push_back(gkd45::random_formula(rng, 3, {"p", "q"}));
  auto rep = gkd45::crisp_reduction_check(corpus, 3, 1);
  bool ok = rep.discrepancies.empty() && rep.entries.size() == 126;
  std::size_t refuted = 0;
  for (const auto& e : rep.entries)
    if (e.relational.witness) ++refuted;
  report(6, ok,
         "26 schema instances + 100 random formulas over crisp frames (<= 3 worlds): " +
             std::to_string(refuted) + " refuted in both, " +
             std::to_string(rep.discrepancies.size()) + " discrepancies");
  CHECK(ok);
}

namespace {

// A randomized problem that satisfies every precondition by construction:
// values at or below the threshold get proportionally ordered levels,
// values above it get level 1.
gkd45::NormalizationProblem random_valid_problem(std::mt19937_64& rng, Formula f,
                                                 std::vector<Formula>* targets_out) {
  auto atoms = gkd45::fixed_points(f);
  std::vector<Rat> uv;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    uv.push_back(Rat(static_cast<long long>(rng() % 13), 12));
  Rat t = Rat(static_cast<long long>(rng() % 12), 12);
  std::vector<Rat> below;
  for (const Rat& x : uv)
    if (x <= t && !x.is_zero()) below.push_back(x);
  std::sort(below.begin(), below.end());
  below.erase(std::unique(below.begin(), below.end()), below.end());
  Valuation u, nu;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    u.set(atoms[i], uv[i]);
    if (uv[i].is_zero())
      nu.set(atoms[i], Rat(0));
    else if (uv[i] <= t) {
      auto pos = std::find(below.begin(), below.end(), uv[i]) - below.begin();
      nu.set(atoms[i],
             Rat(static_cast<long long>(pos) + 1, static_cast<long long>(below.size()) + 1));
    } else {
      nu.set(atoms[i], Rat(1));
    }
  }
  if (targets_out) {
    *targets_out = atoms;
    targets_out->push_back(Formula::bot());
    for (int extra = 0; extra < 4; ++extra) {
      const Formula& a = atoms[rng() % atoms.size()];
      const Formula& b = atoms[rng() % atoms.size()];
      switch (rng() % 3) {
        case 0: targets_out->push_back(Formula::impl(a, b)); break;
        case 1: targets_out->push_back(Formula::conj(a, b)); break;
        default: targets_out->push_back(Formula::disj(a, b)); break;
      }
    }
  }
  return gkd45::NormalizationProblem::make(u, nu, f);
}

}  // namespace

TEST_CASE("criterion 7: normalization meets its postconditions and rejects bad inputs") {
  std::mt19937_64 rng(778899);
  std::size_t clean = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    Formula f = (iter % 2 == 0) ? parse_formula("p") : parse_formula("p & q");
    std::vector<Formula> targets;
    auto p = random_valid_problem(rng, f, &targets);
    Valuation w = gkd45::normalize(p, targets);
    if (gkd45::postcondition_violations(p, w, targets).empty()) ++clean;
  }

  std::size_t rejected_b = 0, rejected_c = 0;
  for (int iter = 0; iter < 50; ++iter) {
    // order reversal between the two scales
    long long r1 = 1 + static_cast<long long>(rng() % 5);
    long long r2 = r1 + 1 + static_cast<long long>(rng() % 5);
    Valuation u, nu;
    u.set(parse_formula("[] bot"), Rat(0));
    u.set(parse_formula("<> bot"), Rat(0));
    u.set(parse_formula("[] p"), Rat(r2, 12));
    u.set(parse_formula("<> p"), Rat(r1, 12));
    nu.set(parse_formula("[] bot"), Rat(0));
    nu.set(parse_formula("<> bot"), Rat(0));
    nu.set(parse_formula("[] p"), Rat(1, 3));
    nu.set(parse_formula("<> p"), Rat(1, 2));
    try {
      gkd45::NormalizationProblem::make(u, nu, parse_formula("p"));
    } catch (const gkd45::precondition_error& e) {
      if (e.condition == "condition b") ++rejected_b;
    }
  }
  for (int iter = 0; iter < 50; ++iter) {
    // explicit cutoff below a value whose level has not reached 1
    long long r2 = 2 + static_cast<long long>(rng() % 6);
    Valuation u, nu;
    u.set(parse_formula("[] bot"), Rat(0));
    u.set(parse_formula("<> bot"), Rat(0));
    u.set(parse_formula("[] p"), Rat(r2, 12));
    u.set(parse_formula("<> p"), Rat(11, 12));
    nu.set(parse_formula("[] bot"), Rat(0));
    nu.set(parse_formula("<> bot"), Rat(0));
    nu.set(parse_formula("[] p"), Rat(1, 2));
    nu.set(parse_formula("<> p"), Rat(1));
    try {
      gkd45::NormalizationProblem::make(u, nu, parse_formula("p"), std::nullopt,
                                        Rat(r2, 24));
    } catch (const gkd45::precondition_error& e) {
      if (e.condition == "condition c") ++rejected_c;
    }
  }
  bool ok = clean == 1000 && rejected_b == 50 && rejected_c == 50;
  report(7, ok,
         std::to_string(clean) + "/1000 randomized problems met all postconditions; " +
             std::to_string(rejected_b + rejected_c) +
             "/100 invalid problems rejected with the named precondition");
  CHECK(ok);
}

TEST_CASE("criterion 8: the candidate degree obeys both modal bounds") {
  std::mt19937_64 rng(90210);
  std::size_t checked = 0, violations = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    Formula f = gkd45::random_formula(rng, 3, {"p", "q"});
    Valuation v, u;
    for (const Formula& a : gkd45::fixed_points(f))
      v.set(a, Rat(static_cast<long long>(rng() % 10), 9));
    for (const Formula& s : gkd45::subformulas(f))
      if (s.is_atom() && s.kind() != gkd45::Conn::Bot)
        u.set(s, Rat(static_cast<long long>(rng() % 10), 9));
    Rat pi = gkd45::pi_phi(v, u, f);
    for (const Formula& s : gkd45::subformulas(f)) {
      Rat us = gkd45::prop_eval(s, u);
      if (!(pi <= gkd45::g_implies(v.at(Formula::box(s)), us))) ++violations;
      if (!(pi <= gkd45::g_implies(us, v.at(Formula::dia(s))))) ++violations;
      ++checked;
    }
  }
  bool ok = violations == 0 && checked >= 1000;
  report(8, ok,
         "1000 random valuation pairs, " + std::to_string(checked) +
             " subformula bounds checked: " + std::to_string(violations) + " violations");
  CHECK(ok);
}

namespace {

// Compact table of every one-variable formula of tree depth <= 2, built by
// levels so values can be composed from children.
struct PoolEntry {
  int op;  // 0 var, 1 bot, 2 and, 3 or, 4 imp, 5 box, 6 dia
  int a = -1, b = -1;
  int depth = 0;
};

struct CompactModel {
  int k;
  std::array<int, 2> pi;
  std::array<int, 2> e;
};

std::vector<CompactModel> collect_models(const std::vector<Rat>& grid) {
  SearchBounds b;
  b.max_worlds = 2;
  b.grid = grid;
  b.variables = {"p"};
  std::vector<CompactModel> out;
  auto index_of = [&](const Rat& r) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] == r) return static_cast<int>(i);
    throw std::logic_error("off-grid value");
  };
  gkd45::enumerate_models(b, ModelClass::PiG, [&](const AnyModel& m) {
    const auto& pm = std::get<PossModel>(m);
    CompactModel c{};
    c.k = pm.world_count();
    for (int w = 0; w < c.k; ++w) {
      c.pi[w] = index_of(pm.pi(w));
      c.e[w] = index_of(pm.value(w, 0));
    }
    out.push_back(c);
    return true;
  });
  return out;
}

// Per-model per-world value table for the whole pool, as grid indices.
std::vector<std::array<int, 2>> pool_values(const std::vector<PoolEntry>& pool,
                                            const CompactModel& m, int top) {
  auto imp = [top](int x, int y) { return x <= y ? top : y; };
  std::vector<std::array<int, 2>> val(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const PoolEntry& pe = pool[i];
    for (int w = 0; w < m.k; ++w) {
      int x;
      switch (pe.op) {
        case 0: x = m.e[w]; break;
        case 1: x = 0; break;
        case 2: x = std::min(val[pe.a][w], val[pe.b][w]); break;
        case 3: x = std::max(val[pe.a][w], val[pe.b][w]); break;
        case 4: x = imp(val[pe.a][w], val[pe.b][w]); break;
        case 5: {
          x = top;
          for (int v = 0; v < m.k; ++v) x = std::min(x, imp(m.pi[v], val[pe.a][v]));
          break;
        }
        default: {
          x = 0;
          for (int v = 0; v < m.k; ++v) x = std::max(x, std::min(m.pi[v], val[pe.a][v]));
          break;
        }
      }
      val[i][w] = x;
    }
  }
  return val;
}

}  // namespace

TEST_CASE("criterion 9: the pruned default chain matches a finer grid on every small formula") {
  // Default chain for 2 worlds, 1 variable...
  std::vector<Rat> pruned = gkd45::resolve_grid(bounds(2, 0), 1, ModelClass::PiG);
  REQUIRE(pruned == std::vector<Rat>{Rat(0), Rat(1, 3), Rat(2, 3), Rat(1)});
  // ...against every value expressible with denominator <= 3.
  std::vector<Rat> farey{Rat(0), Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(1)};

  // Pool of all distinct formulas of tree depth <= 2 over one variable.
  std::vector<PoolEntry> pool = {{0, -1, -1, 0}, {1, -1, -1, 0}};
  std::set<std::array<int, 3>> keys;
  auto add = [&](int op, int a, int b, int depth) {
    if (keys.insert({op, a, b}).second) pool.push_back({op, a, b, depth});
  };
  for (int level = 1; level <= 2; ++level) {
    std::size_t upto = pool.size();
    for (std::size_t a = 0; a < upto; ++a) {
      if (pool[a].depth > level - 1) continue;
      add(5, static_cast<int>(a), -1, level);
      add(6, static_cast<int>(a), -1, level);
      for (std::size_t b = 0; b < upto; ++b) {
        if (pool[b].depth > level - 1) continue;
        add(2, static_cast<int>(a), static_cast<int>(b), level);
        add(3, static_cast<int>(a), static_cast<int>(b), level);
        add(4, static_cast<int>(a), static_cast<int>(b), level);
      }
    }
  }
  REQUIRE(pool.size() == 1010);

  auto mp = collect_models(pruned);
  auto mf = collect_models(farey);
  REQUIRE(mp.size() == 62);
  REQUIRE(mf.size() == 120);
  const int top_p = static_cast<int>(pruned.size()) - 1;
  const int top_f = static_cast<int>(farey.size()) - 1;

  std::vector<std::vector<std::array<int, 2>>> vp, vf;
  for (const auto& m : mp) vp.push_back(pool_values(pool, m, top_p));
  for (const auto& m : mf) vf.push_back(pool_values(pool, m, top_f));

  auto imp = [](int x, int y, int top) { return x <= y ? top : y; };
  // candidate value at one world from stored child vectors
  auto cand_value = [&](int op, int a, int b, const std::vector<std::array<int, 2>>& val,
                        const CompactModel& m, int top, int w) {
    switch (op) {
      case 2: return std::min(val[a][w], val[b][w]);
      case 3: return std::max(val[a][w], val[b][w]);
      case 4: return imp(val[a][w], val[b][w], top);
      case 5: {
        int x = top;
        for (int v = 0; v < m.k; ++v) x = std::min(x, imp(m.pi[v], val[a][v], top));
        return x;
      }
      default: {
        int x = 0;
        for (int v = 0; v < m.k; ++v) x = std::max(x, std::min(m.pi[v], val[a][v]));
        return x;
      }
    }
  };
  auto valid_everywhere = [&](int op, int a, int b, const std::vector<CompactModel>& ms,
                              const std::vector<std::vector<std::array<int, 2>>>& vals,
                              int top) {
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (int w = 0; w < ms[i].k; ++w)
        if (cand_value(op, a, b, vals[i], ms[i], top, w) != top) return false;
    return true;
  };
  auto pool_valid = [&](std::size_t idx, const std::vector<CompactModel>& ms,
                        const std::vector<std::vector<std::array<int, 2>>>& vals, int top) {
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (int w = 0; w < ms[i].k; ++w)
        if (vals[i][idx][w] != top) return false;
    return true;
  };

  std::uint64_t candidates = 0, valid_count = 0, mismatches = 0;
  // the two atoms themselves
  for (std::size_t i = 0; i < 2; ++i) {
    ++candidates;
    bool a = pool_valid(i, mp, vp, top_p);
    bool b = pool_valid(i, mf, vf, top_f);
    if (a != b) ++mismatches;
    if (a) ++valid_count;
  }
  const int n = static_cast<int>(pool.size());
  // one connective over pool entries covers every formula of depth 1..3
  for (int a = 0; a < n; ++a) {
    for (int op : {5, 6}) {
      ++candidates;
      bool x = valid_everywhere(op, a, -1, mp, vp, top_p);
      bool y = valid_everywhere(op, a, -1, mf, vf, top_f);
      if (x != y) ++mismatches;
      if (x) ++valid_count;
    }
    for (int b = 0; b < n; ++b)
      for (int op : {2, 3, 4}) {
        ++candidates;
        bool x = valid_everywhere(op, a, b, mp, vp, top_p);
        bool y = valid_everywhere(op, a, b, mf, vf, top_f);
        if (x != y) ++mismatches;
        if (x) ++valid_count;
      }
  }
  bool ok = mismatches == 0 && candidates == 3062322;
  report(9, ok,
         std::to_string(candidates) + " formulas of depth <= 3, " +
             std::to_string(valid_count) + " valid on both grids (62 pruned vs 120 refined models): " +
             std::to_string(mismatches) + " verdict differences");
  CHECK(ok);
}
