#include "doctest.h"
#include "gkd45/model.hpp"
#include "gkd45/proof.hpp"
#include "gkd45/search.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

using gkd45::AxiomSchema;
using gkd45::Formula;
using gkd45::instantiate;
using gkd45::Justification;
using gkd45::parse_formula;
using gkd45::Proof;
using gkd45::ProofStep;

TEST_CASE("the axiom catalogue names every schema once") {
  const auto& cat = gkd45::axiom_catalogue();
  std::set<std::string> names;
  for (const auto& s : cat) {
    CHECK(names.insert(s.name).second);
    CHECK_FALSE(s.tmpl.text().empty());
  }
  // propositional base plus the ten modal schemata
  for (const char* n : {"then1", "then2", "and1", "and2", "and3", "or1", "or2", "or3",
                        "efq", "lin", "K_box", "K_dia", "F_box", "P", "FS2", "D",
                        "4_box", "4_dia", "5_box", "5_dia"})
    CHECK(gkd45::find_axiom(n) != nullptr);
  CHECK(gkd45::find_axiom("nonsense") == nullptr);
}

TEST_CASE("instantiation substitutes metavariables exactly") {
  const AxiomSchema* k = gkd45::find_axiom("K_box");
  REQUIRE(k != nullptr);
  Formula inst = instantiate(*k, {{"phi", parse_formula("p & q")},
                                  {"psi", parse_formula("<> r")}});
  CHECK(inst == parse_formula("[] (p & q -> <> r) -> ([] (p & q) -> [] <> r)"));
  CHECK_THROWS_AS(instantiate(*k, {{"phi", parse_formula("p")}}), std::invalid_argument);

  const AxiomSchema* d = gkd45::find_axiom("D");
  REQUIRE(d != nullptr);
  CHECK(instantiate(*d, {}) == parse_formula("<> (bot -> bot)"));
}

TEST_CASE("modal schema instances hold in every possibilistic model") {
  std::mt19937_64 rng(20260401);
  std::vector<Formula> instances;
  for (const auto& s : gkd45::axiom_catalogue()) {
    std::map<std::string, Formula> subst;
    const char* fill[] = {"p", "<> q"};
    std::size_t i = 0;
    for (const auto& mv : s.metavars) subst.emplace(mv, parse_formula(fill[i++ % 2]));
    instances.push_back(instantiate(s, subst));
  }
  for (int t = 0; t < 300; ++t) {
    gkd45::AnyModel m = gkd45::random_model(gkd45::ModelClass::PiG, 1 + int(rng() % 3), 4,
                                            {"p", "q"}, rng());
    for (const Formula& f : instances) CHECK(gkd45::is_valid_in_model(m, f));
  }
}

TEST_CASE("builtin derivations check end to end") {
  const auto& all = gkd45::builtin_derivations();
  REQUIRE(all.size() == 5);
  std::map<std::string, std::string> expect = {
      {"proof1", "<> p -> <> <> p"},
      {"proof2", "[] [] p -> [] p"},
      {"proof3", "[] <> p -> <> p"},
      {"proof4", "[] p -> <> [] p"},
      {"t5", "<> (p -> q) -> ([] p -> <> q)"},
  };
  for (const auto& [name, proof] : all) {
    CAPTURE(name);
    REQUIRE(expect.count(name) == 1);
    CHECK(proof.conclusion == parse_formula(expect[name]));
    CHECK(proof.premises.empty());
    auto err = gkd45::check(proof);
    if (err) {
      CAPTURE(err->step);
      CAPTURE(err->reason);
    }
    CHECK_FALSE(err.has_value());
  }
  CHECK(gkd45::find_builtin("proof1") != nullptr);
  CHECK(gkd45::find_builtin("zzz") == nullptr);
}

TEST_CASE("every line of every builtin derivation is semantically valid") {
  std::mt19937_64 rng(8);
  std::vector<gkd45::AnyModel> models;
  for (int t = 0; t < 120; ++t)
    models.push_back(gkd45::random_model(gkd45::ModelClass::PiG, 1 + int(rng() % 3), 5,
                                         {"p", "q"}, rng()));
  for (const auto& [name, proof] : gkd45::builtin_derivations()) {
    CAPTURE(name);
    for (const ProofStep& s : proof.steps)
      for (const auto& m : models) CHECK(gkd45::is_valid_in_model(m, s.formula));
  }
}

TEST_CASE("proof text round-trips through parse and print") {
  for (const auto& [name, proof] : gkd45::builtin_derivations()) {
    CAPTURE(name);
    std::string text = gkd45::print_proof(proof);
    Proof back = gkd45::parse_proof(text);
    CHECK_FALSE(gkd45::check(back).has_value());
    CHECK(gkd45::print_proof(back) == text);
  }
}

TEST_CASE("parsing rejects malformed proof scripts") {
  CHECK_THROWS_AS(gkd45::parse_proof("garbage"), std::invalid_argument);
  CHECK_THROWS_AS(gkd45::parse_proof("1. p ; axiom then1\n"), std::invalid_argument);  // no qed
  CHECK_THROWS_AS(gkd45::parse_proof("qed p\n"), std::invalid_argument);               // no steps
  CHECK_THROWS_AS(gkd45::parse_proof("2. p ; premise 1\nqed p\n"), std::invalid_argument);
  CHECK_THROWS_AS(gkd45::parse_proof("1. p ; frobnicate\nqed p\n"), std::invalid_argument);
  // comments and blank lines are fine
  Proof p = gkd45::parse_proof("# a premise restated\n\n1. p ; premise 1\nqed p\n");
  CHECK_FALSE(gkd45::check(p).has_value());
}

TEST_CASE("premises may be used but block necessitation") {
  Proof ok{{}, {}, Formula::bot()};
  ok.premises = {parse_formula("p")};
  ok.steps.push_back({parse_formula("p"), Justification::premise(1)});
  ok.conclusion = parse_formula("p");
  CHECK_FALSE(gkd45::check(ok).has_value());

  Proof bad = ok;
  bad.steps.push_back({parse_formula("[] p"), Justification::nec(1)});
  bad.conclusion = parse_formula("[] p");
  auto err = gkd45::check(bad);
  REQUIRE(err.has_value());
  CHECK(err->step == 2);

  // nec on an axiom-derived line is fine
  Proof good{{}, {}, Formula::bot()};
  good.steps.push_back(
      {parse_formula("p -> (q -> p)"),
       Justification::axiom("then1", {{"phi", parse_formula("p")},
                                      {"psi", parse_formula("q")}})});
  good.steps.push_back({parse_formula("[] (p -> (q -> p))"), Justification::nec(1)});
  good.conclusion = parse_formula("[] (p -> (q -> p))");
  CHECK_FALSE(gkd45::check(good).has_value());
}

namespace {
std::size_t first_mp_step(const Proof& p) {
  for (std::size_t i = 0; i < p.steps.size(); ++i)
    if (p.steps[i].just.kind == Justification::Kind::MP) return i + 1;
  return 0;
}
}  // namespace

TEST_CASE("mutations are caught at the exact offending step") {
  for (const auto& [name, original] : gkd45::builtin_derivations()) {
    CAPTURE(name);

    // tampered formula on line 1
    Proof m1 = original;
    m1.steps[0].formula = parse_formula("bot -> bot");
    auto e1 = gkd45::check(m1);
    REQUIRE(e1.has_value());
    CHECK(e1->step == 1);
    CHECK_FALSE(e1->reason.empty());

    // swapped modus ponens operands
    Proof m2 = original;
    std::size_t mp = first_mp_step(m2);
    REQUIRE(mp > 0);
    std::swap(m2.steps[mp - 1].just.i, m2.steps[mp - 1].just.j);
    auto e2 = gkd45::check(m2);
    REQUIRE(e2.has_value());
    CHECK(e2->step == mp);

    // first axiom step re-labeled with a different schema
    Proof m3 = original;
    std::size_t ax = 0;
    for (std::size_t i = 0; i < m3.steps.size(); ++i)
      if (m3.steps[i].just.kind == Justification::Kind::Axiom) {
        ax = i + 1;
        break;
      }
    REQUIRE(ax > 0);
    const std::string& was = m3.steps[ax - 1].just.axiom_name;
    const auto& mvs = gkd45::find_axiom(was)->metavars;
    for (const auto& s : gkd45::axiom_catalogue())
      if (s.name != was && s.metavars.size() == mvs.size() && !s.metavars.empty()) {
        m3.steps[ax - 1].just.axiom_name = s.name;
        break;
      }
    auto e3 = gkd45::check(m3);
    REQUIRE(e3.has_value());
    CHECK(e3->step == ax);

    // truncated before the final line: conclusion no longer proved
    Proof m4 = original;
    m4.steps.pop_back();
    auto e4 = gkd45::check(m4);
    REQUIRE(e4.has_value());
    CHECK(e4->step == 0);  // proof-level failure
  }
}

TEST_CASE("dangling references and shape errors name their step") {
  Proof p{{}, {}, Formula::bot()};
  p.steps.push_back({parse_formula("p -> (q -> p)"),
                     Justification::axiom("then1", {{"phi", parse_formula("p")},
                                                    {"psi", parse_formula("q")}})});
  p.steps.push_back({parse_formula("q -> p"), Justification::mp(5, 1)});
  p.conclusion = parse_formula("q -> p");
  auto e = gkd45::check(p);
  REQUIRE(e.has_value());
  CHECK(e->step == 2);

  Proof fwd{{}, {}, Formula::bot()};
  fwd.steps.push_back({parse_formula("[] p"), Justification::nec(1)});  // self reference
  fwd.conclusion = parse_formula("[] p");
  auto e2 = gkd45::check(fwd);
  REQUIRE(e2.has_value());
  CHECK(e2->step == 1);

  Proof noprem{{}, {}, Formula::bot()};
  noprem.steps.push_back({parse_formula("p"), Justification::premise(1)});
  noprem.conclusion = parse_formula("p");
  auto e3 = gkd45::check(noprem);
  REQUIRE(e3.has_value());
  CHECK(e3->step == 1);

  // mp whose major premise is not an implication
  Proof shape{{}, {}, Formula::bot()};
  shape.premises = {parse_formula("p"), parse_formula("q")};
  shape.steps.push_back({parse_formula("p"), Justification::premise(1)});
  shape.steps.push_back({parse_formula("q"), Justification::premise(2)});
  shape.steps.push_back({parse_formula("r"), Justification::mp(1, 2)});
  shape.conclusion = parse_formula("r");
  auto e4 = gkd45::check(shape);
  REQUIRE(e4.has_value());
  CHECK(e4->step == 3);
}

TEST_CASE("derivations remain valid under uniform substitution") {
  // Substituting a formula for a variable throughout preserves checkability.
  auto subst_formula = [](const Formula& f, const Formula& repl) {
    AxiomSchema tmp{"tmp", f, {"p"}};
    return instantiate(tmp, {{"p", repl}});
  };
  Formula repl = parse_formula("<> q -> r");
  for (const auto& [name, original] : gkd45::builtin_derivations()) {
    CAPTURE(name);
    Proof sub{{}, {}, Formula::bot()};
    for (const ProofStep& s : original.steps) {
      Justification j = s.just;
      for (auto& kv : j.subst) kv.second = subst_formula(kv.second, repl);
      sub.steps.push_back({subst_formula(s.formula, repl), j});
    }
    sub.conclusion = subst_formula(original.conclusion, repl);
    auto err = gkd45::check(sub);
    if (err) {
      CAPTURE(err->step);
      CAPTURE(err->reason);
    }
    CHECK_FALSE(err.has_value());
  }
}
