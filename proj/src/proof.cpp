#include "gkd45/proof.hpp"

#include <algorithm>
#include <sstream>

namespace gkd45 {

namespace {

Formula mv(const char* name) { return Formula::var(name); }

std::vector<AxiomSchema> build_catalogue() {
  Formula phi = mv("phi"), psi = mv("psi"), chi = mv("chi");
  auto I = Formula::impl;
  std::vector<AxiomSchema> v;
  auto add = [&v](const char* name, Formula tmpl, std::vector<std::string> mvs) {
    v.push_back({name, std::move(tmpl), std::move(mvs)});
  };
  // Propositional base: intuitionistic logic plus prelinearity.
  add("then1", I(phi, I(psi, phi)), {"phi", "psi"});
  add("then2", I(I(phi, I(psi, chi)), I(I(phi, psi), I(phi, chi))), {"phi", "psi", "chi"});
  add("and1", I(Formula::conj(phi, psi), phi), {"phi", "psi"});
  add("and2", I(Formula::conj(phi, psi), psi), {"phi", "psi"});
  add("and3", I(phi, I(psi, Formula::conj(phi, psi))), {"phi", "psi"});
  add("or1", I(phi, Formula::disj(phi, psi)), {"phi", "psi"});
  add("or2", I(psi, Formula::disj(phi, psi)), {"phi", "psi"});
  add("or3", I(I(phi, chi), I(I(psi, chi), I(Formula::disj(phi, psi), chi))),
      {"phi", "psi", "chi"});
  add("efq", I(Formula::bot(), phi), {"phi"});
  add("lin", Formula::disj(I(phi, psi), I(psi, phi)), {"phi", "psi"});
  // Modal schemata.
  add("K_box", I(Formula::box(I(phi, psi)), I(Formula::box(phi), Formula::box(psi))),
      {"phi", "psi"});
  add("K_dia", I(Formula::dia(Formula::disj(phi, psi)),
                 Formula::disj(Formula::dia(phi), Formula::dia(psi))),
      {"phi", "psi"});
  add("F_box", Formula::box(Formula::top()), {});
  add("P", I(Formula::box(I(phi, psi)), I(Formula::dia(phi), Formula::dia(psi))), {"phi", "psi"});
  add("FS2", I(I(Formula::dia(phi), Formula::box(psi)), Formula::box(I(phi, psi))),
      {"phi", "psi"});
  add("D", Formula::dia(Formula::top()), {});
  add("4_box", I(Formula::box(phi), Formula::box(Formula::box(phi))), {"phi"});
  add("4_dia", I(Formula::dia(Formula::dia(phi)), Formula::dia(phi)), {"phi"});
  add("5_box", I(Formula::dia(Formula::box(phi)), Formula::box(phi)), {"phi"});
  add("5_dia", I(Formula::dia(phi), Formula::box(Formula::dia(phi))), {"phi"});
  return v;
}

Formula substitute(const Formula& f, const std::map<std::string, Formula>& subst) {
  switch (f.kind()) {
    case Conn::Var: {
      auto it = subst.find(f.var_name());
      return it != subst.end() ? it->second : f;
    }
    case Conn::Bot:
      return f;
    case Conn::Box:
      return Formula::box(substitute(f.child(), subst));
    case Conn::Diamond:
      return Formula::dia(substitute(f.child(), subst));
    case Conn::And:
      return Formula::conj(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
    case Conn::Or:
      return Formula::disj(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
    case Conn::Implies:
      return Formula::impl(substitute(f.lhs(), subst), substitute(f.rhs(), subst));
  }
  throw std::logic_error("unreachable");
}

// One-sided pattern match of a schema template against a formula.
bool match(const Formula& tmpl, const Formula& f, const std::vector<std::string>& metavars,
           std::map<std::string, Formula>& bind) {
  if (tmpl.kind() == Conn::Var &&
      std::find(metavars.begin(), metavars.end(), tmpl.var_name()) != metavars.end()) {
    auto it = bind.find(tmpl.var_name());
    if (it != bind.end()) return it->second == f;
    bind.emplace(tmpl.var_name(), f);
    return true;
  }
  if (tmpl.kind() != f.kind()) return false;
  switch (tmpl.kind()) {
    case Conn::Var:
      return tmpl.var_name() == f.var_name();
    case Conn::Bot:
      return true;
    case Conn::Box:
    case Conn::Diamond:
      return match(tmpl.child(), f.child(), metavars, bind);
    default:
      return match(tmpl.lhs(), f.lhs(), metavars, bind) &&
             match(tmpl.rhs(), f.rhs(), metavars, bind);
  }
}

}  // namespace

const std::vector<AxiomSchema>& axiom_catalogue() {
  static const std::vector<AxiomSchema> cat = build_catalogue();
  return cat;
}

const AxiomSchema* find_axiom(const std::string& name) {
  for (const auto& s : axiom_catalogue())
    if (s.name == name) return &s;
  return nullptr;
}

Formula instantiate(const AxiomSchema& schema, const std::map<std::string, Formula>& subst) {
  for (const auto& m : schema.metavars)
    if (subst.find(m) == subst.end())
      throw std::invalid_argument("substitution for schema '" + schema.name +
                                  "' misses metavariable '" + m + "'");
  return substitute(schema.tmpl, subst);
}

Justification Justification::axiom(std::string name, std::map<std::string, Formula> subst) {
  Justification j;
  j.kind = Kind::Axiom;
  j.axiom_name = std::move(name);
  j.subst = std::move(subst);
  return j;
}

Justification Justification::premise(std::size_t k) {
  Justification j;
  j.kind = Kind::Premise;
  j.i = k;
  return j;
}

Justification Justification::mp(std::size_t i, std::size_t jj) {
  Justification j;
  j.kind = Kind::MP;
  j.i = i;
  j.j = jj;
  return j;
}

Justification Justification::nec(std::size_t i) {
  Justification j;
  j.kind = Kind::Nec;
  j.i = i;
  return j;
}

std::optional<ProofError> check(const Proof& p) {
  if (p.steps.empty()) return ProofError{0, "proof has no steps"};
  std::vector<bool> dep(p.steps.size() + 1, false);  // 1-based: depends on a premise
  for (std::size_t n = 1; n <= p.steps.size(); n++) {
    const ProofStep& s = p.steps[n - 1];
    const Justification& j = s.just;
    auto bad = [&](const std::string& why) { return ProofError{n, why}; };
    switch (j.kind) {
      case Justification::Kind::Axiom: {
        const AxiomSchema* schema = find_axiom(j.axiom_name);
        if (!schema) return bad("unknown axiom schema '" + j.axiom_name + "'");
        if (j.subst.empty() && !schema->metavars.empty()) {
          std::map<std::string, Formula> bind;
          if (!match(schema->tmpl, s.formula, schema->metavars, bind))
            return bad("formula '" + s.formula.text() + "' is not an instance of schema '" +
                       schema->name + "'");
          break;
        }
        for (const auto& kv : j.subst)
          if (std::find(schema->metavars.begin(), schema->metavars.end(), kv.first) ==
              schema->metavars.end())
            return bad("schema '" + schema->name + "' has no metavariable '" + kv.first + "'");
        Formula want = [&]() -> Formula {
          try {
            return instantiate(*schema, j.subst);
          } catch (const std::invalid_argument&) {
            return Formula::bot();
          }
        }();
        for (const auto& m : schema->metavars)
          if (j.subst.find(m) == j.subst.end())
            return bad("substitution misses metavariable '" + m + "' of schema '" + schema->name +
                       "'");
        if (!(want == s.formula))
          return bad("schema instance mismatch: expected '" + want.text() + "', step has '" +
                     s.formula.text() + "'");
        break;
      }
      case Justification::Kind::Premise: {
        if (j.i == 0 || j.i > p.premises.size())
          return bad("premise index " + std::to_string(j.i) + " out of range");
        if (!(p.premises[j.i - 1] == s.formula))
          return bad("premise " + std::to_string(j.i) + " is '" + p.premises[j.i - 1].text() +
                     "', step has '" + s.formula.text() + "'");
        dep[n] = true;
        break;
      }
      case Justification::Kind::MP: {
        if (j.i == 0 || j.i >= n) return bad("mp antecedent reference " + std::to_string(j.i) +
                                             " does not point to an earlier step");
        if (j.j == 0 || j.j >= n) return bad("mp implication reference " + std::to_string(j.j) +
                                             " does not point to an earlier step");
        const Formula& a = p.steps[j.i - 1].formula;
        const Formula& ab = p.steps[j.j - 1].formula;
        if (ab.kind() != Conn::Implies)
          return bad("mp: step " + std::to_string(j.j) + " ('" + ab.text() +
                     "') is not an implication");
        if (!(ab.lhs() == a))
          return bad("mp: antecedent of step " + std::to_string(j.j) + " is '" + ab.lhs().text() +
                     "', but step " + std::to_string(j.i) + " is '" + a.text() + "'");
        if (!(ab.rhs() == s.formula))
          return bad("mp: consequent of step " + std::to_string(j.j) + " is '" + ab.rhs().text() +
                     "', but this step is '" + s.formula.text() + "'");
        dep[n] = dep[j.i] || dep[j.j];
        break;
      }
      case Justification::Kind::Nec: {
        if (j.i == 0 || j.i >= n)
          return bad("nec reference " + std::to_string(j.i) + " does not point to an earlier step");
        if (dep[j.i])
          return bad("nec applied to step " + std::to_string(j.i) +
                     ", which depends on a premise");
        if (s.formula.kind() != Conn::Box || !(s.formula.child() == p.steps[j.i - 1].formula))
          return bad("nec: expected '" + Formula::box(p.steps[j.i - 1].formula).text() +
                     "', step has '" + s.formula.text() + "'");
        break;
      }
    }
  }
  if (!(p.steps.back().formula == p.conclusion))
    return ProofError{0, "last step is '" + p.steps.back().formula.text() +
                             "' but the stated conclusion is '" + p.conclusion.text() + "'"};
  return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_line(std::size_t lineno, const std::string& why) {
  throw std::invalid_argument("proof line " + std::to_string(lineno) + ": " + why);
}

}  // namespace

Proof parse_proof(const std::string& text) {
  std::vector<ProofStep> steps;
  std::vector<std::optional<Formula>> premises;
  std::optional<Formula> conclusion;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    lineno++;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("qed", 0) == 0) {
      if (conclusion) fail_line(lineno, "duplicate qed line");
      conclusion = parse_formula(line.substr(3));
      continue;
    }
    if (conclusion) fail_line(lineno, "step after qed line");
    auto dot = line.find('.');
    if (dot == std::string::npos) fail_line(lineno, "expected '<n>. <formula> ; <rule>'");
    std::size_t n = 0;
    try {
      n = std::stoul(line.substr(0, dot));
    } catch (...) {
      fail_line(lineno, "bad step number '" + line.substr(0, dot) + "'");
    }
    if (n != steps.size() + 1)
      fail_line(lineno, "step number " + std::to_string(n) + ", expected " +
                            std::to_string(steps.size() + 1));
    auto semi = line.find(';', dot + 1);
    if (semi == std::string::npos) fail_line(lineno, "missing ';' before the rule");
    Formula f = [&] {
      try {
        return parse_formula(line.substr(dot + 1, semi - dot - 1));
      } catch (const parse_error& e) {
        fail_line(lineno, e.what());
      }
    }();
    std::istringstream rule(line.substr(semi + 1));
    std::string keyword;
    rule >> keyword;
    if (keyword == "axiom") {
      std::string name;
      rule >> name;
      if (name.empty()) fail_line(lineno, "axiom rule needs a schema name");
      std::string rest;
      std::getline(rule, rest);
      rest = trim(rest);
      std::map<std::string, Formula> subst;
      if (!rest.empty()) {
        if (rest.front() != '[' || rest.back() != ']')
          fail_line(lineno, "substitution must be bracketed: [mv=formula, ...]");
        std::string body = rest.substr(1, rest.size() - 2);
        std::size_t pos = 0;
        while (pos < body.size()) {
          std::size_t comma = body.find(',', pos);
          std::string item =
              comma == std::string::npos ? body.substr(pos) : body.substr(pos, comma - pos);
          pos = comma == std::string::npos ? body.size() : comma + 1;
          item = trim(item);
          if (item.empty()) continue;
          auto eq = item.find('=');
          if (eq == std::string::npos) fail_line(lineno, "substitution item needs '='");
          std::string key = trim(item.substr(0, eq));
          try {
            subst.emplace(key, parse_formula(item.substr(eq + 1)));
          } catch (const parse_error& e) {
            fail_line(lineno, e.what());
          }
        }
      }
      steps.push_back({f, Justification::axiom(name, std::move(subst))});
    } else if (keyword == "premise") {
      std::size_t k = 0;
      rule >> k;
      if (k == 0) fail_line(lineno, "premise rule needs a positive index");
      if (premises.size() < k) premises.resize(k);
      if (premises[k - 1] && !(*premises[k - 1] == f))
        fail_line(lineno, "premise " + std::to_string(k) + " already declared as '" +
                              premises[k - 1]->text() + "'");
      premises[k - 1] = f;
      steps.push_back({f, Justification::premise(k)});
    } else if (keyword == "mp") {
      std::size_t i = 0, j = 0;
      rule >> i >> j;
      if (i == 0 || j == 0) fail_line(lineno, "mp rule needs two step references");
      steps.push_back({f, Justification::mp(i, j)});
    } else if (keyword == "nec") {
      std::size_t i = 0;
      rule >> i;
      if (i == 0) fail_line(lineno, "nec rule needs a step reference");
      steps.push_back({f, Justification::nec(i)});
    } else {
      fail_line(lineno, "unknown rule '" + keyword + "'");
    }
  }
  if (!conclusion) throw std::invalid_argument("proof has no qed line");
  if (steps.empty()) throw std::invalid_argument("proof has no steps");
  std::vector<Formula> prem;
  for (std::size_t i = 0; i < premises.size(); i++) {
    if (!premises[i])
      throw std::invalid_argument("premise " + std::to_string(i + 1) + " is never declared");
    prem.push_back(*premises[i]);
  }
  return Proof{std::move(prem), std::move(steps), *conclusion};
}

std::string print_proof(const Proof& p) {
  std::ostringstream out;
  for (std::size_t n = 1; n <= p.steps.size(); n++) {
    const ProofStep& s = p.steps[n - 1];
    out << n << ". " << s.formula.text() << " ; ";
    switch (s.just.kind) {
      case Justification::Kind::Axiom: {
        out << "axiom " << s.just.axiom_name;
        if (!s.just.subst.empty()) {
          out << " [";
          bool first = true;
          for (const auto& kv : s.just.subst) {
            if (!first) out << ", ";
            first = false;
            out << kv.first << "=" << kv.second.text();
          }
          out << "]";
        }
        break;
      }
      case Justification::Kind::Premise:
        out << "premise " << s.just.i;
        break;
      case Justification::Kind::MP:
        out << "mp " << s.just.i << " " << s.just.j;
        break;
      case Justification::Kind::Nec:
        out << "nec " << s.just.i;
        break;
    }
    out << "\n";
  }
  out << "qed " << p.conclusion.text() << "\n";
  return out.str();
}

namespace {

// Incremental construction of premise-free derivations.
struct Builder {
  Proof p;

  std::size_t push(Formula f, Justification j) {
    p.steps.push_back({std::move(f), std::move(j)});
    return p.steps.size();
  }

  std::size_t axiom(const std::string& name, std::map<std::string, Formula> subst) {
    const AxiomSchema* s = find_axiom(name);
    Formula f = instantiate(*s, subst);
    return push(std::move(f), Justification::axiom(name, std::move(subst)));
  }

  const Formula& at(std::size_t i) const { return p.steps[i - 1].formula; }

  std::size_t mp(std::size_t i, std::size_t j) {
    return push(at(j).rhs(), Justification::mp(i, j));
  }

  std::size_t nec(std::size_t i) { return push(Formula::box(at(i)), Justification::nec(i)); }

  // From i : A -> B and j : B -> C, derive A -> C.
  std::size_t syl(std::size_t i, std::size_t j) {
    Formula A = at(i).lhs(), B = at(i).rhs(), C = at(j).rhs();
    std::size_t s1 = axiom("then1", {{"phi", at(j)}, {"psi", A}});
    std::size_t s2 = mp(j, s1);
    std::size_t s3 = axiom("then2", {{"phi", A}, {"psi", B}, {"chi", C}});
    std::size_t s4 = mp(s2, s3);
    return mp(i, s4);
  }

  // A -> A.
  std::size_t identity(const Formula& A) {
    Formula AA = Formula::impl(A, A);
    std::size_t s1 = axiom("then1", {{"phi", A}, {"psi", AA}});
    std::size_t s2 = axiom("then2", {{"phi", A}, {"psi", AA}, {"chi", A}});
    std::size_t s3 = mp(s1, s2);
    std::size_t s4 = axiom("then1", {{"phi", A}, {"psi", A}});
    return mp(s4, s3);
  }

  // From a proved theorem chi at step i, derive dia chi: chi gives
  // top -> chi, necessitation and P turn it into dia top -> dia chi, and D
  // provides dia top.
  std::size_t dia_of(std::size_t i) {
    Formula chi = at(i);
    std::size_t s1 = axiom("then1", {{"phi", chi}, {"psi", Formula::top()}});
    std::size_t s2 = mp(i, s1);
    std::size_t s3 = nec(s2);
    std::size_t s4 = axiom("P", {{"phi", Formula::top()}, {"psi", chi}});
    std::size_t s5 = mp(s3, s4);
    std::size_t s6 = axiom("D", {});
    return mp(s6, s5);
  }

  // dia (A -> B) -> (box A -> dia B), derived from K_box, P and the
  // propositional base.
  std::size_t t5(const Formula& A, const Formula& B) {
    Formula AB = Formula::impl(A, B);
    // assertion: A -> ((A -> B) -> B)
    std::size_t a1 = identity(AB);
    std::size_t a2 = axiom("then2", {{"phi", AB}, {"psi", A}, {"chi", B}});
    std::size_t a3 = mp(a1, a2);
    std::size_t a4 = axiom("then1", {{"phi", A}, {"psi", AB}});
    std::size_t a5 = syl(a4, a3);
    // box A -> (dia (A -> B) -> dia B)
    std::size_t b1 = nec(a5);
    std::size_t b2 = axiom("K_box", {{"phi", A}, {"psi", Formula::impl(AB, B)}});
    std::size_t b3 = mp(b1, b2);
    std::size_t b4 = axiom("P", {{"phi", AB}, {"psi", B}});
    std::size_t b5 = syl(b3, b4);
    // exchange the antecedents
    Formula boxA = Formula::box(A), diaAB = Formula::dia(AB), diaB = Formula::dia(B);
    std::size_t c1 = axiom("then2", {{"phi", boxA}, {"psi", diaAB}, {"chi", diaB}});
    std::size_t c2 = mp(b5, c1);
    std::size_t c3 = axiom("then1", {{"phi", diaAB}, {"psi", boxA}});
    return syl(c3, c2);
  }

  Proof done(Formula conclusion) {
    p.conclusion = std::move(conclusion);
    return std::move(p);
  }
};

Proof make_proof1() {
  Formula p = Formula::var("p"), dp = Formula::dia(p);
  Builder b{Proof{{}, {}, Formula::bot()}};
  std::size_t s1 = b.axiom("5_dia", {{"phi", p}});
  std::size_t s2 = b.axiom("FS2", {{"phi", p}, {"psi", dp}});
  std::size_t s3 = b.mp(s1, s2);
  std::size_t s4 = b.axiom("P", {{"phi", p}, {"psi", dp}});
  b.mp(s3, s4);
  return b.done(Formula::impl(dp, Formula::dia(dp)));
}

Proof make_proof2() {
  Formula p = Formula::var("p"), bp = Formula::box(p);
  Builder b{Proof{{}, {}, Formula::bot()}};
  std::size_t s1 = b.axiom("5_box", {{"phi", p}});
  std::size_t s2 = b.axiom("FS2", {{"phi", bp}, {"psi", p}});
  std::size_t s3 = b.mp(s1, s2);
  std::size_t s4 = b.axiom("K_box", {{"phi", bp}, {"psi", p}});
  b.mp(s3, s4);
  return b.done(Formula::impl(Formula::box(bp), bp));
}

Proof make_proof3() {
  Formula p = Formula::var("p"), A = Formula::dia(p);
  Builder b{Proof{{}, {}, Formula::bot()}};
  std::size_t id = b.identity(A);
  std::size_t diaAA = b.dia_of(id);
  std::size_t t5i = b.t5(A, A);
  std::size_t m = b.mp(diaAA, t5i);  // box dia p -> dia dia p
  std::size_t f = b.axiom("4_dia", {{"phi", p}});
  b.syl(m, f);
  return b.done(Formula::impl(Formula::box(A), A));
}

Proof make_proof4() {
  Formula p = Formula::var("p"), A = Formula::box(p);
  Builder b{Proof{{}, {}, Formula::bot()}};
  std::size_t id = b.identity(A);
  std::size_t diaAA = b.dia_of(id);
  std::size_t t5i = b.t5(A, A);
  std::size_t m = b.mp(diaAA, t5i);  // box box p -> dia box p
  std::size_t f = b.axiom("4_box", {{"phi", p}});
  b.syl(f, m);
  return b.done(Formula::impl(A, Formula::dia(A)));
}

Proof make_t5() {
  Formula p = Formula::var("p"), q = Formula::var("q");
  Builder b{Proof{{}, {}, Formula::bot()}};
  b.t5(p, q);
  return b.done(Formula::impl(Formula::dia(Formula::impl(p, q)),
                              Formula::impl(Formula::box(p), Formula::dia(q))));
}

}  // namespace

const std::vector<std::pair<std::string, Proof>>& builtin_derivations() {
  static const std::vector<std::pair<std::string, Proof>> v = {
      {"proof1", make_proof1()}, {"proof2", make_proof2()}, {"proof3", make_proof3()},
      {"proof4", make_proof4()}, {"t5", make_t5()},
  };
  return v;
}

const Proof* find_builtin(const std::string& name) {
  for (const auto& kv : builtin_derivations())
    if (kv.first == name) return &kv.second;
  return nullptr;
}

}  // namespace gkd45
