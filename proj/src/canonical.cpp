#include "gkd45/canonical.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "gkd45/proof.hpp"

namespace gkd45 {

namespace {

// prop_eval without throwing: nullopt when an atom is outside v's domain.
std::optional<Rat> try_prop_eval(const Formula& f, const Valuation& v) {
  if (f.is_atom()) {
    auto it = v.entries().find(f);
    if (it == v.entries().end()) return std::nullopt;
    return it->second;
  }
  switch (f.kind()) {
    case Conn::Bot:
      return Rat(0);
    case Conn::And: {
      auto a = try_prop_eval(f.lhs(), v), b = try_prop_eval(f.rhs(), v);
      if (!a || !b) return std::nullopt;
      return g_meet(*a, *b);
    }
    case Conn::Or: {
      auto a = try_prop_eval(f.lhs(), v), b = try_prop_eval(f.rhs(), v);
      if (!a || !b) return std::nullopt;
      return g_join(*a, *b);
    }
    case Conn::Implies: {
      auto a = try_prop_eval(f.lhs(), v), b = try_prop_eval(f.rhs(), v);
      if (!a || !b) return std::nullopt;
      return g_implies(*a, *b);
    }
    default:
      return std::nullopt;  // unreachable: modal roots are atoms
  }
}

int sign_of_order(const Rat& a, const Rat& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

bool equivalent_mod_phi(const Valuation& u, const Valuation& w, const Formula& f) {
  for (const Formula& fp : fixed_points(f)) {
    if (u.at(fp) != w.at(fp)) return false;
  }
  return true;
}

Rat pi_phi(const Valuation& v, const Valuation& u, const Formula& f) {
  Rat best(1);
  for (const Formula& s : subformulas(f)) {
    Rat us = prop_eval(s, u);
    Rat lower = g_implies(v.at(Formula::box(s)), us);
    Rat upper = g_implies(us, v.at(Formula::dia(s)));
    best = std::min(best, std::min(lower, upper));
  }
  return best;
}

MonotoneMap::MonotoneMap(std::vector<std::pair<Rat, Rat>> points, bool isolated_one)
    : pts_(std::move(points)), isolated_one_(isolated_one) {
  if (pts_.empty()) throw std::invalid_argument("monotone map needs at least one breakpoint");
  for (const auto& [x, y] : pts_) {
    if (x < Rat(0) || Rat(1) < x || y < Rat(0) || Rat(1) < y)
      throw std::invalid_argument("monotone map breakpoints must lie in [0,1]");
  }
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    if (!(pts_[i - 1].first < pts_[i].first) || !(pts_[i - 1].second < pts_[i].second))
      throw std::invalid_argument("monotone map breakpoints must strictly increase in x and y");
  }
  if (isolated_one_ && pts_.back().first != Rat(1))
    throw std::invalid_argument("a map with an isolated value at 1 must end its segments at x = 1");
}

Rat MonotoneMap::apply(const Rat& x) const {
  if (isolated_one_ && x == Rat(1)) return Rat(1);
  if (x < pts_.front().first || pts_.back().first < x)
    throw std::domain_error("monotone map applied outside its breakpoint range");
  // Find the segment [pts_[i], pts_[i+1]] containing x.
  std::size_t hi = 0;
  while (pts_[hi].first < x) ++hi;
  if (pts_[hi].first == x) return pts_[hi].second;
  const auto& [x0, y0] = pts_[hi - 1];
  const auto& [x1, y1] = pts_[hi];
  return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

NormalizationProblem NormalizationProblem::make(Valuation u, Valuation nu, Formula phi,
                                                std::optional<Rat> delta,
                                                std::optional<Rat> alpha) {
  const std::vector<Formula> deltas = fixed_points(phi);
  std::vector<Rat> uv, nv;
  uv.reserve(deltas.size());
  nv.reserve(deltas.size());
  for (const Formula& L : deltas) {
    uv.push_back(u.at(L));
    nv.push_back(nu.at(L));
  }

  const Rat one(1);
  Rat intrinsic(0), beta(1);
  bool have_low = false, have_high = false;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (nv[i] < one) {
      if (!have_low || intrinsic < uv[i]) intrinsic = uv[i];
      have_low = true;
    } else {
      if (!have_high || uv[i] < beta) beta = uv[i];
      have_high = true;
    }
  }

  Rat a = intrinsic;
  if (alpha.has_value()) {
    a = *alpha;
    if (a < Rat(0) || one < a) throw std::invalid_argument("alpha must lie in [0,1]");
    if (a < intrinsic) {
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (nv[i] < one && a < uv[i])
          throw precondition_error(
              "condition c", deltas[i].text(), "",
              "condition c fails: '" + deltas[i].text() + "' has u-value " + uv[i].str() +
                  " above alpha " + a.str() + " but nu-value " + nv[i].str() + " below 1");
      }
    }
  }

  // Condition b: on atoms with u-value <= alpha, nu and u induce the same
  // strict order. Equal nu below 1 with distinct u is the anchor conflict.
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (a < uv[i]) continue;
    for (std::size_t j = i + 1; j < deltas.size(); ++j) {
      if (a < uv[j]) continue;
      if (nv[i] == nv[j] && nv[i] < one && uv[i] != uv[j])
        throw precondition_error(
            "ill-formed B", deltas[i].text(), deltas[j].text(),
            "no single g-anchor: '" + deltas[i].text() + "' and '" + deltas[j].text() +
                "' share nu-value " + nv[i].str() + " but have u-values " + uv[i].str() +
                " and " + uv[j].str());
      if (sign_of_order(nv[i], nv[j]) != sign_of_order(uv[i], uv[j]))
        throw precondition_error(
            "condition b", deltas[i].text(), deltas[j].text(),
            "condition b fails on '" + deltas[i].text() + "' (u " + uv[i].str() + ", nu " +
                nv[i].str() + ") vs '" + deltas[j].text() + "' (u " + uv[j].str() + ", nu " +
                nv[j].str() + ")");
    }
  }

  Rat d(0);
  if (delta.has_value()) {
    d = *delta;
    if (!(a < d) || beta < d)
      throw precondition_error("delta range", "", "",
                               "delta " + d.str() + " outside the admissible interval (" +
                                   a.str() + ", " + beta.str() + "]");
  } else {
    if (!(a < beta))
      throw precondition_error("delta range", "", "",
                               "no admissible delta: alpha " + a.str() +
                                   " is not below beta " + beta.str());
    d = (a + beta) / Rat(2);
  }

  // g-anchors: one per distinct nu-value in (0,1) among fixed-point atoms.
  std::map<Rat, std::pair<Rat, Formula>> anchors;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(Rat(0) < nv[i]) || !(nv[i] < one)) continue;
    auto it = anchors.find(nv[i]);
    if (it == anchors.end()) anchors.emplace(nv[i], std::make_pair(uv[i], deltas[i]));
  }
  std::vector<std::pair<Rat, Rat>> gpts{{Rat(0), Rat(0)}};
  for (const auto& [b, anchor] : anchors) {
    if (!(Rat(0) < anchor.first))
      throw precondition_error("anchor positivity", anchor.second.text(), "",
                               "'" + anchor.second.text() + "' has nu-value " + b.str() +
                                   " above 0 but u-value 0, colliding with g(0) = 0");
    gpts.emplace_back(b, anchor.first);
  }
  gpts.emplace_back(Rat(1), d);
  MonotoneMap g(std::move(gpts), /*isolated_one=*/true);

  std::vector<std::pair<Rat, Rat>> hpts;
  if (d < beta) {
    hpts.emplace_back(Rat(0), d);
    hpts.emplace_back(beta, beta);
    if (beta < one) hpts.emplace_back(Rat(1), Rat(1));
  } else {
    // delta == beta: h exists only on [beta, 1]; inputs below are rejected
    // at transform time.
    hpts.emplace_back(beta, beta);
    if (beta < one) hpts.emplace_back(Rat(1), Rat(1));
  }
  MonotoneMap h(std::move(hpts), /*isolated_one=*/false);

  return NormalizationProblem(std::move(u), std::move(nu), std::move(phi), std::move(a),
                              std::move(beta), std::move(d), alpha.has_value(), std::move(g),
                              std::move(h));
}

nlohmann::ordered_json NormalizationProblem::to_json() const {
  nlohmann::ordered_json j;
  auto dump = [](const Valuation& v) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [atom, val] : v.entries()) out[atom.text()] = val.str();
    return out;
  };
  j["u"] = dump(u_);
  j["nu"] = dump(nu_);
  j["delta"] = delta_.str();
  j["phi"] = phi_.text();
  if (explicit_alpha_) j["alpha"] = alpha_.str();
  return j;
}

NormalizationProblem NormalizationProblem::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("normalization problem: expected a JSON object");
  for (const char* key : {"u", "nu", "phi"}) {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("normalization problem: missing key '") + key + "'");
  }
  auto read_valuation = [](const nlohmann::json& obj, const std::string& where) {
    if (!obj.is_object())
      throw std::invalid_argument("normalization problem: '" + where + "' must be an object");
    Valuation v;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      Formula atom = parse_formula(it.key());
      if (!it.value().is_string())
        throw std::invalid_argument("normalization problem: value of '" + where + "." + it.key() +
                                    "' must be a rational string");
      v.set(atom, Rat::parse(it.value().get<std::string>()));
    }
    return v;
  };
  Valuation u = read_valuation(j.at("u"), "u");
  Valuation nu = read_valuation(j.at("nu"), "nu");
  if (!j.at("phi").is_string())
    throw std::invalid_argument("normalization problem: 'phi' must be a formula string");
  Formula phi = parse_formula(j.at("phi").get<std::string>());
  std::optional<Rat> delta, alpha;
  if (j.contains("delta")) {
    if (!j.at("delta").is_string())
      throw std::invalid_argument("normalization problem: 'delta' must be a rational string");
    delta = Rat::parse(j.at("delta").get<std::string>());
  }
  if (j.contains("alpha")) {
    if (!j.at("alpha").is_string())
      throw std::invalid_argument("normalization problem: 'alpha' must be a rational string");
    alpha = Rat::parse(j.at("alpha").get<std::string>());
  }
  return make(std::move(u), std::move(nu), std::move(phi), std::move(delta), std::move(alpha));
}

Valuation normalize(const NormalizationProblem& p, const std::vector<Formula>& targets) {
  const Rat one(1);
  Valuation w;
  for (const auto& [atom, nval] : p.nu().entries()) {
    if (nval < one) {
      w.set(atom, p.g().apply(nval));
    } else {
      const Rat& uval = p.u().at(atom);
      if (p.delta() == p.beta() && uval < p.beta())
        throw transform_error(atom.text(),
                              "delta equals beta " + p.beta().str() + ": no value below beta (here '" +
                                  atom.text() + "' with u-value " + uval.str() +
                                  ") can be mapped strictly between delta and beta");
      w.set(atom, p.h().apply(uval));
    }
  }
  auto issues = postcondition_violations(p, w, targets);
  if (!issues.empty()) {
    throw postcondition_error(issues.front(), "normalization guarantee " +
                                                  std::to_string(issues.front().index) +
                                                  " failed: " + issues.front().detail);
  }
  return w;
}

std::vector<PostconditionIssue> postcondition_violations(const NormalizationProblem& p,
                                                         const Valuation& w,
                                                         const std::vector<Formula>& targets) {
  const Rat one(1);
  std::vector<PostconditionIssue> out;
  struct Row {
    const Formula* t;
    Rat wv, nv;
    std::optional<Rat> uv;  // filled when nv = 1
  };
  std::vector<Row> rows;
  rows.reserve(targets.size());
  for (const Formula& t : targets) {
    Row r{&t, prop_eval(t, w), prop_eval(t, p.nu()), std::nullopt};
    if (r.nv == one) r.uv = prop_eval(t, p.u());
    rows.push_back(std::move(r));
  }
  for (const Row& r : rows) {
    if (r.nv == one && r.wv < p.delta())
      out.push_back({1, r.t->text(), "",
                     "nu-value 1 but transformed value " + r.wv.str() + " below delta " +
                         p.delta().str() + " for '" + r.t->text() + "'"});
    if (r.nv < one && !(r.wv < p.delta()))
      out.push_back({2, r.t->text(), "",
                     "nu-value " + r.nv.str() + " below 1 but transformed value " + r.wv.str() +
                         " not below delta " + p.delta().str() + " for '" + r.t->text() + "'"});
  }
  for (const Row& s : rows) {
    for (const Row& t : rows) {
      if (s.t == t.t) continue;
      if (s.nv != one && s.nv <= t.nv && !(s.wv <= t.wv))
        out.push_back({3, s.t->text(), t.t->text(),
                       "nu orders '" + s.t->text() + "' <= '" + t.t->text() +
                           "' but transformed values are " + s.wv.str() + " > " + t.wv.str()});
      if (s.nv < t.nv && !(s.wv < t.wv))
        out.push_back({4, s.t->text(), t.t->text(),
                       "nu orders '" + s.t->text() + "' < '" + t.t->text() +
                           "' but transformed values are " + s.wv.str() + " >= " + t.wv.str()});
      if (s.nv == one && t.nv == one) {
        if (*s.uv <= *t.uv && !(s.wv <= t.wv))
          out.push_back({5, s.t->text(), t.t->text(),
                         "u orders '" + s.t->text() + "' <= '" + t.t->text() +
                             "' but transformed values are " + s.wv.str() + " > " + t.wv.str()});
        if (*s.uv < *t.uv && !(s.wv < t.wv))
          out.push_back({6, s.t->text(), t.t->text(),
                         "u orders '" + s.t->text() + "' < '" + t.t->text() +
                             "' but transformed values are " + s.wv.str() + " >= " + t.wv.str()});
      }
    }
  }
  return out;
}

bool check_membership_approx(const Valuation& w, const Formula& f, int depth) {
  std::set<Formula> pool;
  for (const Formula& s : subformulas(f)) pool.insert(s);
  for (const Formula& s : fixed_points(f)) pool.insert(s);
  for (int d = 0; d < depth; ++d) {
    std::set<Formula> next = pool;
    for (const Formula& s : pool) {
      next.insert(Formula::box(s));
      next.insert(Formula::dia(s));
    }
    pool.swap(next);
  }
  std::vector<Formula> items(pool.begin(), pool.end());
  const Rat one(1);

  for (const AxiomSchema& schema : axiom_catalogue()) {
    const std::size_t k = schema.metavars.size();
    std::vector<std::size_t> idx(k, 0);
    while (true) {
      std::map<std::string, Formula> subst;
      for (std::size_t i = 0; i < k; ++i) subst.emplace(schema.metavars[i], items[idx[i]]);
      Formula inst = instantiate(schema, subst);
      if (auto val = try_prop_eval(inst, w); val && *val < one) return false;
      // Odometer over pool^k; k = 0 means the single closed instance.
      std::size_t pos = 0;
      while (pos < k) {
        if (++idx[pos] < items.size()) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == k) break;
    }
  }
  return true;
}

std::set<Formula> gamma_set(const Formula& psi, const Valuation& u, const Formula& f) {
  const Rat alpha = u.at(Formula::box(psi));
  const Rat one(1);
  if (alpha == one)
    throw std::invalid_argument("gamma_set: u(box " + psi.text() + ") must be below 1");

  const std::vector<Formula> subs = subformulas(f);
  const std::vector<Formula> deltas = fixed_points(f);
  std::set<Formula> out;
  for (const Formula& L : deltas) {
    const Rat& uL = u.at(L);
    if (alpha < uL) out.insert(L);
    for (const Formula& t : subs) {
      const Rat& ub = u.at(Formula::box(t));
      const Rat& ud = u.at(Formula::dia(t));
      if (uL <= ub) out.insert(Formula::impl(L, t));
      if (uL < ub && ub < one) out.insert(Formula::impl(Formula::impl(t, L), L));
      if (ud <= uL) out.insert(Formula::impl(t, L));
      if (ud < uL && uL < one) out.insert(Formula::impl(Formula::impl(L, t), t));
    }
  }
  return out;
}

PossModel snapshot_model(const Valuation& v, const std::vector<Valuation>& us, const Formula& f) {
  if (us.empty()) throw std::invalid_argument("snapshot model needs at least one valuation");
  const Rat one(1);
  std::vector<Rat> pi;
  pi.reserve(us.size());
  bool reached_one = false;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (!equivalent_mod_phi(v, us[i], f))
      throw std::invalid_argument("snapshot valuation " + std::to_string(i + 1) +
                                  " disagrees with the reference on a fixed-point atom");
    pi.push_back(pi_phi(v, us[i], f));
    if (pi.back() == one) reached_one = true;
  }
  if (!reached_one)
    throw normalization_error(
        "no snapshot valuation attains possibility degree 1; refusing to rescale");

  const std::vector<std::string> vars = variables(f);
  std::vector<std::string> worlds;
  std::vector<std::vector<Rat>> e;
  worlds.reserve(us.size());
  e.reserve(us.size());
  for (std::size_t i = 0; i < us.size(); ++i) {
    worlds.push_back("u" + std::to_string(i + 1));
    std::vector<Rat> row;
    row.reserve(vars.size());
    for (const std::string& name : vars) row.push_back(us[i].at(Formula::var(name)));
    e.push_back(std::move(row));
  }
  return PossModel(std::move(worlds), vars, std::move(pi), std::move(e));
}

}  // namespace gkd45
