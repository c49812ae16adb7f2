#include "gkd45/model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace gkd45 {

namespace {

void check_names(const std::vector<std::string>& names, const char* what) {
  if (names.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw std::invalid_argument(std::string(what) + " name is empty");
    if (!seen.insert(n).second)
      throw std::invalid_argument(std::string("duplicate ") + what + " name '" + n + "'");
  }
}

void check_unit(const Rat& v, const std::string& where) {
  if (!v.in_unit())
    throw std::invalid_argument("value outside [0,1] at " + where + ": " + v.str());
}

int index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range(std::string("unknown ") + what + " '" + name + "'");
  return static_cast<int>(it - names.begin());
}

}  // namespace

GKModel::GKModel(std::vector<std::string> worlds, std::vector<std::string> vars,
                 std::vector<std::vector<Rat>> R, std::vector<std::vector<Rat>> e)
    : worlds_(std::move(worlds)), vars_(std::move(vars)), R_(std::move(R)), e_(std::move(e)) {
  check_names(worlds_, "world");
  if (R_.size() != worlds_.size()) throw std::invalid_argument("R row count != world count");
  if (e_.size() != worlds_.size()) throw std::invalid_argument("e row count != world count");
  std::set<std::string> var_seen(vars_.begin(), vars_.end());
  if (var_seen.size() != vars_.size()) throw std::invalid_argument("duplicate variable name");
  for (std::size_t i = 0; i < worlds_.size(); i++) {
    if (R_[i].size() != worlds_.size())
      throw std::invalid_argument("R row '" + worlds_[i] + "' has wrong length");
    if (e_[i].size() != vars_.size())
      throw std::invalid_argument("e row '" + worlds_[i] + "' has wrong length");
    for (std::size_t j = 0; j < worlds_.size(); j++)
      check_unit(R_[i][j], "R[" + worlds_[i] + "][" + worlds_[j] + "]");
    for (std::size_t j = 0; j < vars_.size(); j++)
      check_unit(e_[i][j], "e[" + worlds_[i] + "][" + vars_[j] + "]");
  }
}

int GKModel::world_index(const std::string& name) const { return index_of(worlds_, name, "world"); }

std::optional<int> GKModel::find_world(const std::string& name) const {
  auto it = std::find(worlds_.begin(), worlds_.end(), name);
  if (it == worlds_.end()) return std::nullopt;
  return static_cast<int>(it - worlds_.begin());
}

int GKModel::var_index(const std::string& name) const { return index_of(vars_, name, "variable"); }

Valuation GKModel::valuation_at(int w) const {
  Valuation v;
  for (std::size_t j = 0; j < vars_.size(); j++) v.set(Formula::var(vars_[j]), e_[w][j]);
  return v;
}

PossModel::PossModel(std::vector<std::string> worlds, std::vector<std::string> vars,
                     std::vector<Rat> pi, std::vector<std::vector<Rat>> e)
    : worlds_(std::move(worlds)), vars_(std::move(vars)), pi_(std::move(pi)), e_(std::move(e)) {
  check_names(worlds_, "world");
  if (pi_.size() != worlds_.size()) throw std::invalid_argument("pi size != world count");
  if (e_.size() != worlds_.size()) throw std::invalid_argument("e row count != world count");
  std::set<std::string> var_seen(vars_.begin(), vars_.end());
  if (var_seen.size() != vars_.size()) throw std::invalid_argument("duplicate variable name");
  Rat mx = Rat::zero();
  for (std::size_t i = 0; i < worlds_.size(); i++) {
    check_unit(pi_[i], "pi[" + worlds_[i] + "]");
    mx = max(mx, pi_[i]);
    if (e_[i].size() != vars_.size())
      throw std::invalid_argument("e row '" + worlds_[i] + "' has wrong length");
    for (std::size_t j = 0; j < vars_.size(); j++)
      check_unit(e_[i][j], "e[" + worlds_[i] + "][" + vars_[j] + "]");
  }
  if (!mx.is_one())
    throw normalization_error("possibility distribution is not normalized: max pi = " + mx.str() +
                              ", expected 1");
}

int PossModel::world_index(const std::string& name) const { return index_of(worlds_, name, "world"); }

std::optional<int> PossModel::find_world(const std::string& name) const {
  auto it = std::find(worlds_.begin(), worlds_.end(), name);
  if (it == worlds_.end()) return std::nullopt;
  return static_cast<int>(it - worlds_.begin());
}

int PossModel::var_index(const std::string& name) const { return index_of(vars_, name, "variable"); }

Valuation PossModel::valuation_at(int w) const {
  Valuation v;
  for (std::size_t j = 0; j < vars_.size(); j++) v.set(Formula::var(vars_[j]), e_[w][j]);
  return v;
}

namespace {

// Per-call evaluator with a memo on (subformula, world). Modal values in a
// possibilistic model are cached once: they do not depend on the world.
template <typename M>
struct Evaluator {
  const M& m;
  std::map<Formula, std::vector<std::optional<Rat>>> memo;

  Rat relational_box(int w, const Formula& body);
  Rat relational_dia(int w, const Formula& body);

  Rat run(int w, const Formula& f) {
    switch (f.kind()) {
      case Conn::Bot:
        return Rat::zero();
      case Conn::Var:
        return m.value(w, m.var_index(f.var_name()));
      case Conn::And:
        return g_meet(run(w, f.lhs()), run(w, f.rhs()));
      case Conn::Or:
        return g_join(run(w, f.lhs()), run(w, f.rhs()));
      case Conn::Implies:
        return g_implies(run(w, f.lhs()), run(w, f.rhs()));
      case Conn::Box:
      case Conn::Diamond: {
        auto& slots = memo[f];
        if (slots.empty()) slots.resize(m.world_count());
        if (slots[w]) return *slots[w];
        Rat r = f.kind() == Conn::Box ? relational_box(w, f.child()) : relational_dia(w, f.child());
        slots[w] = r;
        return r;
      }
    }
    throw std::logic_error("unreachable");
  }
};

template <>
Rat Evaluator<GKModel>::relational_box(int w, const Formula& body) {
  Rat acc = Rat::one();
  for (int v = 0; v < m.world_count(); v++)
    acc = g_meet(acc, g_implies(m.rel(w, v), run(v, body)));
  return acc;
}

template <>
Rat Evaluator<GKModel>::relational_dia(int w, const Formula& body) {
  Rat acc = Rat::zero();
  for (int v = 0; v < m.world_count(); v++) acc = g_join(acc, g_meet(m.rel(w, v), run(v, body)));
  return acc;
}

template <>
Rat Evaluator<PossModel>::relational_box(int, const Formula& body) {
  Rat acc = Rat::one();
  for (int v = 0; v < m.world_count(); v++) acc = g_meet(acc, g_implies(m.pi(v), run(v, body)));
  return acc;
}

template <>
Rat Evaluator<PossModel>::relational_dia(int, const Formula& body) {
  Rat acc = Rat::zero();
  for (int v = 0; v < m.world_count(); v++) acc = g_join(acc, g_meet(m.pi(v), run(v, body)));
  return acc;
}

template <typename M>
Rat eval_impl(const M& m, int w, const Formula& f) {
  if (w < 0 || w >= m.world_count()) throw std::out_of_range("world index out of range");
  Evaluator<M> ev{m, {}};
  return ev.run(w, f);
}

}  // namespace

Rat eval(const GKModel& m, int w, const Formula& f) { return eval_impl(m, w, f); }
Rat eval(const PossModel& m, int w, const Formula& f) { return eval_impl(m, w, f); }

Rat eval(const AnyModel& m, int w, const Formula& f) {
  return std::visit([&](const auto& mm) { return eval(mm, w, f); }, m);
}

Rat eval(const AnyModel& m, const std::string& world, const Formula& f) {
  return std::visit([&](const auto& mm) { return eval(mm, mm.world_index(world), f); }, m);
}

namespace {

template <typename M>
bool valid_impl(const M& m, const Formula& f) {
  Evaluator<M> ev{m, {}};
  for (int w = 0; w < m.world_count(); w++)
    if (!ev.run(w, f).is_one()) return false;
  return true;
}

}  // namespace

bool is_valid_in_model(const GKModel& m, const Formula& f) { return valid_impl(m, f); }
bool is_valid_in_model(const PossModel& m, const Formula& f) { return valid_impl(m, f); }

bool is_valid_in_model(const AnyModel& m, const Formula& f) {
  return std::visit([&](const auto& mm) { return is_valid_in_model(mm, f); }, m);
}

FrameCheck is_serial(const GKModel& m) {
  for (int w = 0; w < m.world_count(); w++) {
    Rat mx = Rat::zero();
    for (int v = 0; v < m.world_count(); v++) mx = max(mx, m.rel(w, v));
    if (!mx.is_one()) return {false, {m.worlds()[w]}};
  }
  return {};
}

FrameCheck is_transitive(const GKModel& m) {
  for (int w = 0; w < m.world_count(); w++)
    for (int a = 0; a < m.world_count(); a++)
      for (int b = 0; b < m.world_count(); b++)
        if (min(m.rel(w, a), m.rel(a, b)) > m.rel(w, b))
          return {false, {m.worlds()[w], m.worlds()[a], m.worlds()[b]}};
  return {};
}

FrameCheck is_euclidean(const GKModel& m) {
  for (int w = 0; w < m.world_count(); w++)
    for (int a = 0; a < m.world_count(); a++)
      for (int b = 0; b < m.world_count(); b++)
        if (min(m.rel(w, a), m.rel(w, b)) > m.rel(a, b))
          return {false, {m.worlds()[w], m.worlds()[a], m.worlds()[b]}};
  return {};
}

GKModel to_relational(const PossModel& m) {
  int k = m.world_count();
  std::vector<std::vector<Rat>> R(k), e(k);
  for (int w = 0; w < k; w++) {
    R[w].reserve(k);
    for (int v = 0; v < k; v++) R[w].push_back(m.pi(v));
    e[w].reserve(m.var_count());
    for (int j = 0; j < m.var_count(); j++) e[w].push_back(m.value(w, j));
  }
  return GKModel(m.worlds(), m.vars(), std::move(R), std::move(e));
}

Rat possibility_of(const PossModel& m, const Formula& f) {
  if (!f.is_propositional())
    throw std::invalid_argument("possibility measure is defined for propositional formulas, got '" +
                                f.text() + "'");
  Rat acc = Rat::zero();
  for (int w = 0; w < m.world_count(); w++)
    acc = g_join(acc, g_meet(m.pi(w), prop_eval(f, m.valuation_at(w))));
  return acc;
}

Rat necessity_of(const PossModel& m, const Formula& f) {
  if (!f.is_propositional())
    throw std::invalid_argument("necessity measure is defined for propositional formulas, got '" +
                                f.text() + "'");
  Rat acc = Rat::one();
  for (int w = 0; w < m.world_count(); w++)
    acc = g_meet(acc, g_implies(m.pi(w), prop_eval(f, m.valuation_at(w))));
  return acc;
}

namespace {

using nlohmann::ordered_json;

Rat rat_at(const ordered_json& j, const std::string& path) {
  if (!j.is_string())
    throw model_error("expected a rational encoded as a string", path);
  try {
    Rat r = Rat::parse(j.get<std::string>());
    if (!r.in_unit()) throw model_error("value outside [0,1]: " + r.str(), path);
    return r;
  } catch (const std::invalid_argument& e) {
    throw model_error(e.what(), path);
  }
}

const ordered_json& field(const ordered_json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw model_error(std::string("missing field '") + key + "'", path + "/" + key);
  return *it;
}

std::vector<std::string> string_list(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) throw model_error("expected an array", path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); i++) {
    if (!j[i].is_string()) throw model_error("expected a string", path + "/" + std::to_string(i));
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

std::vector<std::vector<Rat>> read_e(const ordered_json& j, const std::vector<std::string>& worlds,
                                     const std::vector<std::string>& vars) {
  const auto& e = field(j, "e", "");
  if (!e.is_object()) throw model_error("expected an object", "/e");
  std::vector<std::vector<Rat>> out;
  for (const auto& w : worlds) {
    auto it = e.find(w);
    if (it == e.end()) throw model_error("missing world '" + w + "'", "/e/" + w);
    if (!it->is_object()) throw model_error("expected an object", "/e/" + w);
    std::vector<Rat> row;
    for (const auto& p : vars) {
      auto vit = it->find(p);
      if (vit == it->end())
        throw model_error("missing variable '" + p + "'", "/e/" + w + "/" + p);
      row.push_back(rat_at(*vit, "/e/" + w + "/" + p));
    }
    for (auto kv = it->begin(); kv != it->end(); ++kv)
      if (std::find(vars.begin(), vars.end(), kv.key()) == vars.end())
        throw model_error("undeclared variable '" + kv.key() + "'", "/e/" + w + "/" + kv.key());
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> collect_vars(const ordered_json& j, const std::vector<std::string>& worlds) {
  // Variables are whatever the first world's e row declares; rows must agree.
  const auto& e = field(j, "e", "");
  if (!e.is_object()) throw model_error("expected an object", "/e");
  auto it = e.find(worlds.front());
  if (it == e.end()) throw model_error("missing world '" + worlds.front() + "'", "/e/" + worlds.front());
  std::vector<std::string> vars;
  for (auto kv = it->begin(); kv != it->end(); ++kv) vars.push_back(kv.key());
  std::sort(vars.begin(), vars.end());
  return vars;
}

}  // namespace

AnyModel load_model(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw model_error(std::string("invalid JSON: ") + e.what(), "/");
  }
  if (!j.is_object()) throw model_error("expected a JSON object", "/");
  const auto& kind = field(j, "kind", "");
  if (!kind.is_string()) throw model_error("expected a string", "/kind");
  std::string k = kind.get<std::string>();
  auto worlds = string_list(field(j, "worlds", ""), "/worlds");
  if (worlds.empty()) throw model_error("no worlds", "/worlds");
  auto vars = collect_vars(j, worlds);
  auto e = read_e(j, worlds, vars);
  try {
    if (k == "possibilistic") {
      const auto& pj = field(j, "pi", "");
      if (!pj.is_object()) throw model_error("expected an object", "/pi");
      std::vector<Rat> pi;
      for (const auto& w : worlds) {
        auto it = pj.find(w);
        if (it == pj.end()) throw model_error("missing world '" + w + "'", "/pi/" + w);
        pi.push_back(rat_at(*it, "/pi/" + w));
      }
      return PossModel(worlds, vars, std::move(pi), std::move(e));
    }
    if (k == "relational") {
      const auto& rj = field(j, "R", "");
      if (!rj.is_object()) throw model_error("expected an object", "/R");
      std::vector<std::vector<Rat>> R;
      for (const auto& w : worlds) {
        auto it = rj.find(w);
        if (it == rj.end()) throw model_error("missing world '" + w + "'", "/R/" + w);
        if (!it->is_object()) throw model_error("expected an object", "/R/" + w);
        std::vector<Rat> row;
        for (const auto& v : worlds) {
          auto vit = it->find(v);
          if (vit == it->end()) throw model_error("missing world '" + v + "'", "/R/" + w + "/" + v);
          row.push_back(rat_at(*vit, "/R/" + w + "/" + v));
        }
        R.push_back(std::move(row));
      }
      return GKModel(worlds, vars, std::move(R), std::move(e));
    }
  } catch (const std::invalid_argument& e) {
    throw model_error(e.what(), "/");
  }
  throw model_error("kind must be 'possibilistic' or 'relational', got '" + k + "'", "/kind");
}

std::string save_model(const AnyModel& m, int indent) {
  ordered_json j;
  if (std::holds_alternative<PossModel>(m)) {
    const auto& pm = std::get<PossModel>(m);
    j["kind"] = "possibilistic";
    j["worlds"] = pm.worlds();
    ordered_json pi = ordered_json::object();
    for (int w = 0; w < pm.world_count(); w++) pi[pm.worlds()[w]] = pm.pi(w).str();
    j["pi"] = std::move(pi);
    ordered_json e = ordered_json::object();
    for (int w = 0; w < pm.world_count(); w++) {
      ordered_json row = ordered_json::object();
      for (int v = 0; v < pm.var_count(); v++) row[pm.vars()[v]] = pm.value(w, v).str();
      e[pm.worlds()[w]] = std::move(row);
    }
    j["e"] = std::move(e);
  } else {
    const auto& gm = std::get<GKModel>(m);
    j["kind"] = "relational";
    j["worlds"] = gm.worlds();
    ordered_json R = ordered_json::object();
    for (int w = 0; w < gm.world_count(); w++) {
      ordered_json row = ordered_json::object();
      for (int v = 0; v < gm.world_count(); v++) row[gm.worlds()[v]] = gm.rel(w, v).str();
      R[gm.worlds()[w]] = std::move(row);
    }
    j["R"] = std::move(R);
    ordered_json e = ordered_json::object();
    for (int w = 0; w < gm.world_count(); w++) {
      ordered_json row = ordered_json::object();
      for (int v = 0; v < gm.var_count(); v++) row[gm.vars()[v]] = gm.value(w, v).str();
      e[gm.worlds()[w]] = std::move(row);
    }
    j["e"] = std::move(e);
  }
  return indent >= 0 ? j.dump(indent) : j.dump();
}

}  // namespace gkd45
