#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gkd45/canonical.hpp"
#include "gkd45/formula.hpp"
#include "gkd45/godel.hpp"
#include "gkd45/model.hpp"
#include "gkd45/proof.hpp"
#include "gkd45/rational.hpp"
#include "gkd45/search.hpp"

// Exit codes: 0 success, 1 countermodel found or a check failed,
// 2 usage or input error.

namespace {

using gkd45::AnyModel;
using gkd45::Formula;
using gkd45::ModelClass;
using gkd45::Rat;
using gkd45::SearchBounds;
using gkd45::SearchReport;
using gkd45::Valuation;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

ModelClass parse_class(const std::string& name) {
  if (auto c = gkd45::class_from_name(name)) return *c;
  throw std::runtime_error("unknown model class '" + name +
                           "' (expected pi-g, kd45-gk, crisp-ste or crisp-semiuniversal)");
}

const std::map<std::string, std::vector<const char*>>& builtin_texts() {
  static const std::map<std::string, std::vector<const char*>> m = {
      {"t1", {"not <> p <-> [] not p"}},
      {"t2", {"not not [] p -> [] not not p"}},
      {"t3", {"<> not not p -> not not <> p"}},
      {"t4", {"([] p -> <> q) | [] ((p -> q) -> q)"}},
      {"t5", {"<> (p -> q) -> ([] p -> <> q)"}},
      {"prop2",
       {"<> [] top <-> [] <> top", "[] <> top <-> not bot", "<> <> p <-> <> p",
        "<> p <-> [] <> p", "[] [] p <-> [] p", "[] p <-> <> [] p"}},
  };
  return m;
}

std::vector<Formula> builtin_corpus(const std::string& name) {
  if (name == "axioms") {
    std::vector<Formula> out;
    const char* args[] = {"p", "q", "r"};
    for (const auto& schema : gkd45::axiom_catalogue()) {
      if (schema.tmpl.is_propositional()) continue;
      std::map<std::string, Formula> subst;
      for (std::size_t i = 0; i < schema.metavars.size(); ++i)
        subst.emplace(schema.metavars[i], Formula::var(args[i]));
      out.push_back(gkd45::instantiate(schema, subst));
    }
    return out;
  }
  if (name == "theorems") {
    std::vector<Formula> out;
    for (const char* key : {"t1", "t2", "t3", "t4", "t5"})
      for (const char* text : builtin_texts().at(key)) out.push_back(gkd45::parse_formula(text));
    return out;
  }
  auto it = builtin_texts().find(name);
  if (it == builtin_texts().end())
    throw std::runtime_error("unknown builtin corpus 'builtin:" + name + "'");
  std::vector<Formula> out;
  for (const char* text : it->second) out.push_back(gkd45::parse_formula(text));
  return out;
}

std::vector<Formula> load_corpus(const std::string& arg) {
  if (arg.rfind("builtin:", 0) == 0) return builtin_corpus(arg.substr(8));
  std::vector<Formula> out;
  std::istringstream in(read_file(arg));
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(gkd45::parse_formula(t));
  }
  if (out.empty()) throw std::runtime_error("corpus '" + arg + "' contains no formulas");
  return out;
}

Valuation read_valuation(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw std::runtime_error("'" + where + "' must be a JSON object");
  Valuation v;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it.value().is_string())
      throw std::runtime_error("'" + where + "." + it.key() + "' must be a rational string");
    v.set(gkd45::parse_formula(it.key()), Rat::parse(it.value().get<std::string>()));
  }
  return v;
}

ordered_json grid_json(const std::vector<Rat>& grid) {
  ordered_json a = ordered_json::array();
  for (const Rat& r : grid) a.push_back(r.str());
  return a;
}

ordered_json bounds_json(const SearchReport& r) {
  ordered_json b;
  b["max_worlds"] = r.max_worlds;
  b["chain_denominator"] = r.chain_denominator;
  b["grid"] = grid_json(r.grid);
  return b;
}

ordered_json witness_json(const gkd45::Witness& w) {
  ordered_json j;
  j["world"] = w.world;
  j["value"] = w.value.str();
  j["ordinal"] = w.ordinal;
  j["model"] = ordered_json::parse(gkd45::save_model(w.model));
  return j;
}

ordered_json report_json(const SearchReport& r, std::optional<std::uint64_t> seed = std::nullopt,
                         std::optional<std::uint64_t> samples = std::nullopt) {
  ordered_json j;
  j["formula"] = r.formula.text();
  j["class"] = gkd45::class_name(r.cls);
  j["outcome"] = r.outcome;
  if (r.witness) j["witness"] = witness_json(*r.witness);
  j["models_examined"] = r.models_examined;
  j["bounds"] = bounds_json(r);
  if (seed) j["seed"] = *seed;
  if (samples) j["samples"] = *samples;
  return j;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

const std::vector<std::string>& model_worlds(const AnyModel& m) {
  return std::visit([](const auto& x) -> const std::vector<std::string>& { return x.worlds(); },
                    m);
}

// Randomized phase: `samples` models drawn from the class, world count
// varying in [1, max_worlds], all derived deterministically from the seed.
SearchReport random_search(const Formula& f, ModelClass cls, const SearchBounds& b) {
  SearchReport rep{f, cls, 0, 0, {}, {}, 0, "", 0.0};
  rep.max_worlds = b.max_worlds;
  std::vector<std::string> vars = gkd45::variables(f);
  rep.grid = gkd45::resolve_grid(b, vars.size(), cls);
  rep.chain_denominator = static_cast<int>(rep.grid.size()) - 1;

  std::mt19937_64 meta(b.seed);
  const Rat one(1);
  for (std::uint64_t i = 0; i < b.samples; ++i) {
    int worlds = 1 + static_cast<int>(meta() % static_cast<std::uint64_t>(b.max_worlds));
    std::uint64_t model_seed = meta();
    AnyModel m = gkd45::random_model(cls, worlds, rep.chain_denominator, vars, model_seed);
    ++rep.models_examined;
    const auto& names = model_worlds(m);
    for (std::size_t w = 0; w < names.size(); ++w) {
      Rat val = gkd45::eval(m, static_cast<int>(w), f);
      if (val < one) {
        // copy the name out before the model is moved into the witness
        std::string world = names[w];
        rep.witness = gkd45::Witness{std::move(m), std::move(world), std::move(val), i};
        break;
      }
    }
    if (rep.witness) break;
  }
  rep.outcome = rep.witness ? "countermodel" : "no countermodel within bounds";
  return rep;
}

void print_report_human(const SearchReport& r, bool randomized) {
  if (r.witness) {
    std::cout << "countermodel for '" << r.formula.text() << "' in class "
              << gkd45::class_name(r.cls) << "\n";
    std::cout << "  world " << r.witness->world << ": value " << r.witness->value.str() << "\n";
    std::cout << "  models examined: " << r.models_examined
              << (randomized ? " (randomized)" : "") << "\n";
    std::cout << gkd45::save_model(r.witness->model, 2) << "\n";
  } else {
    std::cout << r.outcome << " for '" << r.formula.text() << "' in class "
              << gkd45::class_name(r.cls) << " (max worlds " << r.max_worlds << ", chain "
              << r.chain_denominator << ", " << r.models_examined << " models"
              << (randomized ? ", randomized" : "") << ")\n";
  }
}

struct CountermodelOpts {
  std::string formula, cls = "pi-g";
  int max_worlds = 3, chain = 0;
  std::uint64_t seed = 0, samples = 0;
  unsigned threads = 1;
  bool json = false;
};

int run_countermodel(const CountermodelOpts& o) {
  Formula f = gkd45::parse_formula(o.formula);
  ModelClass cls = parse_class(o.cls);
  SearchBounds b;
  b.max_worlds = o.max_worlds;
  b.chain_denominator = o.chain;
  b.seed = o.seed;
  b.samples = o.samples;
  SearchReport rep = o.samples > 0 ? random_search(f, cls, b)
                                   : std::move(gkd45::sweep({f}, cls, b, o.threads).front());
  if (o.json) {
    if (o.samples > 0)
      emit(report_json(rep, o.seed, o.samples));
    else
      emit(report_json(rep));
  } else {
    print_report_human(rep, o.samples > 0);
  }
  return rep.witness ? 1 : 0;
}

struct CompareOpts {
  std::string corpus;
  int max_worlds = 3, chain = 0;
  unsigned threads = 1;
  bool json = false;
};

int run_compare(const CompareOpts& o) {
  std::vector<Formula> corpus = load_corpus(o.corpus);
  SearchBounds b;
  b.max_worlds = o.max_worlds;
  b.chain_denominator = o.chain;
  gkd45::CompareReport cr = gkd45::compare_classes(corpus, b, o.threads);
  if (o.json) {
    ordered_json j;
    j["command"] = "compare";
    j["entries"] = ordered_json::array();
    for (const auto& e : cr.entries) {
      ordered_json row;
      row["formula"] = e.formula.text();
      row["possibilistic"] = report_json(e.possibilistic);
      row["relational"] = report_json(e.relational);
      row["agree"] = e.agree;
      j["entries"].push_back(std::move(row));
    }
    j["discrepancies"] = cr.discrepancies;
    emit(j);
  } else {
    for (const auto& e : cr.entries) {
      std::cout << (e.agree ? "[ok] " : "[!!] ") << e.formula.text() << ": pi-g "
                << (e.possibilistic.witness ? "countermodel" : "none") << ", kd45-gk "
                << (e.relational.witness ? "countermodel" : "none");
      if (e.relational.witness && e.relational.models_examined == 0)
        std::cout << " (transported)";
      std::cout << "\n";
    }
    std::cout << cr.entries.size() << " formulas, " << cr.discrepancies.size()
              << " discrepancies\n";
  }
  return cr.discrepancies.empty() ? 0 : 1;
}

struct FrameCheckOpts {
  std::string model;
  bool json = false;
};

int run_frame_check(const FrameCheckOpts& o) {
  AnyModel m = gkd45::load_model(read_file(o.model));
  bool possibilistic = std::holds_alternative<gkd45::PossModel>(m);
  gkd45::GKModel rel = possibilistic ? gkd45::to_relational(std::get<gkd45::PossModel>(m))
                                     : std::get<gkd45::GKModel>(m);
  gkd45::FrameCheck serial = gkd45::is_serial(rel);
  gkd45::FrameCheck transitive = gkd45::is_transitive(rel);
  gkd45::FrameCheck euclidean = gkd45::is_euclidean(rel);
  bool all = serial.ok && transitive.ok && euclidean.ok;
  if (o.json) {
    ordered_json j;
    j["command"] = "frame-check";
    j["model"] = o.model;
    j["kind"] = possibilistic ? "possibilistic (induced relation)" : "relational";
    auto fc = [](const gkd45::FrameCheck& c) {
      ordered_json x;
      x["ok"] = c.ok;
      if (!c.ok) x["witness"] = c.witness;
      return x;
    };
    j["serial"] = fc(serial);
    j["transitive"] = fc(transitive);
    j["euclidean"] = fc(euclidean);
    j["all"] = all;
    emit(j);
  } else {
    if (possibilistic) std::cout << "possibilistic model; checking the induced relation\n";
    auto line = [](const char* name, const gkd45::FrameCheck& c) {
      std::cout << name << ": " << (c.ok ? "yes" : "no");
      if (!c.ok) {
        std::cout << " (";
        for (std::size_t i = 0; i < c.witness.size(); ++i)
          std::cout << (i ? ", " : "") << c.witness[i];
        std::cout << ")";
      }
      std::cout << "\n";
    };
    line("serial", serial);
    line("transitive", transitive);
    line("euclidean", euclidean);
  }
  return all ? 0 : 1;
}

struct ProofCheckOpts {
  std::string source;
  bool json = false;
};

int run_proof_check(const ProofCheckOpts& o) {
  gkd45::Proof proof = [&] {
    if (o.source.rfind("builtin:", 0) == 0) {
      const gkd45::Proof* p = gkd45::find_builtin(o.source.substr(8));
      if (!p) throw std::runtime_error("unknown builtin derivation '" + o.source + "'");
      return *p;
    }
    return gkd45::parse_proof(read_file(o.source));
  }();
  std::optional<gkd45::ProofError> err = gkd45::check(proof);
  if (o.json) {
    ordered_json j;
    j["command"] = "proof-check";
    j["source"] = o.source;
    j["premises"] = proof.premises.size();
    j["steps"] = proof.steps.size();
    j["conclusion"] = proof.conclusion.text();
    j["ok"] = !err.has_value();
    if (err) {
      ordered_json e;
      e["step"] = err->step;
      e["reason"] = err->reason;
      j["error"] = std::move(e);
    }
    emit(j);
  } else {
    if (!err) {
      std::cout << "ok: " << proof.conclusion.text() << " (" << proof.steps.size()
                << " steps)\n";
    } else if (err->step == 0) {
      std::cout << "proof rejected: " << err->reason << "\n";
    } else {
      std::cout << "step " << err->step << " rejected: " << err->reason << "\n";
    }
  }
  return err ? 1 : 0;
}

struct NormalizeOpts {
  std::string problem;
  std::vector<std::string> targets;
  bool json = false;
};

ordered_json map_json(const gkd45::MonotoneMap& m) {
  ordered_json j;
  ordered_json pts = ordered_json::array();
  for (const auto& [x, y] : m.points()) pts.push_back(ordered_json::array({x.str(), y.str()}));
  j["points"] = std::move(pts);
  j["isolated_one"] = m.isolated_one();
  return j;
}

int run_normalize(const NormalizeOpts& o) {
  gkd45::NormalizationProblem p = gkd45::NormalizationProblem::from_json(
      nlohmann::json::parse(read_file(o.problem)));
  std::vector<Formula> targets;
  if (o.targets.empty()) {
    targets = gkd45::fixed_points(p.phi());
  } else {
    for (const std::string& t : o.targets) targets.push_back(gkd45::parse_formula(t));
  }
  Valuation w;
  try {
    w = gkd45::normalize(p, targets);
  } catch (const gkd45::postcondition_error& e) {
    std::cerr << "normalization failed its guarantee: " << e.what() << "\n";
    return 1;
  }
  if (o.json) {
    ordered_json j;
    j["command"] = "normalize";
    j["phi"] = p.phi().text();
    j["alpha"] = p.alpha().str();
    j["beta"] = p.beta().str();
    j["delta"] = p.delta().str();
    j["g"] = map_json(p.g());
    j["h"] = map_json(p.h());
    ordered_json wj = ordered_json::object();
    for (const auto& [atom, val] : w.entries()) wj[atom.text()] = val.str();
    j["w"] = std::move(wj);
    ordered_json tj = ordered_json::array();
    for (const Formula& t : targets) tj.push_back(t.text());
    j["targets"] = std::move(tj);
    j["postconditions"] = "ok";
    emit(j);
  } else {
    std::cout << "phi: " << p.phi().text() << "\n";
    std::cout << "alpha: " << p.alpha().str() << "  beta: " << p.beta().str()
              << "  delta: " << p.delta().str() << "\n";
    auto show_map = [](const char* name, const gkd45::MonotoneMap& m) {
      std::cout << name << ":";
      for (const auto& [x, y] : m.points()) std::cout << " (" << x.str() << "," << y.str() << ")";
      if (m.isolated_one()) std::cout << " with 1 -> 1 isolated";
      std::cout << "\n";
    };
    show_map("g", p.g());
    show_map("h", p.h());
    std::cout << "w:\n";
    for (const auto& [atom, val] : w.entries())
      std::cout << "  " << atom.text() << " = " << val.str() << "\n";
    std::cout << "postconditions 1-6 hold on " << targets.size() << " target(s)\n";
  }
  return 0;
}

struct PiPhiOpts {
  std::string valuations, formula;
  bool json = false;
};

int run_pi_phi(const PiPhiOpts& o) {
  nlohmann::json doc = nlohmann::json::parse(read_file(o.valuations));
  if (!doc.is_object() || !doc.contains("v") || !doc.contains("u"))
    throw std::runtime_error("valuations file must be {\"v\": {...}, \"u\": {...}}");
  Valuation v = read_valuation(doc.at("v"), "v");
  Valuation u = read_valuation(doc.at("u"), "u");
  Formula f = gkd45::parse_formula(o.formula);
  Rat value = gkd45::pi_phi(v, u, f);
  struct Row {
    std::string psi, lower, upper;
  };
  std::vector<Row> rows;
  for (const Formula& s : gkd45::subformulas(f)) {
    Rat us = gkd45::prop_eval(s, u);
    rows.push_back({s.text(), gkd45::g_implies(v.at(Formula::box(s)), us).str(),
                    gkd45::g_implies(us, v.at(Formula::dia(s))).str()});
  }
  if (o.json) {
    ordered_json j;
    j["command"] = "pi-phi";
    j["formula"] = f.text();
    j["value"] = value.str();
    ordered_json rj = ordered_json::array();
    for (const Row& r : rows) {
      ordered_json x;
      x["psi"] = r.psi;
      x["lower"] = r.lower;
      x["upper"] = r.upper;
      rj.push_back(std::move(x));
    }
    j["subformulas"] = std::move(rj);
    emit(j);
  } else {
    std::cout << value.str() << "\n";
    for (const Row& r : rows)
      std::cout << "  " << r.psi << ": box-side " << r.lower << ", dia-side " << r.upper << "\n";
  }
  return 0;
}

struct EvalOpts {
  std::string model, world, formula;
  bool json = false;
};

int run_eval(const EvalOpts& o) {
  AnyModel m = gkd45::load_model(read_file(o.model));
  Formula f = gkd45::parse_formula(o.formula);
  Rat value = gkd45::eval(m, o.world, f);
  bool world_independent =
      std::holds_alternative<gkd45::PossModel>(m) && !f.is_propositional();
  if (o.json) {
    ordered_json j;
    j["command"] = "eval";
    j["model"] = o.model;
    j["world"] = o.world;
    j["formula"] = f.text();
    j["value"] = value.str();
    j["world_independent"] = world_independent;
    emit(j);
  } else {
    std::cout << value.str() << "\n";
    if (world_independent)
      std::cout << "note: modal values are world-independent in a possibilistic model\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for the many-valued modal logic KD45 over the Goedel chain"};
  app.require_subcommand(1);

  CountermodelOpts cm;
  auto* cm_cmd = app.add_subcommand("countermodel", "search a model class for a countermodel");
  cm_cmd->add_option("formula", cm.formula, "formula text")->required();
  cm_cmd->add_option("--class", cm.cls,
                     "model class: pi-g | kd45-gk | crisp-ste | crisp-semiuniversal")
      ->capture_default_str();
  cm_cmd->add_option("--max-worlds", cm.max_worlds, "largest world count")->capture_default_str();
  cm_cmd->add_option("--chain", cm.chain, "chain denominator m for {0,1/m,...,1}; 0 = automatic")
      ->capture_default_str();
  cm_cmd->add_option("--seed", cm.seed, "seed for the randomized phase")->capture_default_str();
  cm_cmd->add_option("--samples", cm.samples,
                     "draw this many random models instead of enumerating exhaustively")
      ->capture_default_str();
  cm_cmd->add_option("--threads", cm.threads, "worker threads for the exhaustive sweep")
      ->capture_default_str();
  cm_cmd->add_flag("--json", cm.json, "machine-readable report");

  CompareOpts cp;
  auto* cp_cmd = app.add_subcommand(
      "compare", "countermodel status of a corpus in pi-g versus kd45-gk models");
  cp_cmd->add_option("corpus", cp.corpus,
                     "file with one formula per line, or builtin:{axioms,theorems,prop2,t1..t5}")
      ->required();
  cp_cmd->add_option("--max-worlds", cp.max_worlds, "largest world count")->capture_default_str();
  cp_cmd->add_option("--chain", cp.chain, "chain denominator; 0 = automatic")
      ->capture_default_str();
  cp_cmd->add_option("--threads", cp.threads, "worker threads")->capture_default_str();
  cp_cmd->add_flag("--json", cp.json, "machine-readable report");

  FrameCheckOpts fc;
  auto* fc_cmd =
      app.add_subcommand("frame-check", "serial / transitive / euclidean checks of a model file");
  fc_cmd->add_option("model", fc.model, "model JSON file")->required();
  fc_cmd->add_flag("--json", fc.json, "machine-readable report");

  ProofCheckOpts pc;
  auto* pc_cmd = app.add_subcommand("proof-check", "check a derivation step by step");
  pc_cmd->add_option("proof", pc.source,
                     "proof text file, or builtin:{proof1,proof2,proof3,proof4,t5}")
      ->required();
  pc_cmd->add_flag("--json", pc.json, "machine-readable report");

  NormalizeOpts nm;
  auto* nm_cmd = app.add_subcommand("normalize", "run the two-map normalization transform");
  nm_cmd->add_option("problem", nm.problem, "problem JSON file: {u, nu, delta, phi[, alpha]}")
      ->required();
  nm_cmd->add_option("target", nm.targets, "target formulas (default: fixed-point atoms of phi)");
  nm_cmd->add_flag("--json", nm.json, "machine-readable report");

  PiPhiOpts pp;
  auto* pp_cmd =
      app.add_subcommand("pi-phi", "canonical possibility degree of u relative to v");
  pp_cmd->add_option("valuations", pp.valuations, "JSON file {\"v\": {...}, \"u\": {...}}")
      ->required();
  pp_cmd->add_option("formula", pp.formula, "formula text")->required();
  pp_cmd->add_flag("--json", pp.json, "machine-readable report");

  EvalOpts ev;
  auto* ev_cmd = app.add_subcommand("eval", "evaluate a formula at a world of a model file");
  ev_cmd->add_option("model", ev.model, "model JSON file")->required();
  ev_cmd->add_option("world", ev.world, "world name")->required();
  ev_cmd->add_option("formula", ev.formula, "formula text")->required();
  ev_cmd->add_flag("--json", ev.json, "machine-readable report");

  int rc = 0;
  cm_cmd->callback([&] { rc = run_countermodel(cm); });
  cp_cmd->callback([&] { rc = run_compare(cp); });
  fc_cmd->callback([&] { rc = run_frame_check(fc); });
  pc_cmd->callback([&] { rc = run_proof_check(pc); });
  nm_cmd->callback([&] { rc = run_normalize(nm); });
  pp_cmd->callback([&] { rc = run_pi_phi(pp); });
  ev_cmd->callback([&] { rc = run_eval(ev); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
