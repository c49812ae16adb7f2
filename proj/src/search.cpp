#include "gkd45/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace gkd45 {

const char* class_name(ModelClass c) {
  switch (c) {
    case ModelClass::PiG: return "pi-g";
    case ModelClass::KD45GK: return "kd45-gk";
    case ModelClass::CrispSTE: return "crisp-ste";
    case ModelClass::CrispSemiUniversal: return "crisp-semiuniversal";
  }
  return "?";
}

std::optional<ModelClass> class_from_name(std::string_view name) {
  if (name == "pi-g") return ModelClass::PiG;
  if (name == "kd45-gk") return ModelClass::KD45GK;
  if (name == "crisp-ste") return ModelClass::CrispSTE;
  if (name == "crisp-semiuniversal") return ModelClass::CrispSemiUniversal;
  return std::nullopt;
}

namespace {

bool is_crisp(ModelClass c) {
  return c == ModelClass::CrispSTE || c == ModelClass::CrispSemiUniversal;
}

std::uint64_t ipow_checked(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) {
    if (r > (std::uint64_t{1} << 40))
      throw std::invalid_argument("model space too large to enumerate");
    r *= base;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Compiled formulas. All values of an enumerated model lie on one value
// grid, and every Goedel connective maps grid values to grid values, so
// evaluation runs on uint8 grid indices and stays exact.

struct CNode {
  Conn op;
  int a = -1, b = -1;  // children
  int var = -1;        // Conn::Var
};

struct Pool {
  std::vector<CNode> nodes;  // children precede parents
  std::vector<int> roots;    // per input formula
};

Pool compile(const std::vector<Formula>& fs, const std::vector<std::string>& vars) {
  Pool p;
  std::map<Formula, int> memo;
  std::function<int(const Formula&)> go = [&](const Formula& f) -> int {
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    CNode n{f.kind(), -1, -1, -1};
    switch (f.kind()) {
      case Conn::Var: {
        auto v = std::lower_bound(vars.begin(), vars.end(), f.var_name());
        n.var = static_cast<int>(v - vars.begin());
        break;
      }
      case Conn::Bot:
        break;
      case Conn::Box:
      case Conn::Diamond:
        n.a = go(f.child());
        break;
      default:
        n.a = go(f.lhs());
        n.b = go(f.rhs());
    }
    p.nodes.push_back(n);
    int id = static_cast<int>(p.nodes.size()) - 1;
    memo.emplace(f, id);
    return id;
  };
  for (const auto& f : fs) p.roots.push_back(go(f));
  return p;
}

struct U8Model {
  int k = 0;
  bool possibilistic = true;
  std::vector<std::uint8_t> pi;  // k entries (possibilistic)
  std::vector<std::uint8_t> R;   // k*k entries (relational)
  std::vector<std::uint8_t> e;   // k*n entries, world-major
};

// Evaluates every live node over all worlds of m into val (node-major).
void eval_u8(const Pool& p, const U8Model& m, int n, std::uint8_t top,
             const std::vector<char>& live, std::vector<std::uint8_t>& val) {
  const int k = m.k;
  val.resize(p.nodes.size() * k);
  auto imp = [top](std::uint8_t x, std::uint8_t y) { return x <= y ? top : y; };
  for (std::size_t idx = 0; idx < p.nodes.size(); idx++) {
    if (!live[idx]) continue;
    const CNode& nd = p.nodes[idx];
    std::uint8_t* out = &val[idx * k];
    const std::uint8_t* a = nd.a >= 0 ? &val[nd.a * k] : nullptr;
    const std::uint8_t* b = nd.b >= 0 ? &val[nd.b * k] : nullptr;
    switch (nd.op) {
      case Conn::Var:
        for (int w = 0; w < k; w++) out[w] = m.e[w * n + nd.var];
        break;
      case Conn::Bot:
        for (int w = 0; w < k; w++) out[w] = 0;
        break;
      case Conn::And:
        for (int w = 0; w < k; w++) out[w] = std::min(a[w], b[w]);
        break;
      case Conn::Or:
        for (int w = 0; w < k; w++) out[w] = std::max(a[w], b[w]);
        break;
      case Conn::Implies:
        for (int w = 0; w < k; w++) out[w] = imp(a[w], b[w]);
        break;
      case Conn::Box:
        if (m.possibilistic) {
          std::uint8_t r = top;
          for (int v = 0; v < k; v++) r = std::min(r, imp(m.pi[v], a[v]));
          for (int w = 0; w < k; w++) out[w] = r;
        } else {
          for (int w = 0; w < k; w++) {
            std::uint8_t r = top;
            for (int v = 0; v < k; v++) r = std::min(r, imp(m.R[w * k + v], a[v]));
            out[w] = r;
          }
        }
        break;
      case Conn::Diamond:
        if (m.possibilistic) {
          std::uint8_t r = 0;
          for (int v = 0; v < k; v++) r = std::max(r, std::min(m.pi[v], a[v]));
          for (int w = 0; w < k; w++) out[w] = r;
        } else {
          for (int w = 0; w < k; w++) {
            std::uint8_t r = 0;
            for (int v = 0; v < k; v++) r = std::max(r, std::min(m.R[w * k + v], a[v]));
            out[w] = r;
          }
        }
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Deduplicated enumeration. Possibilistic models are multisets of world
// descriptors (pi value, e row); relational models are canonical relation
// matrices with e grids minimal under the matrix's automorphisms. Both are
// exact dedup up to world renaming.

std::vector<std::vector<int>> all_perms(int k) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

bool u8_serial(const std::vector<std::uint8_t>& R, int k, std::uint8_t top) {
  for (int w = 0; w < k; w++) {
    std::uint8_t mx = 0;
    for (int v = 0; v < k; v++) mx = std::max(mx, R[w * k + v]);
    if (mx != top) return false;
  }
  return true;
}

bool u8_transitive(const std::vector<std::uint8_t>& R, int k) {
  for (int a = 0; a < k; a++)
    for (int b = 0; b < k; b++)
      for (int c = 0; c < k; c++)
        if (std::min(R[a * k + b], R[b * k + c]) > R[a * k + c]) return false;
  return true;
}

bool u8_euclidean(const std::vector<std::uint8_t>& R, int k) {
  for (int w = 0; w < k; w++)
    for (int a = 0; a < k; a++)
      for (int b = 0; b < k; b++)
        if (std::min(R[w * k + a], R[w * k + b]) > R[a * k + b]) return false;
  return true;
}

// Serial-transitive-euclidean k x k matrices over {0..V-1}, lexicographically
// minimal under world renaming, generated by backtracking in row-major order
// with incremental property checks. Memoized; the call is thread-safe.
const std::vector<std::vector<std::uint8_t>>& ste_matrices(int k, int V) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<std::uint8_t>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({k, V});
  if (it != cache.end()) return it->second;

  const std::uint8_t top = static_cast<std::uint8_t>(V - 1);
  auto perms = all_perms(k);
  std::vector<std::uint8_t> R(k * k, 0);
  std::vector<std::vector<std::uint8_t>> out;

  auto assigned = [&](int r, int c, int pos) { return r * k + c <= pos; };
  // Checks every property instance whose entries are all assigned and which
  // involves the entry (r, c) just set.
  auto ok = [&](int pos) {
    int r = pos / k, c = pos % k;
    if (c == k - 1) {
      std::uint8_t mx = 0;
      for (int v = 0; v < k; v++) mx = std::max(mx, R[r * k + v]);
      if (mx != top) return false;
    }
    for (int d = 0; d < k; d++) {  // transitivity, (r,c) in each role
      if (assigned(c, d, pos) && assigned(r, d, pos) &&
          std::min(R[r * k + c], R[c * k + d]) > R[r * k + d])
        return false;
      if (assigned(d, r, pos) && assigned(d, c, pos) &&
          std::min(R[d * k + r], R[r * k + c]) > R[d * k + c])
        return false;
      if (assigned(r, d, pos) && assigned(d, c, pos) &&
          std::min(R[r * k + d], R[d * k + c]) > R[r * k + c])
        return false;
    }
    for (int d = 0; d < k; d++) {  // euclideanness, (r,c) in each role
      if (assigned(r, d, pos) && assigned(c, d, pos) &&
          std::min(R[r * k + c], R[r * k + d]) > R[c * k + d])
        return false;
      if (assigned(r, d, pos) && assigned(d, c, pos) &&
          std::min(R[r * k + d], R[r * k + c]) > R[d * k + c])
        return false;
      if (assigned(d, r, pos) && assigned(d, c, pos) &&
          std::min(R[d * k + r], R[d * k + c]) > R[r * k + c])
        return false;
    }
    return true;
  };
  std::function<void(int)> rec = [&](int pos) {
    if (pos == k * k) {
      for (std::size_t s = 1; s < perms.size(); s++) {
        const auto& sg = perms[s];
        for (int q = 0; q < k * k; q++) {
          std::uint8_t pr = R[sg[q / k] * k + sg[q % k]];
          if (pr != R[q]) {
            if (pr < R[q]) return;  // a renaming is lexicographically smaller
            break;
          }
        }
      }
      out.push_back(R);
      return;
    }
    for (int v = 0; v < V; v++) {
      R[pos] = static_cast<std::uint8_t>(v);
      if (ok(pos)) rec(pos + 1);
    }
    R[pos] = 0;
  };
  rec(0);
  return cache.emplace(std::make_pair(k, V), std::move(out)).first->second;
}

// Keep only e grids lexicographically minimal under the given renamings.
bool grid_minimal(const std::vector<std::uint8_t>& e, int n,
                  const std::vector<const std::vector<int>*>& auts) {
  for (const auto* sg : auts) {
    for (std::size_t q = 0; q < e.size(); q++) {
      std::uint8_t pe = e[(*sg)[q / n] * n + q % n];
      if (pe != e[q]) {
        if (pe < e[q]) return false;
        break;
      }
    }
  }
  return true;
}

using U8Visitor = std::function<bool(const U8Model&)>;

// Relational enumeration core shared by KD45GK, CrispSTE and
// CrispSemiUniversal: fixed matrix list x e-grid odometer.
bool relational_enum(int k, int V, int n,
                     const std::vector<std::vector<std::uint8_t>>& mats,
                     const std::vector<std::vector<int>>& perms, U8Model& m,
                     std::uint64_t& visited, const U8Visitor& fn) {
  m.k = k;
  m.possibilistic = false;
  m.pi.clear();
  for (const auto& mat : mats) {
    m.R = mat;
    std::vector<const std::vector<int>*> auts;
    for (std::size_t s = 1; s < perms.size(); s++) {
      const auto& sg = perms[s];
      bool fixes = true;
      for (int q = 0; q < k * k && fixes; q++)
        fixes = mat[sg[q / k] * k + sg[q % k]] == mat[q];
      if (fixes) auts.push_back(&perms[s]);
    }
    m.e.assign(static_cast<std::size_t>(k) * n, 0);
    while (true) {
      if (n == 0 || auts.empty() || grid_minimal(m.e, n, auts)) {
        visited++;
        if (!fn(m)) return false;
      }
      int i = k * n - 1;
      while (i >= 0 && m.e[i] == V - 1) m.e[i--] = 0;
      if (i < 0) break;
      m.e[i]++;
    }
  }
  return true;
}

// Full deduplicated stream for the class, worlds ascending, in a fixed
// order. Returns the number of models visited (fn calls).
std::uint64_t u8_enumerate(ModelClass cls, int max_worlds, int V, int n,
                           const U8Visitor& fn) {
  if (max_worlds < 1) throw std::invalid_argument("max_worlds must be >= 1");
  if (V < 2 || V > 255) throw std::invalid_argument("value grid size out of range");
  std::uint64_t visited = 0;
  U8Model m;
  for (int k = 1; k <= max_worlds; k++) {
    if (cls == ModelClass::PiG) {
      const std::uint64_t Vn = ipow_checked(V, n);
      const std::uint64_t D = ipow_checked(V, n + 1);
      const std::uint64_t topbase = static_cast<std::uint64_t>(V - 1) * Vn;
      m.k = k;
      m.possibilistic = true;
      m.pi.assign(k, 0);
      m.R.clear();
      m.e.assign(static_cast<std::size_t>(k) * n, 0);
      std::vector<std::uint64_t> pw(n, 1);
      for (int j = n - 2; j >= 0; j--) pw[j] = pw[j + 1] * V;
      auto decode = [&](int pos, std::uint64_t d) {
        m.pi[pos] = static_cast<std::uint8_t>(d / Vn);
        std::uint64_t rest = d % Vn;
        for (int j = 0; j < n; j++)
          m.e[static_cast<std::size_t>(pos) * n + j] =
              static_cast<std::uint8_t>(rest / pw[j] % V);
      };
      bool stop = false;
      // Descriptors are chosen non-decreasingly; the last one (the largest)
      // must carry pi = 1, i.e. lie at or above topbase.
      std::function<void(int, std::uint64_t)> rec = [&](int pos, std::uint64_t start) {
        if (pos == k - 1) {
          for (std::uint64_t d = std::max(start, topbase); d < D && !stop; d++) {
            decode(pos, d);
            visited++;
            if (!fn(m)) stop = true;
          }
          return;
        }
        for (std::uint64_t d = start; d < D && !stop; d++) {
          decode(pos, d);
          rec(pos + 1, d);
        }
      };
      rec(0, 0);
      if (stop) return visited;
    } else if (cls == ModelClass::KD45GK || cls == ModelClass::CrispSTE) {
      ipow_checked(V, k * n);
      if (!relational_enum(k, V, n, ste_matrices(k, V), all_perms(k), m, visited, fn))
        return visited;
    } else {  // CrispSemiUniversal: R = W x E with E = first j worlds
      ipow_checked(V, k * n);
      std::vector<std::vector<std::uint8_t>> mats;
      for (int j = 1; j <= k; j++) {
        std::vector<std::uint8_t> R(static_cast<std::size_t>(k) * k, 0);
        for (int w = 0; w < k; w++)
          for (int c = 0; c < j; c++) R[w * k + c] = static_cast<std::uint8_t>(V - 1);
        mats.push_back(std::move(R));
      }
      if (!relational_enum(k, V, n, mats, all_perms(k), m, visited, fn))
        return visited;
    }
  }
  return visited;
}

AnyModel materialize(const U8Model& m, int n, const std::vector<Rat>& grid,
                     const std::vector<std::string>& vars) {
  std::vector<std::string> worlds(m.k);
  for (int w = 0; w < m.k; w++) worlds[w] = "w" + std::to_string(w + 1);
  std::vector<std::vector<Rat>> e(m.k, std::vector<Rat>(n, Rat::zero()));
  for (int w = 0; w < m.k; w++)
    for (int j = 0; j < n; j++) e[w][j] = grid[m.e[static_cast<std::size_t>(w) * n + j]];
  if (m.possibilistic) {
    std::vector<Rat> pi(m.k, Rat::zero());
    for (int w = 0; w < m.k; w++) pi[w] = grid[m.pi[w]];
    return PossModel(std::move(worlds), vars, std::move(pi), std::move(e));
  }
  std::vector<std::vector<Rat>> R(m.k, std::vector<Rat>(m.k, Rat::zero()));
  for (int w = 0; w < m.k; w++)
    for (int v = 0; v < m.k; v++) R[w][v] = grid[m.R[static_cast<std::size_t>(w) * m.k + v]];
  return GKModel(std::move(worlds), vars, std::move(R), std::move(e));
}

std::vector<std::string> collect_variables(const std::vector<Formula>& fs,
                                           const std::vector<std::string>& extra) {
  std::vector<std::string> vars = extra;
  for (const auto& f : fs) {
    auto vs = variables(f);
    vars.insert(vars.end(), vs.begin(), vs.end());
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

int resolved_denominator(const SearchBounds& b, std::size_t var_count, ModelClass cls) {
  if (!b.grid.empty()) return 0;
  if (is_crisp(cls)) {
    if (b.chain_denominator > 1)
      throw std::invalid_argument("crisp classes use the two-valued chain {0,1}");
    return 1;
  }
  if (b.chain_denominator > 0) return b.chain_denominator;
  return b.max_worlds * static_cast<int>(var_count) + 1;
}

}  // namespace

std::vector<Rat> resolve_grid(const SearchBounds& b, std::size_t var_count,
                              ModelClass cls) {
  if (!b.grid.empty()) {
    const auto& g = b.grid;
    if (g.size() < 2 || g.size() > 255)
      throw std::invalid_argument("explicit value grid must have 2..255 values");
    if (!g.front().is_zero() || !g.back().is_one())
      throw std::invalid_argument("explicit value grid must run from 0 to 1");
    for (std::size_t i = 1; i < g.size(); i++)
      if (!(g[i - 1] < g[i]))
        throw std::invalid_argument("explicit value grid must be strictly increasing");
    if (is_crisp(cls) && g.size() != 2)
      throw std::invalid_argument("crisp classes use the two-valued chain {0,1}");
    return g;
  }
  int m = resolved_denominator(b, var_count, cls);
  if (m < 1 || m > 254) throw std::invalid_argument("chain denominator out of range");
  std::vector<Rat> g;
  g.reserve(m + 1);
  for (int i = 0; i <= m; i++) g.push_back(Rat(i, m));
  return g;
}

std::uint64_t enumerate_models(const SearchBounds& b, ModelClass cls,
                               const std::function<bool(const AnyModel&)>& visit) {
  std::vector<std::string> vars = collect_variables({}, b.variables);
  std::vector<Rat> grid = resolve_grid(b, vars.size(), cls);
  int n = static_cast<int>(vars.size());
  return u8_enumerate(cls, b.max_worlds, static_cast<int>(grid.size()), n,
                      [&](const U8Model& m) { return visit(materialize(m, n, grid, vars)); });
}

std::uint64_t count_models(const SearchBounds& b, ModelClass cls) {
  std::vector<std::string> vars = collect_variables({}, b.variables);
  std::vector<Rat> grid = resolve_grid(b, vars.size(), cls);
  return u8_enumerate(cls, b.max_worlds, static_cast<int>(grid.size()),
                      static_cast<int>(vars.size()), [](const U8Model&) { return true; });
}

namespace {

struct Candidate {
  std::uint64_t ordinal;
  U8Model model;
  int world;
};

}  // namespace

std::vector<SearchReport> sweep(const std::vector<Formula>& fs, ModelClass cls,
                                const SearchBounds& b, unsigned threads) {
  auto t0 = std::chrono::steady_clock::now();
  const std::size_t F = fs.size();
  if (F == 0) return {};
  std::vector<std::string> vars = collect_variables(fs, b.variables);
  std::vector<Rat> grid = resolve_grid(b, vars.size(), cls);
  const int den = resolved_denominator(b, vars.size(), cls);
  const int n = static_cast<int>(vars.size());
  const int V = static_cast<int>(grid.size());
  const std::uint8_t top = static_cast<std::uint8_t>(V - 1);
  Pool pool = compile(fs, vars);

  unsigned T = threads ? threads : std::thread::hardware_concurrency();
  T = std::max(1u, std::min(T, 64u));

  std::vector<std::atomic<std::uint64_t>> best(F);
  for (auto& a : best) a.store(UINT64_MAX, std::memory_order_relaxed);
  std::vector<std::vector<std::optional<Candidate>>> found(
      T, std::vector<std::optional<Candidate>>(F));
  std::vector<std::uint64_t> totals(T, 0);
  std::vector<char> completed(T, 0);

  auto worker = [&](unsigned tid) {
    std::vector<std::size_t> active(F);
    std::iota(active.begin(), active.end(), 0);
    bool stopped_early = false;
    std::vector<char> live;
    std::vector<std::uint8_t> val;
    auto rebuild_live = [&]() {
      live.assign(pool.nodes.size(), 0);
      for (std::size_t f : active) live[pool.roots[f]] = 1;
      for (std::size_t i = pool.nodes.size(); i-- > 0;) {
        if (!live[i]) continue;
        const CNode& nd = pool.nodes[i];
        if (nd.a >= 0) live[nd.a] = 1;
        if (nd.b >= 0) live[nd.b] = 1;
      }
    };
    rebuild_live();
    std::uint64_t ord = 0;
    unsigned tick = 0;
    auto visit = [&](const U8Model& m) {
      std::uint64_t my = ord++;
      if (my % T != tid) return true;
      if (++tick >= 1024) {
        tick = 0;
        std::size_t before = active.size();
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](std::size_t f) {
                                      return best[f].load(std::memory_order_relaxed) <= my;
                                    }),
                     active.end());
        if (active.empty()) {
          stopped_early = true;
          return false;
        }
        if (active.size() != before) rebuild_live();
      }
      eval_u8(pool, m, n, top, live, val);
      bool dirty = false;
      for (std::size_t ai = 0; ai < active.size();) {
        std::size_t f = active[ai];
        if (best[f].load(std::memory_order_relaxed) <= my) {
          ai++;
          continue;
        }
        const std::uint8_t* rv = &val[pool.roots[f] * m.k];
        int world = -1;
        for (int w = 0; w < m.k; w++)
          if (rv[w] < top) {
            world = w;
            break;
          }
        if (world < 0) {
          ai++;
          continue;
        }
        std::uint64_t cur = best[f].load(std::memory_order_relaxed);
        while (my < cur &&
               !best[f].compare_exchange_weak(cur, my, std::memory_order_relaxed)) {
        }
        found[tid][f] = Candidate{my, m, world};
        active.erase(active.begin() + ai);
        dirty = true;
      }
      if (dirty) {
        if (active.empty()) {
          stopped_early = true;
          return false;
        }
        rebuild_live();
      }
      return true;
    };
    totals[tid] = u8_enumerate(cls, b.max_worlds, V, n, visit);
    completed[tid] = stopped_early ? 0 : 1;
  };

  if (T == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool_threads;
    for (unsigned t = 0; t < T; t++) pool_threads.emplace_back(worker, t);
    for (auto& th : pool_threads) th.join();
  }

  std::uint64_t total = 0;
  for (unsigned t = 0; t < T; t++)
    if (completed[t]) total = std::max(total, totals[t]);

  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
  std::vector<SearchReport> reports;
  reports.reserve(F);
  for (std::size_t f = 0; f < F; f++) {
    SearchReport rep{fs[f],    cls, b.max_worlds, den, grid, std::nullopt, 0,
                     std::string(), ms};
    const Candidate* bestc = nullptr;
    for (unsigned t = 0; t < T; t++)
      if (found[t][f] && (!bestc || found[t][f]->ordinal < bestc->ordinal))
        bestc = &*found[t][f];
    if (bestc) {
      AnyModel model = materialize(bestc->model, n, grid, vars);
      std::string world = "w" + std::to_string(bestc->world + 1);
      Rat value = eval(model, world, fs[f]);
      if (!(value < Rat::one()))
        throw std::logic_error("countermodel failed exact re-verification");
      rep.witness = Witness{std::move(model), std::move(world), value, bestc->ordinal};
      rep.models_examined = bestc->ordinal + 1;
      rep.outcome = "countermodel";
    } else {
      rep.models_examined = total;
      rep.outcome = "no countermodel within bounds";
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

SearchReport find_countermodel(const Formula& f, ModelClass cls, const SearchBounds& b) {
  return std::move(sweep({f}, cls, b)[0]);
}

rejection_error::rejection_error(const std::string& msg, std::uint64_t tries_)
    : std::runtime_error(msg), tries(tries_) {}

AnyModel random_model(ModelClass cls, int worlds, int chain_denominator,
                      const std::vector<std::string>& vars, std::uint64_t seed,
                      std::uint64_t budget) {
  if (worlds < 1) throw std::invalid_argument("world count must be >= 1");
  std::vector<std::string> vs = collect_variables({}, vars);
  SearchBounds b;
  b.max_worlds = worlds;
  b.chain_denominator = chain_denominator;
  std::vector<Rat> grid = resolve_grid(b, vs.size(), cls);
  const int V = static_cast<int>(grid.size());
  const std::uint8_t top = static_cast<std::uint8_t>(V - 1);
  const int n = static_cast<int>(vs.size());
  const int k = worlds;
  std::mt19937_64 rng(seed);
  // rng() % m keeps results identical across platforms, unlike the standard
  // distribution templates.
  auto draw = [&](int m) { return static_cast<int>(rng() % static_cast<std::uint64_t>(m)); };

  U8Model m;
  m.k = k;
  m.e.resize(static_cast<std::size_t>(k) * n);
  if (cls == ModelClass::PiG) {
    m.possibilistic = true;
    m.pi.resize(k);
    int forced = draw(k);
    for (int w = 0; w < k; w++)
      m.pi[w] = w == forced ? top : static_cast<std::uint8_t>(draw(V));
    for (auto& x : m.e) x = static_cast<std::uint8_t>(draw(V));
    return materialize(m, n, grid, vs);
  }
  m.possibilistic = false;
  m.R.resize(static_cast<std::size_t>(k) * k);
  if (cls == ModelClass::CrispSemiUniversal) {
    int j = 1 + draw(k);
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    for (int i = k - 1; i > 0; i--) std::swap(order[i], order[draw(i + 1)]);
    std::vector<char> in(k, 0);
    for (int i = 0; i < j; i++) in[order[i]] = 1;
    for (int w = 0; w < k; w++)
      for (int c = 0; c < k; c++) m.R[w * k + c] = in[c] ? top : 0;
    for (auto& x : m.e) x = static_cast<std::uint8_t>(draw(V));
    return materialize(m, n, grid, vs);
  }
  for (std::uint64_t t = 0; t < budget; t++) {
    for (auto& x : m.R) x = static_cast<std::uint8_t>(draw(V));
    if (u8_serial(m.R, k, top) && u8_transitive(m.R, k) && u8_euclidean(m.R, k)) {
      for (auto& x : m.e) x = static_cast<std::uint8_t>(draw(V));
      return materialize(m, n, grid, vs);
    }
  }
  throw rejection_error("no serial-transitive-euclidean relation accepted in " +
                            std::to_string(budget) +
                            " samples (acceptance rate 0/" + std::to_string(budget) + ")",
                        budget);
}

CompareReport compare_classes(const std::vector<Formula>& corpus, const SearchBounds& b,
                              unsigned threads) {
  CompareReport out;
  auto pig = sweep(corpus, ModelClass::PiG, b, threads);
  std::vector<Formula> open;
  std::vector<std::size_t> open_idx;
  for (std::size_t i = 0; i < corpus.size(); i++)
    if (!pig[i].witness) {
      open.push_back(corpus[i]);
      open_idx.push_back(i);
    }
  std::vector<SearchReport> gk_open;
  if (!open.empty()) gk_open = sweep(open, ModelClass::KD45GK, b, threads);

  std::size_t oi = 0;
  for (std::size_t i = 0; i < corpus.size(); i++) {
    SearchReport rel = [&]() -> SearchReport {
      if (!pig[i].witness) return std::move(gk_open[oi++]);
      // Transport the possibilistic witness: R_pi is serial, transitive and
      // euclidean, and evaluation coincides, so it already refutes in the
      // relational class.
      const Witness& w = *pig[i].witness;
      AnyModel rm = to_relational(std::get<PossModel>(w.model));
      Rat value = eval(rm, w.world, corpus[i]);
      if (!(value < Rat::one()))
        throw std::logic_error("transported witness failed exact re-verification");
      SearchReport r{corpus[i],
                     ModelClass::KD45GK,
                     pig[i].max_worlds,
                     pig[i].chain_denominator,
                     pig[i].grid,
                     Witness{std::move(rm), w.world, value, w.ordinal},
                     0,
                     "countermodel",
                     0.0};
      return r;
    }();
    bool agree = pig[i].witness.has_value() == rel.witness.has_value();
    if (!agree) out.discrepancies.push_back(i);
    out.entries.push_back(
        ClassComparison{corpus[i], std::move(pig[i]), std::move(rel), agree});
  }
  return out;
}

CompareReport crisp_reduction_check(const std::vector<Formula>& corpus, int max_worlds,
                                    unsigned threads) {
  SearchBounds b;
  b.max_worlds = max_worlds;
  b.chain_denominator = 1;
  CompareReport out;
  auto su = sweep(corpus, ModelClass::CrispSemiUniversal, b, threads);
  auto ste = sweep(corpus, ModelClass::CrispSTE, b, threads);
  for (std::size_t i = 0; i < corpus.size(); i++) {
    bool agree = su[i].witness.has_value() == ste[i].witness.has_value();
    if (!agree) out.discrepancies.push_back(i);
    out.entries.push_back(
        ClassComparison{corpus[i], std::move(su[i]), std::move(ste[i]), agree});
  }
  return out;
}

Formula random_formula(std::mt19937_64& rng, int max_depth,
                       const std::vector<std::string>& vars) {
  auto draw = [&](int m) { return static_cast<int>(rng() % static_cast<std::uint64_t>(m)); };
  auto leaf = [&]() {
    if (vars.empty() || draw(8) == 0) return Formula::bot();
    return Formula::var(vars[draw(static_cast<int>(vars.size()))]);
  };
  std::function<Formula(int)> rec = [&](int depth) -> Formula {
    if (depth <= 0) return leaf();
    switch (draw(16)) {
      case 0:
      case 1:
        return leaf();
      case 2:
      case 3:
        return Formula::box(rec(depth - 1));
      case 4:
      case 5:
        return Formula::dia(rec(depth - 1));
      case 6:
      case 7:
      case 8:
        return Formula::conj(rec(depth - 1), rec(depth - 1));
      case 9:
      case 10:
      case 11:
        return Formula::disj(rec(depth - 1), rec(depth - 1));
      case 12:
      case 13:
      case 14:
        return Formula::impl(rec(depth - 1), rec(depth - 1));
      default:
        return Formula::neg(rec(depth - 1));
    }
  };
  return rec(max_depth);
}

}  // namespace gkd45
