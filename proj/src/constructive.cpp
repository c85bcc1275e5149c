#include "ckb/constructive.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "ckb/exact.hpp"
#include "ckb/matching.hpp"

namespace ckb {

namespace {

Bitset to_bits(int n, const std::vector<int>& indices) {
  Bitset b(n);
  for (int v : indices) b.set(v);
  return b;
}

std::vector<int> to_list(const Bitset& b) {
  std::vector<int> out;
  for (auto v = b.find_first(); v != Bitset::npos; v = b.find_next(v)) out.push_back(static_cast<int>(v));
  return out;
}

int random_member(const Bitset& b, Rng& rng) {
  const auto count = b.count();
  if (count == 0) return -1;
  std::uniform_int_distribution<std::size_t> dist(0, count - 1);
  auto v = b.find_first();
  for (std::size_t skip = dist(rng); skip > 0; --skip) v = b.find_next(v);
  return static_cast<int>(v);
}

void check_pool(const BlowupGraph& g, int part, const std::vector<int>& pool, std::size_t size,
                const char* name) {
  if (pool.size() != size) {
    throw PreconditionError(fmt::format("{}_{} has {} vertices, expected {}", name, part, pool.size(), size));
  }
  for (int v : pool) {
    if (v < 0 || v >= g.n()) throw PreconditionError(fmt::format("{}_{} holds index {} out of range", name, part, v));
  }
  if (to_bits(g.n(), pool).count() != pool.size()) {
    throw PreconditionError(fmt::format("{}_{} repeats a vertex", name, part));
  }
}

// Parts q = p+1, ..., p+t of the entries of a linking sequence for a pair in V_p.
std::vector<int> pattern(int k, int p, int t) {
  std::vector<int> parts;
  for (int j = 1; j <= t; ++j) {
    p = next_part(p, k);
    parts.push_back(p);
  }
  return parts;
}

// Uniform ordered tuple of distinct vertices following the pattern, drawn
// from `avail`. Returns nothing when some part runs out.
std::optional<LinkingSequence> sample_tuple(const std::vector<int>& parts, VertexMask avail, Rng& rng) {
  LinkingSequence seq;
  for (int q : parts) {
    const int v = random_member(avail.part(q), rng);
    if (v < 0) return std::nullopt;
    avail.set({q, v}, false);
    seq.entries.push_back({q, v});
  }
  return seq;
}

VertexMask mask_of(const BlowupGraph& g, std::span<const VertexRef> vs) {
  return VertexMask::from_vertices(g.k(), g.n(), vs);
}

// Orders the t+1 vertices of {c} + L so that position j lies in part
// ((j-1) mod k) + 1.
std::vector<VertexRef> arrange(int k, std::vector<VertexRef> block) {
  std::sort(block.begin(), block.end());
  std::vector<std::size_t> next(k + 1, 0);
  std::vector<std::vector<int>> per_part(k + 1);
  for (const VertexRef& v : block) per_part[v.part].push_back(v.index);
  std::vector<VertexRef> out;
  for (std::size_t j = 0; j < block.size(); ++j) {
    const int p = static_cast<int>(j % k) + 1;
    out.push_back({p, per_part[p][next[p]++]});
  }
  return out;
}

std::optional<std::vector<VertexRef>> linking_for(const BlowupGraph& g, int t, VertexRef c, VertexRef u,
                                                  const VertexMask& avail, Rng& rng) {
  const int k = g.k();
  const auto parts = pattern(k, c.part, t);
  if (t == k - 1) {
    // A path through parts c+1, ..., c-1 whose ends see both c and u.
    std::vector<VertexRef> path;
    for (std::size_t idx = 0; idx < parts.size(); ++idx) {
      const int q = parts[idx];
      Bitset cand = avail.part(q);
      if (idx == 0) cand &= g.neighbors(c, q) & g.neighbors(u, q);
      else cand &= g.neighbors(path.back(), q);
      if (idx + 1 == parts.size()) cand &= g.neighbors(c, q) & g.neighbors(u, q);
      const int v = random_member(cand, rng);
      if (v < 0) return std::nullopt;
      path.push_back({q, v});
    }
    return path;
  }
  for (int attempt = 0; attempt < 500; ++attempt) {
    auto seq = sample_tuple(parts, avail, rng);
    if (!seq) return std::nullopt;
    if (is_linking_sequence(g, c, u, *seq)) return seq->entries;
  }
  return std::nullopt;
}

std::optional<Gadget> grow_gadget(const BlowupGraph& g, int t, const VertexMask& avail,
                                  const std::vector<int>& probe, Rng& rng, int tries) {
  const int k = g.k();
  for (int attempt = 0; attempt < tries; ++attempt) {
    std::vector<VertexRef> cycle;
    cycle.push_back({1, random_member(avail.part(1), rng)});
    if (cycle[0].index < 0) return std::nullopt;
    for (int p = 2; p <= k && !cycle.empty(); ++p) {
      Bitset cand = g.neighbors(cycle.back(), p) & avail.part(p);
      if (p == k) cand &= g.neighbors(cycle[0], k);
      const int v = random_member(cand, rng);
      if (v < 0) cycle.clear();
      else cycle.push_back({p, v});
    }
    if (cycle.empty()) continue;
    VertexMask left = avail;
    for (const VertexRef& v : cycle) left.set(v, false);
    std::vector<VertexRef> sequence;
    bool ok = true;
    for (int i = 1; i <= k && ok; ++i) {
      auto link = linking_for(g, t, cycle[i - 1], {i, probe[i - 1]}, left, rng);
      if (!link) {
        ok = false;
        break;
      }
      std::vector<VertexRef> block = *link;
      for (const VertexRef& v : block) left.set(v, false);
      block.push_back(cycle[i - 1]);
      for (const VertexRef& v : arrange(k, block)) sequence.push_back(v);
    }
    if (ok) return Gadget{std::move(sequence)};
  }
  return std::nullopt;
}

std::vector<std::vector<int>> random_transversals(const BlowupGraph& g, int count, Rng& rng) {
  std::uniform_int_distribution<int> dist(0, g.n() - 1);
  std::vector<std::vector<int>> out(count, std::vector<int>(g.k()));
  for (auto& u : out) {
    for (int& x : u) x = dist(rng);
  }
  return out;
}

int resolve_t(int k, int t) {
  if (t == 0) t = k - 1;
  if (t < k - 1 || (t + 1) % k != 0) {
    throw PreconditionError(fmt::format("t = {} must satisfy t >= k - 1 and k | t + 1 (k = {})", t, k));
  }
  return t;
}

AbsorberSet finish(const BlowupGraph& g, std::vector<Gadget> gadgets, const AbsorberOptions& o, int t) {
  AbsorberSet a;
  a.vertices = VertexMask(g.k(), g.n());
  for (const Gadget& gd : gadgets) {
    for (const VertexRef& v : gd.sequence) {
      if (a.vertices.test(v)) throw InvariantViolation("absorber gadgets overlap");
      a.vertices.set(v);
    }
  }
  a.gadgets = std::move(gadgets);
  a.z = a.vertices.count(1);
  a.eta = o.eta;
  a.t = t;
  a.sigma = o.sigma;
  a.ell = g.k() * (t + 1);
  return a;
}

bool sequence_is_member(const BlowupGraph& g, const Gadget& gd) {
  VertexMask mask = mask_of(g, gd.sequence);
  if (mask.total() != static_cast<int>(gd.sequence.size())) return false;
  return has_factor(g, mask);
}

// Some transversal disjoint from the gadget that it absorbs.
bool absorbs_some(const BlowupGraph& g, const Gadget& gd) {
  const VertexMask base = mask_of(g, gd.sequence);
  std::vector<int> u(g.k(), 0);
  std::function<bool(int)> pick = [&](int p) {
    if (p > g.k()) return gadget_absorbs(g, gd, u);
    for (int v = 0; v < g.n(); ++v) {
      if (base.test({p, v})) continue;
      u[p - 1] = v;
      if (pick(p + 1)) return true;
    }
    return false;
  };
  return pick(1);
}

AbsorberSet faithful_absorber(const BlowupGraph& g, const AbsorberOptions& o, int t,
                              const std::vector<std::vector<int>>& probes, Rng& rng) {
  const int k = g.k();
  const int n = g.n();
  const int ell = k * (t + 1);
  const double p = 0.2 * o.sigma * std::pow(static_cast<double>(n), -ell + 1);
  const double universe = std::pow(static_cast<double>(n), ell);
  std::uniform_int_distribution<int> vertex(0, n - 1);
  for (int attempt = 0; attempt < o.retries; ++attempt) {
    std::size_t count = 0;
    if (universe < 9e18) {
      std::binomial_distribution<long long> dist(static_cast<long long>(universe), p);
      count = static_cast<std::size_t>(dist(rng));
    } else {
      std::poisson_distribution<long long> dist(universe * p);
      count = static_cast<std::size_t>(dist(rng));
    }
    if (count > o.sigma * n) continue;
    std::vector<Gadget> sampled(count);
    for (auto& gd : sampled) {
      for (int j = 0; j < ell; ++j) gd.sequence.push_back({j % k + 1, vertex(rng)});
    }
    // Both members of every pair sharing a vertex go to the repeated set.
    std::vector<char> repeated(count, 0);
    for (std::size_t a = 0; a < count; ++a) {
      const VertexMask ma = mask_of(g, sampled[a].sequence);
      for (std::size_t b = a + 1; b < count; ++b) {
        for (const VertexRef& v : sampled[b].sequence) {
          if (ma.test(v)) {
            repeated[a] = repeated[b] = 1;
            break;
          }
        }
      }
    }
    const auto rep = std::count(repeated.begin(), repeated.end(), 1);
    if (rep > static_cast<long>(ell) * ell * o.sigma * o.sigma * n) continue;
    std::vector<Gadget> kept;
    for (std::size_t a = 0; a < count; ++a) {
      if (repeated[a] || !sequence_is_member(g, sampled[a]) || !absorbs_some(g, sampled[a])) continue;
      kept.push_back(sampled[a]);
    }
    bool concentrated = true;
    for (const auto& u : probes) {
      int served = 0;
      for (const auto& gd : kept) served += gadget_absorbs(g, gd, u) ? 1 : 0;
      concentrated = concentrated && served >= o.sigma * o.sigma * n;
    }
    if (concentrated) return finish(g, std::move(kept), o, t);
  }
  throw BudgetExhausted(fmt::format("faithful absorber: concentration checks failed in {} samples", o.retries));
}

AbsorberSet greedy_absorber(const BlowupGraph& g, const AbsorberOptions& o, int t,
                            const std::vector<std::vector<int>>& probes, Rng& rng) {
  const int n = g.n();
  const int need = std::max(1, static_cast<int>(std::ceil(o.sigma * o.sigma * n - 1e-9)));
  const int limit = std::max(static_cast<int>(std::ceil(o.sigma * n - 1e-9)), o.min_gadgets * (t + 1));
  VertexMask avail(g.k(), n, true);
  for (const auto& u : probes) {
    for (int p = 1; p <= g.k(); ++p) avail.set({p, u[p - 1]}, false);
  }
  std::vector<int> served(probes.size(), 0);
  std::vector<Gadget> gadgets;
  auto done = [&] {
    return static_cast<int>(gadgets.size()) >= o.min_gadgets &&
           std::all_of(served.begin(), served.end(), [&](int s) { return s >= need; });
  };
  int failures = 0;
  while (!done()) {
    if ((static_cast<int>(gadgets.size()) + 1) * (t + 1) > limit) {
      throw BudgetExhausted(fmt::format(
          "greedy absorber: {} gadgets reach the size limit {} before every probe is served",
          gadgets.size(), limit));
    }
    const auto target = std::min_element(served.begin(), served.end()) - served.begin();
    auto gd = grow_gadget(g, t, avail, probes[target], rng, 200);
    if (!gd || !sequence_is_member(g, *gd)) {
      if (++failures >= o.retries) {
        throw BudgetExhausted(fmt::format("greedy absorber: no gadget found after {} attempts", failures));
      }
      continue;
    }
    for (const VertexRef& v : gd->sequence) avail.set(v, false);
    for (std::size_t i = 0; i < probes.size(); ++i) served[i] += gadget_absorbs(g, *gd, probes[i]) ? 1 : 0;
    gadgets.push_back(std::move(*gd));
  }
  return finish(g, std::move(gadgets), o, t);
}

}  // namespace

std::optional<VertexRef> degree_deficit(const BlowupGraph& g, int part, const std::vector<int>& pool,
                                        double factor) {
  const int k = g.k();
  const Bitset bits = to_bits(g.n(), pool);
  const double need = factor * static_cast<double>(pool.size());
  for (int side : {prev_part(part, k), next_part(part, k)}) {
    for (int v = 0; v < g.n(); ++v) {
      const auto d = (g.neighbors({side, v}, part) & bits).count();
      if (2.0 * static_cast<double>(d) < need - 1e-9) return VertexRef{side, v};
    }
  }
  return std::nullopt;
}

RoundResult round_tiling(const BlowupGraph& g, const RoundState& state, Rng& rng, int retries) {
  const int k = g.k();
  const int n = g.n();
  const int m = state.m;
  const std::size_t mk = static_cast<std::size_t>(m) * k;
  if (m < 1) throw PreconditionError("m must be positive");
  if (static_cast<int>(state.U.size()) != k || static_cast<int>(state.W.size()) != k) {
    throw PreconditionError("round state needs one U and one W pool per part");
  }
  for (int i = 1; i <= k; ++i) {
    check_pool(g, i, state.U[i - 1], mk, "U");
    check_pool(g, i, state.W[i - 1], mk, "W");
    if ((to_bits(n, state.U[i - 1]) & to_bits(n, state.W[i - 1])).any()) {
      throw PreconditionError(fmt::format("U_{0} and W_{0} intersect", i));
    }
    if (auto v = degree_deficit(g, i, state.U[i - 1], 1.0 + state.sigma)) {
      throw PreconditionError(fmt::format("(C1) fails: vertex {} has too few neighbours in U_{}", to_string(*v), i));
    }
    if (auto v = degree_deficit(g, i, state.W[i - 1], 1.0 + 1.0 / k + state.sigma)) {
      throw PreconditionError(fmt::format("(C2) fails: vertex {} has too few neighbours in W_{}", to_string(*v), i));
    }
  }

  RoundResult out;
  // chunks[i-1][j-1] = U_{i,j}.
  std::vector<std::vector<std::vector<int>>> chunks(k, std::vector<std::vector<int>>(k));
  for (int i = 1; i <= k; ++i) {
    bool found = false;
    std::vector<int> shuffled = state.U[i - 1];
    for (int attempt = 1; attempt <= retries && !found; ++attempt) {
      ++out.split_attempts;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      found = true;
      for (int j = 1; j <= k && found; ++j) {
        auto& chunk = chunks[i - 1][j - 1];
        chunk.assign(shuffled.begin() + (j - 1) * m, shuffled.begin() + j * m);
        std::sort(chunk.begin(), chunk.end());
        found = !degree_deficit(g, i, chunk, 1.0).has_value();
      }
    }
    if (!found) {
      throw BudgetExhausted(fmt::format("round split: no admissible split of U_{} in {} attempts", i, retries));
    }
  }

  // partner[i-1][j-1][u] is the M_{i,j} partner in U_{i+1,j} of u in U_{i,j}.
  std::vector<std::vector<std::vector<int>>> partner(k, std::vector<std::vector<int>>(k));
  for (int j = 1; j <= k; ++j) {
    for (int i = 1; i <= k; ++i) {
      if (i == j || i == prev_part(j, k)) continue;
      const Matching mm = max_matching(g, i, to_bits(n, chunks[i - 1][j - 1]),
                                       to_bits(n, chunks[next_part(i, k) - 1][j - 1]));
      if (static_cast<int>(mm.size()) != m) {
        throw InvariantViolation(fmt::format("no perfect matching between U_{{{},{}}} and U_{{{},{}}}", i, j,
                                             next_part(i, k), j));
      }
      auto& row = partner[i - 1][j - 1];
      row.assign(n, -1);
      for (const auto& pr : mm.pairs) row[pr.left] = pr.right;
    }
  }

  std::vector<Bitset> available(k);
  for (int j = 1; j <= k; ++j) available[j - 1] = to_bits(n, state.W[j - 1]);
  out.paths.resize(k);
  for (int j = 1; j <= k; ++j) {
    const int first_part = next_part(j, k);
    const int last_part = prev_part(j, k);
    for (int start : chunks[first_part - 1][j - 1]) {
      std::vector<VertexRef> path{{first_part, start}};
      for (int p = first_part; p != last_part; p = next_part(p, k)) {
        path.push_back({next_part(p, k), partner[p - 1][j - 1][path.back().index]});
      }
      const Bitset common = g.neighbors(path.front(), j) & g.neighbors(path.back(), j) & available[j - 1];
      const auto w = common.find_first();
      if (w == Bitset::npos) {
        throw InvariantViolation(fmt::format("no free common neighbour in W_{} for a path", j));
      }
      available[j - 1].reset(w);
      TransversalCycle c{std::vector<int>(k)};
      c.members[j - 1] = static_cast<int>(w);
      for (const VertexRef& v : path) c.members[v.part - 1] = v.index;
      out.tiling.cycles.push_back(std::move(c));
      out.paths[j - 1].push_back(std::move(path));
    }
  }

  out.next_pools.resize(k);
  for (int i = 1; i <= k; ++i) {
    Bitset pool = to_bits(n, chunks[i - 1][i - 1]) | available[i - 1];
    out.next_pools[i - 1] = to_list(pool);
    if (out.next_pools[i - 1].size() != mk) throw InvariantViolation("next pool has the wrong size");
    if (auto v = degree_deficit(g, i, out.next_pools[i - 1], 1.0 + state.sigma)) {
      throw InvariantViolation(fmt::format("vertex {} lost the U'_{} degree bound", to_string(*v), i));
    }
  }
  const TilingCheck check = validate_tiling(g, out.tiling);
  if (!check.ok()) throw InvariantViolation("round tiling is invalid: " + check.message);
  return out;
}

double sampled_linkedness(const BlowupGraph& g, int t, int pairs, int samples, Rng& rng) {
  const int k = g.k();
  const int n = g.n();
  std::uniform_int_distribution<int> part_dist(1, k);
  std::uniform_int_distribution<int> vertex(0, n - 1);
  double worst = 1e300;
  for (int s = 0; s < pairs; ++s) {
    const int p = part_dist(rng);
    const VertexRef v{p, vertex(rng)};
    const VertexRef v2{p, vertex(rng)};
    VertexMask avail(k, n, true);
    avail.set(v, false);
    avail.set(v2, false);
    const auto parts = pattern(k, p, t);
    // Number of ordered pattern tuples available, relative to n^t.
    double total = 1;
    std::vector<int> taken(k + 1, 0);
    for (int q : parts) total *= static_cast<double>(avail.count(q) - taken[q]++) / n;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
      auto seq = sample_tuple(parts, avail, rng);
      if (seq && is_linking_sequence(g, v, v2, *seq)) ++hits;
    }
    worst = std::min(worst, total * hits / samples);
  }
  return worst;
}

bool gadget_absorbs(const BlowupGraph& g, const Gadget& gadget, const std::vector<int>& u) {
  VertexMask mask = mask_of(g, gadget.sequence);
  for (int p = 1; p <= g.k(); ++p) {
    if (mask.test({p, u[p - 1]})) return false;
    mask.set({p, u[p - 1]});
  }
  return has_factor(g, mask);
}

AbsorberSet build_absorber(const BlowupGraph& g, const AbsorberOptions& options, Rng& rng) {
  const int k = g.k();
  const int t = resolve_t(k, options.t);
  const int ell = k * (t + 1);
  if (options.sigma <= 0) throw PreconditionError("sigma must be positive");
  if (options.mode == AbsorberMode::kFaithful) {
    const double bound = 0.1 * std::pow(options.eta, k + 1) / (ell * ell + 1.0);
    if (options.sigma > bound) {
      throw PreconditionError(fmt::format("faithful mode needs sigma <= {:.3g}, got {}", bound, options.sigma));
    }
  }
  if (options.link_pairs > 0) {
    const double density = sampled_linkedness(g, t, options.link_pairs, options.link_samples, rng);
    if (density < 2 * options.eta) {
      throw PreconditionError(fmt::format("sampled linking density {:.4f} is below 2 eta = {:.4f}", density,
                                          2 * options.eta));
    }
  }
  auto probes = options.probes.empty() ? random_transversals(g, options.probe_count, rng) : options.probes;
  for (const auto& u : probes) {
    if (static_cast<int>(u.size()) != k) throw PreconditionError("probe is not a transversal");
    for (int x : u) {
      if (x < 0 || x >= g.n()) throw PreconditionError("probe index out of range");
    }
  }
  if (options.mode == AbsorberMode::kFaithful) return faithful_absorber(g, options, t, probes, rng);
  return greedy_absorber(g, options, t, probes, rng);
}

std::optional<Tiling> absorb(const BlowupGraph& g, const AbsorberSet& a, const std::vector<std::vector<int>>& w,
                             long fallback_budget_ms) {
  const int k = g.k();
  const int n = g.n();
  if (static_cast<int>(w.size()) != k) throw PreconditionError("leftover needs one list per part");
  VertexMask all = a.vertices;
  for (int p = 1; p <= k; ++p) {
    if (w[p - 1].size() != w[0].size()) throw PreconditionError("leftover set is not balanced");
    for (int v : w[p - 1]) {
      if (v < 0 || v >= n || all.test({p, v})) {
        throw PreconditionError(fmt::format("leftover vertex ({}, {}) is out of range, repeated or in A", p, v));
      }
      all.set({p, v});
    }
  }
  const std::size_t count = w[0].size();
  std::vector<std::vector<int>> sorted = w;
  for (auto& part : sorted) std::sort(part.begin(), part.end());
  std::vector<std::vector<int>> transversals(count, std::vector<int>(k));
  for (std::size_t j = 0; j < count; ++j) {
    for (int p = 1; p <= k; ++p) transversals[j][p - 1] = sorted[p - 1][j];
  }

  const std::size_t gcount = a.gadgets.size();
  std::vector<Bitset> rows(count, Bitset(gcount));
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t h = 0; h < gcount; ++h) {
      if (gadget_absorbs(g, a.gadgets[h], transversals[j])) rows[j].set(h);
    }
  }
  Bitset left(count);
  left.set();
  Bitset right(gcount);
  right.set();
  const Matching assignment = bipartite_max_matching(rows, left, right);
  if (assignment.size() == count) {
    Tiling out;
    std::vector<char> used(gcount, 0);
    for (const auto& pr : assignment.pairs) {
      used[pr.right] = 1;
      VertexMask mask = mask_of(g, a.gadgets[pr.right].sequence);
      for (int p = 1; p <= k; ++p) mask.set({p, transversals[pr.left][p - 1]});
      for (auto& c : max_tiling(g, mask).tiling.cycles) out.cycles.push_back(std::move(c));
    }
    for (std::size_t h = 0; h < gcount; ++h) {
      if (used[h]) continue;
      for (auto& c : max_tiling(g, mask_of(g, a.gadgets[h].sequence)).tiling.cycles) {
        out.cycles.push_back(std::move(c));
      }
    }
    if (validate_tiling(g, out).ok() && covered_mask(g, out) == all) return out;
    throw InvariantViolation("assembled absorber factor does not cover W + A");
  }
  // Exhaustive search is only attempted on small remainders; each node of
  // max_tiling enumerates every cycle of the masked graph.
  if (all.count(1) > 30) return std::nullopt;
  const TilingResult r = max_tiling(g, all, fallback_budget_ms);
  if (static_cast<int>(r.tiling.size()) == all.count(1)) return r.tiling;
  return std::nullopt;
}

bool verify_absorber(const BlowupGraph& g, const AbsorberSet& a, std::span<const VertexRef> w) {
  std::vector<std::vector<int>> per_part(g.k());
  for (const VertexRef& v : w) {
    if (!g.contains(v)) throw PreconditionError(fmt::format("vertex {} out of range", to_string(v)));
    per_part[v.part - 1].push_back(v.index);
  }
  for (const auto& part : per_part) {
    if (part.size() != per_part[0].size()) throw PreconditionError("W is not balanced across parts");
  }
  return absorb(g, a, per_part).has_value();
}

AsympResult asymp_factor(const BlowupGraph& g, double epsilon, Rng& rng, const AsympOptions& options) {
  const int k = g.k();
  const int n = g.n();
  const int delta_star = degree_profile(g).delta_star;
  if (2.0 * k * delta_star < (k + 1 + k * epsilon) * n - 1e-9) {
    throw PreconditionError(fmt::format("delta* = {} is below (1 + 1/k + {}) n / 2 = {:.2f}", delta_star, epsilon,
                                        (1 + 1.0 / k + epsilon) * n / 2));
  }
  const int t = resolve_t(k, options.t);
  AsympResult out;
  const double sigma = options.sigma;
  int m = options.m;
  if (m == 0) {
    m = std::max(static_cast<int>(sigma * sigma * n / (2 * k)), n / (k * (2 * t + 5)));
  }
  if (m < 1) throw PreconditionError(fmt::format("n = {} is too small for a positive round size", n));
  const int mk = m * k;
  out.m = m;
  auto fail = [&](std::string stage, std::string message) {
    out.ok = false;
    out.failed_stage = std::move(stage);
    out.message = std::move(message);
    return out;
  };

  AbsorberOptions ao;
  ao.eta = options.eta;
  ao.t = t;
  ao.sigma = sigma;
  ao.min_gadgets = 2 * mk - 1;
  ao.retries = options.retries;
  AbsorberSet a;
  try {
    a = build_absorber(g, ao, rng);
  } catch (const BudgetExhausted& e) {
    return fail("absorber", e.what());
  }
  out.z = a.z;
  out.log.push_back({"absorber", 1, static_cast<int>(a.gadgets.size())});
  const int rounds = (n - a.z) / mk - 1;
  if (rounds < 0) return fail("sizing", fmt::format("absorber leaves {} vertices per part, fewer than mk = {}",
                                                    n - a.z, mk));
  out.rounds = rounds;

  // Chunks W_{i,0..T} of V'_i plus the vertices outside V' and A.
  std::vector<std::vector<std::vector<int>>> chunks(k);
  std::vector<std::vector<int>> spare(k);
  for (int i = 1; i <= k; ++i) {
    std::vector<int> rest;
    for (int v = 0; v < n; ++v) {
      if (!a.vertices.test({i, v})) rest.push_back(v);
    }
    bool found = false;
    int attempt = 0;
    while (!found && attempt < options.retries) {
      ++attempt;
      std::shuffle(rest.begin(), rest.end(), rng);
      chunks[i - 1].assign(rounds + 1, {});
      found = true;
      for (int s = 0; s <= rounds && found; ++s) {
        auto& chunk = chunks[i - 1][s];
        chunk.assign(rest.begin() + s * mk, rest.begin() + (s + 1) * mk);
        std::sort(chunk.begin(), chunk.end());
        found = !degree_deficit(g, i, chunk, 1.0 + 1.0 / k + sigma).has_value();
      }
    }
    if (!found) {
      return fail("chunk split", fmt::format("no admissible split of V'_{} in {} attempts", i, options.retries));
    }
    spare[i - 1].assign(rest.begin() + (rounds + 1) * mk, rest.end());
    out.log.push_back({fmt::format("chunk split V_{}", i), attempt, (rounds + 1) * mk});
  }

  Tiling factor;
  std::vector<std::vector<int>> pools(k);
  for (int i = 0; i < k; ++i) pools[i] = chunks[i][0];
  for (int s = 1; s <= rounds; ++s) {
    RoundState state{pools, {}, m, sigma};
    for (int i = 0; i < k; ++i) state.W.push_back(chunks[i][s]);
    try {
      RoundResult r = round_tiling(g, state, rng, options.retries);
      for (auto& c : r.tiling.cycles) factor.cycles.push_back(std::move(c));
      pools = std::move(r.next_pools);
      out.log.push_back({fmt::format("round {}", s), r.split_attempts, mk});
    } catch (const BudgetExhausted& e) {
      return fail(fmt::format("round {}", s), e.what());
    }
  }

  std::vector<std::vector<int>> leftover(k);
  for (int i = 0; i < k; ++i) {
    leftover[i] = pools[i];
    leftover[i].insert(leftover[i].end(), spare[i].begin(), spare[i].end());
  }
  auto absorbed = absorb(g, a, leftover, options.fallback_budget_ms);
  if (!absorbed) {
    return fail("absorption", fmt::format("{} leftover transversals could not be absorbed by {} gadgets",
                                          leftover[0].size(), a.gadgets.size()));
  }
  out.log.push_back({"absorption", 1, static_cast<int>(absorbed->size())});
  for (auto& c : absorbed->cycles) factor.cycles.push_back(std::move(c));

  const TilingCheck check = validate_tiling(g, factor);
  if (!check.ok() || static_cast<int>(factor.size()) != n) {
    throw InvariantViolation("assembled factor is invalid: " + check.message);
  }
  out.ok = true;
  out.factor = canonical(std::move(factor));
  return out;
}

}  // namespace ckb
