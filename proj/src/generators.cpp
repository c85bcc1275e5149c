#include "ckb/generators.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace ckb {

BlowupGraph complete_blowup(int k, int n) {
  if (k < 3 || n < 1) throw PreconditionError(fmt::format("invalid k={}, n={}", k, n));
  std::vector<std::vector<Bitset>> rows(k, std::vector<Bitset>(n, Bitset(n)));
  for (auto& part : rows) {
    for (auto& row : part) row.set();
  }
  return BlowupGraph::from_rows(k, n, std::move(rows));
}

namespace {

// Adds a contiguous run of `size` indices starting at `start` under `name`.
int add_block(Blocks& blocks, const std::string& name, int part, int start, int size) {
  auto& block = blocks[name];
  for (int v = start; v < start + size; ++v) block.push_back({part, v});
  return start + size;
}

void join(std::vector<std::vector<Bitset>>& rows, int k, const std::vector<VertexRef>& a,
          const std::vector<VertexRef>& b) {
  for (const VertexRef& x : a) {
    for (const VertexRef& y : b) {
      if (y.part == next_part(x.part, k)) {
        rows[x.part - 1][x.index].set(y.index);
      } else if (x.part == next_part(y.part, k)) {
        rows[y.part - 1][y.index].set(x.index);
      }
    }
  }
}

std::vector<VertexRef> whole_part(int part, int n) {
  std::vector<VertexRef> out;
  for (int v = 0; v < n; ++v) out.push_back({part, v});
  return out;
}

std::vector<VertexRef> concat(std::initializer_list<const std::vector<VertexRef>*> parts) {
  std::vector<VertexRef> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

}  // namespace

LabelledGraph haggkvist_example(int k, int m) {
  if (k < 3 || m < 1) throw PreconditionError(fmt::format("need k >= 3 and m >= 1, got k={}, m={}", k, m));
  const int n = 2 * k * m;
  Blocks blocks;
  auto name = [](char c, int i) { return fmt::format("{}_{}", c, i); };
  for (int i = 1; i <= k; ++i) {
    const int w_size = i < k ? (k - 1) * m : (k - 1) * m + 1;
    int next = add_block(blocks, name('U', i), i, 0, (k - 1) * m);
    next = add_block(blocks, name('W', i), i, next, w_size);
    add_block(blocks, name('Z', i), i, next, n - next);
  }
  std::vector<std::vector<Bitset>> rows(k, std::vector<Bitset>(n, Bitset(n)));
  for (int i = 1; i <= k; ++i) {
    const auto& z = blocks[name('Z', i)];
    join(rows, k, z, whole_part(prev_part(i, k), n));
    join(rows, k, z, whole_part(next_part(i, k), n));
  }
  for (int i = 1; i < k; ++i) {
    join(rows, k, blocks[name('U', i)], blocks[name('U', i + 1)]);
    join(rows, k, blocks[name('W', i)], blocks[name('W', i + 1)]);
  }
  join(rows, k, blocks[name('U', k)], blocks[name('W', 1)]);
  join(rows, k, blocks[name('W', k)], blocks[name('U', 1)]);
  return {BlowupGraph::from_rows(k, n, std::move(rows)), std::move(blocks)};
}

std::vector<VertexRef> haggkvist_cover(const LabelledGraph& example, int k) {
  std::vector<VertexRef> z;
  for (int i = 1; i <= k; ++i) {
    const auto& block = example.blocks.at(fmt::format("Z_{}", i));
    z.insert(z.end(), block.begin(), block.end());
  }
  return z;
}

CoverExample cover_example(long p, long q) {
  if (q <= 0) throw PreconditionError("denominator must be positive");
  mpq_class gamma(p, q);
  gamma.canonicalize();
  if (!(gamma > mpq_class(3, 4) && gamma <= mpq_class(7, 9))) {
    throw PreconditionError(fmt::format("gamma = {} outside (3/4, 7/9]", gamma.get_str()));
  }
  const mpq_class beta = mpq_class(4, 3) - gamma;
  auto is_integer = [](const mpq_class& x) { return x.get_den() == 1; };

  int n = 0;
  for (int cand = 1; cand <= 1'000'000; ++cand) {
    const mpq_class nn(cand);
    if (gamma < mpq_class(3, 4) + mpq_class(1, cand)) continue;
    if (!is_integer((1 - beta) * nn / 2)) continue;
    // epsilon = 1/n makes (1 - gamma + epsilon) n = (1 - gamma) n + 1.
    if (!is_integer((1 - gamma) * nn)) continue;
    n = cand;
    break;
  }
  if (n == 0) throw PreconditionError("no admissible n below 10^6");

  const mpq_class nn(n);
  const mpq_class b_size = (1 - gamma) * nn + 1;
  const mpq_class a_size = (1 - beta) * nn / 2;
  const int bi = static_cast<int>(b_size.get_num().get_si());
  const int ai = static_cast<int>(a_size.get_num().get_si());
  const int b0 = n - 3 * bi;
  const int a0 = n - 3 * ai;
  if (b0 < 0 || a0 < 0) throw InvariantViolation("negative block size in cover example");

  Blocks blocks;
  const char labels[3] = {'A', 'B', 'C'};
  for (int part = 1; part <= 3; ++part) {
    const int head = part == 2 ? b0 : a0;
    const int body = part == 2 ? bi : ai;
    int next = add_block(blocks, fmt::format("{}_0", labels[part - 1]), part, 0, head);
    for (int j = 1; j <= 3; ++j) {
      next = add_block(blocks, fmt::format("{}_{}", labels[part - 1], j), part, next, body);
    }
  }
  auto block = [&](char c, int j) -> const std::vector<VertexRef>& {
    return blocks.at(fmt::format("{}_{}", c, j));
  };
  const auto a = whole_part(1, n);
  const auto b = whole_part(2, n);
  const auto c = whole_part(3, n);

  std::vector<std::vector<Bitset>> rows(3, std::vector<Bitset>(n, Bitset(n)));
  join(rows, 3, block('A', 0), concat({&b, &c}));
  join(rows, 3, block('B', 0), concat({&a, &c}));
  join(rows, 3, block('C', 0), concat({&a, &b}));
  join(rows, 3, block('A', 1), concat({&block('B', 2), &block('B', 3)}));
  join(rows, 3, block('A', 2), concat({&block('B', 1), &block('B', 3)}));
  join(rows, 3, block('A', 3), concat({&block('B', 1), &block('B', 2)}));
  for (int j = 1; j <= 3; ++j) {
    join(rows, 3, block('B', j), block('C', j));
    join(rows, 3, block('A', j), block('C', j));
  }

  CoverExample out{BlowupGraph::from_rows(3, n, std::move(rows)), std::move(blocks), n, gamma,
                   beta, mpq_class(1, n), {}};
  for (char l : labels) {
    const auto& b0_block = out.blocks.at(fmt::format("{}_0", l));
    out.cover.insert(out.cover.end(), b0_block.begin(), b0_block.end());
  }
  return out;
}

BlowupGraph random_min_degree(int k, int n, const std::vector<int>& deltas, std::uint64_t seed) {
  if (k < 3 || n < 1) throw PreconditionError(fmt::format("invalid k={}, n={}", k, n));
  if (static_cast<int>(deltas.size()) != k) {
    throw PreconditionError(fmt::format("expected {} deltas, got {}", k, deltas.size()));
  }
  for (int d : deltas) {
    if (d < 0 || d > n) throw PreconditionError(fmt::format("delta {} outside [0, {}]", d, n));
  }
  std::mt19937_64 rng(seed);
  std::vector<int> pool(n);
  // Partial Fisher-Yates: the first `count` entries of pool become a uniform
  // sample without replacement.
  auto pick = [&](int count) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int s = 0; s < count; ++s) {
      std::uniform_int_distribution<int> dist(s, n - 1);
      std::swap(pool[s], pool[dist(rng)]);
    }
    return std::span<const int>(pool.data(), count);
  };
  std::vector<std::vector<Bitset>> rows(k, std::vector<Bitset>(n, Bitset(n)));
  for (int i = 1; i <= k; ++i) {
    const int d = deltas[i - 1];
    auto& forward = rows[i - 1];
    for (int u = 0; u < n; ++u) {
      for (int w : pick(d)) forward[u].set(w);
    }
    for (int w = 0; w < n; ++w) {
      for (int u : pick(d)) forward[u].set(w);
    }
  }
  return BlowupGraph::from_rows(k, n, std::move(rows));
}

LiftMap LiftMap::identity(int k, int n) {
  LiftMap map{k, std::vector<std::vector<std::vector<VertexRef>>>(k)};
  for (int p = 1; p <= k; ++p) {
    for (int v = 0; v < n; ++v) map.segments[p - 1].push_back({{p, v}});
  }
  return map;
}

Tiling LiftMap::lift(const Tiling& reduced) const {
  Tiling out;
  for (const auto& cycle : reduced.cycles) {
    TransversalCycle lifted{std::vector<int>(original_k, -1)};
    for (std::size_t p = 0; p < cycle.members.size(); ++p) {
      for (const VertexRef& v : segments[p][cycle.members[p]]) lifted.members[v.part - 1] = v.index;
    }
    out.cycles.push_back(std::move(lifted));
  }
  return out;
}

LiftMap LiftMap::compose(const LiftMap& inner) const {
  LiftMap out{original_k, {}};
  out.segments.resize(inner.segments.size());
  for (std::size_t p = 0; p < inner.segments.size(); ++p) {
    for (const auto& run : inner.segments[p]) {
      std::vector<VertexRef> expanded;
      for (const VertexRef& mid : run) {
        const auto& deeper = segments[mid.part - 1][mid.index];
        expanded.insert(expanded.end(), deeper.begin(), deeper.end());
      }
      out.segments[p].push_back(std::move(expanded));
    }
  }
  return out;
}

Collapsed collapse(const BlowupGraph& g, int i, const Matching& matching) {
  const int k = g.k();
  const int n = g.n();
  if (k < 4) throw PreconditionError(fmt::format("collapse needs k >= 4, got {}", k));
  if (i < 1 || i > k) throw PreconditionError(fmt::format("part {} out of range", i));
  const int j = next_part(i, k);
  std::vector<int> partner(n, -1);
  std::vector<char> right_used(n, 0);
  for (const auto& [u, w] : matching.pairs) {
    if (u < 0 || u >= n || w < 0 || w >= n || partner[u] != -1 || right_used[w]) {
      throw PreconditionError("matching is not a perfect matching of the pair");
    }
    if (!g.adjacent({i, u}, {j, w})) {
      throw PreconditionError(fmt::format("matched pair ({}, {}) is not an edge of G[V_{}, V_{}]", u, w, i, j));
    }
    partner[u] = w;
    right_used[w] = 1;
  }
  if (static_cast<int>(matching.size()) != n) {
    throw PreconditionError(fmt::format("matching has {} edges, expected {}", matching.size(), n));
  }

  // Original parts of the reduced graph in cyclic order; 0 marks the merged part.
  std::vector<int> order;
  if (i < k) {
    for (int p = 1; p <= k; ++p) {
      if (p == i) order.push_back(0);
      else if (p != i + 1) order.push_back(p);
    }
  } else {
    order.push_back(0);
    for (int p = 2; p < k; ++p) order.push_back(p);
  }
  const int kr = k - 1;
  LiftMap lift{k, std::vector<std::vector<std::vector<VertexRef>>>(kr)};
  for (int p = 0; p < kr; ++p) {
    for (int v = 0; v < n; ++v) {
      if (order[p] == 0) {
        lift.segments[p].push_back({{i, v}, {j, partner[v]}});
      } else {
        lift.segments[p].push_back({{order[p], v}});
      }
    }
  }
  // Consecutive reduced vertices are adjacent iff the last original vertex of
  // the left run is adjacent to the first original vertex of the right run.
  std::vector<std::vector<Bitset>> rows(kr, std::vector<Bitset>(n, Bitset(n)));
  for (int p = 0; p < kr; ++p) {
    const int q = (p + 1) % kr;
    for (int a = 0; a < n; ++a) {
      const VertexRef exit = lift.segments[p][a].back();
      for (int b = 0; b < n; ++b) {
        if (g.adjacent(exit, lift.segments[q][b].front())) rows[p][a].set(b);
      }
    }
  }
  return {BlowupGraph::from_rows(kr, n, std::move(rows)), std::move(lift)};
}

Collapsed collapse(const BlowupGraph& g, int i) {
  Bitset all(g.n());
  all.set();
  const Matching m = max_matching(g, i, all, all);
  if (static_cast<int>(m.size()) != g.n()) {
    throw PreconditionError(fmt::format("G[V_{}, V_{}] has no perfect matching (maximum {})", i,
                                        next_part(i, g.k()), m.size()));
  }
  return collapse(g, i, m);
}

Reduction reduce_small_deltas(const BlowupGraph& g, double epsilon) {
  const int k = g.k();
  const int n = g.n();
  const DegreeProfile profile = degree_profile(g);
  std::vector<int> small;
  for (int i = 1; i <= k; ++i) {
    if (2.0 * profile.deltas[i - 1] < (1.0 + epsilon) * n) small.push_back(i);
  }
  if (k - static_cast<int>(small.size()) < 3) {
    throw PreconditionError(fmt::format("collapsing {} pairs would leave {} parts", small.size(),
                                        k - static_cast<int>(small.size())));
  }
  Reduction out{g, LiftMap::identity(k, n), small};
  std::vector<int> current(k + 1);
  std::iota(current.begin(), current.end(), 0);
  for (int i : small) {
    const int kk = out.graph.k();
    const int a = current[i];
    if (current[next_part(i, k)] != next_part(a, kk)) {
      throw InvariantViolation("pair bookkeeping lost track of consecutive parts");
    }
    Collapsed step = [&] {
      try {
        return collapse(out.graph, a);
      } catch (const PreconditionError&) {
        throw PreconditionError(fmt::format("no perfect matching for original pair ({}, {})", i,
                                            next_part(i, k)));
      }
    }();
    for (int p = 1; p <= k; ++p) {
      int& c = current[p];
      if (a < kk) {
        if (c == a + 1) c = a;
        else if (c > a + 1) c -= 1;
      } else if (c == kk) {
        c = 1;
      }
    }
    out.lift = out.lift.compose(step.lift);
    out.graph = std::move(step.graph);
  }
  return out;
}

}  // namespace ckb
