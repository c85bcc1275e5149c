#include "ckb/core.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace ckb {

int next_part(int part, int k) { return part == k ? 1 : part + 1; }

int prev_part(int part, int k) { return part == 1 ? k : part - 1; }

bool consecutive_parts(int a, int b, int k) {
  return b == next_part(a, k) || b == prev_part(a, k);
}

std::string to_string(VertexRef v) {
  return fmt::format("({}, {})", v.part, v.index);
}

BlowupGraph::BlowupGraph(int k, int n) : k_(k), n_(n) {
  if (k < 3) {
    throw PreconditionError(fmt::format("k must be at least 3, got {}", k));
  }
  if (n < 1) {
    throw PreconditionError(fmt::format("n must be at least 1, got {}", n));
  }
  forward_.assign(k, std::vector<Bitset>(n, Bitset(n)));
  backward_.assign(k, std::vector<Bitset>(n, Bitset(n)));
}

BlowupGraph::BlowupGraph(int k, int n, std::span<const Edge> edges)
    : BlowupGraph(k, n) {
  for (const Edge& e : edges) {
    if (e.part < 1 || e.part > k || e.u < 0 || e.u >= n || e.w < 0 || e.w >= n) {
      throw PreconditionError(fmt::format(
          "edge ({}, {}, {}) out of range for k={}, n={}", e.part, e.u, e.w, k, n));
    }
    forward_[e.part - 1][e.u].set(e.w);
    backward_[next_part(e.part, k) - 1][e.w].set(e.u);
  }
}

BlowupGraph BlowupGraph::from_rows(int k, int n,
                                   std::vector<std::vector<Bitset>> forward) {
  BlowupGraph g(k, n);
  if (static_cast<int>(forward.size()) != k) {
    throw PreconditionError("row matrix must have one entry per part");
  }
  for (int i = 1; i <= k; ++i) {
    auto& rows = forward[i - 1];
    if (static_cast<int>(rows.size()) != n) {
      throw PreconditionError("row matrix must have n rows per part");
    }
    for (int u = 0; u < n; ++u) {
      if (static_cast<int>(rows[u].size()) != n) {
        throw PreconditionError("row bitsets must have n bits");
      }
      for (auto w = rows[u].find_first(); w != Bitset::npos; w = rows[u].find_next(w)) {
        g.backward_[next_part(i, k) - 1][w].set(u);
      }
    }
    g.forward_[i - 1] = std::move(rows);
  }
  return g;
}

bool BlowupGraph::contains(VertexRef v) const {
  return v.part >= 1 && v.part <= k_ && v.index >= 0 && v.index < n_;
}

void BlowupGraph::check_vertex(VertexRef v) const {
  if (!contains(v)) {
    throw PreconditionError(fmt::format("vertex {} out of range", to_string(v)));
  }
}

bool BlowupGraph::adjacent(VertexRef a, VertexRef b) const {
  check_vertex(a);
  check_vertex(b);
  if (b.part == next_part(a.part, k_)) return forward_[a.part - 1][a.index].test(b.index);
  if (a.part == next_part(b.part, k_)) return forward_[b.part - 1][b.index].test(a.index);
  return false;
}

const Bitset& BlowupGraph::neighbors(VertexRef v, int j) const {
  check_vertex(v);
  if (j == next_part(v.part, k_)) return forward_[v.part - 1][v.index];
  if (j == prev_part(v.part, k_)) return backward_[v.part - 1][v.index];
  throw PreconditionError(
      fmt::format("part {} is not consecutive to part {}", j, v.part));
}

int BlowupGraph::degree(VertexRef v, int j) const {
  return static_cast<int>(neighbors(v, j).count());
}

Bitset BlowupGraph::common_neighborhood(std::span<const VertexRef> s, int j) const {
  Bitset result(n_);
  result.set();
  for (const VertexRef& v : s) result &= neighbors(v, j);
  return result;
}

std::vector<Edge> BlowupGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 1; i <= k_; ++i) {
    for (int u = 0; u < n_; ++u) {
      const Bitset& row = forward_[i - 1][u];
      for (auto w = row.find_first(); w != Bitset::npos; w = row.find_next(w)) {
        out.push_back({i, u, static_cast<int>(w)});
      }
    }
  }
  return out;
}

std::size_t BlowupGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& part : forward_) {
    for (const auto& row : part) total += row.count();
  }
  return total;
}

VertexMask::VertexMask(int k, int n, bool value) : parts_(k, Bitset(n)) {
  if (value) {
    for (auto& p : parts_) p.set();
  }
}

VertexMask VertexMask::from_vertices(int k, int n, std::span<const VertexRef> vs) {
  VertexMask mask(k, n);
  for (const VertexRef& v : vs) mask.set(v);
  return mask;
}

int VertexMask::total() const {
  int t = 0;
  for (const auto& p : parts_) t += static_cast<int>(p.count());
  return t;
}

std::vector<VertexRef> VertexMask::vertices() const {
  std::vector<VertexRef> out;
  for (int p = 1; p <= k(); ++p) {
    const Bitset& bits = parts_[p - 1];
    for (auto i = bits.find_first(); i != Bitset::npos; i = bits.find_next(i)) {
      out.push_back({p, static_cast<int>(i)});
    }
  }
  return out;
}

int pair_min_degree(const BlowupGraph& g, int i) {
  const int j = next_part(i, g.k());
  int best = g.n();
  for (int v = 0; v < g.n(); ++v) {
    best = std::min(best, g.degree({i, v}, j));
    best = std::min(best, g.degree({j, v}, i));
  }
  return best;
}

DegreeProfile degree_profile(const BlowupGraph& g) {
  DegreeProfile profile;
  profile.deltas.reserve(g.k());
  for (int i = 1; i <= g.k(); ++i) profile.deltas.push_back(pair_min_degree(g, i));
  profile.delta_star = *std::min_element(profile.deltas.begin(), profile.deltas.end());
  return profile;
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "none";
    case Violation::kShape: return "shape";
    case Violation::kOutOfRange: return "out_of_range";
    case Violation::kAdjacency: return "adjacency";
    case Violation::kDisjointness: return "disjointness";
    case Violation::kOversized: return "oversized";
  }
  return "unknown";
}

TilingCheck validate_tiling(const BlowupGraph& g, const Tiling& t) {
  const int k = g.k();
  const int n = g.n();
  if (static_cast<int>(t.size()) > n) {
    return {Violation::kOversized,
            fmt::format("tiling has {} cycles but parts have {} vertices", t.size(), n)};
  }
  VertexMask used(k, n);
  for (std::size_t c = 0; c < t.size(); ++c) {
    const TransversalCycle& cycle = t.cycles[c];
    if (static_cast<int>(cycle.members.size()) != k) {
      return {Violation::kShape,
              fmt::format("cycle {} has {} members, expected {}", c, cycle.members.size(), k)};
    }
    for (int p = 1; p <= k; ++p) {
      if (!g.contains(cycle.vertex(p))) {
        return {Violation::kOutOfRange,
                fmt::format("cycle {} member {} out of range", c, to_string(cycle.vertex(p)))};
      }
    }
    for (int p = 1; p <= k; ++p) {
      const VertexRef a = cycle.vertex(p);
      const VertexRef b = cycle.vertex(next_part(p, k));
      if (!g.adjacent(a, b)) {
        return {Violation::kAdjacency,
                fmt::format("cycle {} uses non-edge {}-{}", c, to_string(a), to_string(b))};
      }
    }
    for (int p = 1; p <= k; ++p) {
      const VertexRef v = cycle.vertex(p);
      if (used.test(v)) {
        return {Violation::kDisjointness,
                fmt::format("vertex {} appears in more than one cycle", to_string(v))};
      }
      used.set(v);
    }
  }
  return {};
}

VertexMask covered_mask(const BlowupGraph& g, const Tiling& t) {
  VertexMask mask(g.k(), g.n());
  for (const auto& cycle : t.cycles) {
    for (int p = 1; p <= g.k(); ++p) mask.set(cycle.vertex(p));
  }
  return mask;
}

std::vector<std::vector<int>> uncovered(const BlowupGraph& g, const Tiling& t) {
  if (auto check = validate_tiling(g, t); !check.ok()) {
    throw PreconditionError("invalid tiling: " + check.message);
  }
  const VertexMask covered = covered_mask(g, t);
  std::vector<std::vector<int>> out(g.k());
  for (int p = 1; p <= g.k(); ++p) {
    for (int v = 0; v < g.n(); ++v) {
      if (!covered.part(p).test(v)) out[p - 1].push_back(v);
    }
  }
  return out;
}

Tiling canonical(Tiling t) {
  std::sort(t.cycles.begin(), t.cycles.end());
  return t;
}

}  // namespace ckb
