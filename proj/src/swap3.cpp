#include "ckb/swap3.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include <fmt/format.h>

#include "ckb/io.hpp"

namespace ckb {

namespace {

VertexMask uncovered_mask(const BlowupGraph& g, const Tiling& t) {
  VertexMask covered = covered_mask(g, t);
  VertexMask out(g.k(), g.n(), true);
  for (int p = 1; p <= g.k(); ++p) out.part(p) -= covered.part(p);
  return out;
}

int pair_degree(const BlowupGraph& g, int x, int y) {
  return y == next_part(x, g.k()) ? pair_min_degree(g, x) : pair_min_degree(g, y);
}

// Uncovered edges grouped by pair type p, meaning G[V_p, V_{p+1}].
std::array<std::vector<UncoveredEdge>, 3> uncovered_edges(const BlowupGraph& g, const VertexMask& unc) {
  std::array<std::vector<UncoveredEdge>, 3> out;
  for (int p = 1; p <= 3; ++p) {
    const int q = next_part(p, 3);
    const Bitset& from = unc.part(p);
    for (auto u = from.find_first(); u != Bitset::npos; u = from.find_next(u)) {
      const VertexRef vu{p, static_cast<int>(u)};
      const Bitset to = g.neighbors(vu, q) & unc.part(q);
      for (auto w = to.find_first(); w != Bitset::npos; w = to.find_next(w)) {
        out[p - 1].push_back({vu, {q, static_cast<int>(w)}});
      }
    }
  }
  return out;
}

bool touches(const UncoveredEdge& e, const UncoveredEdge& f) {
  return e.from == f.from || e.from == f.to || e.to == f.from || e.to == f.to;
}

// Every dissimilar matching (the empty one included), in a fixed order.
std::vector<DissimilarMatching> all_matchings(const std::array<std::vector<UncoveredEdge>, 3>& edges) {
  std::vector<DissimilarMatching> out;
  DissimilarMatching cur;
  std::function<void(int)> go = [&](int type) {
    if (type == 3) {
      out.push_back(cur);
      return;
    }
    for (const auto& e : edges[type]) {
      if (std::any_of(cur.edges.begin(), cur.edges.end(), [&](const auto& f) { return touches(e, f); })) continue;
      cur.edges.push_back(e);
      go(type + 1);
      cur.edges.pop_back();
    }
    go(type + 1);
  };
  go(0);
  return out;
}

bool same_pair(const UncoveredEdge& e, int x, int y) {
  return (e.from.part == x && e.to.part == y) || (e.from.part == y && e.to.part == x);
}

std::pair<int, int> key_of(const DissimilarMatching& f, const Labelling& lab) {
  const bool bc = std::any_of(f.edges.begin(), f.edges.end(),
                              [&](const auto& e) { return same_pair(e, lab.b, lab.c); });
  return {bc ? 1 : 0, static_cast<int>(f.edges.size())};
}

// Vertex of part p completing e into a triangle.
bool completes(const BlowupGraph& g, const UncoveredEdge& e, VertexRef x) {
  return g.adjacent(x, e.from) && g.adjacent(x, e.to);
}

TransversalCycle triangle(std::initializer_list<VertexRef> vs) {
  TransversalCycle c{std::vector<int>(3, -1)};
  for (const VertexRef& v : vs) c.members[v.part - 1] = v.index;
  return c;
}

std::vector<VertexRef> members_of(const Bitset& b, int part) {
  std::vector<VertexRef> out;
  for (auto v = b.find_first(); v != Bitset::npos; v = b.find_next(v)) out.push_back({part, static_cast<int>(v)});
  return out;
}

nlohmann::json artifact(const BlowupGraph& g, const Tiling& t, const std::string& reason, std::size_t moves) {
  return {{"reason", reason}, {"moves", moves}, {"graph", graph_to_json(g)}, {"tiling", tiling_to_json(t)}};
}

}  // namespace

Labelling relabel_abc(const BlowupGraph& g) {
  if (g.k() != 3) throw PreconditionError(fmt::format("triangle swaps need k = 3, got {}", g.k()));
  std::array<int, 3> perm{1, 2, 3};
  do {
    Labelling lab{perm[0], perm[1], perm[2], pair_degree(g, perm[0], perm[1]), pair_degree(g, perm[0], perm[2]),
                  pair_degree(g, perm[1], perm[2])};
    if (lab.delta_ab >= lab.delta_ac && lab.delta_ac >= lab.delta_bc) return lab;
  } while (std::next_permutation(perm.begin(), perm.end()));
  throw InvariantViolation("no ordering of three numbers is non-increasing");
}

DissimilarMatching dissimilar_h(const BlowupGraph& g, const Tiling& t) {
  if (g.k() != 3) throw PreconditionError("dissimilar matchings are defined for k = 3");
  const auto edges = uncovered_edges(g, uncovered_mask(g, t));
  DissimilarMatching best;
  for (auto& f : all_matchings(edges)) {
    if (f.edges.size() > best.edges.size()) best = std::move(f);
    if (best.edges.size() == 3) break;
  }
  return best;
}

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::kAddTriangle: return "add-triangle";
    case MoveKind::kSplitTriangle: return "split-triangle";
    case MoveKind::kEndgameReplace: return "endgame-replace";
    case MoveKind::kEndgameExchange: return "endgame-exchange";
    case MoveKind::kEndgameGrow: return "endgame-grow";
    case MoveKind::kRotate: return "rotate";
  }
  return "unknown";
}

nlohmann::json move_to_json(const Move& m) {
  auto cycles = [](const std::vector<TransversalCycle>& cs) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : cs) out.push_back(c.members);
    return out;
  };
  return {{"move", to_string(m.kind)}, {"removed", cycles(m.removed)}, {"added", cycles(m.added)}};
}

Tiling apply_move(const Tiling& t, const Move& m) {
  Tiling out = t;
  for (const auto& r : m.removed) {
    auto it = std::find(out.cycles.begin(), out.cycles.end(), r);
    if (it == out.cycles.end()) throw InvariantViolation("move removes a cycle that is not in the tiling");
    out.cycles.erase(it);
  }
  for (const auto& a : m.added) out.cycles.push_back(a);
  return out;
}

std::optional<Move> find_improvement(const BlowupGraph& g, const Tiling& t) {
  if (g.k() != 3) throw PreconditionError("triangle swaps need k = 3");
  const TilingCheck check = validate_tiling(g, t);
  if (!check.ok()) throw PreconditionError("invalid tiling: " + check.message);
  const VertexMask unc = uncovered_mask(g, t);
  // An uncovered edge with an uncovered common neighbour.
  const Bitset& first = unc.part(1);
  for (auto a = first.find_first(); a != Bitset::npos; a = first.find_next(a)) {
    const VertexRef va{1, static_cast<int>(a)};
    const Bitset bs = g.neighbors(va, 2) & unc.part(2);
    const Bitset& cs_of_a = g.neighbors(va, 3);
    for (auto b = bs.find_first(); b != Bitset::npos; b = bs.find_next(b)) {
      const Bitset cs = g.neighbors({2, static_cast<int>(b)}, 3) & cs_of_a & unc.part(3);
      if (cs.any()) {
        return Move{MoveKind::kAddTriangle, {},
                    {triangle({va, {2, static_cast<int>(b)}, {3, static_cast<int>(cs.find_first())}})}};
      }
    }
  }
  // Disjoint dissimilar uncovered edges completed by distinct vertices of one triangle.
  const auto edges = uncovered_edges(g, unc);
  for (int te = 0; te < 3; ++te) {
    for (int tf = te + 1; tf < 3; ++tf) {
      const int xe = prev_part(te + 1, 3);
      const int xf = prev_part(tf + 1, 3);
      for (const auto& e : edges[te]) {
        for (const auto& f : edges[tf]) {
          if (touches(e, f)) continue;
          for (const auto& c : t.cycles) {
            if (completes(g, e, c.vertex(xe)) && completes(g, f, c.vertex(xf))) {
              return Move{MoveKind::kSplitTriangle,
                          {c},
                          {triangle({e.from, e.to, c.vertex(xe)}), triangle({f.from, f.to, c.vertex(xf)})}};
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::pair<int, int> potential(const BlowupGraph& g, const Labelling& lab, const Tiling& t) {
  const auto edges = uncovered_edges(g, uncovered_mask(g, t));
  std::pair<int, int> best{0, 0};
  for (const auto& f : all_matchings(edges)) best = std::max(best, key_of(f, lab));
  return best;
}

std::optional<Move> rotate(const BlowupGraph& g, const Labelling& lab, const Tiling& t) {
  const VertexMask unc = uncovered_mask(g, t);
  const auto matchings = all_matchings(uncovered_edges(g, unc));
  std::pair<int, int> pot{0, 0};
  for (const auto& f : matchings) pot = std::max(pot, key_of(f, lab));
  for (const auto& f : matchings) {
    if (key_of(f, lab) != pot) continue;
    for (int x_part : {lab.b, lab.c}) {
      if (std::any_of(f.edges.begin(), f.edges.end(), [&](const auto& e) { return same_pair(e, lab.a, x_part); })) {
        continue;
      }
      const int y_part = x_part == lab.b ? lab.c : lab.b;
      VertexMask free = unc;
      for (const auto& e : f.edges) {
        free.set(e.from, false);
        free.set(e.to, false);
      }
      for (const VertexRef& a : members_of(free.part(lab.a), lab.a)) {
        for (const VertexRef& x : members_of(free.part(x_part), x_part)) {
          if (g.adjacent(a, x)) continue;
          for (const auto& c : t.cycles) {
            const VertexRef ai = c.vertex(lab.a);
            const VertexRef xi = c.vertex(x_part);
            const VertexRef yi = c.vertex(y_part);
            if (!g.adjacent(x, ai) || !g.adjacent(a, xi) || !g.adjacent(a, yi)) continue;
            Move m{MoveKind::kRotate, {c}, {triangle({a, xi, yi})}};
            if (potential(g, lab, apply_move(t, m)) > pot) return m;
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Move> endgame(const BlowupGraph& g, const Labelling& lab, const Tiling& t) {
  const VertexMask unc = uncovered_mask(g, t);
  const auto ua = members_of(unc.part(lab.a), lab.a);
  const auto ub = members_of(unc.part(lab.b), lab.b);
  const auto uc = members_of(unc.part(lab.c), lab.c);
  const auto pot = potential(g, lab, t);
  for (const VertexRef& a : ua) {
    for (const VertexRef& b : ub) {
      if (!g.adjacent(a, b)) continue;
      for (const VertexRef& a2 : ua) {
        if (a2 == a) continue;
        for (const VertexRef& c : uc) {
          if (!g.adjacent(a2, c)) continue;
          for (const VertexRef& b2 : ub) {
            if (b2 == b) continue;
            for (const VertexRef& c2 : uc) {
              if (c2 == c) continue;
              for (const auto& tt : t.cycles) {
                const VertexRef ta = tt.vertex(lab.a);
                const VertexRef tb = tt.vertex(lab.b);
                const VertexRef tc = tt.vertex(lab.c);
                if (!g.adjacent(b2, tc) || !g.adjacent(c2, tb)) continue;
                // Case 1: the edge c2-tb has an uncovered apex in A.
                for (const VertexRef& a3 : ua) {
                  if (!g.adjacent(a3, c2) || !g.adjacent(a3, tb)) continue;
                  Move m{MoveKind::kEndgameReplace, {tt}, {triangle({a3, tb, c2})}};
                  if (potential(g, lab, apply_move(t, m)) > pot) return m;
                }
                // Case 2: another triangle completes both c2-tb and one of ab, a2c.
                for (const auto& t2 : t.cycles) {
                  const VertexRef sa = t2.vertex(lab.a);
                  if (!g.adjacent(sa, c2) || !g.adjacent(sa, tb)) continue;
                  const VertexRef sb = t2.vertex(lab.b);
                  const VertexRef sc = t2.vertex(lab.c);
                  if (t2 == tt) {
                    if (g.adjacent(tc, a) && g.adjacent(tc, b)) {
                      return Move{MoveKind::kEndgameGrow, {tt}, {triangle({ta, tb, c2}), triangle({a, b, tc})}};
                    }
                    continue;
                  }
                  std::optional<Move> m;
                  if (g.adjacent(sc, a) && g.adjacent(sc, b)) {
                    m = Move{MoveKind::kEndgameExchange, {tt, t2}, {triangle({sa, tb, c2}), triangle({a, b, sc})}};
                  } else if (g.adjacent(sb, a2) && g.adjacent(sb, c)) {
                    m = Move{MoveKind::kEndgameExchange, {tt, t2}, {triangle({sa, tb, c2}), triangle({a2, sb, c})}};
                  }
                  if (m && potential(g, lab, apply_move(t, *m)) > pot) return m;
                }
              }
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

Swap3Result near_factor3(const BlowupGraph& g, int iteration_cap, const Tiling& start) {
  if (g.k() != 3) throw PreconditionError(fmt::format("triangle swaps need k = 3, got {}", g.k()));
  const int n = g.n();
  const auto deltas = degree_profile(g).deltas;
  long sum = 0;
  for (int i = 0; i < 3; ++i) {
    if (2 * deltas[i] < n) {
      throw PreconditionError(fmt::format("delta_{} = {} is below n/2 = {}/2", i + 1, deltas[i], n));
    }
    sum += deltas[i];
  }
  if (sum < 2L * n) throw PreconditionError(fmt::format("delta sum {} is below 2n = {}", sum, 2 * n));

  const Labelling lab = relabel_abc(g);
  const TilingCheck initial = validate_tiling(g, start);
  if (!initial.ok()) throw PreconditionError("invalid start tiling: " + initial.message);
  Swap3Result out{start, {}};
  for (int moves = 0; moves < iteration_cap; ++moves) {
    const int size = static_cast<int>(out.tiling.size());
    if (size == n) return out;
    std::optional<Move> m = find_improvement(g, out.tiling);
    if (!m && size >= n - 1) return out;
    if (!m && potential(g, lab, out.tiling) == std::pair{0, 2}) m = endgame(g, lab, out.tiling);
    if (!m) m = rotate(g, lab, out.tiling);
    if (!m) {
      throw Counterexample(fmt::format("no move applies to a tiling of size {} (n = {})", size, n),
                           artifact(g, out.tiling, "stuck", out.trace.size()));
    }
    Tiling next = apply_move(out.tiling, *m);
    const TilingCheck check = validate_tiling(g, next);
    if (!check.ok() || next.size() < out.tiling.size()) {
      throw InvariantViolation(fmt::format("{} move produced an invalid tiling: {}", to_string(m->kind), check.message));
    }
    out.tiling = std::move(next);
    out.trace.push_back(std::move(*m));
  }
  if (static_cast<int>(out.tiling.size()) >= n - 1) return out;
  throw Counterexample(fmt::format("move cap {} reached at size {} (n = {})", iteration_cap, out.tiling.size(), n),
                       artifact(g, out.tiling, "cap", out.trace.size()));
}

}  // namespace ckb
