#include <doctest.h>

#include <random>

#include "ckb/exact.hpp"
#include "ckb/generators.hpp"
#include "ckb/swap3.hpp"
#include "oracles.hpp"

using namespace ckb;

namespace {

// Pair i joins u to w when (w - u) mod n < deltas[i-1]; every vertex then has
// exactly that many neighbours on both sides.
BlowupGraph circulant(int n, const std::vector<int>& deltas) {
  std::vector<Edge> edges;
  for (int p = 1; p <= 3; ++p)
    for (int u = 0; u < n; ++u)
      for (int s = 0; s < deltas[p - 1]; ++s) edges.push_back({p, u, (u + s) % n});
  return BlowupGraph(3, n, edges);
}

struct OracleEdge {
  int type;  // part of the lower endpoint: pair (type, type % 3 + 1)
  int u;
  int w;
};

std::vector<OracleEdge> free_edges(const BlowupGraph& g, const Tiling& t) {
  std::vector<std::vector<char>> used(3, std::vector<char>(g.n(), 0));
  for (const auto& c : t.cycles)
    for (int p = 0; p < 3; ++p) used[p][c.members[p]] = 1;
  std::vector<OracleEdge> out;
  for (int p = 1; p <= 3; ++p) {
    const int q = p % 3 + 1;
    for (int u = 0; u < g.n(); ++u)
      for (int w = 0; w < g.n(); ++w)
        if (!used[p - 1][u] && !used[q - 1][w] && g.adjacent({p, u}, {q, w})) out.push_back({p, u, w});
  }
  return out;
}

int type_of(int x, int y) {
  if (y == x % 3 + 1) return x;
  return y;
}

// Largest dissimilar matching, optionally forced to contain an edge of `type`.
int oracle_h(const BlowupGraph& g, const Tiling& t, int forced_type) {
  const auto edges = free_edges(g, t);
  std::vector<std::vector<OracleEdge>> by_type(4);
  for (const auto& e : edges) by_type[e.type].push_back(e);
  int best = -1;
  auto ends = [](const OracleEdge& e) {
    return std::vector<std::pair<int, int>>{{e.type, e.u}, {e.type % 3 + 1, e.w}};
  };
  std::vector<const OracleEdge*> pick;
  std::function<void(int)> go = [&](int type) {
    if (type == 4) {
      std::vector<std::pair<int, int>> seen;
      for (const auto* e : pick)
        for (const auto& v : ends(*e)) {
          if (std::find(seen.begin(), seen.end(), v) != seen.end()) return;
          seen.push_back(v);
        }
      if (forced_type && std::none_of(pick.begin(), pick.end(), [&](const OracleEdge* e) { return e->type == forced_type; }))
        return;
      best = std::max(best, static_cast<int>(pick.size()));
      return;
    }
    go(type + 1);
    for (const auto& e : by_type[type]) {
      pick.push_back(&e);
      go(type + 1);
      pick.pop_back();
    }
  };
  go(1);
  return best;
}

std::pair<int, int> oracle_potential(const BlowupGraph& g, const Labelling& lab, const Tiling& t) {
  const int bc = type_of(lab.b, lab.c);
  const int forced = oracle_h(g, t, bc);
  if (forced > 0) return {1, forced};
  return {0, oracle_h(g, t, 0)};
}

Tiling random_maximal(const BlowupGraph& g, std::mt19937_64& rng) {
  auto all = oracle::cycles(g);
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::vector<char>> used(3, std::vector<char>(g.n(), 0));
  Tiling t;
  for (const auto& c : all) {
    if (used[0][c[0]] || used[1][c[1]] || used[2][c[2]]) continue;
    for (int p = 0; p < 3; ++p) used[p][c[p]] = 1;
    t.cycles.push_back({c});
  }
  return t;
}

}  // namespace

TEST_SUITE("swap3") {

TEST_CASE("relabelling") {
  const auto g = circulant(9, {5, 7, 6});
  REQUIRE(degree_profile(g).deltas == std::vector<int>{5, 7, 6});
  const Labelling lab = relabel_abc(g);
  CHECK(lab.a == 3);
  CHECK(lab.b == 2);
  CHECK(lab.c == 1);
  CHECK(lab.delta_ab == 7);
  CHECK(lab.delta_ac == 6);
  CHECK(lab.delta_bc == 5);

  const Labelling id = relabel_abc(circulant(6, {4, 4, 4}));
  CHECK(id.a == 1);
  CHECK(id.b == 2);
  CHECK(id.c == 3);

  const Labelling big = relabel_abc(circulant(9, {4, 4, 8}));
  CHECK(big.delta_ab == 8);
  CHECK(((big.a == 3 && big.b == 1) || (big.a == 1 && big.b == 3)));

  CHECK_THROWS_AS(relabel_abc(complete_blowup(4, 2)), PreconditionError);
}

TEST_CASE("add triangle fires on an uncovered triangle") {
  const auto g = complete_blowup(3, 3);
  const auto m = find_improvement(g, Tiling{});
  REQUIRE(m.has_value());
  CHECK(m->kind == MoveKind::kAddTriangle);
  CHECK(validate_tiling(g, apply_move(Tiling{}, *m)).ok());
}

TEST_CASE("split triangle gadget") {
  // T0 = (0,0,0); e = (1,1)-(2,1) in pair (1,2) and f = (2,2)-(3,2) in pair
  // (2,3) are uncovered and completed by (3,0) and (1,0).
  const std::vector<Edge> edges{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {1, 1, 1}, {2, 1, 0},
                                {3, 0, 1}, {2, 2, 2}, {3, 2, 0}, {1, 0, 2}};
  const BlowupGraph g(3, 3, edges);
  const Tiling start{{{{0, 0, 0}}}};
  REQUIRE(validate_tiling(g, start).ok());
  const auto m = find_improvement(g, start);
  REQUIRE(m.has_value());
  CHECK(m->kind == MoveKind::kSplitTriangle);
  const Tiling next = apply_move(start, *m);
  CHECK(validate_tiling(g, next).ok());
  CHECK(next.size() == 2);
  CHECK(oracle::max_tiling_size(g) == 2);
}

TEST_CASE("maximum tilings admit no improvement and have h at most 2") {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const int n = 4 + seed % 4;
    const int half = (n + 1) / 2;
    std::vector<int> d{half, half, std::max(half, 2 * n - 2 * half)};
    std::shuffle(d.begin(), d.end(), rng);
    const auto g = random_min_degree(3, n, d, seed);
    const auto best = max_tiling(g);
    REQUIRE(best.optimal);
    CHECK(static_cast<int>(best.tiling.size()) == oracle::max_tiling_size(g));
    CHECK_FALSE(find_improvement(g, best.tiling).has_value());
    const auto h = dissimilar_h(g, best.tiling);
    CHECK(h.edges.size() <= 2);
    CHECK(static_cast<int>(h.edges.size()) == oracle_h(g, best.tiling, 0));
  }
}

TEST_CASE("dissimilar matchings") {
  const auto c = complete_blowup(3, 3);
  Tiling full;
  for (int j = 0; j < 3; ++j) full.cycles.push_back({{j, j, j}});
  CHECK(dissimilar_h(c, full).edges.empty());

  const std::vector<Edge> two{{1, 0, 0}, {2, 1, 1}};
  const BlowupGraph g(3, 2, two);
  const auto h = dissimilar_h(g, Tiling{});
  CHECK(h.edges.size() == 2);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto r = random_min_degree(3, 5, {2, 2, 2}, seed);
    std::mt19937_64 rng(seed);
    const Tiling t = random_maximal(r, rng);
    CHECK(static_cast<int>(dissimilar_h(r, t).edges.size()) == oracle_h(r, t, 0));
  }
}

TEST_CASE("rotations and endgame moves raise the potential") {
  int rotations = 0, endgames = 0;
  // Moves are local, so sparser graphs than the degree condition allows are
  // used to reach stuck tilings more often.
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    const int n = 5 + seed % 4;
    const int d = n / 2 - (seed % 3 == 0);
    const auto g = random_min_degree(3, n, {d + 1, d, d}, seed);
    const Labelling lab = relabel_abc(g);
    std::mt19937_64 rng(seed);
    Tiling t = random_maximal(g, rng);
    while (const auto m = find_improvement(g, t)) t = apply_move(t, *m);
    const auto before = oracle_potential(g, lab, t);
    CHECK(potential(g, lab, t) == before);
    if (const auto m = rotate(g, lab, t)) {
      ++rotations;
      CHECK(m->kind == MoveKind::kRotate);
      const Tiling next = apply_move(t, *m);
      CHECK(validate_tiling(g, next).ok());
      CHECK(next.size() == t.size());
      CHECK(oracle_potential(g, lab, next) > before);
    }
    if (before == std::pair<int, int>{0, 2}) {
      if (const auto m = endgame(g, lab, t)) {
        ++endgames;
        const Tiling next = apply_move(t, *m);
        CHECK(validate_tiling(g, next).ok());
        CHECK(next.size() >= t.size());
        if (next.size() == t.size()) CHECK(oracle_potential(g, lab, next) > before);
      }
    }
    // (1, 3) is the largest potential.
    if (before == std::pair<int, int>{1, 3}) CHECK_FALSE(rotate(g, lab, t).has_value());
  }
  CHECK(rotations > 0);
  CHECK(endgames > 0);
}

TEST_CASE("near factor") {
  const auto c = near_factor3(complete_blowup(3, 10));
  CHECK(c.tiling.size() == 10);
  CHECK(validate_tiling(complete_blowup(3, 10), c.tiling).ok());

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = random_min_degree(3, 12, {8, 8, 8}, seed);
    const auto r = near_factor3(g);
    CHECK(validate_tiling(g, r.tiling).ok());
    CHECK(r.tiling.size() >= 11);
    // Replay the trace: sizes never drop.
    Tiling t;
    for (const auto& m : r.trace) {
      const Tiling next = apply_move(t, m);
      CHECK(next.size() >= t.size());
      t = next;
    }
    CHECK(canonical(t) == canonical(r.tiling));
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 4 + seed % 4;
    const int half = (n + 1) / 2;
    const auto g = random_min_degree(3, n, {half, half, std::max(half, 2 * n - 2 * half)}, seed);
    const auto r = near_factor3(g);
    CHECK(static_cast<int>(r.tiling.size()) >= std::min(n - 1, oracle::max_tiling_size(g)));
    CHECK(static_cast<int>(r.tiling.size()) >= n - 1);
  }
  CHECK_THROWS_AS(near_factor3(haggkvist_example(3, 1).graph), PreconditionError);
  CHECK_THROWS_AS(near_factor3(complete_blowup(4, 3)), PreconditionError);
}

TEST_CASE("move JSON") {
  Move m;
  m.kind = MoveKind::kRotate;
  m.removed = {{{0, 1, 2}}};
  m.added = {{{3, 1, 2}}};
  const auto j = move_to_json(m);
  CHECK(j["move"] == "rotate");
  CHECK(j["removed"].size() == 1);
  CHECK(to_string(MoveKind::kEndgameExchange) == "endgame-exchange");
}

}  // TEST_SUITE
