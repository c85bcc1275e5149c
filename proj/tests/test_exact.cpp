#include <doctest.h>

#include <random>

#include "ckb/exact.hpp"
#include "ckb/generators.hpp"
#include "oracles.hpp"

using namespace ckb;

namespace {

BlowupGraph random_graph(int k, int n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (int p = 1; p <= k; ++p)
    for (int u = 0; u < n; ++u)
      for (int w = 0; w < n; ++w)
        if (coin(rng)) edges.push_back({p, u, w});
  return BlowupGraph(k, n, edges);
}

std::vector<VertexRef> from_ids(const BlowupGraph& g, std::uint32_t mask) {
  std::vector<VertexRef> out;
  for (int v = 0; v < g.k() * g.n(); ++v)
    if (mask >> v & 1) out.push_back({v / g.n() + 1, v % g.n()});
  return out;
}

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("cycle enumeration matches the oracle") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_graph(3 + seed % 2, 4, 0.5, seed);
    const auto mine = all_cycles(g);
    const auto theirs = oracle::cycles(g);
    REQUIRE(mine.size() == theirs.size());
    for (std::size_t i = 0; i < mine.size(); ++i) CHECK(mine[i].members == theirs[i]);
    CHECK(has_cycle(g, VertexMask(g.k(), g.n(), true)) == !theirs.empty());
  }
}

TEST_CASE("max tiling examples") {
  const auto c = max_tiling(complete_blowup(3, 6));
  CHECK(c.tiling.size() == 6);
  CHECK(c.optimal);
  const auto h = max_tiling(haggkvist_example(3, 1).graph);
  CHECK(h.tiling.size() == 5);
  CHECK(h.optimal);
  const auto e = max_tiling(BlowupGraph(3, 4, std::vector<Edge>{}));
  CHECK(e.tiling.size() == 0);
  CHECK(e.optimal);
}

TEST_CASE("max tiling agrees with exhaustive packing") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const int n = 2 + seed % 4;
    const auto g = random_graph(3, n, 0.35 + 0.1 * (seed % 5), seed);
    const auto r = max_tiling(g);
    CHECK(r.optimal);
    CHECK(validate_tiling(g, r.tiling).ok());
    CHECK(static_cast<int>(r.tiling.size()) == oracle::max_tiling_size(g));
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(4, 3, 0.6, seed);
    CHECK(static_cast<int>(max_tiling(g).tiling.size()) == oracle::max_tiling_size(g));
  }
}

TEST_CASE("has factor") {
  CHECK(has_factor(complete_blowup(3, 4), VertexMask(3, 4, true)));
  CHECK_FALSE(has_factor(haggkvist_example(3, 1).graph, VertexMask(3, 6, true)));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = random_graph(3, 4, 0.6, seed);
    std::vector<int> ids{0, 1, 4, 5, 8, 9};
    const auto m = VertexMask::from_vertices(3, 4, from_ids(g, 0b1100110011));
    CHECK(has_factor(g, m) == oracle::has_factor(g, ids));
  }
}

TEST_CASE("cover number") {
  CHECK(cover_number(haggkvist_example(3, 1).graph).size == 5);
  CHECK(cover_number(complete_blowup(3, 2)).size == 2);
  const std::vector<Edge> tri{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  CHECK(cover_number(BlowupGraph(3, 1, tri)).size == 1);

  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 2 + seed % 3;
    const auto g = random_graph(3, n, 0.4 + 0.1 * (seed % 4), seed);
    const auto r = cover_number(g);
    REQUIRE(r.optimal);
    CHECK(is_cover(g, r.witness));
    CHECK(static_cast<int>(r.witness.size()) == r.size);
    CHECK(r.size == oracle::cover_number(g));
    CHECK(static_cast<int>(max_tiling(g).tiling.size()) <= r.size);
  }
}

TEST_CASE("is cover") {
  const auto g = random_graph(3, 4, 0.7, 5);
  std::vector<VertexRef> v1;
  for (int v = 0; v < 4; ++v) v1.push_back({1, v});
  CHECK(is_cover(g, v1));
  CHECK_FALSE(is_cover(complete_blowup(3, 2), std::vector<VertexRef>{{1, 0}}));
  const auto ex = haggkvist_example(3, 1);
  CHECK(is_cover(ex.graph, haggkvist_cover(ex, 3)));
}

TEST_CASE("independence number") {
  CHECK(independence_number(BlowupGraph(3, 3, std::vector<Edge>{})) == 9);
  for (int n = 1; n <= 4; ++n) {
    CHECK(independence_number(complete_blowup(3, n)) == n);
    CHECK(oracle::independence_number(complete_blowup(3, n)) == n);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(3, 4, 0.3 + 0.05 * (seed % 8), seed);
    CHECK(independence_number(g) == oracle::independence_number(g));
  }
  // Degree bounds with every delta >= n/2 and sum >= 2n force alpha = n.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_min_degree(3, 5, {4, 3, 3}, seed);
    CHECK(independence_number(g) == 5);
  }
}

TEST_CASE("linking counts") {
  const auto c3 = complete_blowup(3, 4);
  CHECK(enumerate_linking(c3, {1, 0}, {1, 1}, 2).count == 16);
  CHECK(enumerate_linking(complete_blowup(4, 3), {2, 0}, {2, 2}, 3).count == 27);

  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto g = random_graph(3, 3, 0.55 + 0.05 * (seed % 5), seed);
    const VertexRef v{1 + static_cast<int>(seed % 3), 0};
    const VertexRef v2{v.part, static_cast<int>(seed % 2 + 1)};
    const auto mine = enumerate_linking(g, v, v2, 2, 0, 100);
    CHECK(static_cast<long>(mine.count) == oracle::linking_count(g, v, v2, 2));
    CHECK(enumerate_linking(g, v2, v, 2).count == mine.count);
    for (const auto& seq : mine.examples) CHECK(is_linking_sequence(g, v, v2, seq));
  }
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto g = random_graph(3, 3, 0.75, seed + 100);
    CHECK(static_cast<long>(enumerate_linking(g, {1, 0}, {1, 1}, 5).count) ==
          oracle::linking_count(g, {1, 0}, {1, 1}, 5));
  }

  const auto capped = enumerate_linking(c3, {1, 0}, {1, 1}, 2, 5);
  CHECK(capped.capped);
  CHECK(capped.count == 5);
  CHECK_THROWS_AS(enumerate_linking(c3, {1, 0}, {2, 1}, 2), PreconditionError);
  CHECK_THROWS_AS(enumerate_linking(c3, {1, 0}, {1, 1}, 3), PreconditionError);
}

TEST_CASE("is linked") {
  const auto yes = is_linked(complete_blowup(3, 4), 1.0, 2);
  CHECK(yes.linked);
  CHECK(yes.min_count == 16);
  const auto no = is_linked(BlowupGraph(3, 3, std::vector<Edge>{}), 0.01, 2);
  CHECK_FALSE(no.linked);
  CHECK(no.min_count == 0);
  // Haggkvist (3,1): the least-linked pair has 2 sequences.
  const auto h = haggkvist_example(3, 1);
  const auto r = is_linked(h.graph, 0.01, 2);
  long least = 1L << 40;
  for (int p = 1; p <= 3; ++p)
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) least = std::min(least, oracle::linking_count(h.graph, {p, a}, {p, b}, 2));
  CHECK(static_cast<long>(r.min_count) == least);
  CHECK(least == 2);
  CHECK(r.linked);
  CHECK_THROWS_AS(is_linked(complete_blowup(3, 30), 0.1, 5, 1e3), BudgetExhausted);
}

}  // TEST_SUITE
