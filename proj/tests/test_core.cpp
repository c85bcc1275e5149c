#include <doctest.h>

#include <random>

#include "ckb/core.hpp"
#include "ckb/generators.hpp"
#include "ckb/io.hpp"
#include "oracles.hpp"

using namespace ckb;

namespace {

std::vector<Edge> all_edges(int k, int n) {
  std::vector<Edge> out;
  for (int p = 1; p <= k; ++p)
    for (int u = 0; u < n; ++u)
      for (int w = 0; w < n; ++w) out.push_back({p, u, w});
  return out;
}

BlowupGraph random_graph(int k, int n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (const Edge& e : all_edges(k, n))
    if (coin(rng)) edges.push_back(e);
  return BlowupGraph(k, n, edges);
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("construction") {
  const std::vector<Edge> tri{{1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  BlowupGraph g(3, 1, tri);
  CHECK(g.edge_count() == 3);
  CHECK(g.adjacent({1, 0}, {2, 0}));
  CHECK(g.adjacent({3, 0}, {1, 0}));
  CHECK(g.adjacent({1, 0}, {3, 0}));

  BlowupGraph empty(3, 2, std::vector<Edge>{});
  CHECK(degree_profile(empty).deltas == std::vector<int>{0, 0, 0});

  const auto full = all_edges(4, 2);
  CHECK(full.size() == 16);
  BlowupGraph k4(4, 2, full);
  CHECK(degree_profile(k4).delta_star == 2);

  CHECK_THROWS_AS(BlowupGraph(2, 3, std::vector<Edge>{}), PreconditionError);
  CHECK_THROWS_AS(BlowupGraph(3, 0, std::vector<Edge>{}), PreconditionError);
  const std::vector<Edge> bad{{1, 0, 5}};
  CHECK_THROWS_AS(BlowupGraph(3, 2, bad), PreconditionError);
  const std::vector<Edge> bad_part{{4, 0, 0}};
  CHECK_THROWS_AS(BlowupGraph(3, 2, bad_part), PreconditionError);
}

TEST_CASE("edge list round trip and adjacency symmetry") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(3 + seed % 3, 4, 0.4, seed);
    const auto edges = g.edges();
    BlowupGraph h(g.k(), g.n(), edges);
    CHECK(h.edges() == edges);
    CHECK(std::is_sorted(edges.begin(), edges.end()));
    for (const Edge& e : edges) {
      CHECK(g.adjacent({e.part, e.u}, {next_part(e.part, g.k()), e.w}));
      CHECK(g.adjacent({next_part(e.part, g.k()), e.w}, {e.part, e.u}));
    }
    CHECK(g.edge_count() == edges.size());
  }
}

TEST_CASE("degrees") {
  const auto c = complete_blowup(3, 4);
  for (int p = 1; p <= 3; ++p) {
    CHECK(c.degree({p, 2}, next_part(p, 3)) == 4);
    CHECK(c.degree({p, 2}, prev_part(p, 3)) == 4);
  }
  const auto h = haggkvist_example(3, 1);
  const VertexRef u2 = h.blocks.at("U_2").front();
  CHECK(h.graph.degree(u2, 3) == 3);
  const VertexRef z1 = h.blocks.at("Z_1").front();
  CHECK(h.graph.degree(z1, 2) == 6);
  CHECK_THROWS_AS(h.graph.degree(u2, 2), PreconditionError);
}

TEST_CASE("common neighbourhood") {
  const auto c = complete_blowup(3, 5);
  const std::vector<VertexRef> s{{1, 0}, {1, 3}};
  CHECK(c.common_neighborhood(s, 2).count() == 5);
  CHECK(c.common_neighborhood({}, 3).count() == 5);

  const auto g = random_graph(3, 6, 0.5, 7);
  const Bitset expect = g.neighbors({1, 1}, 2) & g.neighbors({1, 4}, 2);
  const std::vector<VertexRef> pair{{1, 1}, {1, 4}};
  CHECK(g.common_neighborhood(pair, 2) == expect);
}

TEST_CASE("degree profile") {
  CHECK(degree_profile(haggkvist_example(3, 1).graph).delta_star == 3);
  CHECK(degree_profile(haggkvist_example(4, 1).graph).delta_star == 4);
  CHECK(degree_profile(complete_blowup(5, 3)).delta_star == 3);
  // Minimum over both sides of each pair, against a direct recount.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_graph(4, 5, 0.6, seed);
    const auto p = degree_profile(g);
    int star = 1 << 30;
    for (int i = 1; i <= 4; ++i) {
      int best = 1 << 30;
      const int j = next_part(i, 4);
      for (int v = 0; v < 5; ++v) {
        int a = 0, b = 0;
        for (int w = 0; w < 5; ++w) {
          a += g.adjacent({i, v}, {j, w});
          b += g.adjacent({j, v}, {i, w});
        }
        best = std::min({best, a, b});
      }
      CHECK(p.deltas[i - 1] == best);
      star = std::min(star, best);
    }
    CHECK(p.delta_star == star);
  }
}

TEST_CASE("validate tiling") {
  const auto c = complete_blowup(3, 3);
  Tiling t;
  for (int j = 0; j < 3; ++j) t.cycles.push_back({{j, j, j}});
  CHECK(validate_tiling(c, t).ok());
  CHECK(t.size() == 3);

  Tiling twice{{{{0, 0, 0}}, {{0, 1, 1}}}};
  CHECK(validate_tiling(c, twice).kind == Violation::kDisjointness);

  const std::vector<Edge> edges{{1, 0, 0}, {2, 0, 0}};
  BlowupGraph path(3, 1, edges);
  Tiling open{{{{0, 0, 0}}}};
  CHECK(validate_tiling(path, open).kind == Violation::kAdjacency);

  Tiling shape{{{{0, 0}}}};
  CHECK(validate_tiling(c, shape).kind == Violation::kShape);
  Tiling range{{{{0, 0, 7}}}};
  CHECK(validate_tiling(c, range).kind == Violation::kOutOfRange);
}

TEST_CASE("uncovered") {
  const auto c = complete_blowup(3, 3);
  Tiling full;
  for (int j = 0; j < 3; ++j) full.cycles.push_back({{j, (j + 1) % 3, j}});
  for (const auto& part : uncovered(c, full)) CHECK(part.empty());
  for (const auto& part : uncovered(c, Tiling{})) CHECK(part.size() == 3);
  Tiling bad{{{{0, 0, 0}}, {{0, 1, 1}}}};
  CHECK_THROWS_AS(uncovered(c, bad), PreconditionError);
  CHECK(covered_mask(c, full).total() == 9);
}

TEST_CASE("canonical order") {
  Tiling t{{{{2, 0, 1}}, {{0, 2, 2}}, {{1, 1, 0}}}};
  const Tiling c = canonical(t);
  CHECK(c.cycles[0].members == std::vector<int>{0, 2, 2});
  CHECK(c.cycles[2].members == std::vector<int>{2, 0, 1});
}

TEST_CASE("vertex masks") {
  const std::vector<VertexRef> vs{{1, 2}, {3, 0}, {3, 4}};
  const auto m = VertexMask::from_vertices(3, 5, vs);
  CHECK(m.total() == 3);
  CHECK(m.count(3) == 2);
  CHECK(m.vertices() == vs);
  CHECK(m.test({3, 4}));
  CHECK_FALSE(m.test({2, 4}));
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("graph JSON round trip is byte identical") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_min_degree(3 + seed % 2, 6, std::vector<int>(3 + seed % 2, 3), seed);
    const std::string text = write_graph(g);
    const std::string again = write_graph(read_graph(text));
    CHECK(text == again);
    CHECK(graph_to_json(read_graph(text)) == graph_to_json(g));
  }
}

TEST_CASE("graph JSON errors") {
  CHECK_THROWS_AS(read_graph("{\"k\": 3, \"n\": 2, \"edges\": [[1,0]]}"), FormatError);
  CHECK_THROWS_AS(read_graph("{\"k\": 3, \"n\": 2}"), FormatError);
  CHECK_THROWS_AS(read_graph("{\"k\": 3, \"n\": 2, \"edges\": [[1,0,9]]}"), FormatError);
  CHECK_THROWS_AS(read_graph("{\"format\": \"other\", \"k\": 3, \"n\": 2, \"edges\": []}"), FormatError);
  try {
    read_graph("{\"k\": 3,\n \"n\": ");
    FAIL("expected a parse error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("tiling JSON and DOT") {
  Tiling t{{{{0, 1, 2}}, {{1, 0, 0}}}};
  CHECK(tiling_from_json(tiling_to_json(t)) == t);
  CHECK_THROWS_AS(tiling_from_json(nlohmann::json::parse("[[0, \"a\"]]")), FormatError);
  const auto g = complete_blowup(3, 3);
  const std::string dot = to_dot(g, &t);
  CHECK(dot.find("cluster_1") != std::string::npos);
  CHECK(dot.find("cluster_3") != std::string::npos);
}

}  // TEST_SUITE
