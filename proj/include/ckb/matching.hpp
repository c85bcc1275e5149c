#pragma once

// Bipartite matching on masked consecutive-part pairs.
//
// Everything runs on bit rows plus left/right masks; no subgraph is copied.
// Vertex scan order is ascending index everywhere, so results are
// reproducible across runs.

#include <optional>
#include <span>
#include <vector>

#include "ckb/core.hpp"

namespace ckb {

struct MatchedPair {
  int left = 0;
  int right = 0;

  auto operator<=>(const MatchedPair&) const = default;
};

struct Matching {
  /// Sorted by left endpoint.
  std::vector<MatchedPair> pairs;

  std::size_t size() const { return pairs.size(); }
};

/// Hopcroft-Karp on rows[u] (right neighbours of left vertex u), restricted to
/// the given masks.
Matching bipartite_max_matching(std::span<const Bitset> rows, const Bitset& left,
                                const Bitset& right);

/// A left subset S with |N(S) within right| < |S|, or nothing when a perfect
/// matching exists. Requires |left| == |right|.
std::optional<std::vector<int>> bipartite_hall_violator(std::span<const Bitset> rows,
                                                        const Bitset& left,
                                                        const Bitset& right);

/// Maximum matching of G[left, right] with left inside V_i, right inside V_{i+1}.
Matching max_matching(const BlowupGraph& g, int i, const Bitset& left, const Bitset& right);

std::optional<std::vector<int>> hall_violator(const BlowupGraph& g, int i, const Bitset& left,
                                              const Bitset& right);

/// Balanced bipartite graph on two n-sets, given by left-to-right rows.
struct BipartiteGraph {
  int n = 0;
  std::vector<Bitset> rows;

  static BipartiteGraph from_edges(int n, std::span<const MatchedPair> edges);
  static BipartiteGraph complete(int n);
  int min_degree() const;
};

struct SimultaneousMatching {
  bool perfect = false;
  Matching matching;
  /// Set when no perfect matching exists inside E(H) and E(H').
  std::vector<int> violator;
};

/// Perfect matching using only edges common to h and h2. Guaranteed to succeed
/// when delta(h) + delta(h2) >= 3n/2; otherwise it is attempted anyway.
SimultaneousMatching simultaneous_matching(const BipartiteGraph& h, const BipartiteGraph& h2);

}  // namespace ckb
