#pragma once

// Instance families: complete blow-ups, the two extremal constructions
// (Haggkvist's example and the triangle-cover example), random graphs with
// prescribed pairwise minimum degrees, and the part-collapse reduction.

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "ckb/core.hpp"
#include "ckb/io.hpp"
#include "ckb/matching.hpp"

namespace ckb {

struct LabelledGraph {
  BlowupGraph graph;
  /// Contiguous index blocks per part, in the order the construction lists
  /// them.
  Blocks blocks;
};

BlowupGraph complete_blowup(int k, int n);

/// Haggkvist's example on n = 2km: blocks U_i, W_i, Z_i. delta* = (k+1)m - 1
/// and Z = Z_1 + ... + Z_k is a transversal cover of size 2mk - 1.
LabelledGraph haggkvist_example(int k, int m);

/// Returns the vertices of Z_1 + ... + Z_k.
std::vector<VertexRef> haggkvist_cover(const LabelledGraph& example, int k);

struct CoverExample {
  BlowupGraph graph;
  Blocks blocks;
  int n = 0;
  mpq_class gamma;
  mpq_class beta;
  mpq_class epsilon;
  /// A_0 + B_0 + C_0, a triangle cover of size (1 - 3 epsilon) n.
  std::vector<VertexRef> cover;
};

/// Triangle-cover example for gamma = p/q in (3/4, 7/9], with parts A = V_1,
/// B = V_2, C = V_3. Picks the smallest admissible n and epsilon = 1/n.
CoverExample cover_example(long p, long q);

/// Each vertex on each side of pair (i, i+1) picks deltas[i-1] distinct
/// partners uniformly; the pair's edges are the union of all picks.
BlowupGraph random_min_degree(int k, int n, const std::vector<int>& deltas, std::uint64_t seed);

/// Map from vertices of a reduced graph back to ordered runs of original
/// vertices. segments[p-1][v] lists the original vertices merged into (p, v).
struct LiftMap {
  int original_k = 0;
  std::vector<std::vector<std::vector<VertexRef>>> segments;

  static LiftMap identity(int k, int n);
  /// Lifts a tiling of the reduced graph to one of the original graph.
  Tiling lift(const Tiling& reduced) const;
  /// this followed by `inner` (inner maps a graph reduced further from ours).
  LiftMap compose(const LiftMap& inner) const;
};

struct Collapsed {
  BlowupGraph graph;
  LiftMap lift;
};

/// Collapses every matched edge v f_v of G[V_i, V_{i+1}] into a single vertex
/// that keeps v's neighbours in V_{i-1} and f_v's neighbours in V_{i+2}. The
/// merged part takes number i when i < k and number 1 when i = k; merged
/// vertices keep the index of v. `matching` pairs left = V_i, right = V_{i+1}
/// and must be perfect. Requires k >= 4.
Collapsed collapse(const BlowupGraph& g, int i, const Matching& matching);

/// collapse() with a perfect matching computed by max_matching.
Collapsed collapse(const BlowupGraph& g, int i);

struct Reduction {
  BlowupGraph graph;
  LiftMap lift;
  /// Original pair indices that were collapsed, increasing.
  std::vector<int> collapsed_pairs;
};

/// Collapses, in increasing order, every pair i with delta_i < (1 + eps) n / 2.
Reduction reduce_small_deltas(const BlowupGraph& g, double epsilon);

}  // namespace ckb
