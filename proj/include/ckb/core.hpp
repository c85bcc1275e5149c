#pragma once

// Spanning subgraphs of the n-blow-up of the cycle C_k.
//
// Parts are numbered 1..k and arithmetic on part numbers is cyclic; vertex
// indices inside a part are 0-based. Adjacency between V_i and V_{i+1} is held
// as dense bit rows in both directions so that common neighbourhoods are plain
// row intersections.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace ckb {

using Bitset = boost::dynamic_bitset<std::uint64_t>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied input does not meet the documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A search or retry budget ran out before the operation could finish.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed; indicates a bug rather than bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Part-number helpers. All cyclic arithmetic on parts goes through these.
int next_part(int part, int k);
int prev_part(int part, int k);
bool consecutive_parts(int a, int b, int k);

struct VertexRef {
  int part = 1;
  int index = 0;

  auto operator<=>(const VertexRef&) const = default;
};

std::string to_string(VertexRef v);

/// Edge between u in V_part and w in V_{part+1}.
struct Edge {
  int part = 1;
  int u = 0;
  int w = 0;

  auto operator<=>(const Edge&) const = default;
};

class BlowupGraph {
 public:
  /// Throws PreconditionError on k < 3, n < 1 or out-of-range edges.
  BlowupGraph(int k, int n, std::span<const Edge> edges);

  /// forward[i-1][u] is the neighbourhood of u in V_i inside V_{i+1}.
  static BlowupGraph from_rows(int k, int n,
                               std::vector<std::vector<Bitset>> forward);

  int k() const { return k_; }
  int n() const { return n_; }

  bool contains(VertexRef v) const;
  bool adjacent(VertexRef a, VertexRef b) const;

  /// Neighbours of v inside part j; j must be consecutive to v.part.
  const Bitset& neighbors(VertexRef v, int j) const;
  int degree(VertexRef v, int j) const;

  /// Rows of V_i toward V_{i+1}, indexed by vertex of V_i.
  std::span<const Bitset> forward_rows(int i) const { return forward_[i - 1]; }
  /// Rows of V_i toward V_{i-1}, indexed by vertex of V_i.
  std::span<const Bitset> backward_rows(int i) const { return backward_[i - 1]; }

  /// N(S, V_j). The empty set has all of V_j as common neighbourhood.
  Bitset common_neighborhood(std::span<const VertexRef> s, int j) const;

  /// Sorted edge list (part, u, w); the inverse of the constructor.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

 private:
  BlowupGraph(int k, int n);
  void check_vertex(VertexRef v) const;

  int k_;
  int n_;
  std::vector<std::vector<Bitset>> forward_;
  std::vector<std::vector<Bitset>> backward_;
};

/// Per-part vertex subsets, used for alive masks and vertex sets.
class VertexMask {
 public:
  VertexMask() = default;
  VertexMask(int k, int n, bool value = false);

  static VertexMask from_vertices(int k, int n, std::span<const VertexRef> vs);

  int k() const { return static_cast<int>(parts_.size()); }
  int n() const { return parts_.empty() ? 0 : static_cast<int>(parts_[0].size()); }

  Bitset& part(int p) { return parts_[p - 1]; }
  const Bitset& part(int p) const { return parts_[p - 1]; }

  bool test(VertexRef v) const { return parts_[v.part - 1].test(v.index); }
  void set(VertexRef v, bool value = true) { parts_[v.part - 1].set(v.index, value); }
  int count(int p) const { return static_cast<int>(parts_[p - 1].count()); }
  int total() const;
  std::vector<VertexRef> vertices() const;

  bool operator==(const VertexMask&) const = default;

 private:
  std::vector<Bitset> parts_;
};

struct DegreeProfile {
  /// deltas[i-1] = min degree of the bipartite graph G[V_i, V_{i+1}].
  std::vector<int> deltas;
  int delta_star = 0;
};

/// Minimum degree of G[V_i, V_{i+1}] over both sides.
int pair_min_degree(const BlowupGraph& g, int i);
DegreeProfile degree_profile(const BlowupGraph& g);

struct TransversalCycle {
  /// members[p-1] is the index of the cycle's vertex in part p.
  std::vector<int> members;

  VertexRef vertex(int part) const { return {part, members[part - 1]}; }
  auto operator<=>(const TransversalCycle&) const = default;
};

struct Tiling {
  std::vector<TransversalCycle> cycles;

  std::size_t size() const { return cycles.size(); }
  bool operator==(const Tiling&) const = default;
};

enum class Violation {
  kNone,
  kShape,
  kOutOfRange,
  kAdjacency,
  kDisjointness,
  kOversized,
};

struct TilingCheck {
  Violation kind = Violation::kNone;
  std::string message;

  bool ok() const { return kind == Violation::kNone; }
};

std::string to_string(Violation v);

/// Checks every cycle and pairwise disjointness; reports the first violation.
TilingCheck validate_tiling(const BlowupGraph& g, const Tiling& t);

/// Vertices of each part not covered by t; throws PreconditionError when t is
/// invalid.
std::vector<std::vector<int>> uncovered(const BlowupGraph& g, const Tiling& t);
VertexMask covered_mask(const BlowupGraph& g, const Tiling& t);

/// Normalises a tiling for comparisons: cycles sorted lexicographically.
Tiling canonical(Tiling t);

}  // namespace ckb
