#pragma once

// Exhaustive oracles for desk-scale instances: maximum tilings, cover numbers,
// independence numbers and linking-sequence counts.
//
// Searches take a wall-clock budget in milliseconds (negative = unlimited). On
// exhaustion they return the best object found so far with optimal = false.

#include <cstdint>
#include <functional>
#include <vector>

#include "ckb/core.hpp"

namespace ckb {

/// Calls f(cycle) for every transversal cycle through the V_1 vertex v0 whose
/// vertices are all alive. Parts are extended in order 1..k; members come out
/// in lexicographic order. Stops early when f returns false; the return value
/// says whether enumeration ran to completion.
bool for_each_cycle_through(const BlowupGraph& g, const VertexMask& alive, int v0,
                            const std::function<bool(const TransversalCycle&)>& f);

/// Every transversal cycle inside `alive`, lexicographically ordered.
std::vector<TransversalCycle> all_cycles(const BlowupGraph& g, const VertexMask& alive);
std::vector<TransversalCycle> all_cycles(const BlowupGraph& g);

bool has_cycle(const BlowupGraph& g, const VertexMask& alive);

struct TilingResult {
  Tiling tiling;
  bool optimal = false;
  std::int64_t nodes_expanded = 0;
  double millis = 0;
};

/// Maximum transversal tiling of G[alive] by depth-first branch-and-bound.
TilingResult max_tiling(const BlowupGraph& g, const VertexMask& alive, long time_budget_ms = -1);
TilingResult max_tiling(const BlowupGraph& g, long time_budget_ms = -1);

/// Whether G[alive] has a transversal factor; alive must be balanced.
bool has_factor(const BlowupGraph& g, const VertexMask& alive);

/// True iff G - z has no transversal cycle.
bool is_cover(const BlowupGraph& g, std::span<const VertexRef> z);

struct CoverResult {
  int size = 0;
  std::vector<VertexRef> witness;
  bool optimal = false;
  std::int64_t nodes_expanded = 0;
  double millis = 0;
};

/// Minimum transversal cover by branch-and-bound over the cycle hypergraph.
/// upper_hint, when positive, seeds the incumbent bound (no witness is
/// assumed for it; the search still produces one).
CoverResult cover_number(const BlowupGraph& g, int upper_hint = -1, long time_budget_ms = -1);

int independence_number(const BlowupGraph& g);

/// A (v, v', t)-linking sequence. entries[j-1] lies in part part(v) + j.
struct LinkingSequence {
  std::vector<VertexRef> entries;
};

struct LinkingCount {
  /// Number of ordered t-tuples; saturates at the cap when one is given.
  std::uint64_t count = 0;
  bool capped = false;
  /// One representative per admissible vertex set, up to `keep` of them.
  std::vector<LinkingSequence> examples;
};

/// Exact number of (v, v', t)-linking sequences. Entry j of a sequence lies in
/// part part(v) + j, so each admissible vertex set contributes the product of
/// the factorials of its per-part counts. cap = 0 means no cap.
LinkingCount enumerate_linking(const BlowupGraph& g, VertexRef v, VertexRef v2, int t,
                               std::uint64_t cap = 0, std::size_t keep = 0);

/// Whether the (t+1)-vertex sets of the sequence together with v (and with
/// v2) both span transversal factors.
bool is_linking_sequence(const BlowupGraph& g, VertexRef v, VertexRef v2,
                         const LinkingSequence& seq);

struct LinkedResult {
  bool linked = false;
  VertexRef v;
  VertexRef v2;
  std::uint64_t min_count = 0;
  double threshold = 0;
};

/// Checks every same-part pair, v = v' included. Throws BudgetExhausted when
/// the estimated number of vertex-set checks exceeds max_work.
LinkedResult is_linked(const BlowupGraph& g, double eta, int t, double max_work = 5e7);

}  // namespace ckb
