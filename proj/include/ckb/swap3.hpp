#pragma once

// Swap-based augmentation of transversal triangle tilings (k = 3).
//
// A tiling is grown by local moves: add an uncovered triangle, split one
// triangle into two, endgame exchanges, and same-size rotations that advance
// the potential (uncovered B-C edge present, size of the preferred dissimilar
// matching). Every move either grows the tiling or strictly raises the
// potential, so the loop cannot cycle.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckb/core.hpp"

namespace ckb {

/// Parts relabelled so that d(A,B) >= d(A,C) >= d(B,C).
struct Labelling {
  int a = 1;
  int b = 2;
  int c = 3;
  int delta_ab = 0;
  int delta_ac = 0;
  int delta_bc = 0;
};

/// First permutation (A, B, C) of (V_1, V_2, V_3) in lexicographic order whose
/// pair degrees are non-increasing. Throws PreconditionError unless k = 3.
Labelling relabel_abc(const BlowupGraph& g);

/// Edge between two uncovered vertices; `from` lies in part p, `to` in p+1.
struct UncoveredEdge {
  VertexRef from;
  VertexRef to;
};

struct DissimilarMatching {
  std::vector<UncoveredEdge> edges;
};

/// Maximum dissimilar matching among edges uncovered by t.
DissimilarMatching dissimilar_h(const BlowupGraph& g, const Tiling& t);

enum class MoveKind {
  kAddTriangle,
  kSplitTriangle,
  kEndgameReplace,
  kEndgameExchange,
  kEndgameGrow,
  kRotate,
};

std::string to_string(MoveKind kind);

struct Move {
  MoveKind kind = MoveKind::kAddTriangle;
  std::vector<TransversalCycle> removed;
  std::vector<TransversalCycle> added;
};

nlohmann::json move_to_json(const Move& m);

/// Removes `removed` from t and appends `added`; throws InvariantViolation
/// when a removed cycle is missing.
Tiling apply_move(const Tiling& t, const Move& m);

/// First size-increasing move found: an uncovered triangle, or a triangle
/// T0 and disjoint dissimilar uncovered edges e, f each completed by a
/// different vertex of T0.
std::optional<Move> find_improvement(const BlowupGraph& g, const Tiling& t);

/// (1 if some uncovered edge lies in G[B,C] else 0, largest dissimilar
/// matching among those containing such an edge when one exists).
std::pair<int, int> potential(const BlowupGraph& g, const Labelling& lab, const Tiling& t);

/// Same-size rotation that strictly increases the potential.
std::optional<Move> rotate(const BlowupGraph& g, const Labelling& lab, const Tiling& t);

/// Endgame move when no B-C edge is uncovered and the potential is (0, 2).
std::optional<Move> endgame(const BlowupGraph& g, const Labelling& lab, const Tiling& t);

/// Raised when near_factor3 hits its move cap or runs out of moves below n-1.
class Counterexample : public BudgetExhausted {
 public:
  Counterexample(const std::string& what, nlohmann::json artifact)
      : BudgetExhausted(what), artifact_(std::move(artifact)) {}
  const nlohmann::json& artifact() const { return artifact_; }

 private:
  nlohmann::json artifact_;
};

struct Swap3Result {
  Tiling tiling;
  std::vector<Move> trace;
};

/// Requires every pair degree >= n/2 and their sum >= 2n. The search starts
/// from `start` (empty by default).
Swap3Result near_factor3(const BlowupGraph& g, int iteration_cap = 10000, const Tiling& start = {});

}  // namespace ckb
