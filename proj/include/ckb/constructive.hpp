#pragma once

// The randomized tiling pipeline: the one-round tiler, absorbing sets built
// from linking sequences, and the driver that combines them into a factor.
//
// All randomness comes from the generator passed in.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ckb/core.hpp"

namespace ckb {

using Rng = std::mt19937_64;

/// Pools for one round. U[i-1] and W[i-1] are disjoint index lists inside
/// V_i, each of size m*k.
struct RoundState {
  std::vector<std::vector<int>> U;
  std::vector<std::vector<int>> W;
  int m = 0;
  double sigma = 0;
};

struct RoundResult {
  Tiling tiling;
  /// (U_i + W_i) minus the tiling, per part, sorted.
  std::vector<std::vector<int>> next_pools;
  /// paths[j-1] lists the m paths closed through W_j; each path holds the
  /// vertices in parts j+1, ..., j-1 in that order.
  std::vector<std::vector<std::vector<VertexRef>>> paths;
  /// Split attempts used, summed over parts.
  int split_attempts = 0;
};

/// Whether 2 d(v, pool) >= factor * size for every v next to `part`. Returns
/// the first failing vertex otherwise.
std::optional<VertexRef> degree_deficit(const BlowupGraph& g, int part, const std::vector<int>& pool,
                                        double factor);

/// One round: a tiling of size mk inside the pools and the next pools.
/// Throws PreconditionError when (C1)/(C2) fail, BudgetExhausted when no
/// admissible split is found in `retries` attempts.
RoundResult round_tiling(const BlowupGraph& g, const RoundState& state, Rng& rng, int retries = 50);

enum class AbsorberMode { kGreedy, kFaithful };

struct AbsorberOptions {
  double eta = 0.05;
  /// 0 selects k - 1.
  int t = 0;
  double sigma = 0.05;
  AbsorberMode mode = AbsorberMode::kGreedy;
  /// Lower bound on the number of gadgets (greedy mode).
  int min_gadgets = 0;
  /// Transversals, as index per part, the absorber must serve. Empty means
  /// `probe_count` random transversals.
  std::vector<std::vector<int>> probes;
  int probe_count = 8;
  int retries = 50;
  /// Pairs and tuples per pair for the sampled linkedness check; 0 pairs skips it.
  int link_pairs = 6;
  int link_samples = 400;
};

/// A member of the retained family: a cycle c plus (c_i, u_i, t)-linking
/// sequences. In sequence order, position j lies in part ((j-1) mod k) + 1.
struct Gadget {
  std::vector<VertexRef> sequence;
};

struct AbsorberSet {
  VertexMask vertices;
  std::vector<Gadget> gadgets;
  /// |A intersect V_i|.
  int z = 0;
  double eta = 0;
  int t = 0;
  double sigma = 0;
  int ell = 0;
};

/// Estimated minimum linking count over sampled same-part pairs, relative to
/// n^t.
double sampled_linkedness(const BlowupGraph& g, int t, int pairs, int samples, Rng& rng);

/// Whether G[gadget + u] has a transversal factor, u a transversal given by
/// index per part and disjoint from the gadget.
bool gadget_absorbs(const BlowupGraph& g, const Gadget& gadget, const std::vector<int>& u);

AbsorberSet build_absorber(const BlowupGraph& g, const AbsorberOptions& options, Rng& rng);

/// A transversal factor of G[A + W] assembled from gadget assignments, with
/// max_tiling as fallback. W is given per part and must be balanced and
/// disjoint from A.
std::optional<Tiling> absorb(const BlowupGraph& g, const AbsorberSet& a,
                             const std::vector<std::vector<int>>& w, long fallback_budget_ms = 2000);

bool verify_absorber(const BlowupGraph& g, const AbsorberSet& a, std::span<const VertexRef> w);

struct AsympOptions {
  double eta = 0.05;
  double sigma = 0.05;
  int retries = 50;
  /// 0 selects max(floor(sigma^2 n / 2k), floor(n / (k(2t + 5)))).
  int m = 0;
  /// 0 selects k - 1.
  int t = 0;
  long fallback_budget_ms = 5000;
};

struct StageLog {
  std::string stage;
  int attempts = 0;
  int size = 0;
};

struct AsympResult {
  bool ok = false;
  Tiling factor;
  /// Stage that ran out of budget when ok is false.
  std::string failed_stage;
  std::string message;
  std::vector<StageLog> log;
  int m = 0;
  int rounds = 0;
  int z = 0;
};

/// Requires delta* >= (1 + 1/k + epsilon) n / 2; throws PreconditionError
/// otherwise. Never returns an invalid tiling.
AsympResult asymp_factor(const BlowupGraph& g, double epsilon, Rng& rng,
                         const AsympOptions& options = {});

}  // namespace ckb
