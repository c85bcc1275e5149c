#include "ckb/matching.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include <fmt/format.h>

namespace ckb {

namespace {

constexpr int kUnmatched = -1;
constexpr int kInf = std::numeric_limits<int>::max();

// Hopcroft-Karp state over masked rows. match_left[u] / match_right[w] hold the
// partner or kUnmatched.
class HopcroftKarp {
 public:
  HopcroftKarp(std::span<const Bitset> rows, const Bitset& left, const Bitset& right)
      : rows_(rows),
        left_(left),
        right_(right),
        match_left_(rows.size(), kUnmatched),
        match_right_(right.size(), kUnmatched),
        dist_(rows.size(), kInf) {}

  void run() {
    while (bfs()) {
      for (auto u = left_.find_first(); u != Bitset::npos; u = left_.find_next(u)) {
        if (match_left_[u] == kUnmatched) dfs(static_cast<int>(u));
      }
    }
  }

  Matching result() const {
    Matching m;
    for (auto u = left_.find_first(); u != Bitset::npos; u = left_.find_next(u)) {
      if (match_left_[u] != kUnmatched) m.pairs.push_back({static_cast<int>(u), match_left_[u]});
    }
    return m;
  }

  // Left vertices reachable from free left vertices by alternating paths.
  std::vector<int> alternating_reach() const {
    std::vector<char> seen(rows_.size(), 0);
    std::deque<int> queue;
    for (auto u = left_.find_first(); u != Bitset::npos; u = left_.find_next(u)) {
      if (match_left_[u] == kUnmatched) {
        seen[u] = 1;
        queue.push_back(static_cast<int>(u));
      }
    }
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for_each_neighbor(u, [&](int w) {
        const int next = match_right_[w];
        if (next != kUnmatched && !seen[next]) {
          seen[next] = 1;
          queue.push_back(next);
        }
      });
    }
    std::vector<int> out;
    for (std::size_t u = 0; u < seen.size(); ++u) {
      if (seen[u]) out.push_back(static_cast<int>(u));
    }
    return out;
  }

 private:
  template <typename F>
  void for_each_neighbor(int u, F&& f) const {
    const Bitset& row = rows_[u];
    for (auto w = row.find_first(); w != Bitset::npos; w = row.find_next(w)) {
      if (right_.test(w)) f(static_cast<int>(w));
    }
  }

  bool bfs() {
    std::deque<int> queue;
    std::fill(dist_.begin(), dist_.end(), kInf);
    for (auto u = left_.find_first(); u != Bitset::npos; u = left_.find_next(u)) {
      if (match_left_[u] == kUnmatched) {
        dist_[u] = 0;
        queue.push_back(static_cast<int>(u));
      }
    }
    bool found_free = false;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for_each_neighbor(u, [&](int w) {
        const int next = match_right_[w];
        if (next == kUnmatched) {
          found_free = true;
        } else if (dist_[next] == kInf) {
          dist_[next] = dist_[u] + 1;
          queue.push_back(next);
        }
      });
    }
    return found_free;
  }

  bool dfs(int u) {
    const Bitset& row = rows_[u];
    for (auto w = row.find_first(); w != Bitset::npos; w = row.find_next(w)) {
      if (!right_.test(w)) continue;
      const int next = match_right_[w];
      if (next == kUnmatched || (dist_[next] == dist_[u] + 1 && dfs(next))) {
        match_left_[u] = static_cast<int>(w);
        match_right_[w] = u;
        return true;
      }
    }
    dist_[u] = kInf;
    return false;
  }

  std::span<const Bitset> rows_;
  const Bitset& left_;
  const Bitset& right_;
  std::vector<int> match_left_;
  std::vector<int> match_right_;
  std::vector<int> dist_;
};

}  // namespace

Matching bipartite_max_matching(std::span<const Bitset> rows, const Bitset& left,
                                const Bitset& right) {
  HopcroftKarp hk(rows, left, right);
  hk.run();
  return hk.result();
}

std::optional<std::vector<int>> bipartite_hall_violator(std::span<const Bitset> rows,
                                                        const Bitset& left,
                                                        const Bitset& right) {
  if (left.count() != right.count()) {
    throw PreconditionError(fmt::format("Hall check needs balanced sides, got {} and {}",
                                        left.count(), right.count()));
  }
  HopcroftKarp hk(rows, left, right);
  hk.run();
  if (hk.result().size() == left.count()) return std::nullopt;
  // Koenig: the free left vertices plus everything they reach by alternating
  // paths have only matched right neighbours, one fewer per free vertex.
  return hk.alternating_reach();
}

Matching max_matching(const BlowupGraph& g, int i, const Bitset& left, const Bitset& right) {
  return bipartite_max_matching(g.forward_rows(i), left, right);
}

std::optional<std::vector<int>> hall_violator(const BlowupGraph& g, int i, const Bitset& left,
                                              const Bitset& right) {
  return bipartite_hall_violator(g.forward_rows(i), left, right);
}

BipartiteGraph BipartiteGraph::from_edges(int n, std::span<const MatchedPair> edges) {
  BipartiteGraph h{n, std::vector<Bitset>(n, Bitset(n))};
  for (const auto& e : edges) {
    if (e.left < 0 || e.left >= n || e.right < 0 || e.right >= n) {
      throw PreconditionError(fmt::format("edge ({}, {}) out of range", e.left, e.right));
    }
    h.rows[e.left].set(e.right);
  }
  return h;
}

BipartiteGraph BipartiteGraph::complete(int n) {
  BipartiteGraph h{n, std::vector<Bitset>(n, Bitset(n))};
  for (auto& row : h.rows) row.set();
  return h;
}

int BipartiteGraph::min_degree() const {
  int best = n;
  std::vector<int> right_degree(n, 0);
  for (const auto& row : rows) {
    best = std::min(best, static_cast<int>(row.count()));
    for (auto w = row.find_first(); w != Bitset::npos; w = row.find_next(w)) ++right_degree[w];
  }
  for (int d : right_degree) best = std::min(best, d);
  return best;
}

SimultaneousMatching simultaneous_matching(const BipartiteGraph& h, const BipartiteGraph& h2) {
  if (h.n != h2.n) {
    throw PreconditionError(fmt::format("graphs on {} and {} vertices per side", h.n, h2.n));
  }
  std::vector<Bitset> common(h.n);
  for (int u = 0; u < h.n; ++u) common[u] = h.rows[u] & h2.rows[u];
  Bitset all(h.n);
  all.set();
  SimultaneousMatching out;
  out.matching = bipartite_max_matching(common, all, all);
  out.perfect = static_cast<int>(out.matching.size()) == h.n;
  if (!out.perfect) out.violator = *bipartite_hall_violator(common, all, all);
  return out;
}

}  // namespace ckb
