#include "ckb/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include <boost/container_hash/hash.hpp>
#include <fmt/format.h>

namespace ckb {

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(long budget_ms) : start_(Clock::now()), budget_ms_(budget_ms) {}

  bool passed() const {
    return budget_ms_ >= 0 && Clock::now() - start_ > std::chrono::milliseconds(budget_ms_);
  }
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_;
  long budget_ms_;
};

int global_id(const BlowupGraph& g, VertexRef v) { return (v.part - 1) * g.n() + v.index; }

// Greedy hitting set of the given cycles; an upper bound on how many of them
// can be pairwise disjoint.
int greedy_cover_size(const BlowupGraph& g, const std::vector<TransversalCycle>& cycles) {
  const int k = g.k();
  const int n = g.n();
  std::vector<int> hits(static_cast<std::size_t>(k) * n, 0);
  std::vector<std::vector<int>> incident(hits.size());
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    for (int p = 1; p <= k; ++p) {
      const int id = (p - 1) * n + cycles[c].members[p - 1];
      ++hits[id];
      incident[id].push_back(static_cast<int>(c));
    }
  }
  std::vector<char> dead(cycles.size(), 0);
  std::size_t remaining = cycles.size();
  int picked = 0;
  while (remaining > 0) {
    const int best = static_cast<int>(std::max_element(hits.begin(), hits.end()) - hits.begin());
    ++picked;
    for (int c : incident[best]) {
      if (dead[c]) continue;
      dead[c] = 1;
      --remaining;
      for (int p = 1; p <= k; ++p) --hits[(p - 1) * n + cycles[c].members[p - 1]];
    }
  }
  return picked;
}

class TilingSearch {
 public:
  TilingSearch(const BlowupGraph& g, const VertexMask& alive, long budget_ms)
      : g_(g), alive_(alive), deadline_(budget_ms) {}

  TilingResult run() {
    search();
    TilingResult out;
    out.tiling = best_;
    out.optimal = !timed_out_;
    out.nodes_expanded = nodes_;
    out.millis = deadline_.elapsed_ms();
    return out;
  }

 private:
  void search() {
    if (timed_out_) return;
    ++nodes_;
    if ((nodes_ & 63) == 0 && deadline_.passed()) {
      timed_out_ = true;
      return;
    }
    if (current_.size() > best_.size()) best_.cycles = current_;
    const int cur = static_cast<int>(current_.size());
    const int best = static_cast<int>(best_.size());
    int bound = g_.n();
    for (int p = 1; p <= g_.k(); ++p) bound = std::min(bound, alive_.count(p));
    if (cur + bound <= best) return;

    const auto cycles = all_cycles(g_, alive_);
    if (cycles.empty()) return;
    std::vector<Bitset> live(g_.k(), Bitset(g_.n()));
    for (const auto& c : cycles) {
      for (int p = 1; p <= g_.k(); ++p) live[p - 1].set(c.members[p - 1]);
    }
    bound = g_.n();
    for (const auto& l : live) bound = std::min<int>(bound, static_cast<int>(l.count()));
    if (cur + bound <= best) return;
    if (cur + greedy_cover_size(g_, cycles) <= best) return;

    // Branch on the lowest V_1 vertex that lies on some cycle; dead vertices of
    // V_1 are dropped first since no cycle can use them.
    const int v0 = static_cast<int>(live[0].find_first());
    Bitset dropped = alive_.part(1) - live[0];
    for (auto v = dropped.find_first(); v != Bitset::npos; v = dropped.find_next(v)) {
      alive_.set({1, static_cast<int>(v)}, false);
    }
    for (const auto& c : cycles) {
      if (c.members[0] < v0) continue;
      if (c.members[0] > v0) break;
      set_cycle(c, false);
      current_.push_back(c);
      search();
      current_.pop_back();
      set_cycle(c, true);
      if (timed_out_) break;
    }
    if (!timed_out_) {
      alive_.set({1, v0}, false);
      search();
      alive_.set({1, v0}, true);
    }
    for (auto v = dropped.find_first(); v != Bitset::npos; v = dropped.find_next(v)) {
      alive_.set({1, static_cast<int>(v)}, true);
    }
  }

  void set_cycle(const TransversalCycle& c, bool value) {
    for (int p = 1; p <= g_.k(); ++p) alive_.set(c.vertex(p), value);
  }

  const BlowupGraph& g_;
  VertexMask alive_;
  Deadline deadline_;
  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
  std::vector<TransversalCycle> current_;
  Tiling best_;
};

class CoverSearch {
 public:
  CoverSearch(const BlowupGraph& g, std::vector<TransversalCycle> cycles, long budget_ms)
      : g_(g),
        cycles_(std::move(cycles)),
        deadline_(budget_ms),
        chosen_(static_cast<std::size_t>(g.k()) * g.n(), 0),
        forbidden_(chosen_.size(), 0),
        hit_(cycles_.size(), 0),
        incident_(chosen_.size()) {
    for (std::size_t c = 0; c < cycles_.size(); ++c) {
      for (int p = 1; p <= g_.k(); ++p) incident_[id(c, p)].push_back(static_cast<int>(c));
    }
  }

  void run(std::vector<int> incumbent, int limit) {
    best_ = std::move(incumbent);
    limit_ = limit;
    search(0, 0);
  }

  const std::vector<int>& best() const { return best_; }
  bool timed_out() const { return timed_out_; }
  std::int64_t nodes() const { return nodes_; }
  double millis() const { return deadline_.elapsed_ms(); }

 private:
  int id(std::size_t c, int p) const { return (p - 1) * g_.n() + cycles_[c].members[p - 1]; }

  void search(std::size_t first, int size) {
    if (timed_out_) return;
    ++nodes_;
    if ((nodes_ & 255) == 0 && deadline_.passed()) {
      timed_out_ = true;
      return;
    }
    while (first < cycles_.size() && hit_[first] > 0) ++first;
    if (first == cycles_.size()) {
      best_.clear();
      for (std::size_t v = 0; v < chosen_.size(); ++v) {
        if (chosen_[v]) best_.push_back(static_cast<int>(v));
      }
      limit_ = size;
      return;
    }
    // Disjoint unhit cycles each need their own chosen vertex.
    std::vector<char> used(chosen_.size(), 0);
    int packing = 0;
    for (std::size_t c = first; c < cycles_.size(); ++c) {
      if (hit_[c] > 0) continue;
      bool free = true;
      bool open = false;
      for (int p = 1; p <= g_.k(); ++p) {
        free = free && !used[id(c, p)];
        open = open || !forbidden_[id(c, p)];
      }
      if (!open) return;
      if (!free) continue;
      ++packing;
      for (int p = 1; p <= g_.k(); ++p) used[id(c, p)] = 1;
    }
    if (size + packing >= limit_) return;

    std::vector<int> excluded;
    for (int p = 1; p <= g_.k() && !timed_out_; ++p) {
      const int v = id(first, p);
      if (forbidden_[v]) continue;
      choose(v, true);
      search(first + 1, size + 1);
      choose(v, false);
      forbidden_[v] = 1;
      excluded.push_back(v);
    }
    for (int v : excluded) forbidden_[v] = 0;
  }

  void choose(int v, bool value) {
    chosen_[v] = value;
    for (int c : incident_[v]) hit_[c] += value ? 1 : -1;
  }

  const BlowupGraph& g_;
  std::vector<TransversalCycle> cycles_;
  Deadline deadline_;
  std::vector<char> chosen_;
  std::vector<char> forbidden_;
  std::vector<int> hit_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> best_;
  int limit_ = 0;
  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
};

using SetKey = std::vector<int>;

struct SetKeyHash {
  std::size_t operator()(const SetKey& key) const { return boost::hash_range(key.begin(), key.end()); }
};

class LinkingCounter {
 public:
  LinkingCounter(const BlowupGraph& g, int t) : g_(g), t_(t), r_((t + 1) / g.k()) {
    if (t < 1 || (t + 1) % g.k() != 0) {
      throw PreconditionError(fmt::format("t + 1 = {} is not a positive multiple of k = {}", t + 1, g.k()));
    }
    // (r!)^(k-1) (r-1)! orderings of each admissible vertex set.
    for (int p = 1; p <= g.k(); ++p) {
      const int c = p == 1 ? r_ - 1 : r_;
      for (int j = 2; j <= c; ++j) multiplicity_ *= static_cast<std::uint64_t>(j);
    }
  }

  LinkingCount count(VertexRef v, VertexRef v2, std::uint64_t cap, std::size_t keep) {
    if (!g_.contains(v) || !g_.contains(v2)) throw PreconditionError("vertex out of range");
    if (v.part != v2.part) {
      throw PreconditionError(fmt::format("{} and {} lie in different parts", to_string(v), to_string(v2)));
    }
    v_ = v;
    v2_ = v2;
    cap_ = cap;
    keep_ = keep;
    result_ = LinkingCount{};
    chosen_.assign(g_.k(), {});
    select(1);
    return std::move(result_);
  }

 private:
  // Part offset s in 1..k maps to part v.part + s; offset k is v's own part.
  int part_at(int s) const {
    int p = v_.part;
    for (int j = 0; j < s; ++j) p = next_part(p, g_.k());
    return p;
  }

  bool select(int s) {
    if (s > g_.k()) return evaluate();
    const int p = part_at(s);
    const int need = s == g_.k() ? r_ - 1 : r_;
    std::vector<int> pool;
    for (int u = 0; u < g_.n(); ++u) {
      if (p == v_.part && (u == v_.index || u == v2_.index)) continue;
      pool.push_back(u);
    }
    auto& pick = chosen_[p - 1];
    pick.clear();
    return combine(pool, 0, need, s);
  }

  bool combine(const std::vector<int>& pool, std::size_t from, int need, int s) {
    auto& pick = chosen_[part_at(s) - 1];
    if (need == 0) return select(s + 1);
    for (std::size_t i = from; i + need <= pool.size(); ++i) {
      pick.push_back(pool[i]);
      const bool go_on = combine(pool, i + 1, need - 1, s);
      pick.pop_back();
      if (!go_on) return false;
    }
    return true;
  }

  bool evaluate() {
    if (!spans_factor(v_) || !spans_factor(v2_)) return true;
    result_.count += multiplicity_;
    if (result_.examples.size() < keep_) result_.examples.push_back(sequence());
    if (cap_ > 0 && result_.count >= cap_) {
      result_.count = cap_;
      result_.capped = true;
      return false;
    }
    return true;
  }

  LinkingSequence sequence() const {
    LinkingSequence seq;
    std::vector<std::size_t> next(g_.k(), 0);
    for (int j = 1; j <= t_; ++j) {
      const int p = part_at(j);
      seq.entries.push_back({p, chosen_[p - 1][next[p - 1]++]});
    }
    return seq;
  }

  bool spans_factor(VertexRef extra) {
    SetKey key;
    for (int p = 1; p <= g_.k(); ++p) {
      for (int u : chosen_[p - 1]) key.push_back(global_id(g_, {p, u}));
    }
    key.push_back(global_id(g_, extra));
    std::sort(key.begin(), key.end());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    VertexMask mask(g_.k(), g_.n());
    for (int id : key) mask.set({id / g_.n() + 1, id % g_.n()});
    const bool ok = has_factor(g_, mask);
    memo_.emplace(std::move(key), ok);
    return ok;
  }

  const BlowupGraph& g_;
  int t_;
  int r_;
  std::uint64_t multiplicity_ = 1;
  VertexRef v_;
  VertexRef v2_;
  std::uint64_t cap_ = 0;
  std::size_t keep_ = 0;
  LinkingCount result_;
  std::vector<std::vector<int>> chosen_;
  std::unordered_map<SetKey, bool, SetKeyHash> memo_;
};

}  // namespace

bool for_each_cycle_through(const BlowupGraph& g, const VertexMask& alive, int v0,
                            const std::function<bool(const TransversalCycle&)>& f) {
  const int k = g.k();
  if (!alive.test({1, v0})) return true;
  const Bitset closing = g.neighbors({1, v0}, k) & alive.part(k);
  if (closing.none()) return true;
  TransversalCycle c{std::vector<int>(k, 0)};
  c.members[0] = v0;
  std::vector<Bitset> level(k + 1);
  std::function<bool(int)> extend = [&](int p) {
    level[p] = g.neighbors({p - 1, c.members[p - 2]}, p) & alive.part(p);
    if (p == k) level[p] &= closing;
    const Bitset& cand = level[p];
    for (auto w = cand.find_first(); w != Bitset::npos; w = cand.find_next(w)) {
      c.members[p - 1] = static_cast<int>(w);
      if (p == k ? !f(c) : !extend(p + 1)) return false;
    }
    return true;
  };
  return extend(2);
}

std::vector<TransversalCycle> all_cycles(const BlowupGraph& g, const VertexMask& alive) {
  std::vector<TransversalCycle> out;
  const Bitset& first = alive.part(1);
  for (auto v = first.find_first(); v != Bitset::npos; v = first.find_next(v)) {
    for_each_cycle_through(g, alive, static_cast<int>(v), [&](const TransversalCycle& c) {
      out.push_back(c);
      return true;
    });
  }
  return out;
}

std::vector<TransversalCycle> all_cycles(const BlowupGraph& g) {
  return all_cycles(g, VertexMask(g.k(), g.n(), true));
}

bool has_cycle(const BlowupGraph& g, const VertexMask& alive) {
  const Bitset& first = alive.part(1);
  for (auto v = first.find_first(); v != Bitset::npos; v = first.find_next(v)) {
    const bool exhausted = for_each_cycle_through(g, alive, static_cast<int>(v),
                                                  [](const TransversalCycle&) { return false; });
    if (!exhausted) return true;
  }
  return false;
}

TilingResult max_tiling(const BlowupGraph& g, const VertexMask& alive, long time_budget_ms) {
  return TilingSearch(g, alive, time_budget_ms).run();
}

TilingResult max_tiling(const BlowupGraph& g, long time_budget_ms) {
  return max_tiling(g, VertexMask(g.k(), g.n(), true), time_budget_ms);
}

bool has_factor(const BlowupGraph& g, const VertexMask& alive) {
  const int c = alive.count(1);
  for (int p = 2; p <= g.k(); ++p) {
    if (alive.count(p) != c) throw PreconditionError("vertex set is not balanced across parts");
  }
  if (c == 0) return true;
  return static_cast<int>(max_tiling(g, alive).tiling.size()) == c;
}

bool is_cover(const BlowupGraph& g, std::span<const VertexRef> z) {
  VertexMask alive(g.k(), g.n(), true);
  for (const VertexRef& v : z) {
    if (!g.contains(v)) throw PreconditionError(fmt::format("vertex {} out of range", to_string(v)));
    alive.set(v, false);
  }
  return !has_cycle(g, alive);
}

CoverResult cover_number(const BlowupGraph& g, int upper_hint, long time_budget_ms) {
  auto cycles = all_cycles(g);
  // The live vertices of any one part already form a cover.
  std::vector<Bitset> live(g.k(), Bitset(g.n()));
  for (const auto& c : cycles) {
    for (int p = 1; p <= g.k(); ++p) live[p - 1].set(c.members[p - 1]);
  }
  int part = 1;
  for (int p = 2; p <= g.k(); ++p) {
    if (live[p - 1].count() < live[part - 1].count()) part = p;
  }
  std::vector<int> incumbent;
  for (auto v = live[part - 1].find_first(); v != Bitset::npos; v = live[part - 1].find_next(v)) {
    incumbent.push_back(global_id(g, {part, static_cast<int>(v)}));
  }
  int limit = static_cast<int>(incumbent.size());
  if (upper_hint > 0) limit = std::min(limit, upper_hint + 1);

  CoverSearch search(g, std::move(cycles), time_budget_ms);
  search.run(std::move(incumbent), limit);
  CoverResult out;
  for (int id : search.best()) out.witness.push_back({id / g.n() + 1, id % g.n()});
  out.size = static_cast<int>(out.witness.size());
  out.optimal = !search.timed_out();
  out.nodes_expanded = search.nodes();
  out.millis = search.millis();
  return out;
}

int independence_number(const BlowupGraph& g) {
  const int k = g.k();
  const int n = g.n();
  const int total = k * n;
  std::vector<Bitset> adj(total, Bitset(total));
  for (const Edge& e : g.edges()) {
    const int a = global_id(g, {e.part, e.u});
    const int b = global_id(g, {next_part(e.part, k), e.w});
    adj[a].set(b);
    adj[b].set(a);
  }
  int best = n;
  std::function<void(const Bitset&, int)> solve = [&](const Bitset& cand, int size) {
    const int count = static_cast<int>(cand.count());
    if (size + count <= best) return;
    int pivot = -1;
    std::size_t pivot_degree = 0;
    for (auto v = cand.find_first(); v != Bitset::npos; v = cand.find_next(v)) {
      const std::size_t d = (adj[v] & cand).count();
      if (pivot == -1 || d > pivot_degree) {
        pivot = static_cast<int>(v);
        pivot_degree = d;
      }
    }
    if (pivot_degree == 0) {
      best = std::max(best, size + count);
      return;
    }
    Bitset with = cand - adj[pivot];
    with.reset(pivot);
    solve(with, size + 1);
    Bitset without = cand;
    without.reset(pivot);
    solve(without, size);
  };
  Bitset all(total);
  all.set();
  solve(all, 0);
  return best;
}

LinkingCount enumerate_linking(const BlowupGraph& g, VertexRef v, VertexRef v2, int t,
                               std::uint64_t cap, std::size_t keep) {
  return LinkingCounter(g, t).count(v, v2, cap, keep);
}

bool is_linking_sequence(const BlowupGraph& g, VertexRef v, VertexRef v2,
                         const LinkingSequence& seq) {
  const int k = g.k();
  const int t = static_cast<int>(seq.entries.size());
  if (v.part != v2.part || t < 1 || (t + 1) % k != 0) return false;
  VertexMask base(k, g.n());
  int p = v.part;
  for (const VertexRef& e : seq.entries) {
    p = next_part(p, k);
    if (!g.contains(e) || e.part != p || e == v || e == v2 || base.test(e)) return false;
    base.set(e);
  }
  VertexMask with_v = base;
  with_v.set(v);
  VertexMask with_v2 = base;
  with_v2.set(v2);
  return has_factor(g, with_v) && has_factor(g, with_v2);
}

LinkedResult is_linked(const BlowupGraph& g, double eta, int t, double max_work) {
  const int k = g.k();
  const int n = g.n();
  if (t < 1 || (t + 1) % k != 0) {
    throw PreconditionError(fmt::format("t + 1 = {} is not a positive multiple of k = {}", t + 1, k));
  }
  const int r = (t + 1) / k;
  auto choose = [](int a, int b) {
    double c = 1;
    for (int j = 0; j < b; ++j) c = c * (a - j) / (j + 1);
    return b < 0 || b > a ? 0.0 : c;
  };
  const double work = k * (n * (n + 1) / 2.0) * std::pow(choose(n, r), k - 1) * choose(n, r - 1);
  if (work > max_work) {
    throw BudgetExhausted(fmt::format("linkedness check needs about {:.3g} set checks (limit {:.3g})",
                                      work, max_work));
  }
  LinkedResult out;
  out.threshold = eta * std::pow(static_cast<double>(n), t);
  bool first = true;
  LinkingCounter counter(g, t);
  for (int p = 1; p <= k; ++p) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const std::uint64_t c = counter.count({p, a}, {p, b}, 0, 0).count;
        if (first || c < out.min_count) {
          first = false;
          out.min_count = c;
          out.v = {p, a};
          out.v2 = {p, b};
        }
      }
    }
  }
  out.linked = static_cast<double>(out.min_count) >= out.threshold;
  return out;
}

}  // namespace ckb
