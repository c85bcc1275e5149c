// ckb: command-line front end for the blow-up tiling library.
//
// Exit codes: 0 success, 1 usage or input error, 2 precondition failure,
// 3 budget exhausted (including swap3 counterexamples and undecided boxes).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ckb/constructive.hpp"
#include "ckb/core.hpp"
#include "ckb/exact.hpp"
#include "ckb/generators.hpp"
#include "ckb/inequality.hpp"
#include "ckb/io.hpp"
#include "ckb/swap3.hpp"

using namespace ckb;
using json = nlohmann::json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitBudget = 3;

// Missing or inconsistent flags that CLI11 cannot express; exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void fail_line(const std::string& kind, const std::string& stage, const std::string& message) {
  std::cerr << json{{"error", kind}, {"stage", stage}, {"message", message}}.dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("malformed JSON in {} at byte {}: {}", path, e.byte, e.what()));
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw FormatError("not an integer list: '" + s + "'");
    }
  }
  return out;
}

VertexRef parse_vertex(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw FormatError("vertex must be part:index, got '" + s + "'");
  try {
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw FormatError("vertex must be part:index, got '" + s + "'");
  }
}

json vertices_json(const std::vector<VertexRef>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back({v.part, v.index});
  return out;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string family;
  int k = 3;
  int n = 0;
  int m = 1;
  std::string ratio = "7/9";
  std::string deltas;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string blocks;
};

int cmd_generate(const GenerateArgs& a) {
  std::optional<BlowupGraph> g;
  Blocks blocks;
  if (a.family == "complete") {
    g.emplace(complete_blowup(a.k, a.n));
  } else if (a.family == "haggkvist") {
    auto ex = haggkvist_example(a.k, a.m);
    blocks = ex.blocks;
    blocks["Z"] = haggkvist_cover(ex, a.k);
    g.emplace(std::move(ex.graph));
  } else if (a.family == "cover") {
    const auto slash = a.ratio.find('/');
    if (slash == std::string::npos) throw FormatError("--ratio must be p/q");
    auto ex = cover_example(std::stol(a.ratio.substr(0, slash)), std::stol(a.ratio.substr(slash + 1)));
    blocks = ex.blocks;
    blocks["cover"] = ex.cover;
    g.emplace(std::move(ex.graph));
  } else {
    if (!a.seed) throw UsageError("--family random requires --seed");
    g.emplace(random_min_degree(a.k, a.n, parse_int_list(a.deltas), *a.seed));
  }
  write_text(a.out, write_graph(*g));
  if (!blocks.empty()) {
    std::string path = a.blocks;
    if (path.empty() && !a.out.empty() && a.out != "-") {
      path = a.out;
      if (path.size() > 5 && path.ends_with(".json")) path.resize(path.size() - 5);
      path += ".blocks.json";
    }
    if (!path.empty()) write_text(path, blocks_to_json(blocks).dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const std::string& file, double epsilon, bool as_json) {
  const BlowupGraph g = load_graph_file(file);
  const int k = g.k(), n = g.n();
  const DegreeProfile p = degree_profile(g);
  long sum = 0;
  bool halves = true;
  for (int d : p.deltas) {
    sum += d;
    halves = halves && 2 * d >= n;
  }
  // delta* >= (1 + 1/k) n / 2 + 1, cleared of denominators.
  const bool conjecture = 2L * k * p.delta_star >= static_cast<long>(k + 1) * n + 2L * k;
  // The two triangle bounds only apply when k = 3.
  const bool triangle = k == 3;
  const bool average = halves && static_cast<double>(sum) >= (2 + 3 * epsilon) * n;
  const bool swap = halves && sum >= 2L * n;
  if (as_json) {
    json j{{"k", k},
           {"n", n},
           {"deltas", p.deltas},
           {"delta_star", p.delta_star},
           {"conjecture_bound", conjecture},
           {"average_bound", triangle ? json(average) : json(nullptr)},
           {"sum_bound", triangle ? json(swap) : json(nullptr)}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  auto verdict = [triangle](bool b) -> std::string { return !triangle ? "n/a (k != 3)" : b ? "holds" : "NOT met"; };
  std::cout << fmt::format("k = {}, n = {}\n", k, n);
  std::cout << "deltas:";
  for (int d : p.deltas) std::cout << ' ' << d;
  std::cout << fmt::format("\ndelta* = {}\n", p.delta_star);
  std::cout << fmt::format("delta* >= (1+1/k)n/2 + 1 = {:.4g}: {}\n",
                           (1.0 + 1.0 / k) * n / 2 + 1, conjecture ? "holds" : "NOT met");
  std::cout << fmt::format("all delta_i >= n/2 and mean delta_i >= (2/3+{})n: {}\n", epsilon, verdict(average));
  std::cout << fmt::format("all delta_i >= n/2 and delta_1+delta_2+delta_3 >= 2n: {}\n", verdict(swap));
  return 0;
}

// ---------------------------------------------------------------------------
// tile

struct TileArgs {
  std::string file;
  bool exact = false;
  bool constructive = false;
  bool swap3 = false;
  long budget_ms = -1;
  double epsilon = 0.25;
  double eta = 0.05;
  double sigma = 0.05;
  int retries = 50;
  std::optional<std::uint64_t> seed;
  int cap = 10000;
  std::string start;
  std::string artifact;
  std::string out;
};

int cmd_tile(const TileArgs& a) {
  const BlowupGraph g = load_graph_file(a.file);
  if (a.exact + a.constructive + a.swap3 != 1) {
    throw FormatError("choose exactly one of --exact, --constructive, --swap3");
  }
  if (a.exact) {
    const TilingResult r = max_tiling(g, a.budget_ms);
    json j{{"size", r.tiling.size()},
           {"witness", tiling_to_json(r.tiling)},
           {"optimal", r.optimal},
           {"nodes_expanded", r.nodes_expanded},
           {"millis", r.millis}};
    write_text(a.out, j.dump() + "\n");
    return 0;
  }
  if (a.constructive) {
    if (!a.seed) throw UsageError("--constructive requires --seed");
    Rng rng(*a.seed);
    AsympOptions opt;
    opt.eta = a.eta;
    opt.sigma = a.sigma;
    opt.retries = a.retries;
    const AsympResult r = asymp_factor(g, a.epsilon, rng, opt);
    json log = json::array();
    for (const auto& s : r.log) log.push_back({{"stage", s.stage}, {"attempts", s.attempts}, {"size", s.size}});
    json j{{"ok", r.ok}, {"m", r.m}, {"rounds", r.rounds}, {"z", r.z}, {"log", log}};
    if (r.ok) j["factor"] = tiling_to_json(r.factor);
    write_text(a.out, j.dump() + "\n");
    if (!r.ok) {
      fail_line("budget", r.failed_stage, r.message);
      return kExitBudget;
    }
    return 0;
  }
  Tiling start;
  if (!a.start.empty()) start = tiling_from_json(read_json_file(a.start));
  std::string lines;
  try {
    const Swap3Result r = near_factor3(g, a.cap, start);
    for (const Move& m : r.trace) lines += move_to_json(m).dump() + "\n";
    lines += json{{"size", r.tiling.size()}, {"moves", r.trace.size()}, {"tiling", tiling_to_json(r.tiling)}}.dump() +
             "\n";
    write_text(a.out, lines);
    return 0;
  } catch (const Counterexample& e) {
    write_text(a.artifact.empty() ? "swap3-counterexample.json" : a.artifact, e.artifact().dump(2) + "\n");
    throw;
  }
}

// ---------------------------------------------------------------------------
// cover, linking, dot, normalize

int cmd_cover(const std::string& file, int hint, long budget_ms, const std::string& out) {
  const BlowupGraph g = load_graph_file(file);
  const CoverResult r = cover_number(g, hint, budget_ms);
  json j{{"size", r.size},
         {"witness", vertices_json(r.witness)},
         {"optimal", r.optimal},
         {"nodes_expanded", r.nodes_expanded},
         {"millis", r.millis}};
  write_text(out, j.dump() + "\n");
  return r.optimal ? 0 : kExitBudget;
}

int cmd_linking(const std::string& file, const std::string& v, const std::string& v2, int t, double eta,
                std::uint64_t cap, std::size_t keep, const std::string& out) {
  const BlowupGraph g = load_graph_file(file);
  const auto start = std::chrono::steady_clock::now();
  json j;
  if (!v.empty()) {
    const LinkingCount c = enumerate_linking(g, parse_vertex(v), parse_vertex(v2.empty() ? v : v2), t, cap, keep);
    json examples = json::array();
    for (const auto& s : c.examples) examples.push_back(vertices_json(s.entries));
    j = {{"count", c.count}, {"capped", c.capped}, {"examples", examples}};
  } else {
    const LinkedResult r = is_linked(g, eta, t);
    j = {{"linked", r.linked},
         {"v", {r.v.part, r.v.index}},
         {"v2", {r.v2.part, r.v2.index}},
         {"min_count", r.min_count},
         {"threshold", r.threshold}};
  }
  j["millis"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  write_text(out, j.dump() + "\n");
  return 0;
}

int cmd_dot(const std::string& file, const std::string& tiling, const std::string& out) {
  const BlowupGraph g = load_graph_file(file);
  if (tiling.empty()) {
    write_text(out, to_dot(g));
    return 0;
  }
  json doc = read_json_file(tiling);
  if (doc.is_object() && doc.contains("witness")) doc = doc.at("witness");
  if (doc.is_object() && doc.contains("tiling")) doc = doc.at("tiling");
  const Tiling t = tiling_from_json(doc);
  write_text(out, to_dot(g, &t));
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const std::vector<std::string>& lemmas, int depth, const std::string& margin_text, int grid,
               const std::string& certificate, const std::string& out) {
  if (!certificate.empty()) {
    // Accepts a bare certificate or the report written by an earlier verify.
    const json doc = read_json_file(certificate);
    std::vector<json> found;
    for (const json& j : doc.is_array() ? doc : json::array({doc})) {
      found.push_back(j.contains("certificate") ? j.at("certificate") : j);
    }
    int code = 0;
    for (const json& j : found) {
      const Certificate c = certificate_from_json(j);
      std::string why;
      const bool ok = verify_certificate(c, &why);
      std::cout << json{{"lemma", c.lemma}, {"valid", ok}, {"reason", why}}.dump() << "\n";
      if (!ok) code = kExitInput;
    }
    return code;
  }
  const Rational margin = rational_from_string(margin_text);
  json results = json::array();
  int code = 0;
  for (const std::string& id : lemmas) {
    const LemmaSystem s = lemma_system(id, margin);
    const CertifyResult r = certify_infeasible(s, depth);
    json j{{"lemma", id}, {"certified", r.certified}, {"boxes", r.boxes}, {"millis", r.millis}};
    if (r.certificate) j["certificate"] = certificate_to_json(*r.certificate);
    if (r.feasible_point) {
      j["feasible_point"] = point_to_json(*r.feasible_point, s.root);
      fail_line("feasible", id, "found a point satisfying every constraint");
      code = std::max(code, kExitInput);
    }
    if (r.undecided) {
      j["undecided"] = box_to_json(*r.undecided);
      fail_line("budget", id, fmt::format("undecided box at depth {}", depth));
      code = std::max(code, kExitBudget);
    }
    if (grid > 0) {
      const GridResult gr = grid_scan(s, grid);
      j["grid"] = {{"resolution", grid},
                   {"violation", to_string(gr.violation)},
                   {"point", point_to_json(gr.point, s.root)},
                   {"nodes", gr.nodes}};
    }
    results.push_back(std::move(j));
  }
  write_text(out, (results.size() == 1 ? results[0] : results).dump(2) + "\n");
  return code;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  int k = 3;
  int n = 9;
  std::string from;
  std::string to;
  int step = 1;
  int trials = 10;
  std::optional<std::uint64_t> seed;
  std::string tiler = "exact";
  long budget_ms = 2000;
  double epsilon = 0.25;
  int threads = 0;
  double max_seconds = 3600;
  std::string out;
};

struct Trial {
  bool factor = false;
  int size = 0;
  double millis = 0;
};

Trial run_trial(const ExperimentArgs& a, const std::vector<int>& deltas, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const BlowupGraph g = random_min_degree(a.k, a.n, deltas, seed);
  Trial t;
  try {
    if (a.tiler == "exact") {
      t.size = static_cast<int>(max_tiling(g, a.budget_ms).tiling.size());
    } else if (a.tiler == "swap3") {
      t.size = static_cast<int>(near_factor3(g).tiling.size());
    } else {
      Rng rng(seed);
      const AsympResult r = asymp_factor(g, a.epsilon, rng);
      t.size = r.ok ? static_cast<int>(r.factor.size()) : 0;
    }
  } catch (const Counterexample& e) {
    t.size = static_cast<int>(e.artifact().at("tiling").size());
  } catch (const PreconditionError&) {
    t.size = 0;
  } catch (const BudgetExhausted&) {
    t.size = 0;
  }
  t.factor = t.size == a.n;
  t.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return t;
}

int cmd_experiment(ExperimentArgs a) {
  if (!a.seed) throw UsageError("experiment requires --seed");
  if (a.tiler != "exact" && a.tiler != "swap3" && a.tiler != "constructive") {
    throw FormatError("--tiler must be exact, swap3 or constructive");
  }
  const auto lo = parse_int_list(a.from);
  const auto hi = parse_int_list(a.to.empty() ? a.from : a.to);
  if (static_cast<int>(lo.size()) != a.k || static_cast<int>(hi.size()) != a.k) {
    throw FormatError(fmt::format("--from and --to need {} comma-separated values", a.k));
  }
  if (a.step < 1 || a.trials < 1) throw FormatError("--step and --trials must be positive");
  for (int i = 0; i < a.k; ++i) {
    if (lo[i] < 0 || hi[i] > a.n || lo[i] > hi[i]) throw FormatError("grid bounds must satisfy 0 <= from <= to <= n");
  }
  std::vector<std::vector<int>> points{{}};
  for (int i = 0; i < a.k; ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& p : points) {
      for (int d = lo[i]; d <= hi[i]; d += a.step) {
        next.push_back(p);
        next.back().push_back(d);
      }
    }
    points = std::move(next);
  }
  const unsigned threads = a.threads > 0 ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  const double per_trial_s = a.tiler == "exact" ? a.budget_ms / 1000.0 : a.tiler == "swap3" ? 0.05 : 10.0;
  const double estimate = static_cast<double>(points.size()) * a.trials * per_trial_s / threads;
  if (estimate > a.max_seconds) {
    fail_line("budget", "experiment",
              fmt::format("grid of {} points x {} trials may take up to {:.0f} s (limit {:.0f} s)", points.size(),
                          a.trials, estimate, a.max_seconds));
    return kExitBudget;
  }

  const std::size_t jobs = points.size() * a.trials;
  std::vector<Trial> results(jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr error;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < jobs; j = next++) {
        try {
          results[j] = run_trial(a, points[j / a.trials], *a.seed + j % a.trials);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::string csv = "k,n";
  for (int i = 1; i <= a.k; ++i) csv += fmt::format(",delta_{}", i);
  csv += ",trials,factor_rate,mean_size,mean_millis\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    double factors = 0, size = 0, millis = 0;
    for (int t = 0; t < a.trials; ++t) {
      const Trial& r = results[p * a.trials + t];
      factors += r.factor;
      size += r.size;
      millis += r.millis;
    }
    csv += fmt::format("{},{}", a.k, a.n);
    for (int d : points[p]) csv += fmt::format(",{}", d);
    csv += fmt::format(",{},{:.6g},{:.6g},{:.6g}\n", a.trials, factors / a.trials, size / a.trials, millis / a.trials);
  }
  write_text(a.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transversal cycle tilings of blow-up graphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a generated graph as JSON");
  generate->add_option("--family", gen.family, "complete | haggkvist | cover | random")
      ->required()
      ->check(CLI::IsMember({"complete", "haggkvist", "cover", "random"}));
  generate->add_option("--k", gen.k, "Cycle length");
  generate->add_option("--n", gen.n, "Part size (complete, random)");
  generate->add_option("--m", gen.m, "Block size (haggkvist)");
  generate->add_option("--ratio", gen.ratio, "gamma as p/q in (3/4, 7/9] (cover)");
  generate->add_option("--deltas", gen.deltas, "Comma-separated pair degrees (random)");
  generate->add_option("--seed", gen.seed, "Seed (random)");
  generate->add_option("--out", gen.out, "Output file (default stdout)");
  generate->add_option("--blocks", gen.blocks, "Sidecar file for named vertex blocks");

  std::string file;
  double check_eps = 0;
  bool check_json = false;
  auto* check = app.add_subcommand("check", "Print the degree profile and which hypotheses hold");
  check->add_option("graph", file)->required();
  check->add_option("--epsilon", check_eps, "epsilon for the average-degree bound");
  check->add_flag("--json", check_json);

  TileArgs tile_args;
  auto* tile = app.add_subcommand("tile", "Find a tiling");
  tile->add_option("graph", tile_args.file)->required();
  tile->add_flag("--exact", tile_args.exact, "Exact maximum tiling");
  tile->add_flag("--constructive", tile_args.constructive, "Randomized absorbing pipeline");
  tile->add_flag("--swap3", tile_args.swap3, "Triangle swap augmentation (k = 3)");
  tile->add_option("--budget", tile_args.budget_ms, "Time budget in ms for --exact");
  tile->add_option("--epsilon", tile_args.epsilon);
  tile->add_option("--eta", tile_args.eta);
  tile->add_option("--sigma", tile_args.sigma);
  tile->add_option("--retries", tile_args.retries);
  tile->add_option("--seed", tile_args.seed);
  tile->add_option("--cap", tile_args.cap, "Move cap for --swap3");
  tile->add_option("--start", tile_args.start, "Initial tiling for --swap3");
  tile->add_option("--artifact", tile_args.artifact, "Counterexample file for --swap3");
  tile->add_option("--out", tile_args.out);

  int hint = -1;
  long cover_budget = -1;
  std::string out;
  auto* cover = app.add_subcommand("cover", "Minimum transversal cover");
  cover->add_option("graph", file)->required();
  cover->add_option("--hint", hint, "Known upper bound");
  cover->add_option("--budget", cover_budget, "Time budget in ms");
  cover->add_option("--out", out);

  std::string v, v2;
  int t = 2;
  double eta = 0.01;
  std::uint64_t cap = 0;
  std::size_t keep = 0;
  auto* linking = app.add_subcommand("linking", "Count linking sequences, or test linkedness");
  linking->add_option("graph", file)->required();
  linking->add_option("--v", v, "Start vertex part:index (omit to test every pair)");
  linking->add_option("--v2", v2, "End vertex part:index (default --v)");
  linking->add_option("--t", t, "Sequence length");
  linking->add_option("--eta", eta, "Linkedness threshold as a fraction of n^t");
  linking->add_option("--cap", cap, "Stop counting at this value");
  linking->add_option("--keep", keep, "Example sequences to print");
  linking->add_option("--out", out);

  std::vector<std::string> lemmas;
  int depth = 40;
  std::string margin = "1/1000000";
  int grid = 0;
  std::string certificate;
  auto* verify = app.add_subcommand("verify", "Certify the parameter systems B1..B5");
  verify->add_option("--lemma", lemmas, "B1..B5 or B1-relaxed (repeatable)");
  verify->add_option("--depth", depth, "Maximum bisection depth");
  verify->add_option("--margin", margin, "Margin for strict inequalities, as a rational");
  verify->add_option("--grid", grid, "Also run a grid scan at this resolution");
  verify->add_option("--certificate", certificate, "Re-check a saved certificate instead");
  verify->add_option("--out", out);

  std::string tiling;
  auto* dot = app.add_subcommand("dot", "Graphviz export");
  dot->add_option("graph", file)->required();
  dot->add_option("--tiling", tiling, "Tiling or tile output to highlight");
  dot->add_option("--out", out);

  auto* normalize = app.add_subcommand("normalize", "Re-emit a graph file in canonical form");
  normalize->add_option("graph", file)->required();
  normalize->add_option("--out", out);

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Factor rate over a grid of pair degrees");
  experiment->add_option("--k", ex.k);
  experiment->add_option("--n", ex.n);
  experiment->add_option("--from", ex.from, "Lowest deltas, comma-separated")->required();
  experiment->add_option("--to", ex.to, "Highest deltas (default --from)");
  experiment->add_option("--step", ex.step);
  experiment->add_option("--trials", ex.trials);
  experiment->add_option("--seed", ex.seed);
  experiment->add_option("--tiler", ex.tiler, "exact | swap3 | constructive");
  experiment->add_option("--budget", ex.budget_ms, "Per-trial budget in ms for the exact tiler");
  experiment->add_option("--epsilon", ex.epsilon, "epsilon for the constructive tiler");
  experiment->add_option("--threads", ex.threads);
  experiment->add_option("--max-seconds", ex.max_seconds, "Refuse grids estimated to exceed this");
  experiment->add_option("--out", ex.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*check) return cmd_check(file, check_eps, check_json);
    if (*tile) return cmd_tile(tile_args);
    if (*cover) return cmd_cover(file, hint, cover_budget, out);
    if (*linking) return cmd_linking(file, v, v2, t, eta, cap, keep, out);
    if (*verify) {
      if (lemmas.empty() && certificate.empty()) lemmas = {"B1", "B2", "B3", "B4", "B5"};
      return cmd_verify(lemmas, depth, margin, grid, certificate, out);
    }
    if (*dot) return cmd_dot(file, tiling, out);
    if (*normalize) {
      write_text(out, write_graph(load_graph_file(file)));
      return 0;
    }
    if (*experiment) return cmd_experiment(ex);
  } catch (const PreconditionError& e) {
    fail_line("precondition", app.get_subcommands().front()->get_name(), e.what());
    return kExitPrecondition;
  } catch (const BudgetExhausted& e) {
    fail_line("budget", app.get_subcommands().front()->get_name(), e.what());
    return kExitBudget;
  } catch (const std::exception& e) {
    fail_line("input", app.get_subcommands().front()->get_name(), e.what());
    return kExitInput;
  }
  return kExitInput;
}
