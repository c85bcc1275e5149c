#include "ckb/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace ckb {

using nlohmann::json;

json graph_to_json(const BlowupGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.part, e.u, e.w});
  return json{{"format", kGraphFormat}, {"k", g.k()}, {"n", g.n()}, {"edges", std::move(edges)}};
}

namespace {

int require_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(fmt::format("missing field \"{}\"", key));
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw FormatError(fmt::format("field \"{}\" must be an integer", key));
  return v.get<int>();
}

}  // namespace

BlowupGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("graph document must be a JSON object");
  if (doc.contains("format") && doc.at("format") != kGraphFormat) {
    throw FormatError(fmt::format("unsupported format {}", doc.at("format").dump()));
  }
  const int k = require_int(doc, "k");
  const int n = require_int(doc, "n");
  if (!doc.contains("edges") || !doc.at("edges").is_array()) {
    throw FormatError("field \"edges\" must be an array");
  }
  std::vector<Edge> edges;
  std::size_t position = 0;
  for (const json& e : doc.at("edges")) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_number_integer()) {
      throw FormatError(fmt::format("edges[{}] must be [part, u, w]", position));
    }
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    ++position;
  }
  try {
    return BlowupGraph(k, n, edges);
  } catch (const PreconditionError& err) {
    throw FormatError(err.what());
  }
}

std::string write_graph(const BlowupGraph& g) {
  // One edge per line keeps large files diffable.
  std::string out = fmt::format("{{\n  \"format\": \"{}\",\n  \"k\": {},\n  \"n\": {},\n  \"edges\": [",
                                kGraphFormat, g.k(), g.n());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out += fmt::format("{}\n    [{}, {}, {}]", i == 0 ? "" : ",", edges[i].part, edges[i].u, edges[i].w);
  }
  out += edges.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

BlowupGraph read_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw FormatError(fmt::format("malformed JSON at byte {}: {}", err.byte, err.what()));
  }
  return graph_from_json(doc);
}

BlowupGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open {}", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_graph(buffer.str());
}

void save_graph_file(const BlowupGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path));
  out << write_graph(g);
}

json tiling_to_json(const Tiling& t) {
  json cycles = json::array();
  for (const auto& c : t.cycles) cycles.push_back(c.members);
  return cycles;
}

Tiling tiling_from_json(const json& doc) {
  if (!doc.is_array()) throw FormatError("tiling must be an array of cycles");
  Tiling t;
  for (const json& c : doc) {
    if (!c.is_array()) throw FormatError("each cycle must be an array of indices");
    std::vector<int> members;
    for (const json& x : c) {
      if (!x.is_number_integer()) throw FormatError("cycle entries must be integers");
      members.push_back(x.get<int>());
    }
    t.cycles.push_back({std::move(members)});
  }
  return t;
}

json blocks_to_json(const Blocks& blocks) {
  json out = json::object();
  for (const auto& [name, vertices] : blocks) {
    json ids = json::array();
    for (const VertexRef& v : vertices) ids.push_back(v.index);
    out[name] = std::move(ids);
  }
  return json{{"blocks", std::move(out)}};
}

std::string to_dot(const BlowupGraph& g, const Tiling* highlight) {
  static constexpr const char* kPalette[] = {"red", "blue", "darkgreen", "orange",
                                             "purple", "brown", "magenta", "teal"};
  std::map<std::pair<std::pair<int, int>, std::pair<int, int>>, std::string> colour_of;
  if (highlight != nullptr) {
    for (std::size_t c = 0; c < highlight->size(); ++c) {
      const auto& cycle = highlight->cycles[c];
      for (int p = 1; p <= g.k(); ++p) {
        const int q = next_part(p, g.k());
        colour_of[{{p, cycle.members[p - 1]}, {q, cycle.members[q - 1]}}] = kPalette[c % 8];
      }
    }
  }
  std::string out = "graph blowup {\n  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
  for (int p = 1; p <= g.k(); ++p) {
    out += fmt::format("  subgraph cluster_{} {{\n    label=\"V_{}\";\n    rank=same;\n", p, p);
    for (int v = 0; v < g.n(); ++v) out += fmt::format("    v{}_{} [label=\"{}\"];\n", p, v, v);
    out += "  }\n";
  }
  for (const Edge& e : g.edges()) {
    const int q = next_part(e.part, g.k());
    const auto key = std::make_pair(std::make_pair(e.part, e.u), std::make_pair(q, e.w));
    auto it = colour_of.find(key);
    if (it != colour_of.end()) {
      out += fmt::format("  v{}_{} -- v{}_{} [color={}, penwidth=2];\n", e.part, e.u, q, e.w, it->second);
    } else {
      out += fmt::format("  v{}_{} -- v{}_{} [color=gray70];\n", e.part, e.u, q, e.w);
    }
  }
  out += "}\n";
  return out;
}

}  // namespace ckb
