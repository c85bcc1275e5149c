#pragma once

// Interchange formats: the JSON graph document shared by every CLI command,
// tiling JSON, and Graphviz DOT export.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ckb/core.hpp"

namespace ckb {

inline constexpr const char* kGraphFormat = "ckblowup/1";

/// Malformed interchange document. The message carries the byte offset when
/// the failure is a JSON syntax error.
class FormatError : public Error {
 public:
  using Error::Error;
};

nlohmann::json graph_to_json(const BlowupGraph& g);
BlowupGraph graph_from_json(const nlohmann::json& doc);

/// Canonical text form: edges sorted, fixed layout, trailing newline. Loading
/// and re-emitting a document produced here is byte-identical.
std::string write_graph(const BlowupGraph& g);
BlowupGraph read_graph(const std::string& text);

BlowupGraph load_graph_file(const std::string& path);
void save_graph_file(const BlowupGraph& g, const std::string& path);

nlohmann::json tiling_to_json(const Tiling& t);
Tiling tiling_from_json(const nlohmann::json& doc);

/// Named vertex blocks (e.g. "U_1") written next to generated graphs.
using Blocks = std::map<std::string, std::vector<VertexRef>>;
nlohmann::json blocks_to_json(const Blocks& blocks);

/// Parts become ranked clusters; cycles of an optional tiling are coloured.
std::string to_dot(const BlowupGraph& g, const Tiling* highlight = nullptr);

}  // namespace ckb
