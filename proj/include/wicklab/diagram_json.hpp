#ifndef WICKLAB_DIAGRAM_JSON_HPP
#define WICKLAB_DIAGRAM_JSON_HPP

// JSON export of diagram term lists (needs nlohmann/json on the include path).

#include <json.hpp>

#include "diagrams.hpp"

namespace wicklab {

/// {"blocks": [[1,2,3,4]], "traversals": [{"order": [1,3,2,4], "ascents": 2,
///  "sign": -1}], "block_values": [...], "value": ...}. Vertices are 1-based.
inline nlohmann::json diagram_term_json(const DiagramTerm& term) {
  nlohmann::json j;
  j["blocks"] = term.diagram.partition.vertex_sets();
  auto& trs = j["traversals"] = nlohmann::json::array();
  for (const auto& t : term.diagram.traversals)
    trs.push_back({{"order", t.order}, {"ascents", t.ascents}, {"sign", t.sign()}});
  j["block_values"] = term.block_values;
  j["value"] = term.value;
  return j;
}

inline nlohmann::json traversal_result_json(const TraversalResult& r) {
  nlohmann::json j;
  j["total"] = r.total;
  j["diagram_count"] = r.diagram_count;
  auto& terms = j["terms"] = nlohmann::json::array();
  for (const auto& t : r.terms) terms.push_back(diagram_term_json(t));
  return j;
}

}  // namespace wicklab

#endif  // WICKLAB_DIAGRAM_JSON_HPP
