#ifndef HETREE_TREE_JSON_H_
#define HETREE_TREE_JSON_H_

#include "hetree/tree.h"
#include "json.hpp"

namespace hetree {

inline constexpr int kTreeSchemaVersion = 1;

nlohmann::json interval_json(const Interval& interval);
nlohmann::json stats_json(const NodeStats& stats);  // null when empty
nlohmann::json counters_json(const BuildCounters& counters);
nlohmann::json params_json(const TreeParams& params);

// {schema, params, mode, kind, root, height, nodes:[...]}; leaf objects are
// listed only when include_objects is set.
nlohmann::json tree_json(const HETree& tree, bool include_objects = false);

}  // namespace hetree

#endif  // HETREE_TREE_JSON_H_
