#ifndef HETREE_SCENARIO_H_
#define HETREE_SCENARIO_H_

#include <optional>
#include <string>
#include <vector>

#include "hetree/tree.h"

namespace hetree {

enum class Scenario { kBSC, kRES, kRAN };

const char* scenario_name(Scenario s);
std::optional<Scenario> parse_scenario(const std::string& name);

// What the user asked for: a resource (RES) or a raw range (RAN).
struct StartRequest {
  Scenario scenario = Scenario::kBSC;
  std::string resource;
  double range_lo = 0.0;
  double range_hi = 0.0;
};

// Resolved starting point; U is clipped to the data range.
struct StartingPoint {
  Scenario scenario = Scenario::kBSC;
  Interval u;
  std::optional<std::string> resource;
};

// Resolves U against the dataset. RES picks the smallest value recorded for
// the subject; RAN must intersect [minv, maxv].
StartingPoint resolve_start(const Dataset& data, const StartRequest& req);

struct RenderedSet {
  enum class Kind { kNodes, kObjects };

  Kind kind = Kind::kNodes;
  std::vector<NodeId> nodes;      // the sibling group (kNodes)
  std::optional<NodeId> focus_leaf;  // the leaf whose objects are shown (kObjects)

  bool operator==(const RenderedSet&) const = default;
};

}  // namespace hetree

#endif  // HETREE_SCENARIO_H_
