#ifndef HETREE_VIEW_H_
#define HETREE_VIEW_H_

#include "hetree/ada.h"
#include "hetree/explore.h"
#include "json.hpp"

namespace hetree {

// Snapshot of what a session renders: {kind, scenario, elements, breadcrumb,
// counters, last_step}. Nodes carry {id, height, interval, stats,
// child_count}; objects carry {subject, value}. The breadcrumb lists the
// intervals from the root down to the focus (the group's parent, the root
// itself when it is rendered alone, or the focused leaf).
nlohmann::json view_json(const ExplorationSession& session);

nlohmann::json report_json(const AdaptationReport& report);

}  // namespace hetree

#endif  // HETREE_VIEW_H_
