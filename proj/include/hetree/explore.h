#ifndef HETREE_EXPLORE_H_
#define HETREE_EXPLORE_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hetree/ada.h"
#include "hetree/ico.h"
#include "hetree/scenario.h"
#include "hetree/tree.h"

namespace hetree {

struct HistoryEntry {
  std::string op;  // "start", "drill <id>", "rollup", "adapt ..."
  RenderedSet rendered;
};

// A user's walk over one tree. Full-mode sessions share an immutable tree
// until the first adaptation, which copies it. Incremental sessions own an
// IcoState and grow the tree as they go.
class ExplorationSession {
 public:
  static ExplorationSession start(std::shared_ptr<const HETree> tree, const StartRequest& req,
                                  const BuildCounters& build = {});
  static ExplorationSession start_incremental(std::shared_ptr<const Dataset> data,
                                              Variant variant, std::size_t leaves,
                                              std::size_t degree, const StartRequest& req);

  const RenderedSet& drill_down(NodeId id);
  const RenderedSet& roll_up();
  AdaptationReport adapt(std::optional<NodeId> root, std::optional<std::size_t> degree,
                         std::optional<std::size_t> leaves);

  const RenderedSet& current() const { return cur_; }
  const HETree& tree() const;
  bool incremental() const { return ico_ != nullptr; }
  const StartingPoint& starting_point() const { return start_; }
  // Total construction work behind the session so far.
  const BuildCounters& counters() const { return counters_; }
  // Work done by the last operation.
  const BuildCounters& last_step() const { return last_step_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  const IcoState* ico() const { return ico_.get(); }

 private:
  ExplorationSession() = default;
  void push(std::string op);
  RenderedSet initial_full(const StartingPoint& start) const;

  std::shared_ptr<const HETree> tree_;
  std::shared_ptr<IcoState> ico_;
  StartingPoint start_;
  RenderedSet cur_;
  BuildCounters counters_;
  BuildCounters last_step_;
  std::vector<HistoryEntry> history_;
};

}  // namespace hetree

#endif  // HETREE_EXPLORE_H_
