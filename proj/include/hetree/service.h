#ifndef HETREE_SERVICE_H_
#define HETREE_SERVICE_H_

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "hetree/build.h"
#include "hetree/error.h"
#include "hetree/explore.h"
#include "hetree/params.h"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace hetree {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::chrono::seconds idle_ttl{1800};
  VisBounds bounds;
  std::size_t d_max = 6;
};

// Reads HETREE_PORT, HETREE_TTL, HETREE_LAMBDA_MIN, HETREE_LAMBDA_MAX and
// HETREE_D_MAX on top of `base`.
ServiceConfig config_from_env(ServiceConfig base = {});

int http_status(ErrorCode code);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Datasets and sessions kept in memory. Every handler is safe to call from
// several threads; mutations of one session are exclusive and a second
// concurrent mutation gets 409 instead of waiting.
class Service {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Service(ServiceConfig config = {});

  ApiResponse create_dataset(std::string_view bytes, const std::string& format,
                             const std::string& predicate,
                             const std::string& subject_column,
                             const std::string& value_column);
  ApiResponse create_session(const nlohmann::json& request);
  ApiResponse drill(const std::string& session_id, const nlohmann::json& request);
  ApiResponse rollup(const std::string& session_id);
  ApiResponse adapt(const std::string& session_id, const nlohmann::json& request);
  ApiResponse view(const std::string& session_id);
  ApiResponse counters(const std::string& session_id);

  // Registers the HTTP routes on `server`.
  void mount(httplib::Server& server);
  // Blocks serving on config().host:port.
  bool listen();
  void stop();

  const ServiceConfig& config() const { return config_; }
  void set_clock(std::function<Clock::time_point()> now) { now_ = std::move(now); }
  std::size_t session_count();

 private:
  struct DatasetEntry {
    std::shared_ptr<const Dataset> raw;
    std::once_flag sorted_once;
    std::shared_ptr<const Dataset> sorted;
  };
  struct CachedTree {
    std::once_flag once;
    std::shared_ptr<const HETree> tree;
    BuildCounters counters;
  };
  struct SessionEntry {
    std::shared_mutex mu;
    std::optional<ExplorationSession> session;
    std::atomic<Clock::rep> last_access{0};
  };

  std::shared_ptr<DatasetEntry> find_dataset(const std::string& id);
  std::shared_ptr<SessionEntry> find_session(const std::string& id);
  std::shared_ptr<const Dataset> sorted_of(DatasetEntry& entry);
  void touch(SessionEntry& entry);
  void sweep();
  template <typename Fn>
  ApiResponse mutate(const std::string& id, Fn&& fn);
  template <typename Fn>
  ApiResponse read(const std::string& id, Fn&& fn);

  ServiceConfig config_;
  std::function<Clock::time_point()> now_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<DatasetEntry>> datasets_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::map<std::string, std::shared_ptr<CachedTree>> trees_;
  std::size_t next_dataset_ = 1;
  std::size_t next_session_ = 1;
  std::atomic<httplib::Server*> server_{nullptr};
};

}  // namespace hetree

#endif  // HETREE_SERVICE_H_
