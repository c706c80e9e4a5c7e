#include "hetree/service.h"

#include <cstdlib>

#include "hetree/error.h"
#include "hetree/tree_json.h"
#include "hetree/view.h"
#include "httplib.h"

namespace hetree {

using nlohmann::json;

namespace {

std::optional<long> env_long(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  long x = std::strtol(v, &end, 10);
  if (*end != '\0') return std::nullopt;
  return x;
}

ApiResponse error_response(int status, const std::string& code, const std::string& msg) {
  return {status, {{"error", code}, {"message", msg}}};
}

ApiResponse from_error(const Error& e) {
  return error_response(http_status(e.code()), error_code_name(e.code()), e.what());
}

std::optional<std::size_t> opt_size(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0) {
    throw Error(ErrorCode::kParameter, std::string(key) + " must be a non-negative integer");
  }
  return j[key].get<std::size_t>();
}

double scalar(const json& j, ValueKind kind) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    auto v = kind == ValueKind::kTemporal ? parse_temporal(s) : parse_numeric(s);
    if (v) return *v;
  }
  throw Error(ErrorCode::kParameter, "range bounds must be numbers or ISO dates");
}

}  // namespace

ServiceConfig config_from_env(ServiceConfig c) {
  if (auto v = env_long("HETREE_PORT")) c.port = static_cast<int>(*v);
  if (auto v = env_long("HETREE_TTL")) c.idle_ttl = std::chrono::seconds(*v);
  if (auto v = env_long("HETREE_LAMBDA_MIN")) c.bounds.lambda_min = static_cast<std::size_t>(*v);
  if (auto v = env_long("HETREE_LAMBDA_MAX")) c.bounds.lambda_max = static_cast<std::size_t>(*v);
  if (auto v = env_long("HETREE_D_MAX")) c.d_max = static_cast<std::size_t>(*v);
  return c;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kStaleOperation: return 409;
    default: return 422;
  }
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), now_([] { return Clock::now(); }) {}

std::size_t Service::session_count() {
  std::lock_guard lk(mu_);
  sweep();
  return sessions_.size();
}

void Service::touch(SessionEntry& e) {
  e.last_access.store(now_().time_since_epoch().count());
}

// Caller holds mu_. Sessions busy with a request are never evicted.
void Service::sweep() {
  auto now = now_().time_since_epoch().count();
  auto ttl = std::chrono::duration_cast<Clock::duration>(config_.idle_ttl).count();
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    SessionEntry& e = *it->second;
    std::unique_lock lk(e.mu, std::try_to_lock);
    if (lk.owns_lock() && now - e.last_access.load() > ttl) {
      lk.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::shared_ptr<Service::DatasetEntry> Service::find_dataset(const std::string& id) {
  std::lock_guard lk(mu_);
  auto it = datasets_.find(id);
  return it == datasets_.end() ? nullptr : it->second;
}

std::shared_ptr<Service::SessionEntry> Service::find_session(const std::string& id) {
  std::lock_guard lk(mu_);
  sweep();
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  touch(*it->second);
  return it->second;
}

std::shared_ptr<const Dataset> Service::sorted_of(DatasetEntry& e) {
  std::call_once(e.sorted_once, [&] {
    e.sorted = std::make_shared<const Dataset>(sort_dataset(*e.raw));
  });
  return e.sorted;
}

template <typename Fn>
ApiResponse Service::mutate(const std::string& id, Fn&& fn) {
  auto e = find_session(id);
  if (!e) return error_response(404, "not_found", "unknown session " + id);
  std::unique_lock lk(e->mu, std::try_to_lock);
  if (!lk.owns_lock()) {
    return error_response(409, "conflict", "another operation is running on " + id);
  }
  try {
    ApiResponse r = fn(*e->session);
    touch(*e);
    return r;
  } catch (const Error& err) {
    return from_error(err);
  }
}

template <typename Fn>
ApiResponse Service::read(const std::string& id, Fn&& fn) {
  auto e = find_session(id);
  if (!e) return error_response(404, "not_found", "unknown session " + id);
  std::shared_lock lk(e->mu);
  return fn(*e->session);
}

ApiResponse Service::create_dataset(std::string_view bytes, const std::string& format,
                                    const std::string& predicate,
                                    const std::string& subject_column,
                                    const std::string& value_column) {
  try {
    ParseResult pr;
    if (format == "csv") {
      pr = parse_csv(bytes, subject_column.empty() ? "subject" : subject_column,
                     value_column.empty() ? "value" : value_column);
    } else if (format == "ntriples" || format == "nt" || format.empty()) {
      pr = parse_ntriples(bytes, predicate.empty() ? std::nullopt
                                                   : std::optional<std::string>(predicate));
    } else {
      return error_response(422, "parameter", "unknown format " + format);
    }
    auto entry = std::make_shared<DatasetEntry>();
    entry->raw = std::make_shared<const Dataset>(std::move(pr.dataset));
    const Dataset& d = *entry->raw;
    std::string id;
    {
      std::lock_guard lk(mu_);
      id = "ds-" + std::to_string(next_dataset_++);
      datasets_[id] = entry;
    }
    return {201,
            {{"dataset_id", id},
             {"size", d.size()},
             {"minv", d.minv()},
             {"maxv", d.maxv()},
             {"kind", value_kind_name(d.kind())},
             {"predicate", d.predicate()},
             {"skipped",
              {{"malformed", pr.report.malformed},
               {"ineligible", pr.report.ineligible},
               {"other_predicate", pr.report.other_predicate}}}}};
  } catch (const Error& e) {
    return from_error(e);
  }
}

ApiResponse Service::create_session(const json& req) {
  try {
    if (!req.is_object() || !req.contains("dataset_id") || !req["dataset_id"].is_string()) {
      return error_response(422, "parameter", "dataset_id is required");
    }
    std::string ds_id = req["dataset_id"].get<std::string>();
    auto ds = find_dataset(ds_id);
    if (!ds) return error_response(404, "not_found", "unknown dataset " + ds_id);
    const Dataset& raw = *ds->raw;

    Variant variant = Variant::kC;
    if (req.contains("variant")) {
      std::string v = req["variant"].get<std::string>();
      if (v == "C" || v == "c") {
        variant = Variant::kC;
      } else if (v == "R" || v == "r") {
        variant = Variant::kR;
      } else {
        return error_response(422, "parameter", "variant must be C or R");
      }
    }
    StartRequest start;
    std::string scen = req.value("scenario", std::string("BSC"));
    auto sc = parse_scenario(scen);
    if (!sc) return error_response(422, "parameter", "unknown scenario " + scen);
    start.scenario = *sc;
    if (start.scenario == Scenario::kRES) {
      if (!req.contains("resource") || !req["resource"].is_string()) {
        return error_response(422, "parameter", "RES needs a resource");
      }
      start.resource = req["resource"].get<std::string>();
    }
    if (start.scenario == Scenario::kRAN) {
      if (!req.contains("range") || !req["range"].is_array() || req["range"].size() != 2) {
        return error_response(422, "parameter", "RAN needs range: [lo, hi]");
      }
      start.range_lo = scalar(req["range"][0], raw.kind());
      start.range_hi = scalar(req["range"][1], raw.kind());
    }

    auto leaves = opt_size(req, "leaves");
    auto degree = opt_size(req, "degree");
    if (!leaves || !degree) {
      VisBounds b = config_.bounds;
      if (auto v = opt_size(req, "lambda_min")) b.lambda_min = *v;
      if (auto v = opt_size(req, "lambda_max")) b.lambda_max = *v;
      TreeParams p = estimate_params(raw.size(), b, variant, {config_.d_max, true});
      if (!leaves) leaves = p.leaves;
      if (!degree) degree = p.degree;
    }
    bool incremental = req.value("incremental", false);

    std::optional<ExplorationSession> session;
    if (incremental) {
      session.emplace(ExplorationSession::start_incremental(ds->raw, variant, *leaves,
                                                            *degree, start));
    } else {
      auto sorted = sorted_of(*ds);
      TreeParams p = derive_params(*sorted, variant, *leaves, *degree);
      std::string key = ds_id + "/" + variant_name(variant) + "/" + std::to_string(*leaves) +
                        "/" + std::to_string(*degree);
      std::shared_ptr<CachedTree> cached;
      {
        std::lock_guard lk(mu_);
        auto& slot = trees_[key];
        if (!slot) slot = std::make_shared<CachedTree>();
        cached = slot;
      }
      std::call_once(cached->once, [&] {
        BuildResult br = build_hetree(sorted, p);
        cached->counters = br.counters;
        cached->tree = std::make_shared<const HETree>(std::move(br.tree));
      });
      session.emplace(ExplorationSession::start(cached->tree, start, cached->counters));
    }

    auto entry = std::make_shared<SessionEntry>();
    entry->session = std::move(session);
    touch(*entry);
    std::string id;
    {
      std::lock_guard lk(mu_);
      sweep();
      id = "s-" + std::to_string(next_session_++);
      sessions_[id] = entry;
    }
    return {201, {{"session_id", id}, {"view", view_json(*entry->session)}}};
  } catch (const Error& e) {
    return from_error(e);
  } catch (const json::exception& e) {
    return error_response(422, "parameter", e.what());
  }
}

ApiResponse Service::drill(const std::string& id, const json& req) {
  return mutate(id, [&](ExplorationSession& s) -> ApiResponse {
    auto node = opt_size(req, "node_id");
    if (!node) throw Error(ErrorCode::kParameter, "node_id is required");
    s.drill_down(static_cast<NodeId>(*node));
    return {200, view_json(s)};
  });
}

ApiResponse Service::rollup(const std::string& id) {
  return mutate(id, [&](ExplorationSession& s) -> ApiResponse {
    s.roll_up();
    return {200, view_json(s)};
  });
}

ApiResponse Service::adapt(const std::string& id, const json& req) {
  return mutate(id, [&](ExplorationSession& s) -> ApiResponse {
    auto degree = opt_size(req, "degree");
    auto leaves = opt_size(req, "leaves");
    auto root = opt_size(req, "root_node_id");
    if (degree.has_value() == leaves.has_value()) {
      throw Error(ErrorCode::kParameter, "give exactly one of degree and leaves");
    }
    std::optional<NodeId> r;
    if (root) r = static_cast<NodeId>(*root);
    AdaptationReport rep = s.adapt(r, degree, leaves);
    return {200, {{"view", view_json(s)}, {"adaptation_report", report_json(rep)}}};
  });
}

ApiResponse Service::view(const std::string& id) {
  return read(id, [](const ExplorationSession& s) -> ApiResponse {
    return {200, view_json(s)};
  });
}

ApiResponse Service::counters(const std::string& id) {
  return read(id, [](const ExplorationSession& s) -> ApiResponse {
    return {200, counters_json(s.counters())};
  });
}

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

}  // namespace

void Service::mount(httplib::Server& srv) {
  srv.Post("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
    auto field = [&](const char* name) {
      if (req.has_file(name)) return req.get_file_value(name).content;
      if (req.has_param(name)) return req.get_param_value(name);
      return std::string();
    };
    std::string format = field("format");
    std::string bytes;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        reply(res, error_response(422, "parameter", "multipart field 'file' is missing"));
        return;
      }
      const auto& f = req.get_file_value("file");
      bytes = f.content;
      if (format.empty() && f.filename.size() > 4 &&
          f.filename.compare(f.filename.size() - 4, 4, ".csv") == 0) {
        format = "csv";
      }
    } else {
      bytes = req.body;
    }
    reply(res, create_dataset(bytes, format, field("predicate"), field("subject_column"),
                              field("value_column")));
  });
  auto with_json = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = body_json(req);
      } catch (const json::exception& e) {
        reply(res, error_response(422, "parameter", std::string("bad JSON: ") + e.what()));
        return;
      }
      reply(res, fn(req, body));
    };
  };
  srv.Post("/sessions", with_json([this](const httplib::Request&, const json& body) {
             return create_session(body);
           }));
  srv.Post(R"(/sessions/([^/]+)/drill)",
           with_json([this](const httplib::Request& req, const json& body) {
             return drill(req.matches[1], body);
           }));
  srv.Post(R"(/sessions/([^/]+)/rollup)",
           [this](const httplib::Request& req, httplib::Response& res) {
             reply(res, rollup(req.matches[1]));
           });
  srv.Post(R"(/sessions/([^/]+)/adapt)",
           with_json([this](const httplib::Request& req, const json& body) {
             return adapt(req.matches[1], body);
           }));
  srv.Get(R"(/sessions/([^/]+)/view)", [this](const httplib::Request& req,
                                                httplib::Response& res) {
    reply(res, view(req.matches[1]));
  });
  srv.Get(R"(/sessions/([^/]+)/counters)", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
    reply(res, counters(req.matches[1]));
  });
  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
}

bool Service::listen() {
  httplib::Server srv;
  mount(srv);
  server_ = &srv;
  bool ok = srv.listen(config_.host, config_.port);
  server_ = nullptr;
  return ok;
}

void Service::stop() {
  if (auto* s = server_.load()) s->stop();
}

}  // namespace hetree
