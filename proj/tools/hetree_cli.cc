// Command-line front end: build, explore, bench, serve.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 script error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetree/bench.h"
#include "hetree/build.h"
#include "hetree/error.h"
#include "hetree/explore.h"
#include "hetree/params.h"
#include "hetree/service.h"
#include "hetree/tree_json.h"
#include "hetree/view.h"

namespace {

using hetree::Error;
using nlohmann::json;

constexpr int kUsage = 2;
constexpr int kDataError = 3;
constexpr int kScriptError = 4;

struct InputOptions {
  std::string path;
  std::string format;
  std::string predicate;
  std::string subject_column = "subject";
  std::string value_column = "value";
};

struct TreeOptions {
  std::string variant = "C";
  std::size_t leaves = 0;
  std::size_t degree = 0;
  std::vector<std::size_t> autob;
};

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path, "N-Triples or CSV file")->required()->check(
      CLI::ExistingFile);
  cmd->add_option("--format", in.format, "ntriples or csv (default: by extension)");
  cmd->add_option("--predicate", in.predicate, "N-Triples predicate IRI to keep");
  cmd->add_option("--subject-column", in.subject_column, "CSV subject column");
  cmd->add_option("--value-column", in.value_column, "CSV value column");
}

void add_tree(CLI::App* cmd, TreeOptions& t) {
  cmd->add_option("--variant", t.variant, "C (equal count) or R (equal range)")
      ->check(CLI::IsMember({"C", "R", "c", "r"}));
  cmd->add_option("--leaves", t.leaves, "number of leaves");
  cmd->add_option("--degree", t.degree, "tree degree");
  cmd->add_option("--auto", t.autob, "estimate leaves and degree from lambda_min lambda_max")
      ->expected(2);
}

std::shared_ptr<const hetree::Dataset> load(const InputOptions& in) {
  std::ifstream f(in.path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string bytes = ss.str();
  std::string format = in.format;
  if (format.empty()) {
    format = in.path.size() > 4 && in.path.substr(in.path.size() - 4) == ".csv" ? "csv"
                                                                                 : "ntriples";
  }
  hetree::ParseResult pr;
  if (format == "csv") {
    pr = hetree::parse_csv(bytes, in.subject_column, in.value_column);
  } else {
    pr = hetree::parse_ntriples(bytes, in.predicate.empty()
                                           ? std::nullopt
                                           : std::optional<std::string>(in.predicate));
  }
  if (pr.report.malformed + pr.report.ineligible > 0) {
    std::cerr << "skipped " << pr.report.malformed << " malformed and "
              << pr.report.ineligible << " ineligible entries\n";
  }
  return std::make_shared<const hetree::Dataset>(std::move(pr.dataset));
}

hetree::TreeParams resolve_params(const hetree::Dataset& d, const TreeOptions& t) {
  hetree::Variant v = (t.variant == "R" || t.variant == "r") ? hetree::Variant::kR
                                                              : hetree::Variant::kC;
  hetree::TreeParams p;
  if (t.leaves == 0 || t.degree == 0 || !t.autob.empty()) {
    hetree::VisBounds b;
    if (!t.autob.empty()) b = {t.autob[0], t.autob[1]};
    p = hetree::estimate_params(d.size(), b, v);
  }
  p.variant = v;
  if (t.leaves) p.leaves = t.leaves;
  if (t.degree) p.degree = t.degree;
  return p;
}

int cmd_build(const InputOptions& in, const TreeOptions& t, const std::string& out,
              bool objects) {
  try {
    auto raw = load(in);
    auto t0 = std::chrono::steady_clock::now();
    auto sorted = std::make_shared<const hetree::Dataset>(hetree::sort_dataset(*raw));
    hetree::TreeParams p = resolve_params(*sorted, t);
    auto br = hetree::build_hetree(sorted, p);
    auto t1 = std::chrono::steady_clock::now();
    json doc = {{"tree", hetree::tree_json(br.tree, objects)},
                {"counters", hetree::counters_json(br.counters)},
                {"construction_ms",
                 std::chrono::duration<double, std::milli>(t1 - t0).count()}};
    if (out.empty()) {
      std::cout << doc.dump(2) << "\n";
    } else {
      std::ofstream(out) << doc.dump(2) << "\n";
      std::cout << "leaves=" << p.leaves << " degree=" << p.degree << " nodes="
                << br.tree.node_count() << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> w;
  for (std::string s; is >> s;) w.push_back(s);
  return w;
}

// Element k (1-based) of the current rendering.
hetree::NodeId element(const hetree::ExplorationSession& s, const std::string& word) {
  std::size_t k = std::stoul(word);
  const auto& cur = s.current();
  if (cur.kind != hetree::RenderedSet::Kind::kNodes || k == 0 || k > cur.nodes.size()) {
    throw std::out_of_range("no rendered node #" + word);
  }
  return cur.nodes[k - 1];
}

double bound(const hetree::Dataset& d, const std::string& w) {
  auto v = d.kind() == hetree::ValueKind::kTemporal ? hetree::parse_temporal(w)
                                                    : hetree::parse_numeric(w);
  if (!v) throw std::invalid_argument("bad range bound " + w);
  return *v;
}

int cmd_explore(const InputOptions& in, const TreeOptions& t, const std::string& script,
                bool incremental) {
  std::shared_ptr<const hetree::Dataset> raw;
  std::shared_ptr<const hetree::Dataset> sorted;
  hetree::TreeParams p;
  try {
    raw = load(in);
    sorted = std::make_shared<const hetree::Dataset>(hetree::sort_dataset(*raw));
    p = resolve_params(*sorted, t);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  std::ifstream sf(script);
  if (!sf) {
    std::cerr << "error: cannot read script " << script << "\n";
    return kUsage;
  }
  std::shared_ptr<const hetree::HETree> tree;
  hetree::BuildCounters build;
  std::optional<hetree::ExplorationSession> s;
  std::string line;
  int lineno = 0;
  while (std::getline(sf, line)) {
    ++lineno;
    auto w = words(line);
    if (w.empty() || w[0][0] == '#') continue;
    try {
      std::optional<hetree::AdaptationReport> rep;
      if (w[0] == "start") {
        hetree::StartRequest req;
        auto sc = hetree::parse_scenario(w.size() > 1 ? w[1] : "BSC");
        if (!sc) throw std::invalid_argument("unknown scenario");
        req.scenario = *sc;
        if (req.scenario == hetree::Scenario::kRES) req.resource = w.at(2);
        if (req.scenario == hetree::Scenario::kRAN) {
          req.range_lo = bound(*raw, w.at(2));
          req.range_hi = bound(*raw, w.at(3));
        }
        if (incremental) {
          s.emplace(hetree::ExplorationSession::start_incremental(raw, p.variant, p.leaves,
                                                                  p.degree, req));
        } else {
          if (!tree) {
            auto br = hetree::build_hetree(sorted, p);
            build = br.counters;
            tree = std::make_shared<const hetree::HETree>(std::move(br.tree));
          }
          s.emplace(hetree::ExplorationSession::start(tree, req, build));
        }
      } else if (!s) {
        throw std::invalid_argument("the script must begin with start");
      } else if (w[0] == "drill") {
        s->drill_down(element(*s, w.at(1)));
      } else if (w[0] == "rollup") {
        s->roll_up();
      } else if (w[0] == "adapt") {
        std::optional<std::size_t> degree, leaves;
        std::optional<hetree::NodeId> root;
        for (std::size_t i = 1; i + 1 < w.size(); i += 2) {
          if (w[i] == "degree") degree = std::stoul(w[i + 1]);
          else if (w[i] == "leaves") leaves = std::stoul(w[i + 1]);
          else if (w[i] == "root") root = element(*s, w[i + 1]);
          else throw std::invalid_argument("unknown adapt option " + w[i]);
        }
        rep = s->adapt(root, degree, leaves);
      } else {
        throw std::invalid_argument("unknown command " + w[0]);
      }
      json out = {{"line", lineno},
                  {"op", line},
                  {"built", s->last_step().nodes_built},
                  {"view", hetree::view_json(*s)}};
      if (rep) out["adaptation_report"] = hetree::report_json(*rep);
      std::cout << out.dump() << "\n";
    } catch (const std::exception& e) {
      std::cerr << script << ":" << lineno << ": " << e.what() << "\n";
      return kScriptError;
    }
  }
  if (s) std::cout << json{{"final_counters", hetree::counters_json(s->counters())}}.dump()
                   << "\n";
  return 0;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = std::stod(item);
    if (!(v >= 1)) throw std::invalid_argument("bad size " + item);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical exploration trees over numeric and temporal data"};
  app.require_subcommand(1);

  InputOptions in;
  TreeOptions t;
  std::string out;
  bool objects = false;
  auto* build = app.add_subcommand("build", "build a full tree and print it as JSON");
  add_input(build, in);
  add_tree(build, t);
  build->add_option("--output", out, "write the JSON here instead of stdout");
  build->add_flag("--objects", objects, "list leaf objects");

  std::string script;
  bool incremental = false;
  auto* explore = app.add_subcommand(
      "explore",
      "replay a script; lines: start BSC | start RES <subject> | start RAN <lo> <hi> |\n"
      "drill <k> | rollup | adapt degree <d>|leaves <l> [root <k>]  (k is 1-based)");
  add_input(explore, in);
  add_tree(explore, t);
  explore->add_option("--script", script, "script file")->required();
  explore->add_flag("--incremental", incremental, "construct the tree incrementally");

  std::string sizes = "1e3,1e4,1e5";
  std::string dist = "uniform";
  std::string bvariant = "C";
  hetree::BenchOptions bo;
  auto* bench = app.add_subcommand(
      "bench",
      "benchmark construction; CSV columns: " + hetree::bench_csv_header());
  bench->add_option("--sizes", sizes, "comma-separated dataset sizes");
  bench->add_option("--dist", dist, "uniform, normal or zipf")
      ->check(CLI::IsMember({"uniform", "normal", "zipf"}));
  bench->add_option("--variant", bvariant, "C or R")->check(CLI::IsMember({"C", "R"}));
  bench->add_option("--repeat", bo.repeat, "runs per size; timings are medians");
  bench->add_option("--seed", bo.seed, "generator seed");
  bench->add_option("--lambda-min", bo.bounds.lambda_min, "minimum objects per leaf");
  bench->add_option("--lambda-max", bo.bounds.lambda_max, "maximum objects per leaf");

  hetree::ServiceConfig sc = hetree::config_from_env();
  long ttl = static_cast<long>(sc.idle_ttl.count());
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--host", sc.host, "bind address");
  serve->add_option("--port", sc.port, "port");
  serve->add_option("--ttl", ttl, "idle session eviction in seconds");
  serve->add_option("--lambda-min", sc.bounds.lambda_min, "default minimum objects per leaf");
  serve->add_option("--lambda-max", sc.bounds.lambda_max, "default maximum objects per leaf");
  serve->add_option("--d-max", sc.d_max, "largest degree considered by estimation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*build) return cmd_build(in, t, out, objects);
    if (*explore) return cmd_explore(in, t, script, incremental);
    if (*bench) {
      bo.sizes = parse_sizes(sizes);
      bo.dist = *hetree::parse_distribution(dist);
      bo.variant = bvariant == "R" ? hetree::Variant::kR : hetree::Variant::kC;
      std::cout << hetree::bench_csv_header() << "\n";
      for (std::size_t n : bo.sizes) {
        std::cout << hetree::bench_csv_row(hetree::bench_one(n, bo)) << "\n" << std::flush;
      }
      return 0;
    }
    if (*serve) {
      sc.idle_ttl = std::chrono::seconds(ttl);
      hetree::Service svc(sc);
      std::cerr << "listening on " << sc.host << ":" << sc.port << "\n";
      return svc.listen() ? 0 : kUsage;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
