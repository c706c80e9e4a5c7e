#ifndef HETREE_BENCH_H_
#define HETREE_BENCH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetree/dataset.h"
#include "hetree/params.h"
#include "hetree/tree.h"

namespace hetree {

enum class Distribution { kUniform, kNormal, kZipf };

const char* distribution_name(Distribution d);
std::optional<Distribution> parse_distribution(const std::string& name);

// uniform over [0, 1e6], normal(5e5, 1e5), zipf(s = 1.1) over ranks 1..1e5.
Dataset generate_dataset(Distribution dist, std::size_t n, std::uint64_t seed);

struct BenchOptions {
  std::vector<std::size_t> sizes;
  Distribution dist = Distribution::kUniform;
  Variant variant = Variant::kC;
  std::size_t repeat = 3;
  std::uint64_t seed = 42;
  VisBounds bounds;
};

struct BenchRow {
  std::size_t size = 0;
  Distribution dist = Distribution::kUniform;
  Variant variant = Variant::kC;
  std::size_t leaves = 0;
  std::size_t degree = 0;
  double construction_ms = 0.0;  // median of sort + full build
  double ico_init_ms = 0.0;      // median of a BSC incremental start
  std::uint64_t first_response_nodes_full = 0;
  std::uint64_t first_response_nodes_ico = 0;
  std::uint64_t init_nodes_bsc = 0;
  std::uint64_t init_nodes_res = 0;
  std::uint64_t init_nodes_ran = 0;
};

std::string bench_csv_header();
std::string bench_csv_row(const BenchRow& row);

BenchRow bench_one(std::size_t size, const BenchOptions& options);
std::vector<BenchRow> run_bench(const BenchOptions& options);

}  // namespace hetree

#endif  // HETREE_BENCH_H_
