#ifndef HETREE_PARAMS_H_
#define HETREE_PARAMS_H_

#include <cstddef>
#include <utility>
#include <vector>

#include "hetree/tree.h"

namespace hetree {

// Minimum and maximum number of objects a leaf should show.
struct VisBounds {
  std::size_t lambda_min = 10;
  std::size_t lambda_max = 50;
};

struct CandidateSetting {
  std::size_t leaves = 0;
  std::size_t degree = 0;
  int height = 0;
  double centre_distance = 0.0;

  bool operator==(const CandidateSetting&) const = default;
};

std::pair<std::size_t, std::size_t> leaf_bounds(std::size_t n, const VisBounds& b);

// All perfect trees d^h with 3 <= d <= d_max, h >= 2 inside [lmin, lmax],
// ordered by degree then height.
std::vector<CandidateSetting> enumerate_candidates(std::size_t lmin, std::size_t lmax,
                                                   std::size_t d_max = 6);

// Tallest tree, then closest to the centre of the range, then smallest
// degree. With prefer_highest = false the shortest tree wins instead.
CandidateSetting select_setting(const std::vector<CandidateSetting>& cands,
                                bool prefer_highest = true);

struct EstimateOptions {
  std::size_t d_max = 6;
  bool prefer_highest = true;
};

// When no perfect tree fits, falls back to degree 3 with the power of 3
// nearest the centre of [lmin, lmax] (ties to the smaller), and failing
// that to lmin leaves with degree 3.
TreeParams estimate_params(std::size_t n, const VisBounds& b, Variant variant,
                           const EstimateOptions& options = {});

}  // namespace hetree

#endif  // HETREE_PARAMS_H_
