#include "hetree/params.h"

#include <cmath>

#include "hetree/error.h"

namespace hetree {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

double centre_distance(std::size_t leaves, std::size_t lmin, std::size_t lmax) {
  return std::fabs(static_cast<double>(leaves) - (static_cast<double>(lmin + lmax)) / 2.0);
}

}  // namespace

std::pair<std::size_t, std::size_t> leaf_bounds(std::size_t n, const VisBounds& b) {
  if (b.lambda_min == 0 || b.lambda_min > b.lambda_max) {
    throw Error(ErrorCode::kParameter, "visual bounds need 1 <= lambda_min <= lambda_max");
  }
  return {ceil_div(n, b.lambda_max), ceil_div(n, b.lambda_min)};
}

std::vector<CandidateSetting> enumerate_candidates(std::size_t lmin, std::size_t lmax,
                                                   std::size_t d_max) {
  std::vector<CandidateSetting> out;
  for (std::size_t d = 3; d <= d_max; ++d) {
    std::size_t leaves = d * d;
    for (int h = 2; leaves <= lmax; ++h, leaves *= d) {
      if (leaves >= lmin) out.push_back({leaves, d, h, centre_distance(leaves, lmin, lmax)});
    }
  }
  return out;
}

CandidateSetting select_setting(const std::vector<CandidateSetting>& cands,
                                bool prefer_highest) {
  if (cands.empty()) throw Error(ErrorCode::kNoCandidate, "no candidate tree setting");
  auto better = [&](const CandidateSetting& a, const CandidateSetting& b) {
    if (a.height != b.height) return prefer_highest ? a.height > b.height : a.height < b.height;
    if (a.centre_distance != b.centre_distance) return a.centre_distance < b.centre_distance;
    return a.degree < b.degree;
  };
  CandidateSetting best = cands.front();
  for (const auto& c : cands) {
    if (better(c, best)) best = c;
  }
  return best;
}

TreeParams estimate_params(std::size_t n, const VisBounds& b, Variant variant,
                           const EstimateOptions& options) {
  if (n == 0) throw Error(ErrorCode::kEmptyDataset, "cannot estimate parameters for 0 objects");
  auto [lmin, lmax] = leaf_bounds(n, b);
  TreeParams p;
  p.variant = variant;
  auto cands = enumerate_candidates(lmin, lmax, options.d_max);
  if (!cands.empty()) {
    auto best = select_setting(cands, options.prefer_highest);
    p.leaves = best.leaves;
    p.degree = best.degree;
  } else {
    p.degree = 3;
    p.leaves = 0;
    double best = 0;
    for (std::size_t power = 1; power <= lmax; power *= 3) {
      if (power < lmin) continue;
      double c = centre_distance(power, lmin, lmax);
      if (p.leaves == 0 || c < best) {
        p.leaves = power;
        best = c;
      }
    }
    if (p.leaves == 0) p.leaves = lmin;
  }
  if (variant == Variant::kC) p.lambda = ceil_div(n, p.leaves);
  return p;
}

}  // namespace hetree
