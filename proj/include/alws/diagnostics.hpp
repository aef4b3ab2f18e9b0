#pragma once

#include "alws/types.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace alws {

// One prefix point of the sum-of-max-weights curve.
struct CurvePoint {
    int k = 0;
    double sum_max = 0.0;     // T(k) = sum_i max_{j<=k} w_i
    double upper_bound = 0.0; // min(k * d_max, n)
};

// T(k') for every prefix k' = 1..k of the given weight family, with the
// min(k*d, n) upper bound alongside.
std::vector<CurvePoint> max_weight_sum_curve(
    const std::vector<WeightVector>& weights, std::uint64_t n);

// Mean fraction of each model's top-t% weighted rows captured by the top-t%
// of the elementwise-max ranking. Set size max(1, floor(t/100 * n)); ties
// broken by descending weight then ascending index.
double coverage_kappa(const std::vector<WeightVector>& weights,
                      double t_percent);

// max_c count(c) / min_c count(c). With a universe given, every universe
// class must be observed and only universe classes participate.
double class_imbalance(const std::vector<std::int64_t>& labels,
                       const std::optional<std::set<std::int64_t>>& universe =
                           std::nullopt);

struct BackboneOptions {
    double correlation = 0.95; // in [0, 1]
    bool identity_rotations = false;
    int max_rank_retries = 3;
    double rank_tolerance = kDefaultRankTolerance;
};

// Desk-scale stand-in for a family of network backbones: k matrices
// tanh(sqrt(c) * Z * R_j + sqrt(1-c) * N_j) over a shared latent gaussian Z,
// per-model random rotations R_j and fresh noise N_j. Redrawn (up to
// max_rank_retries) if a draw is rank deficient.
std::vector<Matrix> synthetic_backbones(std::uint64_t n, std::uint64_t d,
                                        std::uint64_t k, std::uint64_t seed,
                                        const BackboneOptions& opts = {});

}  // namespace alws
