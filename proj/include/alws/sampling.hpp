#pragma once

#include "alws/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace alws {

// Normalized max-weight sampling probabilities over the unlabeled pool.
struct SamplingDistribution {
    Vector probs;                 // >= 0, sums to 1
    Eigen::Index support_size = 0; // count of strictly positive entries
    double sum_max_weights = 0.0;  // unnormalized sum T (diagnostic)
    double p = 2.0;                // exponent of the source weights

    Eigen::Index size() const { return probs.size(); }
};

// Record of one sampling run: the draw sequence (with repetitions) and the
// distinct queried set. m = draws.size() counts every draw.
struct QueryPlan {
    std::vector<std::uint64_t> draws;
    std::vector<std::uint64_t> distinct; // ascending, unique
    std::uint64_t m = 0;
    std::uint64_t seed = 0;
};

// Sparse reweighted row-selection operator: row r of the operator picks
// source row `index` scaled by `scale`.
struct SamplingMatrix {
    struct Entry {
        std::uint64_t index;
        double scale;
    };
    std::vector<Entry> rows;
    std::uint64_t n_source = 0;
    double p = 2.0;

    Eigen::Index row_count() const {
        return static_cast<Eigen::Index>(rows.size());
    }
};

// cap_exceeded error carrying the partial plan gathered before the cap hit.
class CapExceededError : public Error {
public:
    CapExceededError(const std::string& what, QueryPlan partial)
        : Error(ErrorCode::cap_exceeded, what), partial_(std::move(partial)) {}

    const QueryPlan& partial_plan() const { return partial_; }

private:
    QueryPlan partial_;
};

// probs_i = max_j w_i(U^j) / sum_i max_j w_i(U^j). All vectors must share
// length and exponent; the unnormalized sum is kept as a diagnostic.
SamplingDistribution max_weight_distribution(
    const std::vector<WeightVector>& weights);

// Default draw cap for draw_until_distinct; bounds coupon-collector
// pathologies on skewed distributions.
std::uint64_t default_draw_cap(std::uint64_t tau);

// I.i.d. draws from `dist` appended until `tau` distinct indices have been
// seen; m counts all draws including repetitions. Deterministic given seed.
QueryPlan draw_until_distinct(const SamplingDistribution& dist,
                              std::uint64_t tau, std::uint64_t seed,
                              std::uint64_t m_cap);

// Exactly m i.i.d. draws (the fixed-sample-size scheme).
QueryPlan draw_iid(const SamplingDistribution& dist, std::uint64_t m,
                   std::uint64_t seed);

// Rows (i, 1) for the n_l labeled rows, then one row
// (n_l + q, (m * p_q)^{-1/p}) per draw q, in draw order.
SamplingMatrix build_sampling_matrix(const QueryPlan& plan,
                                     const SamplingDistribution& dist,
                                     std::uint64_t n_l, double p);

// Coin-flip variant: row i kept independently with probability
// min(beta * w_i, 1) and scale p_i^{-1/p}; random row count.
SamplingMatrix bernoulli_sampling_matrix(const WeightVector& weights,
                                         double beta, double p,
                                         std::uint64_t seed);

// ceil(c * eps^-4 * T * d^{max(p/2-1,0)} * log^2(max(d,2))
//      * log(max(dT/eps, 2))), the sample-size bound with user constant c.
std::int64_t sample_size_bound(std::int64_t d, double p, double eps, double T,
                               double c);

// Applies S: output row r = scale_r * m.row(index_r).
Matrix apply(const SamplingMatrix& s, const Matrix& m);
Vector apply(const SamplingMatrix& s, const Vector& v);

}  // namespace alws
