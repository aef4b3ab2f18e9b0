#include "alws/sampling.hpp"

#include "alws/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace alws {

namespace {

// Inverse-CDF categorical sampler. The cdf is snapped to exactly 1 from the
// last positive entry onward, so zero-probability entries are never drawn
// (interior zeros leave the cdf flat; u < 1 never reaches the snapped tail).
class Categorical {
public:
    explicit Categorical(const Vector& probs) : cdf_(probs.size()) {
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (Eigen::Index i = 0; i < probs.size(); ++i) {
            acc += probs(i);
            cdf_[static_cast<std::size_t>(i)] = acc;
            if (probs(i) > 0.0) last_positive = static_cast<std::size_t>(i);
        }
        for (std::size_t i = last_positive; i < cdf_.size(); ++i) {
            cdf_[i] = 1.0;
        }
    }

    std::uint64_t draw(Philox& gen) const {
        const double u = gen.next_double();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t idx = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                     static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
        return static_cast<std::uint64_t>(idx);
    }

private:
    std::vector<double> cdf_;
};

void finalize_distinct(QueryPlan& plan) {
    std::set<std::uint64_t> uniq(plan.draws.begin(), plan.draws.end());
    plan.distinct.assign(uniq.begin(), uniq.end());
    plan.m = plan.draws.size();
}

}  // namespace

SamplingDistribution max_weight_distribution(
    const std::vector<WeightVector>& weights) {
    if (weights.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    "max_weight_distribution: need at least one weight vector");
    }
    const Eigen::Index n = weights.front().size();
    const double p = weights.front().p;
    Vector max_w = Vector::Zero(n);
    for (const WeightVector& wv : weights) {
        if (wv.size() != n) {
            throw Error(ErrorCode::mismatched_lengths,
                        "max_weight_distribution: weight vectors differ in length");
        }
        if (wv.p != p) {
            throw Error(ErrorCode::mixed_exponents,
                        "max_weight_distribution: weight vectors computed for "
                        "different exponents");
        }
        require_finite(wv.w, "max_weight_distribution");
        max_w = max_w.cwiseMax(wv.w);
    }
    const double total = max_w.sum();
    if (!(total > 0.0)) {
        throw Error(ErrorCode::all_zero_weights,
                    "max_weight_distribution: all weights are zero");
    }

    SamplingDistribution dist;
    dist.probs = max_w / total;
    dist.sum_max_weights = total;
    dist.p = p;
    dist.support_size = (dist.probs.array() > 0.0).count();
    return dist;
}

std::uint64_t default_draw_cap(std::uint64_t tau) {
    const double logt = std::ceil(std::log(static_cast<double>(tau) + 1.0));
    return 50 * tau * static_cast<std::uint64_t>(std::max(1.0, logt));
}

QueryPlan draw_until_distinct(const SamplingDistribution& dist,
                              std::uint64_t tau, std::uint64_t seed,
                              std::uint64_t m_cap) {
    if (tau < 1) {
        throw Error(ErrorCode::invalid_argument,
                    "draw_until_distinct: tau must be >= 1");
    }
    if (tau > static_cast<std::uint64_t>(dist.support_size)) {
        std::ostringstream msg;
        msg << "draw_until_distinct: tau=" << tau << " exceeds support size "
            << dist.support_size;
        throw Error(ErrorCode::budget_exceeds_support, msg.str());
    }
    if (m_cap < tau) {
        throw Error(ErrorCode::invalid_argument,
                    "draw_until_distinct: m_cap must be >= tau");
    }

    Categorical cat(dist.probs);
    Philox gen(seed, /*stream=*/0);
    QueryPlan plan;
    plan.seed = seed;
    std::vector<bool> seen(static_cast<std::size_t>(dist.size()), false);
    std::uint64_t distinct = 0;

    while (distinct < tau) {
        if (plan.draws.size() >= m_cap) {
            finalize_distinct(plan);
            std::ostringstream msg;
            msg << "draw_until_distinct: cap of " << m_cap
                << " draws reached with " << distinct << "/" << tau
                << " distinct indices";
            throw CapExceededError(msg.str(), std::move(plan));
        }
        const std::uint64_t q = cat.draw(gen);
        plan.draws.push_back(q);
        if (!seen[static_cast<std::size_t>(q)]) {
            seen[static_cast<std::size_t>(q)] = true;
            ++distinct;
        }
    }
    finalize_distinct(plan);
    return plan;
}

QueryPlan draw_iid(const SamplingDistribution& dist, std::uint64_t m,
                   std::uint64_t seed) {
    if (m < 1) {
        throw Error(ErrorCode::invalid_argument, "draw_iid: m must be >= 1");
    }
    Categorical cat(dist.probs);
    Philox gen(seed, /*stream=*/0);
    QueryPlan plan;
    plan.seed = seed;
    plan.draws.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        plan.draws.push_back(cat.draw(gen));
    }
    finalize_distinct(plan);
    return plan;
}

SamplingMatrix build_sampling_matrix(const QueryPlan& plan,
                                     const SamplingDistribution& dist,
                                     std::uint64_t n_l, double p) {
    if (!(p >= 1.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "build_sampling_matrix: p must be >= 1");
    }
    SamplingMatrix s;
    s.p = p;
    s.n_source = n_l + static_cast<std::uint64_t>(dist.size());
    s.rows.reserve(n_l + plan.draws.size());
    for (std::uint64_t i = 0; i < n_l; ++i) {
        s.rows.push_back({i, 1.0});
    }
    const double m = static_cast<double>(plan.m);
    for (const std::uint64_t q : plan.draws) {
        if (q >= static_cast<std::uint64_t>(dist.size())) {
            throw Error(ErrorCode::index_out_of_range,
                        "build_sampling_matrix: draw index outside distribution");
        }
        const double pq = dist.probs(static_cast<Eigen::Index>(q));
        if (!(pq > 0.0)) {
            throw Error(ErrorCode::index_out_of_range,
                        "build_sampling_matrix: drawn index has zero probability");
        }
        s.rows.push_back({n_l + q, std::pow(m * pq, -1.0 / p)});
    }
    return s;
}

SamplingMatrix bernoulli_sampling_matrix(const WeightVector& weights,
                                         double beta, double p,
                                         std::uint64_t seed) {
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "bernoulli_sampling_matrix: beta must be > 0");
    }
    if (!(p >= 1.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "bernoulli_sampling_matrix: p must be >= 1");
    }
    require_finite(weights.w, "bernoulli_sampling_matrix");

    Philox gen(seed, /*stream=*/0);
    SamplingMatrix s;
    s.p = p;
    s.n_source = static_cast<std::uint64_t>(weights.size());
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double keep = std::min(beta * weights.w(i), 1.0);
        const double u = gen.next_double();
        if (u < keep) {
            s.rows.push_back({static_cast<std::uint64_t>(i),
                              std::pow(keep, -1.0 / p)});
        }
    }
    return s;
}

std::int64_t sample_size_bound(std::int64_t d, double p, double eps, double T,
                               double c) {
    if (d < 1 || !(eps > 0.0) || !(eps < 1.0) || !(T > 0.0) || !(c > 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "sample_size_bound: require d >= 1, eps in (0,1), T > 0, "
                    "c > 0");
    }
    const double dd = static_cast<double>(d);
    const double d_exp = std::max(p / 2.0 - 1.0, 0.0);
    const double log_d = std::log(std::max(dd, 2.0));
    const double log_term = std::log(std::max(dd * T / eps, 2.0));
    const double value = c * std::pow(eps, -4.0) * T * std::pow(dd, d_exp) *
                         log_d * log_d * log_term;
    return static_cast<std::int64_t>(std::ceil(value));
}

Matrix apply(const SamplingMatrix& s, const Matrix& m) {
    if (static_cast<std::uint64_t>(m.rows()) != s.n_source) {
        throw Error(ErrorCode::mismatched_lengths,
                    "apply: operand rows != sampling matrix source count");
    }
    Matrix out(s.row_count(), m.cols());
    for (Eigen::Index r = 0; r < s.row_count(); ++r) {
        const auto& e = s.rows[static_cast<std::size_t>(r)];
        out.row(r) = e.scale * m.row(static_cast<Eigen::Index>(e.index));
    }
    return out;
}

Vector apply(const SamplingMatrix& s, const Vector& v) {
    if (static_cast<std::uint64_t>(v.size()) != s.n_source) {
        throw Error(ErrorCode::mismatched_lengths,
                    "apply: operand length != sampling matrix source count");
    }
    Vector out(s.row_count());
    for (Eigen::Index r = 0; r < s.row_count(); ++r) {
        const auto& e = s.rows[static_cast<std::size_t>(r)];
        out(r) = e.scale * v(static_cast<Eigen::Index>(e.index));
    }
    return out;
}

}  // namespace alws
