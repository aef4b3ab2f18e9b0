#include "alws/diagnostics.hpp"

#include "alws/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace alws {

namespace {

// Row indices ranked by weight descending, index ascending on ties.
std::vector<Eigen::Index> ranked_indices(const Vector& w) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(w.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (w(a) != w(b)) return w(a) > w(b);
        return a < b;
    });
    return idx;
}

Matrix gaussian_matrix(Philox& gen, Eigen::Index n, Eigen::Index d) {
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = gen.next_gaussian();
    }
    return m;
}

// Random rotation: Q factor of a gaussian matrix with the sign fixed so the
// draw is uniform over the orthogonal group.
Matrix random_rotation(Philox& gen, Eigen::Index d) {
    const Matrix g = gaussian_matrix(gen, d, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

bool has_full_column_rank(const Matrix& a, double tol) {
    Eigen::BDCSVD<Matrix> svd(a);
    const Vector sigma = svd.singularValues();
    return sigma(0) > 0.0 && sigma(sigma.size() - 1) > tol * sigma(0);
}

}  // namespace

std::vector<CurvePoint> max_weight_sum_curve(
    const std::vector<WeightVector>& weights, std::uint64_t n) {
    if (weights.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    "max_weight_sum_curve: need at least one weight vector");
    }
    Vector running_max =
        Vector::Zero(static_cast<Eigen::Index>(n));
    std::vector<CurvePoint> curve;
    curve.reserve(weights.size());
    double d_max = 0.0;
    int k = 0;
    for (const WeightVector& wv : weights) {
        if (wv.size() != static_cast<Eigen::Index>(n)) {
            throw Error(ErrorCode::mismatched_lengths,
                        "max_weight_sum_curve: weight vector length != n");
        }
        running_max = running_max.cwiseMax(wv.w);
        d_max = std::max(d_max, wv.sum());
        ++k;
        CurvePoint point;
        point.k = k;
        point.sum_max = running_max.sum();
        point.upper_bound = std::min(k * d_max, static_cast<double>(n));
        curve.push_back(point);
    }
    return curve;
}

double coverage_kappa(const std::vector<WeightVector>& weights,
                      double t_percent) {
    if (weights.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    "coverage_kappa: need at least one weight vector");
    }
    if (!(t_percent > 0.0) || t_percent > 100.0) {
        throw Error(ErrorCode::invalid_argument,
                    "coverage_kappa: t must be in (0, 100]");
    }
    const Eigen::Index n = weights.front().size();
    for (const WeightVector& wv : weights) {
        if (wv.size() != n) {
            throw Error(ErrorCode::mismatched_lengths,
                        "coverage_kappa: weight vectors differ in length");
        }
    }
    const std::size_t top = static_cast<std::size_t>(std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::floor(t_percent / 100.0 *
                                                static_cast<double>(n)))));

    Vector max_w = Vector::Zero(n);
    for (const WeightVector& wv : weights) max_w = max_w.cwiseMax(wv.w);
    const std::vector<Eigen::Index> max_ranked = ranked_indices(max_w);
    std::unordered_set<Eigen::Index> top_set(max_ranked.begin(),
                                             max_ranked.begin() + top);

    double total = 0.0;
    for (const WeightVector& wv : weights) {
        const std::vector<Eigen::Index> ranked = ranked_indices(wv.w);
        std::size_t overlap = 0;
        for (std::size_t i = 0; i < top; ++i) {
            if (top_set.count(ranked[i]) > 0) ++overlap;
        }
        total += static_cast<double>(overlap) / static_cast<double>(top);
    }
    return total / static_cast<double>(weights.size());
}

double class_imbalance(const std::vector<std::int64_t>& labels,
                       const std::optional<std::set<std::int64_t>>& universe) {
    if (labels.empty()) {
        throw Error(ErrorCode::empty_labels, "class_imbalance: no labels");
    }
    std::map<std::int64_t, std::uint64_t> counts;
    for (const std::int64_t c : labels) ++counts[c];

    std::uint64_t max_count = 0;
    std::uint64_t min_count = std::numeric_limits<std::uint64_t>::max();
    if (universe) {
        for (const std::int64_t c : *universe) {
            const auto it = counts.find(c);
            if (it == counts.end()) {
                std::ostringstream msg;
                msg << "class_imbalance: class " << c
                    << " from the universe has no observations";
                throw Error(ErrorCode::absent_class, msg.str());
            }
            max_count = std::max(max_count, it->second);
            min_count = std::min(min_count, it->second);
        }
    } else {
        for (const auto& [c, count] : counts) {
            (void)c;
            max_count = std::max(max_count, count);
            min_count = std::min(min_count, count);
        }
    }
    return static_cast<double>(max_count) / static_cast<double>(min_count);
}

std::vector<Matrix> synthetic_backbones(std::uint64_t n, std::uint64_t d,
                                        std::uint64_t k, std::uint64_t seed,
                                        const BackboneOptions& opts) {
    if (n <= d || d < 1 || k < 1) {
        throw Error(ErrorCode::invalid_argument,
                    "synthetic_backbones: need n > d >= 1 and k >= 1");
    }
    if (opts.correlation < 0.0 || opts.correlation > 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "synthetic_backbones: correlation must be in [0, 1]");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(n);
    const Eigen::Index cols = static_cast<Eigen::Index>(d);
    const double shared = std::sqrt(opts.correlation);
    const double fresh = std::sqrt(1.0 - opts.correlation);

    Philox root(seed, /*stream=*/5);
    Philox zgen = root.substream(0);
    const Matrix z = gaussian_matrix(zgen, rows, cols);

    std::vector<Matrix> out;
    out.reserve(k);
    for (std::uint64_t j = 0; j < k; ++j) {
        Matrix candidate;
        bool ok = false;
        for (int attempt = 0; attempt <= opts.max_rank_retries; ++attempt) {
            Philox mgen = root.substream(1 + j * 16 + attempt);
            const Matrix rot = opts.identity_rotations
                                   ? Matrix::Identity(cols, cols)
                                   : random_rotation(mgen, cols);
            const Matrix noise = gaussian_matrix(mgen, rows, cols);
            candidate =
                ((shared * (z * rot) + fresh * noise).array().tanh()).matrix();
            if (has_full_column_rank(candidate, opts.rank_tolerance)) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw Error(ErrorCode::rank_deficient,
                        "synthetic_backbones: rank-deficient draw after retries");
        }
        out.push_back(std::move(candidate));
    }
    return out;
}

}  // namespace alws
