#include "alws/lewis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace alws {

namespace {

// Quadratic forms a_i^T (A^T diag(scales) A)^-1 a_i for all rows at once,
// via one Cholesky of the reweighted Gram matrix.
Vector gram_inverse_quadratic_forms(const Matrix& a, const Vector& scales,
                                    const char* what) {
    const Matrix gram =
        a.transpose() * scales.asDiagonal() * a;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::rank_deficient,
                    std::string(what) +
                        ": reweighted Gram matrix is not positive definite");
    }
    // a_i^T G^-1 a_i = ||L^-1 a_i||^2.
    const Matrix half = llt.matrixL().solve(Matrix(a.transpose()));
    return half.colwise().squaredNorm().transpose();
}

Vector clamp01(Vector w) {
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        w(i) = std::min(1.0, std::max(0.0, w(i)));
    }
    return w;
}

}  // namespace

WeightVector leverage_scores(const Matrix& a, double rank_tolerance) {
    require_finite(a, "leverage_scores");
    if (a.rows() < a.cols() || a.cols() < 1) {
        throw Error(ErrorCode::rank_deficient,
                    "leverage_scores: need n >= d >= 1");
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
    const Vector sigma = svd.singularValues();
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (!(smax > 0.0) || smin <= rank_tolerance * smax) {
        std::ostringstream msg;
        msg << "leverage_scores: rank deficient (sigma_min=" << smin
            << ", sigma_max=" << smax << ")";
        throw Error(ErrorCode::rank_deficient, msg.str());
    }
    WeightVector out;
    out.p = 2.0;
    out.w = clamp01(svd.matrixU().rowwise().squaredNorm());
    return out;
}

WeightVector lewis_weights(const Matrix& a, const LewisConfig& cfg) {
    if (!(cfg.p > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "lewis_weights: p must be > 0");
    }
    if (cfg.max_iters < 1 || !(cfg.fp_tolerance > 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "lewis_weights: max_iters >= 1 and fp_tolerance > 0 required");
    }
    check_full_column_rank(a, cfg.rank_tolerance, "lewis_weights");

    const Eigen::Index n = a.rows();
    const Eigen::Index d = a.cols();
    const double p = cfg.p;
    const double gamma = cfg.effective_damping();
    const double weight_exp = 1.0 - 2.0 / p;

    Vector w = Vector::Constant(n, static_cast<double>(d) / n);
    double residual = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const Vector scales = w.array().pow(weight_exp);
        const Vector quad =
            gram_inverse_quadratic_forms(a, scales, "lewis_weights");
        const Vector candidate = quad.array().pow(p / 2.0);

        residual = (candidate.array() / w.array() - 1.0).abs().maxCoeff();
        if (!std::isfinite(residual)) {
            throw Error(ErrorCode::rank_deficient,
                        "lewis_weights: iteration produced non-finite weights");
        }
        if (residual <= cfg.fp_tolerance) {
            WeightVector out;
            out.p = p;
            out.w = clamp01(std::move(w));
            return out;
        }
        if (gamma >= 1.0) {
            w = candidate;
        } else {
            w = (w.array().pow(1.0 - gamma) * candidate.array().pow(gamma))
                    .matrix();
        }
    }

    std::ostringstream msg;
    msg << "lewis_weights: no convergence after " << cfg.max_iters
        << " iterations (p=" << p << ", residual=" << residual
        << ", tolerance=" << cfg.fp_tolerance << ")";
    throw Error(ErrorCode::not_converged, msg.str());
}

double verify_fixed_point(const Matrix& a, const WeightVector& weights,
                          double p) {
    require_finite(a, "verify_fixed_point");
    if (weights.size() != a.rows()) {
        throw Error(ErrorCode::mismatched_lengths,
                    "verify_fixed_point: weight length != row count");
    }
    if ((weights.w.array() <= 0.0).any()) {
        throw Error(ErrorCode::non_positive_weight,
                    "verify_fixed_point: weights must be strictly positive");
    }
    const Vector scales = weights.w.array().pow(1.0 - 2.0 / p);
    const Vector quad =
        gram_inverse_quadratic_forms(a, scales, "verify_fixed_point");
    const Vector candidate = quad.array().pow(p / 2.0);
    return (candidate.array() / weights.w.array() - 1.0).abs().maxCoeff();
}

}  // namespace alws
