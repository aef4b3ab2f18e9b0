#include "alws/types.hpp"

#include <Eigen/SVD>

#include <sstream>

namespace alws {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::rank_deficient: return "RankDeficient";
        case ErrorCode::non_finite: return "NonFinite";
        case ErrorCode::not_converged: return "NotConverged";
        case ErrorCode::non_positive_weight: return "NonPositiveWeight";
        case ErrorCode::mismatched_lengths: return "MismatchedLengths";
        case ErrorCode::mixed_exponents: return "MixedExponents";
        case ErrorCode::all_zero_weights: return "AllZeroWeights";
        case ErrorCode::budget_exceeds_support: return "BudgetExceedsSupport";
        case ErrorCode::cap_exceeded: return "CapExceeded";
        case ErrorCode::index_out_of_range: return "IndexOutOfRange";
        case ErrorCode::degenerate_constraint: return "DegenerateConstraint";
        case ErrorCode::empty_labels: return "EmptyLabels";
        case ErrorCode::absent_class: return "AbsentClass";
        case ErrorCode::query_budget_infeasible: return "QueryBudgetInfeasible";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::parse_error: return "ParseError";
    }
    return "Unknown";
}

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorCode::non_finite,
                    std::string(what) + ": input has non-finite entries");
    }
}

Vector check_full_column_rank(const Matrix& a, double rank_tolerance,
                              const char* what) {
    require_finite(a, what);
    if (a.rows() < 1 || a.cols() < 1) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(what) + ": matrix must be nonempty");
    }
    if (a.rows() < a.cols()) {
        throw Error(ErrorCode::rank_deficient,
                    std::string(what) + ": fewer rows than columns");
    }
    Eigen::BDCSVD<Matrix> svd(a);
    const Vector sigma = svd.singularValues();
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (!(smax > 0.0) || smin <= rank_tolerance * smax) {
        std::ostringstream msg;
        msg << what << ": rank deficient (sigma_min=" << smin
            << ", sigma_max=" << smax << ", tol=" << rank_tolerance << ")";
        throw Error(ErrorCode::rank_deficient, msg.str());
    }
    return sigma;
}

}  // namespace alws
