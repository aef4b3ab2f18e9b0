#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace alws {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Machine-readable failure taxonomy. Every throwing path in the library
// carries one of these codes so that the C API and the CLI can map failures
// to stable status/exit codes without string matching.
enum class ErrorCode {
    invalid_argument,
    rank_deficient,
    non_finite,
    not_converged,
    non_positive_weight,
    mismatched_lengths,
    mixed_exponents,
    all_zero_weights,
    budget_exceeds_support,
    cap_exceeded,
    index_out_of_range,
    degenerate_constraint,
    empty_labels,
    absent_class,
    query_budget_infeasible,
    io_error,
    parse_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Per-row lp importance weights of a matrix, tagged with the exponent they
// were computed for. Invariants: w_i in [0,1], sum(w) = d (column count).
struct WeightVector {
    Vector w;
    double p = 2.0;

    Eigen::Index size() const { return w.size(); }
    double sum() const { return w.sum(); }
};

// Iteration schedule for the fixed-point weight computation.
struct LewisConfig {
    double p = 2.0;
    int max_iters = 200;
    double fp_tolerance = 1e-8;   // max relative fixed-point residual
    double rank_tolerance = 1e-10; // sigma_min <= tol * sigma_max => rank deficient
    double damping = 0.0;          // 0 = by exponent: 1 for p < 4, 1/2 for p >= 4

    static LewisConfig defaults(double p) {
        LewisConfig cfg;
        cfg.p = p;
        return cfg;
    }

    double effective_damping() const {
        if (damping > 0.0) return damping;
        return p < 4.0 ? 1.0 : 0.5;
    }
};

inline constexpr double kDefaultRankTolerance = 1e-10;

// Throws non_finite unless every entry of `m` is finite.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

// Singular values of A (descending). Throws rank_deficient when
// sigma_min <= rank_tolerance * sigma_max, non_finite on bad input.
Vector check_full_column_rank(const Matrix& a, double rank_tolerance,
                              const char* what);

}  // namespace alws
