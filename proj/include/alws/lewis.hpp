#pragma once

#include "alws/types.hpp"

namespace alws {

// Leverage scores diag(A (A^T A)^-1 A^T), computed from an orthogonal
// factorization (squared row norms of the thin orthonormal factor).
// Equals the p = 2 weights below.
WeightVector leverage_scores(const Matrix& a,
                             double rank_tolerance = kDefaultRankTolerance);

// lp weights as the fixed point w_i = (a_i^T (A^T W^{1-2/p} A)^-1 a_i)^{p/2},
// iterated from the uniform d/n initializer with geometric damping
// w <- w^{1-gamma} * candidate^gamma. Plain iteration (gamma = 1) for p < 4;
// gamma = 1/2 for p >= 4, where the plain map need not contract. Throws
// not_converged (message carries the final residual) when max_iters is hit.
WeightVector lewis_weights(const Matrix& a, const LewisConfig& cfg);

// Max relative fixed-point residual
//   max_i | (a_i^T (A^T W^{1-2/p} A)^-1 a_i)^{p/2} / w_i - 1 |.
// Requires strictly positive weights (W^{1-2/p} is singular otherwise for
// p < 2). A reweighted Gram matrix that fails to factor reports
// rank_deficient.
double verify_fixed_point(const Matrix& a, const WeightVector& weights,
                          double p);

}  // namespace alws
