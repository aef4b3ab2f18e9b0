#pragma once

#include "alws/regression.hpp"
#include "alws/sampling.hpp"
#include "alws/types.hpp"

#include <cstdint>
#include <utility>

namespace alws {

enum class DistortionMethod { exact_p2, monte_carlo };

// Measured embedding distortion of S for A. epsilon_hat is on the p-th power
// scale (|‖SAx‖_p^p / ‖Ax‖_p^p - 1|); epsilon_norm is the same bound
// converted to the norm scale, (1 + epsilon_hat)^{1/p} - 1.
struct DistortionReport {
    double epsilon_hat = 0.0;
    double epsilon_norm = 0.0;
    DistortionMethod method = DistortionMethod::exact_p2;
    std::int64_t trials = 0;
};

// sup_theta |‖SA theta‖_2^2 - ‖A theta‖_2^2| / ‖A theta‖_2^2, computed as
// the spectral norm of the whitened Gram difference
// G^{-1/2} (A^T S^T S A - G) G^{-1/2}, G = A^T A.
DistortionReport exact_distortion_p2(const Matrix& a, const SamplingMatrix& s,
                                     double rank_tolerance =
                                         kDefaultRankTolerance);

// Max over random unit directions of |‖SA theta‖_p^p / ‖A theta‖_p^p - 1|;
// a lower bound on the true distortion.
DistortionReport monte_carlo_distortion(const Matrix& a,
                                        const SamplingMatrix& s, double p,
                                        std::int64_t trials,
                                        std::uint64_t seed);

// Independent reference optimum for guarantee checks: best of `restarts`
// dense multi-start minimizations of ||f(A theta) - y||_p^p on the full
// data. Defers to the closed-form/convex solver for the identity activation.
// Returns (theta*, OPT).
std::pair<Vector, double> brute_force_opt(const Matrix& a, const Vector& y,
                                          const Activation& f, double p,
                                          int restarts = 50,
                                          std::uint64_t seed = 0);

}  // namespace alws
