#pragma once

#include <cmath>
#include "alws/rng.hpp"
#include "alws/types.hpp"

inline alws::Matrix random_gaussian(std::uint64_t seed, Eigen::Index n,
                                    Eigen::Index d) {
    alws::Philox gen(seed, 99);
    alws::Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = gen.next_gaussian();
    }
    return m;
}

inline alws::Vector random_gaussian_vector(std::uint64_t seed, Eigen::Index n) {
    alws::Philox gen(seed, 98);
    alws::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gen.next_gaussian();
    return v;
}

// Test-local p-th power norm, independent of the library implementation.
inline double lp_power_ref(const alws::Vector& v, double p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        acc += std::pow(std::abs(v(i)), p);
    }
    return acc;
}
