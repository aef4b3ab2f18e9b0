#pragma once

#include "alws/types.hpp"

#include <cstdint>
#include <vector>

namespace alws {

// Scalar 1-Lipschitz activations with f(0) = 0, applied coordinatewise.
enum class ActivationKind { identity, relu, tanh };

struct Activation {
    ActivationKind kind = ActivationKind::identity;

    double lipschitz() const { return 1.0; }
    double value(double u) const;
    double derivative(double u) const; // relu'(0) taken as 0

    Vector value(const Vector& u) const;
};

Activation make_activation(ActivationKind kind);
ActivationKind activation_from_name(const std::string& name);
const char* activation_name(ActivationKind kind);

// Sampled, reweighted single-neuron fit. SA and Sy are the rows already
// multiplied through by the sampling matrix.
struct NeuronProblem {
    Matrix sa;
    Vector sy;
    Activation f;
    double p = 2.0;
    double eps = 0.25;
    bool constrained = true;
};

struct NeuronSolution {
    Vector theta;
    double loss = 0.0;            // ||f(SA theta) - Sy||_p^p
    double constraint_lhs = 0.0;  // ||SA theta||_p^p
    double constraint_rhs = 0.0;  // ||Sy||_p^p / (eps L^p)
    bool constrained = false;
    bool converged = false;
    int iterations = 0;
    std::vector<double> loss_trace; // accepted-step losses of the best start
};

struct LpSolveOptions {
    double tol = 1e-10;     // relative objective tolerance
    int max_iters = 500;
    int restarts = 5;       // random restarts certifying the returned value
};

// ||v||_p^p.
double lp_power(const Vector& v, double p);

// ||f(A theta) - y||_p^p and its (sub)gradient in theta.
double neuron_objective(const Matrix& a, const Vector& y, const Activation& f,
                        double p, const Vector& theta);
Vector neuron_gradient(const Matrix& a, const Vector& y, const Activation& f,
                       double p, const Vector& theta);

// min_theta ||A theta - y||_p for p >= 1. Closed form at p = 2; IRLS with a
// residual smoothing floor elsewhere, subgradient fallback on stall, best of
// the seeded restarts returned.
Vector solve_lp_regression(const Matrix& a, const Vector& y, double p,
                           double tol = 1e-10);
Vector solve_lp_regression(const Matrix& a, const Vector& y, double p,
                           const LpSolveOptions& opts);

struct NeuronSolveOptions {
    int starts = 5;
    int max_iters = 500;
    double rel_tol = 1e-12;  // relative objective decrease treated as stall
};

// Approximate argmin of ||f(SA theta) - Sy||_p^p, over the norm ball
// E = {theta : ||SA theta||_p^p <= ||Sy||_p^p / (eps L^p)} when constrained.
// Projected gradient descent with backtracking, multi-start; start 0 is the
// origin, the remainder gaussian points pre-scaled into E.
NeuronSolution solve_constrained_neuron(const NeuronProblem& prob,
                                        std::uint64_t seed,
                                        const NeuronSolveOptions& opts = {});

// ||f(A theta_tilde) - y||_p^p / (||f(A theta*) - y||_p^p
//                                 + eps L^p ||A theta*||_p^p).
// Zero denominator: returns 0 when the numerator is also 0, +inf otherwise.
double evaluate_guarantee(const Matrix& a_full, const Vector& y_full,
                          const Vector& theta_tilde, const Vector& theta_star,
                          const Activation& f, double p, double eps);

}  // namespace alws
