#include "alws/regression.hpp"

#include "alws/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace alws {

namespace {

constexpr double kIrlsSmoothingFloor = 1e-10; // residual floor in IRLS weights
constexpr double kMinStep = 1e-14;

Vector gaussian_vector(Philox& gen, Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gen.next_gaussian();
    return v;
}

Vector least_squares(const Matrix& a, const Vector& y) {
    return a.colPivHouseholderQr().solve(y);
}

}  // namespace

double neuron_objective(const Matrix& a, const Vector& y, const Activation& f,
                        double p, const Vector& theta) {
    const Vector u = a * theta;
    Vector r(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) r(i) = f.value(u(i)) - y(i);
    return lp_power(r, p);
}

Vector neuron_gradient(const Matrix& a, const Vector& y, const Activation& f,
                       double p, const Vector& theta) {
    const Vector u = a * theta;
    Vector coeff(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double r = f.value(u(i)) - y(i);
        const double mag = std::abs(r);
        const double power = mag > 0.0 ? std::pow(mag, p - 1.0) : 0.0;
        coeff(i) = p * power * (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) *
                   f.derivative(u(i));
    }
    return a.transpose() * coeff;
}

namespace {

// Radial projection onto {theta : ||A theta||_p^p <= rhs}: the seminorm is
// absolutely homogeneous, so scaling by (rhs/lhs)^{1/p} lands exactly on the
// boundary. A one-ulp margin keeps rounded iterates feasible.
Vector project_ball(const Matrix& a, double p, double rhs, Vector theta) {
    const double lhs = lp_power(a * theta, p);
    if (lhs > rhs) {
        const double scale = std::pow(rhs / lhs, 1.0 / p) * (1.0 - 1e-12);
        theta *= scale;
    }
    return theta;
}

struct DescentResult {
    Vector theta;
    double loss = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

// Projected gradient descent with backtracking line search. `rhs` < 0 means
// unconstrained.
DescentResult descend(const Matrix& a, const Vector& y, const Activation& f,
                      double p, double rhs, Vector theta, int max_iters,
                      double rel_tol) {
    DescentResult res;
    if (rhs >= 0.0) theta = project_ball(a, p, rhs, std::move(theta));
    double loss = neuron_objective(a, y, f, p, theta);
    res.trace.push_back(loss);

    double step = 1.0;
    int stall_streak = 0;
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        const Vector g = neuron_gradient(a, y, f, p, theta);
        const double gnorm = g.norm();
        if (gnorm == 0.0) {
            res.converged = true;
            break;
        }
        // Keep the initial trial step on the scale of theta.
        if (iter == 0) {
            const double tscale = std::max(theta.norm(), 1.0);
            step = tscale / gnorm;
        }

        bool accepted = false;
        double alpha = step;
        while (alpha > kMinStep) {
            Vector cand = theta - alpha * g;
            if (rhs >= 0.0) cand = project_ball(a, p, rhs, std::move(cand));
            const double cand_loss = neuron_objective(a, y, f, p, cand);
            if (cand_loss < loss) {
                const double improvement =
                    (loss - cand_loss) / std::max(loss, 1e-300);
                theta = std::move(cand);
                loss = cand_loss;
                res.trace.push_back(loss);
                step = alpha * 2.0;
                accepted = true;
                stall_streak = improvement < rel_tol ? stall_streak + 1 : 0;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted || stall_streak >= 3) {
            res.converged = true;
            ++iter;
            break;
        }
    }
    res.theta = std::move(theta);
    res.loss = loss;
    res.iterations = iter;
    return res;
}

Vector irls(const Matrix& a, const Vector& y, double p,
            const LpSolveOptions& opts, Vector theta) {
    const Eigen::Index n = a.rows();
    double obj = lp_power(a * theta - y, p);
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const Vector r = a * theta - y;
        Vector sqrt_w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mag = std::max(std::abs(r(i)), kIrlsSmoothingFloor);
            sqrt_w(i) = std::pow(mag, (p - 2.0) / 2.0);
        }
        const Matrix aw = sqrt_w.asDiagonal() * a;
        const Vector yw = sqrt_w.asDiagonal() * y;
        const Vector target = aw.colPivHouseholderQr().solve(yw);

        // Damped step toward the IRLS target keeps the objective monotone
        // (undamped IRLS can overshoot for p > 2).
        double alpha = 1.0;
        double new_obj = obj;
        Vector cand = theta;
        while (alpha > 1e-12) {
            cand = theta + alpha * (target - theta);
            new_obj = lp_power(a * cand - y, p);
            if (new_obj <= obj) break;
            alpha *= 0.5;
        }
        if (alpha <= 1e-12) {
            // Stalled: finish with subgradient descent.
            Activation ident = make_activation(ActivationKind::identity);
            DescentResult sub = descend(a, y, ident, p, -1.0, theta,
                                        opts.max_iters, opts.tol * 1e-2);
            return sub.loss < obj ? sub.theta : theta;
        }
        const double improvement = (obj - new_obj) / std::max(obj, 1e-300);
        theta = cand;
        obj = new_obj;
        if (improvement < opts.tol * 1e-2 && iter > 2) break;
    }
    return theta;
}

}  // namespace

double Activation::value(double u) const {
    switch (kind) {
        case ActivationKind::identity: return u;
        case ActivationKind::relu: return u > 0.0 ? u : 0.0;
        case ActivationKind::tanh: return std::tanh(u);
    }
    return u;
}

double Activation::derivative(double u) const {
    switch (kind) {
        case ActivationKind::identity: return 1.0;
        case ActivationKind::relu: return u > 0.0 ? 1.0 : 0.0;
        case ActivationKind::tanh: {
            const double t = std::tanh(u);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

Vector Activation::value(const Vector& u) const {
    Vector out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = value(u(i));
    return out;
}

Activation make_activation(ActivationKind kind) { return Activation{kind}; }

ActivationKind activation_from_name(const std::string& name) {
    if (name == "identity") return ActivationKind::identity;
    if (name == "relu") return ActivationKind::relu;
    if (name == "tanh") return ActivationKind::tanh;
    throw Error(ErrorCode::invalid_argument,
                "unknown activation '" + name + "' (identity|relu|tanh)");
}

const char* activation_name(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::identity: return "identity";
        case ActivationKind::relu: return "relu";
        case ActivationKind::tanh: return "tanh";
    }
    return "identity";
}

double lp_power(const Vector& v, double p) {
    if (p == 2.0) return v.squaredNorm();
    if (p == 1.0) return v.array().abs().sum();
    return v.array().abs().pow(p).sum();
}

Vector solve_lp_regression(const Matrix& a, const Vector& y, double p,
                           double tol) {
    LpSolveOptions opts;
    opts.tol = tol;
    return solve_lp_regression(a, y, p, opts);
}

Vector solve_lp_regression(const Matrix& a, const Vector& y, double p,
                           const LpSolveOptions& opts) {
    if (!(p >= 1.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "solve_lp_regression: p must be >= 1");
    }
    if (a.rows() != y.size()) {
        throw Error(ErrorCode::mismatched_lengths,
                    "solve_lp_regression: row count != label count");
    }
    require_finite(a, "solve_lp_regression");
    require_finite(y, "solve_lp_regression");
    check_full_column_rank(a, kDefaultRankTolerance, "solve_lp_regression");

    const Vector theta_ls = least_squares(a, y);
    if (p == 2.0) return theta_ls;

    Vector best = irls(a, y, p, opts, theta_ls);
    double best_obj = lp_power(a * best - y, p);

    // Certifying restarts: the problem is convex, so every run targets the
    // same optimum; returning the best keeps the certificate trivial.
    Philox gen(0x1b5a11CE, /*stream=*/7);
    const double scale = std::max(theta_ls.norm(), 1.0);
    for (int r = 0; r < opts.restarts; ++r) {
        Philox sub = gen.substream(static_cast<std::uint64_t>(r));
        Vector start = theta_ls + scale * gaussian_vector(sub, a.cols());
        Vector cand = irls(a, y, p, opts, std::move(start));
        const double obj = lp_power(a * cand - y, p);
        if (obj < best_obj) {
            best_obj = obj;
            best = std::move(cand);
        }
    }
    return best;
}

NeuronSolution solve_constrained_neuron(const NeuronProblem& prob,
                                        std::uint64_t seed,
                                        const NeuronSolveOptions& opts) {
    const Matrix& sa = prob.sa;
    const Vector& sy = prob.sy;
    if (sa.rows() != sy.size()) {
        throw Error(ErrorCode::mismatched_lengths,
                    "solve_constrained_neuron: SA rows != Sy length");
    }
    if (!(prob.p >= 1.0) || !(prob.eps > 0.0) || !(prob.eps < 1.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "solve_constrained_neuron: need p >= 1 and eps in (0,1)");
    }
    require_finite(sa, "solve_constrained_neuron");
    require_finite(sy, "solve_constrained_neuron");

    const double lp = std::pow(prob.f.lipschitz(), prob.p);
    const double rhs_value = lp_power(sy, prob.p) / (prob.eps * lp);

    NeuronSolution sol;
    sol.constrained = prob.constrained;
    sol.constraint_rhs = rhs_value;

    if (prob.constrained && rhs_value == 0.0) {
        // Sy = 0 collapses E to {0}.
        sol.theta = Vector::Zero(sa.cols());
        sol.loss = 0.0;
        sol.constraint_lhs = 0.0;
        sol.converged = true;
        return sol;
    }

    if (!prob.constrained && prob.f.kind == ActivationKind::identity) {
        sol.theta = solve_lp_regression(sa, sy, prob.p);
        sol.loss = lp_power(sa * sol.theta - sy, prob.p);
        sol.constraint_lhs = lp_power(sa * sol.theta, prob.p);
        sol.converged = true;
        sol.iterations = 0;
        return sol;
    }

    const double rhs = prob.constrained ? rhs_value : -1.0;

    // Start list: origin, a least-squares warm start, then gaussian points;
    // everything projected into E before descending.
    std::vector<Vector> starts;
    starts.push_back(Vector::Zero(sa.cols()));
    const Vector theta_ls = least_squares(sa, sy);
    if (theta_ls.allFinite()) starts.push_back(theta_ls);
    Philox gen(seed, /*stream=*/1);
    const double scale = std::max(theta_ls.allFinite() ? theta_ls.norm() : 0.0,
                                  1.0);
    while (static_cast<int>(starts.size()) < std::max(opts.starts, 1)) {
        Philox sub = gen.substream(starts.size());
        starts.push_back(scale * gaussian_vector(sub, sa.cols()));
    }

    DescentResult best;
    for (const Vector& start : starts) {
        DescentResult run = descend(sa, sy, prob.f, prob.p, rhs, start,
                                    opts.max_iters, opts.rel_tol);
        if (run.loss < best.loss) best = std::move(run);
    }

    sol.theta = best.theta;
    sol.loss = best.loss;
    sol.constraint_lhs = lp_power(sa * sol.theta, prob.p);
    sol.converged = best.converged;
    sol.iterations = best.iterations;
    sol.loss_trace = std::move(best.trace);
    return sol;
}

double evaluate_guarantee(const Matrix& a_full, const Vector& y_full,
                          const Vector& theta_tilde, const Vector& theta_star,
                          const Activation& f, double p, double eps) {
    const double lp = std::pow(f.lipschitz(), p);
    const double numer =
        lp_power(f.value(a_full * theta_tilde) - y_full, p);
    const double opt = lp_power(f.value(a_full * theta_star) - y_full, p);
    const double denom = opt + eps * lp * lp_power(a_full * theta_star, p);
    if (denom == 0.0) {
        return numer == 0.0 ? 0.0
                            : std::numeric_limits<double>::infinity();
    }
    return numer / denom;
}

}  // namespace alws
