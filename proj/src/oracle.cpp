#include "alws/oracle.hpp"

#include "alws/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace alws {

DistortionReport exact_distortion_p2(const Matrix& a, const SamplingMatrix& s,
                                     double rank_tolerance) {
    check_full_column_rank(a, rank_tolerance, "exact_distortion_p2");
    const Matrix gram = a.transpose() * a;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::rank_deficient,
                    "exact_distortion_p2: Gram matrix not positive definite");
    }
    const Matrix sa = apply(s, a);
    const Matrix diff = sa.transpose() * sa - gram;
    // L^-1 diff L^-T, symmetric by construction.
    const Matrix half = llt.matrixL().solve(diff);
    const Matrix whitened = llt.matrixL().solve(Matrix(half.transpose()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened,
                                              Eigen::EigenvaluesOnly);
    const double eps_sq = eig.eigenvalues().cwiseAbs().maxCoeff();

    DistortionReport report;
    report.epsilon_hat = eps_sq;
    report.epsilon_norm = std::sqrt(1.0 + eps_sq) - 1.0;
    report.method = DistortionMethod::exact_p2;
    report.trials = 0;
    return report;
}

DistortionReport monte_carlo_distortion(const Matrix& a,
                                        const SamplingMatrix& s, double p,
                                        std::int64_t trials,
                                        std::uint64_t seed) {
    if (trials < 1) {
        throw Error(ErrorCode::invalid_argument,
                    "monte_carlo_distortion: trials must be >= 1");
    }
    require_finite(a, "monte_carlo_distortion");
    const Matrix sa = apply(s, a);
    Philox gen(seed, /*stream=*/3);
    double worst = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        Vector theta(a.cols());
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            theta(i) = gen.next_gaussian();
        }
        const double nrm = theta.norm();
        if (nrm == 0.0) continue;
        theta /= nrm;
        const double denom = lp_power(a * theta, p);
        if (denom == 0.0) continue;
        const double ratio = lp_power(sa * theta, p) / denom;
        worst = std::max(worst, std::abs(ratio - 1.0));
    }
    DistortionReport report;
    report.epsilon_hat = worst;
    report.epsilon_norm = std::pow(1.0 + worst, 1.0 / p) - 1.0;
    report.method = DistortionMethod::monte_carlo;
    report.trials = trials;
    return report;
}

std::pair<Vector, double> brute_force_opt(const Matrix& a, const Vector& y,
                                          const Activation& f, double p,
                                          int restarts, std::uint64_t seed) {
    if (f.kind == ActivationKind::identity) {
        Vector theta = solve_lp_regression(a, y, p);
        return {theta, lp_power(a * theta - y, p)};
    }

    NeuronProblem prob;
    prob.sa = a;
    prob.sy = y;
    prob.f = f;
    prob.p = p;
    prob.eps = 0.5;  // unused when unconstrained
    prob.constrained = false;

    NeuronSolveOptions opts;
    opts.max_iters = 400;

    Vector best;
    double best_loss = std::numeric_limits<double>::infinity();
    Philox gen(seed, /*stream=*/4);
    const int rounds = std::max(1, (restarts + opts.starts - 1) / opts.starts);
    for (int r = 0; r < rounds; ++r) {
        NeuronSolution sol = solve_constrained_neuron(
            prob, gen.substream(static_cast<std::uint64_t>(r)).next_u64(),
            opts);
        if (sol.loss < best_loss) {
            best_loss = sol.loss;
            best = std::move(sol.theta);
        }
    }
    return {best, best_loss};
}

}  // namespace alws
