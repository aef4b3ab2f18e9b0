#include "alws.h"

#include "alws/diagnostics.hpp"
#include "alws/io.hpp"
#include "alws/lewis.hpp"
#include "alws/oracle.hpp"
#include "alws/pipeline.hpp"
#include "alws/regression.hpp"
#include "alws/sampling.hpp"
#include "alws/types.hpp"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

using namespace alws;

struct alws_matrix {
    Matrix m;
};
struct alws_weights {
    WeightVector w;
};
struct alws_dist {
    SamplingDistribution d;
};
struct alws_plan {
    QueryPlan p;
};
struct alws_smatrix {
    SamplingMatrix s;
};
struct alws_solution {
    NeuronSolution s;
};
struct alws_oracle {
    std::unique_ptr<LabelOracle> o;
};
struct alws_result {
    PipelineResult r;
};

namespace {

thread_local std::string g_last_error = "";

alws_status status_from_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return ALWS_ERR_INVALID_ARGUMENT;
        case ErrorCode::rank_deficient: return ALWS_ERR_RANK_DEFICIENT;
        case ErrorCode::non_finite: return ALWS_ERR_NON_FINITE;
        case ErrorCode::not_converged: return ALWS_ERR_NOT_CONVERGED;
        case ErrorCode::non_positive_weight:
            return ALWS_ERR_NON_POSITIVE_WEIGHT;
        case ErrorCode::mismatched_lengths: return ALWS_ERR_MISMATCHED_LENGTHS;
        case ErrorCode::mixed_exponents: return ALWS_ERR_MIXED_EXPONENTS;
        case ErrorCode::all_zero_weights: return ALWS_ERR_ALL_ZERO_WEIGHTS;
        case ErrorCode::budget_exceeds_support:
            return ALWS_ERR_BUDGET_EXCEEDS_SUPPORT;
        case ErrorCode::cap_exceeded: return ALWS_ERR_CAP_EXCEEDED;
        case ErrorCode::index_out_of_range: return ALWS_ERR_INDEX_OUT_OF_RANGE;
        case ErrorCode::degenerate_constraint:
            return ALWS_ERR_DEGENERATE_CONSTRAINT;
        case ErrorCode::empty_labels: return ALWS_ERR_EMPTY_LABELS;
        case ErrorCode::absent_class: return ALWS_ERR_ABSENT_CLASS;
        case ErrorCode::query_budget_infeasible:
            return ALWS_ERR_QUERY_BUDGET_INFEASIBLE;
        case ErrorCode::io_error: return ALWS_ERR_IO;
        case ErrorCode::parse_error: return ALWS_ERR_PARSE;
    }
    return ALWS_ERR_INTERNAL;
}

template <typename Fn>
alws_status guarded(Fn&& fn) {
    try {
        fn();
        return ALWS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_from_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ALWS_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ALWS_ERR_INTERNAL;
    }
}

alws_status invalid(const char* msg) {
    g_last_error = msg;
    return ALWS_ERR_INVALID_ARGUMENT;
}

Activation to_activation(alws_activation a) {
    switch (a) {
        case ALWS_ACT_IDENTITY: return make_activation(ActivationKind::identity);
        case ALWS_ACT_RELU: return make_activation(ActivationKind::relu);
        case ALWS_ACT_TANH: return make_activation(ActivationKind::tanh);
    }
    throw Error(ErrorCode::invalid_argument, "unknown activation code");
}

LewisConfig to_lewis_config(const alws_lewis_config* cfg) {
    LewisConfig out;
    if (cfg != nullptr) {
        out.p = cfg->p;
        out.max_iters = cfg->max_iters;
        out.fp_tolerance = cfg->fp_tolerance;
        out.rank_tolerance = cfg->rank_tolerance;
        out.damping = cfg->damping;
    }
    return out;
}

alws_status copy_span(const double* src, int64_t n, double* dst, int64_t len) {
    if (dst == nullptr || len != n) return invalid("bad output buffer size");
    std::memcpy(dst, src, static_cast<std::size_t>(n) * sizeof(double));
    return ALWS_OK;
}

}  // namespace

extern "C" {

const char* alws_version(void) { return "0.1.0"; }

const char* alws_status_name(alws_status status) {
    switch (status) {
        case ALWS_OK: return "Ok";
        case ALWS_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case ALWS_ERR_RANK_DEFICIENT: return "RankDeficient";
        case ALWS_ERR_NON_FINITE: return "NonFinite";
        case ALWS_ERR_NOT_CONVERGED: return "NotConverged";
        case ALWS_ERR_NON_POSITIVE_WEIGHT: return "NonPositiveWeight";
        case ALWS_ERR_MISMATCHED_LENGTHS: return "MismatchedLengths";
        case ALWS_ERR_MIXED_EXPONENTS: return "MixedExponents";
        case ALWS_ERR_ALL_ZERO_WEIGHTS: return "AllZeroWeights";
        case ALWS_ERR_BUDGET_EXCEEDS_SUPPORT: return "BudgetExceedsSupport";
        case ALWS_ERR_CAP_EXCEEDED: return "CapExceeded";
        case ALWS_ERR_INDEX_OUT_OF_RANGE: return "IndexOutOfRange";
        case ALWS_ERR_DEGENERATE_CONSTRAINT: return "DegenerateConstraint";
        case ALWS_ERR_EMPTY_LABELS: return "EmptyLabels";
        case ALWS_ERR_ABSENT_CLASS: return "AbsentClass";
        case ALWS_ERR_QUERY_BUDGET_INFEASIBLE: return "QueryBudgetInfeasible";
        case ALWS_ERR_IO: return "IoError";
        case ALWS_ERR_PARSE: return "ParseError";
        case ALWS_ERR_INTERNAL: return "InternalError";
    }
    return "Unknown";
}

const char* alws_last_error(void) { return g_last_error.c_str(); }

/* ---- matrices ---------------------------------------------------------- */

alws_status alws_matrix_create(int64_t rows, int64_t cols,
                               const double* row_major, alws_matrix** out) {
    if (out == nullptr || row_major == nullptr || rows < 1 || cols < 1) {
        return invalid("matrix_create: bad arguments");
    }
    return guarded([&] {
        Matrix m(rows, cols);
        for (int64_t i = 0; i < rows; ++i) {
            for (int64_t j = 0; j < cols; ++j) {
                m(i, j) = row_major[i * cols + j];
            }
        }
        *out = new alws_matrix{std::move(m)};
    });
}

alws_status alws_matrix_load(const char* path, alws_format format,
                             alws_matrix** out) {
    if (out == nullptr || path == nullptr) return invalid("matrix_load: bad arguments");
    return guarded([&] {
        Matrix m;
        switch (format) {
            case ALWS_FORMAT_CSV: m = read_matrix(path, MatrixFormat::csv); break;
            case ALWS_FORMAT_BINARY:
                m = read_matrix(path, MatrixFormat::binary);
                break;
            case ALWS_FORMAT_AUTO: m = read_matrix_auto(path); break;
            default:
                throw Error(ErrorCode::invalid_argument, "unknown format code");
        }
        *out = new alws_matrix{std::move(m)};
    });
}

alws_status alws_matrix_save(const alws_matrix* m, const char* path,
                             alws_format format) {
    if (m == nullptr || path == nullptr) return invalid("matrix_save: bad arguments");
    return guarded([&] {
        if (format == ALWS_FORMAT_AUTO) {
            throw Error(ErrorCode::invalid_argument,
                        "matrix_save: format must be csv or binary");
        }
        write_matrix(m->m, path,
                     format == ALWS_FORMAT_CSV ? MatrixFormat::csv
                                               : MatrixFormat::binary);
    });
}

int64_t alws_matrix_rows(const alws_matrix* m) {
    return m == nullptr ? 0 : m->m.rows();
}

int64_t alws_matrix_cols(const alws_matrix* m) {
    return m == nullptr ? 0 : m->m.cols();
}

alws_status alws_matrix_copy(const alws_matrix* m, double* buf, int64_t len) {
    if (m == nullptr) return invalid("matrix_copy: null matrix");
    if (buf == nullptr || len != m->m.rows() * m->m.cols()) {
        return invalid("matrix_copy: bad buffer size");
    }
    for (Eigen::Index i = 0; i < m->m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m->m.cols(); ++j) {
            buf[i * m->m.cols() + j] = m->m(i, j);
        }
    }
    return ALWS_OK;
}

void alws_matrix_free(alws_matrix* m) { delete m; }

/* ---- weights ----------------------------------------------------------- */

alws_status alws_weights_create(const double* values, int64_t n, double p,
                                alws_weights** out) {
    if (out == nullptr || values == nullptr || n < 1) {
        return invalid("weights_create: bad arguments");
    }
    return guarded([&] {
        WeightVector w;
        w.p = p;
        w.w = Eigen::Map<const Vector>(values, n);
        *out = new alws_weights{std::move(w)};
    });
}

int64_t alws_weights_size(const alws_weights* w) {
    return w == nullptr ? 0 : w->w.size();
}

double alws_weights_exponent(const alws_weights* w) {
    return w == nullptr ? 0.0 : w->w.p;
}

alws_status alws_weights_copy(const alws_weights* w, double* buf, int64_t len) {
    if (w == nullptr) return invalid("weights_copy: null weights");
    return copy_span(w->w.w.data(), w->w.size(), buf, len);
}

void alws_weights_free(alws_weights* w) { delete w; }

void alws_lewis_config_init(double p, alws_lewis_config* cfg) {
    if (cfg == nullptr) return;
    const LewisConfig defaults = LewisConfig::defaults(p);
    cfg->p = defaults.p;
    cfg->max_iters = defaults.max_iters;
    cfg->fp_tolerance = defaults.fp_tolerance;
    cfg->rank_tolerance = defaults.rank_tolerance;
    cfg->damping = defaults.damping;
}

alws_status alws_leverage_scores(const alws_matrix* m, double rank_tolerance,
                                 alws_weights** out) {
    if (m == nullptr || out == nullptr) return invalid("leverage_scores: bad arguments");
    return guarded([&] {
        const double tol =
            rank_tolerance > 0.0 ? rank_tolerance : kDefaultRankTolerance;
        *out = new alws_weights{leverage_scores(m->m, tol)};
    });
}

alws_status alws_lewis_weights(const alws_matrix* m,
                               const alws_lewis_config* cfg,
                               alws_weights** out) {
    if (m == nullptr || cfg == nullptr || out == nullptr) {
        return invalid("lewis_weights: bad arguments");
    }
    return guarded([&] {
        *out = new alws_weights{lewis_weights(m->m, to_lewis_config(cfg))};
    });
}

alws_status alws_verify_fixed_point(const alws_matrix* m,
                                    const alws_weights* w, double p,
                                    double* residual) {
    if (m == nullptr || w == nullptr || residual == nullptr) {
        return invalid("verify_fixed_point: bad arguments");
    }
    return guarded([&] { *residual = verify_fixed_point(m->m, w->w, p); });
}

/* ---- sampling ---------------------------------------------------------- */

alws_status alws_max_weight_distribution(const alws_weights* const* weights,
                                         int64_t k, alws_dist** out) {
    if (weights == nullptr || k < 1 || out == nullptr) {
        return invalid("max_weight_distribution: bad arguments");
    }
    return guarded([&] {
        std::vector<WeightVector> ws;
        ws.reserve(static_cast<std::size_t>(k));
        for (int64_t j = 0; j < k; ++j) {
            if (weights[j] == nullptr) {
                throw Error(ErrorCode::invalid_argument,
                            "max_weight_distribution: null weight handle");
            }
            ws.push_back(weights[j]->w);
        }
        *out = new alws_dist{max_weight_distribution(ws)};
    });
}

int64_t alws_dist_size(const alws_dist* d) {
    return d == nullptr ? 0 : d->d.size();
}

int64_t alws_dist_support(const alws_dist* d) {
    return d == nullptr ? 0 : d->d.support_size;
}

double alws_dist_sum_max_weights(const alws_dist* d) {
    return d == nullptr ? 0.0 : d->d.sum_max_weights;
}

alws_status alws_dist_copy(const alws_dist* d, double* buf, int64_t len) {
    if (d == nullptr) return invalid("dist_copy: null distribution");
    return copy_span(d->d.probs.data(), d->d.size(), buf, len);
}

void alws_dist_free(alws_dist* d) { delete d; }

uint64_t alws_default_draw_cap(uint64_t tau) { return default_draw_cap(tau); }

alws_status alws_draw_until_distinct(const alws_dist* d, uint64_t tau,
                                     uint64_t seed, uint64_t m_cap,
                                     alws_plan** out) {
    if (d == nullptr || out == nullptr) {
        return invalid("draw_until_distinct: bad arguments");
    }
    try {
        const uint64_t cap = m_cap > 0 ? m_cap : default_draw_cap(tau);
        *out = new alws_plan{draw_until_distinct(d->d, tau, seed, cap)};
        return ALWS_OK;
    } catch (const CapExceededError& e) {
        g_last_error = e.what();
        *out = new alws_plan{e.partial_plan()};
        return ALWS_ERR_CAP_EXCEEDED;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_from_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ALWS_ERR_INTERNAL;
    }
}

alws_status alws_draw_iid(const alws_dist* d, uint64_t m, uint64_t seed,
                          alws_plan** out) {
    if (d == nullptr || out == nullptr) return invalid("draw_iid: bad arguments");
    return guarded([&] { *out = new alws_plan{draw_iid(d->d, m, seed)}; });
}

uint64_t alws_plan_draw_count(const alws_plan* p) {
    return p == nullptr ? 0 : p->p.m;
}

uint64_t alws_plan_distinct_count(const alws_plan* p) {
    return p == nullptr ? 0 : p->p.distinct.size();
}

uint64_t alws_plan_seed(const alws_plan* p) {
    return p == nullptr ? 0 : p->p.seed;
}

alws_status alws_plan_copy_draws(const alws_plan* p, uint64_t* buf,
                                 int64_t len) {
    if (p == nullptr || buf == nullptr ||
        len != static_cast<int64_t>(p->p.draws.size())) {
        return invalid("plan_copy_draws: bad buffer size");
    }
    std::memcpy(buf, p->p.draws.data(), p->p.draws.size() * sizeof(uint64_t));
    return ALWS_OK;
}

alws_status alws_plan_copy_distinct(const alws_plan* p, uint64_t* buf,
                                    int64_t len) {
    if (p == nullptr || buf == nullptr ||
        len != static_cast<int64_t>(p->p.distinct.size())) {
        return invalid("plan_copy_distinct: bad buffer size");
    }
    std::memcpy(buf, p->p.distinct.data(),
                p->p.distinct.size() * sizeof(uint64_t));
    return ALWS_OK;
}

void alws_plan_free(alws_plan* p) { delete p; }

alws_status alws_build_sampling_matrix(const alws_plan* plan,
                                       const alws_dist* dist,
                                       uint64_t n_labeled, double p,
                                       alws_smatrix** out) {
    if (plan == nullptr || dist == nullptr || out == nullptr) {
        return invalid("build_sampling_matrix: bad arguments");
    }
    return guarded([&] {
        *out = new alws_smatrix{
            build_sampling_matrix(plan->p, dist->d, n_labeled, p)};
    });
}

alws_status alws_bernoulli_sampling_matrix(const alws_weights* w, double beta,
                                           double p, uint64_t seed,
                                           alws_smatrix** out) {
    if (w == nullptr || out == nullptr) {
        return invalid("bernoulli_sampling_matrix: bad arguments");
    }
    return guarded([&] {
        *out = new alws_smatrix{bernoulli_sampling_matrix(w->w, beta, p, seed)};
    });
}

int64_t alws_smatrix_rows(const alws_smatrix* s) {
    return s == nullptr ? 0 : s->s.row_count();
}

uint64_t alws_smatrix_source_count(const alws_smatrix* s) {
    return s == nullptr ? 0 : s->s.n_source;
}

alws_status alws_smatrix_copy(const alws_smatrix* s, uint64_t* indices,
                              double* scales, int64_t len) {
    if (s == nullptr || indices == nullptr || scales == nullptr ||
        len != s->s.row_count()) {
        return invalid("smatrix_copy: bad buffer size");
    }
    for (int64_t r = 0; r < len; ++r) {
        indices[r] = s->s.rows[static_cast<std::size_t>(r)].index;
        scales[r] = s->s.rows[static_cast<std::size_t>(r)].scale;
    }
    return ALWS_OK;
}

alws_status alws_smatrix_apply(const alws_smatrix* s, const alws_matrix* m,
                               alws_matrix** out) {
    if (s == nullptr || m == nullptr || out == nullptr) {
        return invalid("smatrix_apply: bad arguments");
    }
    return guarded([&] { *out = new alws_matrix{apply(s->s, m->m)}; });
}

void alws_smatrix_free(alws_smatrix* s) { delete s; }

alws_status alws_sample_size_bound(int64_t d, double p, double eps,
                                   double sum_max_weights, double c,
                                   int64_t* out) {
    if (out == nullptr) return invalid("sample_size_bound: null output");
    return guarded([&] {
        *out = sample_size_bound(d, p, eps, sum_max_weights, c);
    });
}

/* ---- regression -------------------------------------------------------- */

alws_status alws_solve_lp_regression(const alws_matrix* a, const double* y,
                                     int64_t n, double p, double tol,
                                     double* theta_out) {
    if (a == nullptr || y == nullptr || theta_out == nullptr) {
        return invalid("solve_lp_regression: bad arguments");
    }
    if (n != a->m.rows()) return invalid("solve_lp_regression: y length != rows");
    return guarded([&] {
        const Vector yv = Eigen::Map<const Vector>(y, n);
        const Vector theta = solve_lp_regression(a->m, yv, p, tol);
        std::memcpy(theta_out, theta.data(),
                    static_cast<std::size_t>(theta.size()) * sizeof(double));
    });
}

alws_status alws_solve_neuron(const alws_matrix* sa, const double* sy,
                              int64_t n, alws_activation activation, double p,
                              double eps, int32_t constrained, uint64_t seed,
                              alws_solution** out) {
    if (sa == nullptr || sy == nullptr || out == nullptr) {
        return invalid("solve_neuron: bad arguments");
    }
    if (n != sa->m.rows()) return invalid("solve_neuron: Sy length != rows");
    return guarded([&] {
        NeuronProblem prob;
        prob.sa = sa->m;
        prob.sy = Eigen::Map<const Vector>(sy, n);
        prob.f = to_activation(activation);
        prob.p = p;
        prob.eps = eps;
        prob.constrained = constrained != 0;
        *out = new alws_solution{solve_constrained_neuron(prob, seed)};
    });
}

int64_t alws_solution_dim(const alws_solution* s) {
    return s == nullptr ? 0 : s->s.theta.size();
}

alws_status alws_solution_copy_theta(const alws_solution* s, double* buf,
                                     int64_t len) {
    if (s == nullptr) return invalid("solution_copy_theta: null solution");
    return copy_span(s->s.theta.data(), s->s.theta.size(), buf, len);
}

double alws_solution_loss(const alws_solution* s) {
    return s == nullptr ? 0.0 : s->s.loss;
}

double alws_solution_constraint_lhs(const alws_solution* s) {
    return s == nullptr ? 0.0 : s->s.constraint_lhs;
}

double alws_solution_constraint_rhs(const alws_solution* s) {
    return s == nullptr ? 0.0 : s->s.constraint_rhs;
}

int32_t alws_solution_converged(const alws_solution* s) {
    return s != nullptr && s->s.converged ? 1 : 0;
}

int32_t alws_solution_iterations(const alws_solution* s) {
    return s == nullptr ? 0 : s->s.iterations;
}

void alws_solution_free(alws_solution* s) { delete s; }

alws_status alws_evaluate_guarantee(const alws_matrix* a, const double* y,
                                    int64_t n, const double* theta_tilde,
                                    const double* theta_star, int64_t d,
                                    alws_activation activation, double p,
                                    double eps, double* ratio) {
    if (a == nullptr || y == nullptr || theta_tilde == nullptr ||
        theta_star == nullptr || ratio == nullptr) {
        return invalid("evaluate_guarantee: bad arguments");
    }
    if (n != a->m.rows() || d != a->m.cols()) {
        return invalid("evaluate_guarantee: dimension mismatch");
    }
    return guarded([&] {
        *ratio = evaluate_guarantee(
            a->m, Eigen::Map<const Vector>(y, n),
            Eigen::Map<const Vector>(theta_tilde, d),
            Eigen::Map<const Vector>(theta_star, d), to_activation(activation),
            p, eps);
    });
}

/* ---- pipeline ---------------------------------------------------------- */

alws_status alws_oracle_from_array(const double* labels, int64_t n,
                                   alws_oracle** out) {
    if (labels == nullptr || n < 1 || out == nullptr) {
        return invalid("oracle_from_array: bad arguments");
    }
    return guarded([&] {
        *out = new alws_oracle{
            std::make_unique<VectorOracle>(Eigen::Map<const Vector>(labels, n))};
    });
}

alws_status alws_oracle_from_file(const char* labels_path,
                                  const char* audit_path,
                                  uint64_t index_offset, alws_oracle** out) {
    if (labels_path == nullptr || audit_path == nullptr || out == nullptr) {
        return invalid("oracle_from_file: bad arguments");
    }
    return guarded([&] {
        *out = new alws_oracle{std::make_unique<FileOracle>(
            labels_path, audit_path, index_offset)};
    });
}

uint64_t alws_oracle_query_count(const alws_oracle* o) {
    return o == nullptr ? 0 : o->o->query_count();
}

void alws_oracle_free(alws_oracle* o) { delete o; }

alws_status alws_run_one_shot(const alws_matrix* const* labeled,
                              const alws_matrix* const* unlabeled, int64_t k,
                              const double* labels, int64_t n_labeled,
                              alws_oracle* oracle, uint64_t tau, double eps,
                              double p, alws_activation activation,
                              const alws_lewis_config* lewis, uint64_t seed,
                              int32_t constrained, alws_result** out) {
    if (unlabeled == nullptr || k < 1 || oracle == nullptr || out == nullptr) {
        return invalid("run_one_shot: bad arguments");
    }
    if (n_labeled > 0 && (labeled == nullptr || labels == nullptr)) {
        return invalid("run_one_shot: labeled data required when n_labeled > 0");
    }
    return guarded([&] {
        MultiRepDataset data;
        data.unlabeled.reserve(static_cast<std::size_t>(k));
        data.labeled.reserve(static_cast<std::size_t>(k));
        for (int64_t j = 0; j < k; ++j) {
            if (unlabeled[j] == nullptr) {
                throw Error(ErrorCode::invalid_argument,
                            "run_one_shot: null unlabeled matrix handle");
            }
            data.unlabeled.push_back(unlabeled[j]->m);
            if (n_labeled > 0) {
                if (labeled[j] == nullptr) {
                    throw Error(ErrorCode::invalid_argument,
                                "run_one_shot: null labeled matrix handle");
                }
                data.labeled.push_back(labeled[j]->m);
            } else {
                data.labeled.emplace_back(0, unlabeled[j]->m.cols());
            }
        }
        data.labels = n_labeled > 0
                          ? Vector(Eigen::Map<const Vector>(labels, n_labeled))
                          : Vector(0);

        PipelineOptions opts;
        opts.eps = eps;
        opts.p = p;
        opts.f = to_activation(activation);
        opts.lewis = to_lewis_config(lewis);
        opts.constrained = constrained != 0;
        *out = new alws_result{run_one_shot(data, *oracle->o, tau, seed, opts)};
    });
}

int64_t alws_result_model_count(const alws_result* r) {
    return r == nullptr ? 0 : static_cast<int64_t>(r->r.solutions.size());
}

double alws_result_sum_max_weights(const alws_result* r) {
    return r == nullptr ? 0.0 : r->r.sum_max_weights;
}

uint64_t alws_result_queries_used(const alws_result* r) {
    return r == nullptr ? 0 : r->r.queries_used;
}

alws_status alws_result_plan(const alws_result* r, alws_plan** out) {
    if (r == nullptr || out == nullptr) return invalid("result_plan: bad arguments");
    *out = new alws_plan{r->r.plan};
    return ALWS_OK;
}

alws_status alws_result_solution(const alws_result* r, int64_t model,
                                 alws_solution** out) {
    if (r == nullptr || out == nullptr) {
        return invalid("result_solution: bad arguments");
    }
    if (model < 0 || model >= static_cast<int64_t>(r->r.solutions.size())) {
        return invalid("result_solution: model index out of range");
    }
    *out = new alws_solution{r->r.solutions[static_cast<std::size_t>(model)]};
    return ALWS_OK;
}

void alws_result_free(alws_result* r) { delete r; }

/* ---- verification ------------------------------------------------------ */

alws_status alws_exact_distortion_p2(const alws_matrix* a,
                                     const alws_smatrix* s,
                                     alws_distortion* out) {
    if (a == nullptr || s == nullptr || out == nullptr) {
        return invalid("exact_distortion_p2: bad arguments");
    }
    return guarded([&] {
        const DistortionReport rep = exact_distortion_p2(a->m, s->s);
        out->epsilon_hat = rep.epsilon_hat;
        out->epsilon_norm = rep.epsilon_norm;
        out->trials = rep.trials;
        out->monte_carlo = 0;
    });
}

alws_status alws_monte_carlo_distortion(const alws_matrix* a,
                                        const alws_smatrix* s, double p,
                                        int64_t trials, uint64_t seed,
                                        alws_distortion* out) {
    if (a == nullptr || s == nullptr || out == nullptr) {
        return invalid("monte_carlo_distortion: bad arguments");
    }
    return guarded([&] {
        const DistortionReport rep =
            monte_carlo_distortion(a->m, s->s, p, trials, seed);
        out->epsilon_hat = rep.epsilon_hat;
        out->epsilon_norm = rep.epsilon_norm;
        out->trials = rep.trials;
        out->monte_carlo = 1;
    });
}

alws_status alws_brute_force_opt(const alws_matrix* a, const double* y,
                                 int64_t n, alws_activation activation,
                                 double p, int32_t restarts, uint64_t seed,
                                 double* theta_out, double* opt_out) {
    if (a == nullptr || y == nullptr || theta_out == nullptr ||
        opt_out == nullptr) {
        return invalid("brute_force_opt: bad arguments");
    }
    if (n != a->m.rows()) return invalid("brute_force_opt: y length != rows");
    return guarded([&] {
        const auto [theta, opt] =
            brute_force_opt(a->m, Eigen::Map<const Vector>(y, n),
                            to_activation(activation), p, restarts, seed);
        std::memcpy(theta_out, theta.data(),
                    static_cast<std::size_t>(theta.size()) * sizeof(double));
        *opt_out = opt;
    });
}

/* ---- diagnostics ------------------------------------------------------- */

alws_status alws_max_weight_sum_curve(const alws_weights* const* weights,
                                      int64_t k, uint64_t n, double* sum_out,
                                      double* bound_out) {
    if (weights == nullptr || k < 1 || sum_out == nullptr ||
        bound_out == nullptr) {
        return invalid("max_weight_sum_curve: bad arguments");
    }
    return guarded([&] {
        std::vector<WeightVector> ws;
        for (int64_t j = 0; j < k; ++j) {
            if (weights[j] == nullptr) {
                throw Error(ErrorCode::invalid_argument,
                            "max_weight_sum_curve: null weight handle");
            }
            ws.push_back(weights[j]->w);
        }
        const std::vector<CurvePoint> curve = max_weight_sum_curve(ws, n);
        for (std::size_t i = 0; i < curve.size(); ++i) {
            sum_out[i] = curve[i].sum_max;
            bound_out[i] = curve[i].upper_bound;
        }
    });
}

alws_status alws_coverage_kappa(const alws_weights* const* weights, int64_t k,
                                double t_percent, double* kappa) {
    if (weights == nullptr || k < 1 || kappa == nullptr) {
        return invalid("coverage_kappa: bad arguments");
    }
    return guarded([&] {
        std::vector<WeightVector> ws;
        for (int64_t j = 0; j < k; ++j) {
            if (weights[j] == nullptr) {
                throw Error(ErrorCode::invalid_argument,
                            "coverage_kappa: null weight handle");
            }
            ws.push_back(weights[j]->w);
        }
        *kappa = coverage_kappa(ws, t_percent);
    });
}

alws_status alws_class_imbalance(const int64_t* labels, int64_t n,
                                 const int64_t* universe, int64_t n_universe,
                                 double* ratio) {
    if (labels == nullptr || n < 0 || ratio == nullptr) {
        return invalid("class_imbalance: bad arguments");
    }
    return guarded([&] {
        std::vector<std::int64_t> ls(labels, labels + n);
        std::optional<std::set<std::int64_t>> uni;
        if (universe != nullptr && n_universe > 0) {
            uni.emplace(universe, universe + n_universe);
        }
        *ratio = class_imbalance(ls, uni);
    });
}

alws_status alws_synthetic_backbones(uint64_t n, uint64_t d, uint64_t k,
                                     double correlation, uint64_t seed,
                                     int32_t identity_rotations,
                                     alws_matrix** out) {
    if (out == nullptr || k < 1) return invalid("synthetic_backbones: bad arguments");
    return guarded([&] {
        BackboneOptions opts;
        opts.correlation = correlation;
        opts.identity_rotations = identity_rotations != 0;
        std::vector<Matrix> mats = synthetic_backbones(n, d, k, seed, opts);
        for (std::size_t j = 0; j < mats.size(); ++j) {
            out[j] = new alws_matrix{std::move(mats[j])};
        }
    });
}

} /* extern "C" */
