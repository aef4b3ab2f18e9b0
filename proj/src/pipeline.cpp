#include "alws/pipeline.hpp"

#include "alws/io.hpp"
#include "alws/lewis.hpp"
#include "alws/rng.hpp"

#include <sstream>

namespace alws {

void MultiRepDataset::validate() const {
    if (unlabeled.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    "dataset: need at least one representation");
    }
    if (labeled.size() != unlabeled.size()) {
        throw Error(ErrorCode::mismatched_lengths,
                    "dataset: labeled/unlabeled representation counts differ");
    }
    const Eigen::Index n_l = labels.size();
    const Eigen::Index n_u = unlabeled.front().rows();
    for (std::size_t j = 0; j < unlabeled.size(); ++j) {
        if (labeled[j].rows() != n_l) {
            throw Error(ErrorCode::mismatched_lengths,
                        "dataset: labeled block row count != label count");
        }
        if (unlabeled[j].rows() != n_u) {
            throw Error(ErrorCode::mismatched_lengths,
                        "dataset: unlabeled blocks differ in row count");
        }
        if (n_l > 0 && labeled[j].cols() != unlabeled[j].cols()) {
            throw Error(ErrorCode::mismatched_lengths,
                        "dataset: labeled/unlabeled column counts differ");
        }
        require_finite(unlabeled[j], "dataset");
        if (n_l > 0) require_finite(labeled[j], "dataset");
    }
    if (n_l > 0) require_finite(labels, "dataset");
}

double LabelOracle::query(std::uint64_t index) {
    auto it = queried_.find(index);
    if (it != queried_.end()) return it->second;
    const double value = fetch(index);
    queried_.emplace(index, value);
    return value;
}

double VectorOracle::fetch(std::uint64_t index) {
    if (index >= static_cast<std::uint64_t>(labels_.size())) {
        throw Error(ErrorCode::index_out_of_range,
                    "oracle: queried index outside the unlabeled pool");
    }
    return labels_(static_cast<Eigen::Index>(index));
}

FileOracle::FileOracle(std::string labels_path, std::string audit_path,
                       std::uint64_t index_offset)
    : labels_path_(std::move(labels_path)), index_offset_(index_offset) {
    audit_.open(audit_path, std::ios::out | std::ios::trunc);
    if (!audit_) {
        throw Error(ErrorCode::io_error,
                    "oracle: cannot open audit log '" + audit_path + "'");
    }
}

double FileOracle::fetch(std::uint64_t index) {
    if (!loaded_) {
        labels_ = read_vector(labels_path_);
        loaded_ = true;
    }
    const std::uint64_t line = index_offset_ + index;
    if (line >= static_cast<std::uint64_t>(labels_.size())) {
        throw Error(ErrorCode::index_out_of_range,
                    "oracle: queried index outside the labels file");
    }
    const double value = labels_(static_cast<Eigen::Index>(line));
    audit_ << index << "," << format_double(value) << "\n";
    audit_.flush();
    return value;
}

PipelineResult run_one_shot(const MultiRepDataset& data, LabelOracle& oracle,
                            std::uint64_t tau, std::uint64_t seed,
                            const PipelineOptions& opts) {
    data.validate();
    const std::uint64_t n_u = static_cast<std::uint64_t>(data.n_unlabeled());
    const std::uint64_t n_l = static_cast<std::uint64_t>(data.n_labeled());
    if (tau < 1 || tau > n_u) {
        std::ostringstream msg;
        msg << "run_one_shot: query budget tau=" << tau
            << " is outside [1, n_u=" << n_u << "]";
        throw Error(ErrorCode::query_budget_infeasible, msg.str());
    }

    // Lines 1-2: per-model weights of the unlabeled blocks only, then the
    // normalized elementwise max.
    LewisConfig cfg = opts.lewis;
    cfg.p = opts.p;
    std::vector<WeightVector> weights;
    weights.reserve(data.model_count());
    for (const Matrix& u : data.unlabeled) {
        weights.push_back(lewis_weights(u, cfg));
    }
    const SamplingDistribution dist = max_weight_distribution(weights);

    // Lines 3-10: draw until tau distinct, querying on first occurrence.
    const std::uint64_t cap = opts.m_cap > 0 ? opts.m_cap : default_draw_cap(tau);
    const QueryPlan plan = draw_until_distinct(dist, tau, seed, cap);

    Vector y_full = Vector::Zero(static_cast<Eigen::Index>(n_l + n_u));
    y_full.head(static_cast<Eigen::Index>(n_l)) = data.labels;
    for (const std::uint64_t q : plan.draws) {
        y_full(static_cast<Eigen::Index>(n_l + q)) = oracle.query(q);
    }

    // Lines 11-13: unit rows for the labeled block, (m p_q)^{-1/p} rows for
    // the draws.
    const SamplingMatrix s = build_sampling_matrix(plan, dist, n_l, opts.p);
    const Vector sy = apply(s, y_full);

    // Lines 14-16: shared S, one solve per representation.
    PipelineResult result;
    result.plan = plan;
    result.sum_max_weights = dist.sum_max_weights;
    result.queries_used = oracle.query_count();
    result.solutions.reserve(data.model_count());

    Philox solver_seeds(seed, /*stream=*/2);
    for (std::size_t j = 0; j < data.model_count(); ++j) {
        Matrix a_j(static_cast<Eigen::Index>(n_l + n_u),
                   data.unlabeled[j].cols());
        if (n_l > 0) a_j.topRows(static_cast<Eigen::Index>(n_l)) = data.labeled[j];
        a_j.bottomRows(static_cast<Eigen::Index>(n_u)) = data.unlabeled[j];

        NeuronProblem prob;
        prob.sa = apply(s, a_j);
        prob.sy = sy;
        prob.f = opts.f;
        prob.p = opts.p;
        prob.eps = opts.eps;
        prob.constrained = opts.constrained;
        result.solutions.push_back(solve_constrained_neuron(
            prob, solver_seeds.substream(j).next_u64(), opts.solver));
    }
    return result;
}

}  // namespace alws
