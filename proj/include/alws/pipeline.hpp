#pragma once

#include "alws/regression.hpp"
#include "alws/sampling.hpp"
#include "alws/types.hpp"

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace alws {

// k feature representations of the same instances: labeled blocks L^j
// (n_l rows each) with their labels, unlabeled blocks U^j (n_u rows each).
// Column counts may differ across representations.
struct MultiRepDataset {
    std::vector<Matrix> labeled;
    std::vector<Matrix> unlabeled;
    Vector labels; // length n_l

    std::size_t model_count() const { return unlabeled.size(); }
    Eigen::Index n_labeled() const { return labels.size(); }
    Eigen::Index n_unlabeled() const {
        return unlabeled.empty() ? 0 : unlabeled.front().rows();
    }

    void validate() const;
};

// Answers label queries by unlabeled-pool index. Repeated queries of the
// same index are served from the cache and count once.
class LabelOracle {
public:
    virtual ~LabelOracle() = default;

    double query(std::uint64_t index);
    std::uint64_t query_count() const { return queried_.size(); }

protected:
    virtual double fetch(std::uint64_t index) = 0;

private:
    std::unordered_map<std::uint64_t, double> queried_;
};

class VectorOracle final : public LabelOracle {
public:
    explicit VectorOracle(Vector labels) : labels_(std::move(labels)) {}

protected:
    double fetch(std::uint64_t index) override;

private:
    Vector labels_;
};

// Reads labels lazily from a one-value-per-line file and appends one
// `index,label` line to the audit log per distinct query, in query order.
// `index_offset` maps unlabeled-pool index i to file line offset + i (the
// labels file may start with the already-labeled block).
class FileOracle final : public LabelOracle {
public:
    FileOracle(std::string labels_path, std::string audit_path,
               std::uint64_t index_offset = 0);

protected:
    double fetch(std::uint64_t index) override;

private:
    std::string labels_path_;
    std::ofstream audit_;
    std::uint64_t index_offset_ = 0;
    bool loaded_ = false;
    Vector labels_;
};

struct PipelineResult {
    std::vector<NeuronSolution> solutions;
    QueryPlan plan;
    double sum_max_weights = 0.0; // T
    std::uint64_t queries_used = 0;
};

struct PipelineOptions {
    double eps = 0.25;
    double p = 2.0;
    Activation f;
    LewisConfig lewis;
    bool constrained = true;
    NeuronSolveOptions solver;
    std::uint64_t m_cap = 0; // 0 = default_draw_cap(tau)
};

// Full one-shot run: per-model weights of U^j, max-weight distribution,
// draws until tau distinct (labels queried on first occurrence), shared
// sampling matrix with unit-weight labeled rows, then one constrained solve
// per model on (S A^j, S y).
PipelineResult run_one_shot(const MultiRepDataset& data, LabelOracle& oracle,
                            std::uint64_t tau, std::uint64_t seed,
                            const PipelineOptions& opts);

}  // namespace alws
