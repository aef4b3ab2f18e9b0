// alws command line front end. Talks to the core exclusively through the
// shared-library C API (alws.h); all file outputs are written atomically
// (temp file + rename) so failed runs leave nothing behind.

#include "alws.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

struct CliError {
    int exit_code;
    std::string message;
};

int exit_code_for(alws_status status) {
    switch (status) {
        case ALWS_OK: return kExitOk;
        case ALWS_ERR_IO:
        case ALWS_ERR_PARSE: return kExitIo;
        case ALWS_ERR_NOT_CONVERGED:
        case ALWS_ERR_CAP_EXCEEDED: return kExitConvergence;
        default: return kExitValidation;
    }
}

void check(alws_status status) {
    if (status != ALWS_OK) {
        throw CliError{exit_code_for(status),
                       std::string(alws_status_name(status)) + ": " +
                           alws_last_error()};
    }
}

[[noreturn]] void fail_validation(const std::string& msg) {
    throw CliError{kExitValidation, msg};
}

struct MatrixDeleter {
    void operator()(alws_matrix* p) const { alws_matrix_free(p); }
};
struct WeightsDeleter {
    void operator()(alws_weights* p) const { alws_weights_free(p); }
};
struct DistDeleter {
    void operator()(alws_dist* p) const { alws_dist_free(p); }
};
struct PlanDeleter {
    void operator()(alws_plan* p) const { alws_plan_free(p); }
};
struct SmatrixDeleter {
    void operator()(alws_smatrix* p) const { alws_smatrix_free(p); }
};
struct SolutionDeleter {
    void operator()(alws_solution* p) const { alws_solution_free(p); }
};
struct OracleDeleter {
    void operator()(alws_oracle* p) const { alws_oracle_free(p); }
};
struct ResultDeleter {
    void operator()(alws_result* p) const { alws_result_free(p); }
};

using MatrixPtr = std::unique_ptr<alws_matrix, MatrixDeleter>;
using WeightsPtr = std::unique_ptr<alws_weights, WeightsDeleter>;
using DistPtr = std::unique_ptr<alws_dist, DistDeleter>;
using PlanPtr = std::unique_ptr<alws_plan, PlanDeleter>;
using SmatrixPtr = std::unique_ptr<alws_smatrix, SmatrixDeleter>;
using SolutionPtr = std::unique_ptr<alws_solution, SolutionDeleter>;
using OraclePtr = std::unique_ptr<alws_oracle, OracleDeleter>;
using ResultPtr = std::unique_ptr<alws_result, ResultDeleter>;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CliError{kExitIo, "cannot open " + tmp + " for writing"};
        out.write(contents.data(),
                  static_cast<std::streamsize>(contents.size()));
        if (!out) throw CliError{kExitIo, "write to " + tmp + " failed"};
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CliError{kExitIo, "rename to " + path + " failed: " + ec.message()};
}

// ---------------------------------------------------------------------------
// Configuration: flat `key = value` file, CLI flags override, unknown keys
// rejected. Seeds have no wall-clock default; commands that draw require one.
// ---------------------------------------------------------------------------

struct RunConfig {
    double p = 2.0;
    double epsilon = 0.25;
    std::optional<std::uint64_t> tau;
    std::optional<std::uint64_t> seed;
    double constant_c = 1.0;
    std::string activation = "identity";
    bool constrained = true;
    double fp_tolerance = 1e-8;
    int max_iters = 200;
    double rank_tolerance = 1e-10;
    double damping = 0.0;
    std::vector<std::string> labeled;
    std::vector<std::string> unlabeled;
    std::string labels;
    std::string input;
    std::string out_dir = "alws_out";
    std::string format = "auto";
    double ratio_threshold = 10.0;
    double distortion_threshold = 0.5;
    int oracle_restarts = 50;
    std::int64_t mc_trials = 10000;
    int seed_sweep = 0;
};

const std::set<std::string> kKnownKeys = {
    "p",           "epsilon",        "tau",
    "seed",        "constant_c",     "activation",
    "constrained", "fp_tolerance",   "max_iters",
    "rank_tolerance", "damping",     "labeled",
    "unlabeled",   "labels",         "input",
    "out_dir",     "format",         "ratio_threshold",
    "distortion_threshold", "oracle_restarts", "mc_trials",
    "seed_sweep",
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string item =
            trim(s.substr(start, comma == std::string::npos ? std::string::npos
                                                            : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof()) {
        fail_validation("config key '" + key + "': cannot parse '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail_validation("config key '" + key + "': expected true/false, got '" +
                    value + "'");
}

void apply_key(RunConfig& cfg, const std::string& key,
               const std::string& value) {
    if (kKnownKeys.count(key) == 0) {
        fail_validation("unknown config key '" + key + "'");
    }
    if (key == "p") cfg.p = parse_number<double>(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_number<double>(key, value);
    else if (key == "tau") cfg.tau = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "constant_c") cfg.constant_c = parse_number<double>(key, value);
    else if (key == "activation") cfg.activation = value;
    else if (key == "constrained") cfg.constrained = parse_bool(key, value);
    else if (key == "fp_tolerance") cfg.fp_tolerance = parse_number<double>(key, value);
    else if (key == "max_iters") cfg.max_iters = parse_number<int>(key, value);
    else if (key == "rank_tolerance") cfg.rank_tolerance = parse_number<double>(key, value);
    else if (key == "damping") cfg.damping = parse_number<double>(key, value);
    else if (key == "labeled") cfg.labeled = split_list(value);
    else if (key == "unlabeled") cfg.unlabeled = split_list(value);
    else if (key == "labels") cfg.labels = value;
    else if (key == "input") cfg.input = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "format") cfg.format = value;
    else if (key == "ratio_threshold") cfg.ratio_threshold = parse_number<double>(key, value);
    else if (key == "distortion_threshold") cfg.distortion_threshold = parse_number<double>(key, value);
    else if (key == "oracle_restarts") cfg.oracle_restarts = parse_number<int>(key, value);
    else if (key == "mc_trials") cfg.mc_trials = parse_number<std::int64_t>(key, value);
    else if (key == "seed_sweep") cfg.seed_sweep = parse_number<int>(key, value);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{kExitIo, "cannot open config file " + path};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail_validation(path + ":" + std::to_string(lineno) +
                            ": expected 'key = value'");
        }
        apply_key(cfg, trim(stripped.substr(0, eq)),
                  trim(stripped.substr(eq + 1)));
    }
}

alws_format parse_format(const std::string& name) {
    if (name == "csv") return ALWS_FORMAT_CSV;
    if (name == "binary") return ALWS_FORMAT_BINARY;
    if (name == "auto") return ALWS_FORMAT_AUTO;
    fail_validation("format must be csv, binary or auto, got '" + name + "'");
}

alws_activation parse_activation(const std::string& name) {
    if (name == "identity") return ALWS_ACT_IDENTITY;
    if (name == "relu") return ALWS_ACT_RELU;
    if (name == "tanh") return ALWS_ACT_TANH;
    fail_validation("activation must be identity, relu or tanh, got '" + name +
                    "'");
}

MatrixPtr load_matrix(const std::string& path, alws_format format) {
    alws_matrix* m = nullptr;
    check(alws_matrix_load(path.c_str(), format, &m));
    return MatrixPtr(m);
}

alws_lewis_config lewis_config_from(const RunConfig& cfg) {
    alws_lewis_config lc;
    alws_lewis_config_init(cfg.p, &lc);
    lc.fp_tolerance = cfg.fp_tolerance;
    lc.max_iters = cfg.max_iters;
    lc.rank_tolerance = cfg.rank_tolerance;
    lc.damping = cfg.damping;
    return lc;
}

// tau from the config, or derived from the sample-size bound with the
// user-supplied constant when absent (clamped to the drawable support).
std::uint64_t resolve_tau(const RunConfig& cfg, const alws_dist* dist,
                          int64_t d_max) {
    if (cfg.tau) return *cfg.tau;
    int64_t bound = 0;
    check(alws_sample_size_bound(d_max, cfg.p, cfg.epsilon,
                                 alws_dist_sum_max_weights(dist),
                                 cfg.constant_c, &bound));
    const int64_t support = alws_dist_support(dist);
    const std::uint64_t tau =
        static_cast<std::uint64_t>(std::min(bound, support));
    std::cout << "tau = " << tau << " (sample-size bound " << bound
              << ", support " << support << ")\n";
    return tau;
}

std::uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed) {
        fail_validation("seed is required (set it in the config or with --seed); "
                        "there is no wall-clock default");
    }
    return *cfg.seed;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw CliError{kExitIo, "cannot create out_dir " + cfg.out_dir};
}

std::vector<WeightsPtr> weights_per_model(const std::vector<MatrixPtr>& models,
                                          const RunConfig& cfg) {
    const alws_lewis_config lc = lewis_config_from(cfg);
    std::vector<WeightsPtr> out;
    out.reserve(models.size());
    for (const MatrixPtr& m : models) {
        alws_weights* w = nullptr;
        check(alws_lewis_weights(m.get(), &lc, &w));
        out.emplace_back(w);
    }
    return out;
}

std::vector<const alws_weights*> raw_handles(const std::vector<WeightsPtr>& ws) {
    std::vector<const alws_weights*> raw;
    raw.reserve(ws.size());
    for (const WeightsPtr& w : ws) raw.push_back(w.get());
    return raw;
}

std::vector<MatrixPtr> load_models(const std::vector<std::string>& paths,
                                   alws_format format) {
    if (paths.empty()) {
        fail_validation("no feature files given (config key 'unlabeled')");
    }
    std::vector<MatrixPtr> out;
    out.reserve(paths.size());
    for (const std::string& path : paths) out.push_back(load_matrix(path, format));
    return out;
}

// ---------------------------------------------------------------------------
// weights: lp weights of one matrix -> index,weight CSV plus summary line.
// ---------------------------------------------------------------------------

int cmd_weights(const RunConfig& cfg) {
    if (cfg.input.empty()) fail_validation("weights: --input is required");
    ensure_out_dir(cfg);
    const MatrixPtr m = load_matrix(cfg.input, parse_format(cfg.format));

    const alws_lewis_config lc = lewis_config_from(cfg);
    alws_weights* wraw = nullptr;
    check(alws_lewis_weights(m.get(), &lc, &wraw));
    WeightsPtr w(wraw);

    double residual = 0.0;
    check(alws_verify_fixed_point(m.get(), w.get(), cfg.p, &residual));

    std::vector<double> values(static_cast<std::size_t>(alws_weights_size(w.get())));
    check(alws_weights_copy(w.get(), values.data(),
                            static_cast<int64_t>(values.size())));

    double sum = 0.0, min = values[0], max = values[0];
    std::string csv = "index,weight\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        min = std::min(min, values[i]);
        max = std::max(max, values[i]);
        csv += std::to_string(i) + "," + fmt(values[i]) + "\n";
    }
    csv += "# sum=" + fmt(sum) + " min=" + fmt(min) + " max=" + fmt(max) +
           " residual=" + fmt(residual) + "\n";

    const std::string path = cfg.out_dir + "/weights.csv";
    atomic_write(path, csv);
    std::cout << "wrote " << path << "\n"
              << "sum=" << fmt(sum) << " min=" << fmt(min) << " max="
              << fmt(max) << " residual=" << fmt(residual) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sample: max-weight distribution, query plan and sampling matrix files.
// ---------------------------------------------------------------------------

int cmd_sample(const RunConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    ensure_out_dir(cfg);

    const std::vector<MatrixPtr> models =
        load_models(cfg.unlabeled, parse_format(cfg.format));
    const std::vector<WeightsPtr> ws = weights_per_model(models, cfg);
    const std::vector<const alws_weights*> raw = raw_handles(ws);

    alws_dist* draw_dist = nullptr;
    check(alws_max_weight_distribution(raw.data(),
                                       static_cast<int64_t>(raw.size()),
                                       &draw_dist));
    DistPtr dist(draw_dist);

    int64_t d_max = 0;
    for (const MatrixPtr& m : models) {
        d_max = std::max(d_max, alws_matrix_cols(m.get()));
    }
    const std::uint64_t tau = resolve_tau(cfg, dist.get(), d_max);

    alws_plan* plan_raw = nullptr;
    check(alws_draw_until_distinct(dist.get(), tau, seed, 0, &plan_raw));
    PlanPtr plan(plan_raw);

    std::uint64_t n_l = 0;
    if (!cfg.labeled.empty()) {
        const MatrixPtr first = load_matrix(cfg.labeled.front(),
                                            parse_format(cfg.format));
        n_l = static_cast<std::uint64_t>(alws_matrix_rows(first.get()));
    }

    alws_smatrix* sraw = nullptr;
    check(alws_build_sampling_matrix(plan.get(), dist.get(), n_l, cfg.p, &sraw));
    SmatrixPtr smatrix(sraw);

    std::vector<double> probs(static_cast<std::size_t>(alws_dist_size(dist.get())));
    check(alws_dist_copy(dist.get(), probs.data(),
                         static_cast<int64_t>(probs.size())));
    std::string dist_csv = "index,prob\n";
    for (std::size_t i = 0; i < probs.size(); ++i) {
        dist_csv += std::to_string(i) + "," + fmt(probs[i]) + "\n";
    }
    atomic_write(cfg.out_dir + "/distribution.csv", dist_csv);

    std::vector<std::uint64_t> draws(alws_plan_draw_count(plan.get()));
    check(alws_plan_copy_draws(plan.get(), draws.data(),
                               static_cast<int64_t>(draws.size())));
    std::string plan_csv = "draw_order,index\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
        plan_csv += std::to_string(i) + "," + std::to_string(draws[i]) + "\n";
    }
    atomic_write(cfg.out_dir + "/plan.csv", plan_csv);

    const int64_t rows = alws_smatrix_rows(smatrix.get());
    std::vector<std::uint64_t> indices(static_cast<std::size_t>(rows));
    std::vector<double> scales(static_cast<std::size_t>(rows));
    check(alws_smatrix_copy(smatrix.get(), indices.data(), scales.data(), rows));
    std::string s_csv = "row,source_index,scale\n";
    for (int64_t r = 0; r < rows; ++r) {
        s_csv += std::to_string(r) + "," + std::to_string(indices[r]) + "," +
                 fmt(scales[r]) + "\n";
    }
    atomic_write(cfg.out_dir + "/sampling_matrix.csv", s_csv);

    std::cout << "T=" << fmt(alws_dist_sum_max_weights(dist.get()))
              << " m=" << alws_plan_draw_count(plan.get())
              << " distinct=" << alws_plan_distinct_count(plan.get()) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pipeline: the full one-shot run.
// ---------------------------------------------------------------------------

struct LoadedDataset {
    std::vector<MatrixPtr> labeled;
    std::vector<MatrixPtr> unlabeled;
    std::vector<double> labels; // n_l + n_u values
    std::uint64_t n_l = 0;
    std::uint64_t n_u = 0;
};

LoadedDataset load_dataset(const RunConfig& cfg) {
    LoadedDataset data;
    const alws_format format = parse_format(cfg.format);
    data.unlabeled = load_models(cfg.unlabeled, format);
    data.n_u = static_cast<std::uint64_t>(alws_matrix_rows(data.unlabeled.front().get()));
    if (!cfg.labeled.empty()) {
        if (cfg.labeled.size() != cfg.unlabeled.size()) {
            fail_validation("labeled and unlabeled lists must have the same "
                            "number of paths");
        }
        data.labeled = load_models(cfg.labeled, format);
        data.n_l = static_cast<std::uint64_t>(alws_matrix_rows(data.labeled.front().get()));
    }
    if (cfg.labels.empty()) fail_validation("labels file is required");
    const MatrixPtr labels_m = load_matrix(cfg.labels, ALWS_FORMAT_AUTO);
    if (alws_matrix_cols(labels_m.get()) != 1) {
        fail_validation("labels file must have one value per line");
    }
    const std::uint64_t n_labels =
        static_cast<std::uint64_t>(alws_matrix_rows(labels_m.get()));
    if (n_labels != data.n_l + data.n_u) {
        fail_validation("labels file has " + std::to_string(n_labels) +
                        " values, expected n_l + n_u = " +
                        std::to_string(data.n_l + data.n_u));
    }
    data.labels.resize(n_labels);
    check(alws_matrix_copy(labels_m.get(), data.labels.data(),
                           static_cast<int64_t>(n_labels)));
    return data;
}

// Stacks [L_j; U_j] through the C API for full-data guarantee evaluation.
MatrixPtr stack_full(const LoadedDataset& data, std::size_t j) {
    const alws_matrix* top =
        data.labeled.empty() ? nullptr : data.labeled[j].get();
    const alws_matrix* bottom = data.unlabeled[j].get();
    const int64_t cols = alws_matrix_cols(bottom);
    const int64_t top_rows = top == nullptr ? 0 : alws_matrix_rows(top);
    const int64_t rows = top_rows + alws_matrix_rows(bottom);
    std::vector<double> buf(static_cast<std::size_t>(rows * cols));
    if (top != nullptr) {
        check(alws_matrix_copy(top, buf.data(), top_rows * cols));
    }
    check(alws_matrix_copy(bottom, buf.data() + top_rows * cols,
                           alws_matrix_rows(bottom) * cols));
    alws_matrix* full = nullptr;
    check(alws_matrix_create(rows, cols, buf.data(), &full));
    return MatrixPtr(full);
}

int cmd_pipeline(const RunConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    ensure_out_dir(cfg);
    const LoadedDataset data = load_dataset(cfg);
    const std::size_t k = data.unlabeled.size();

    std::uint64_t tau = 0;
    if (cfg.tau) {
        tau = *cfg.tau;
    } else {
        const std::vector<WeightsPtr> ws = weights_per_model(data.unlabeled, cfg);
        const std::vector<const alws_weights*> raw = raw_handles(ws);
        alws_dist* draw_dist = nullptr;
        check(alws_max_weight_distribution(raw.data(),
                                           static_cast<int64_t>(raw.size()),
                                           &draw_dist));
        DistPtr dist(draw_dist);
        int64_t d_max = 0;
        for (const MatrixPtr& m : data.unlabeled) {
            d_max = std::max(d_max, alws_matrix_cols(m.get()));
        }
        tau = resolve_tau(cfg, dist.get(), d_max);
    }

    alws_oracle* oraw = nullptr;
    check(alws_oracle_from_file(cfg.labels.c_str(),
                                (cfg.out_dir + "/audit.csv").c_str(),
                                data.n_l, &oraw));
    OraclePtr oracle(oraw);

    std::vector<const alws_matrix*> labeled_raw, unlabeled_raw;
    for (const MatrixPtr& m : data.labeled) labeled_raw.push_back(m.get());
    for (const MatrixPtr& m : data.unlabeled) unlabeled_raw.push_back(m.get());

    const alws_lewis_config lc = lewis_config_from(cfg);
    alws_result* rraw = nullptr;
    check(alws_run_one_shot(
        data.labeled.empty() ? nullptr : labeled_raw.data(),
        unlabeled_raw.data(), static_cast<int64_t>(k), data.labels.data(),
        static_cast<int64_t>(data.n_l), oracle.get(), tau, cfg.epsilon,
        cfg.p, parse_activation(cfg.activation), &lc, seed,
        cfg.constrained ? 1 : 0, &rraw));
    ResultPtr result(rraw);

    alws_plan* plan_raw = nullptr;
    check(alws_result_plan(result.get(), &plan_raw));
    PlanPtr plan(plan_raw);
    std::vector<std::uint64_t> draws(alws_plan_draw_count(plan.get()));
    check(alws_plan_copy_draws(plan.get(), draws.data(),
                               static_cast<int64_t>(draws.size())));
    std::string plan_csv = "draw_order,index\n";
    for (std::size_t i = 0; i < draws.size(); ++i) {
        plan_csv += std::to_string(i) + "," + std::to_string(draws[i]) + "\n";
    }
    atomic_write(cfg.out_dir + "/plan.csv", plan_csv);

    std::string report =
        "model,loss,constraint_lhs,constraint_rhs,converged,iterations,opt,"
        "ratio\n";
    for (std::size_t j = 0; j < k; ++j) {
        alws_solution* sraw = nullptr;
        check(alws_result_solution(result.get(), static_cast<int64_t>(j), &sraw));
        SolutionPtr sol(sraw);

        const int64_t dim = alws_solution_dim(sol.get());
        std::vector<double> theta(static_cast<std::size_t>(dim));
        check(alws_solution_copy_theta(sol.get(), theta.data(), dim));
        std::string theta_csv;
        for (const double t : theta) theta_csv += fmt(t) + "\n";
        atomic_write(cfg.out_dir + "/theta_" + std::to_string(j) + ".csv",
                     theta_csv);

        const MatrixPtr full = stack_full(data, j);
        std::vector<double> theta_star(static_cast<std::size_t>(dim));
        double opt = 0.0;
        check(alws_brute_force_opt(full.get(), data.labels.data(),
                                   alws_matrix_rows(full.get()),
                                   parse_activation(cfg.activation), cfg.p,
                                   cfg.oracle_restarts, seed,
                                   theta_star.data(), &opt));
        double ratio = 0.0;
        check(alws_evaluate_guarantee(full.get(), data.labels.data(),
                                      alws_matrix_rows(full.get()),
                                      theta.data(), theta_star.data(), dim,
                                      parse_activation(cfg.activation), cfg.p,
                                      cfg.epsilon, &ratio));

        report += std::to_string(j) + "," + fmt(alws_solution_loss(sol.get())) +
                  "," + fmt(alws_solution_constraint_lhs(sol.get())) + "," +
                  fmt(alws_solution_constraint_rhs(sol.get())) + "," +
                  (alws_solution_converged(sol.get()) ? "true" : "false") +
                  "," + std::to_string(alws_solution_iterations(sol.get())) +
                  "," + fmt(opt) + "," + fmt(ratio) + "\n";
    }
    atomic_write(cfg.out_dir + "/guarantee.csv", report);

    std::cout << "T=" << fmt(alws_result_sum_max_weights(result.get()))
              << " m=" << alws_plan_draw_count(plan.get())
              << " queries=" << alws_result_queries_used(result.get())
              << " models=" << k << "\n"
              << "wrote " << cfg.out_dir
              << "/{plan.csv,audit.csv,theta_<j>.csv,guarantee.csv}\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: fixed-point residuals, embedding distortion, guarantee ratios.
// ---------------------------------------------------------------------------

struct VerifyOutcome {
    double max_residual = 0.0;
    double max_distortion = 0.0;
    double max_ratio = 0.0;
    bool pass = true;
};

VerifyOutcome verify_once(const RunConfig& cfg, const LoadedDataset& data,
                          std::uint64_t seed, bool print) {
    const std::size_t k = data.unlabeled.size();
    VerifyOutcome outcome;
    auto record = [&](const std::string& name, double value, double threshold) {
        const bool ok = value <= threshold;
        outcome.pass = outcome.pass && ok;
        if (print) {
            std::cout << (ok ? "PASS  " : "FAIL  ") << name << " = "
                      << fmt(value) << " (threshold " << fmt(threshold)
                      << ")\n";
        }
        return ok;
    };

    const std::vector<WeightsPtr> ws = weights_per_model(data.unlabeled, cfg);
    for (std::size_t j = 0; j < k; ++j) {
        double residual = 0.0;
        check(alws_verify_fixed_point(data.unlabeled[j].get(), ws[j].get(),
                                      cfg.p, &residual));
        outcome.max_residual = std::max(outcome.max_residual, residual);
        record("fixed_point_residual[" + std::to_string(j) + "]", residual,
               cfg.fp_tolerance);
    }

    const std::vector<const alws_weights*> raw = raw_handles(ws);
    alws_dist* draw_dist = nullptr;
    check(alws_max_weight_distribution(raw.data(), static_cast<int64_t>(k),
                                       &draw_dist));
    DistPtr dist(draw_dist);

    int64_t d_max = 0;
    for (const MatrixPtr& m : data.unlabeled) {
        d_max = std::max(d_max, alws_matrix_cols(m.get()));
    }
    const std::uint64_t tau = resolve_tau(cfg, dist.get(), d_max);
    alws_plan* plan_raw = nullptr;
    check(alws_draw_until_distinct(dist.get(), tau, seed, 0, &plan_raw));
    PlanPtr plan(plan_raw);

    // Identity-selection self check: a full unit-scale selection must have
    // exactly zero distortion.
    {
        const std::uint64_t n_u =
            static_cast<std::uint64_t>(alws_matrix_rows(data.unlabeled[0].get()));
        std::vector<double> ones(static_cast<std::size_t>(n_u), 1.0);
        alws_weights* wone = nullptr;
        check(alws_weights_create(ones.data(), static_cast<int64_t>(n_u),
                                  cfg.p, &wone));
        WeightsPtr wones(wone);
        alws_smatrix* ident = nullptr;
        check(alws_bernoulli_sampling_matrix(wones.get(), 1.0, cfg.p, seed,
                                             &ident));
        SmatrixPtr identity(ident);
        alws_distortion rep;
        check(alws_exact_distortion_p2(data.unlabeled[0].get(), identity.get(),
                                       &rep));
        record("identity_distortion", rep.epsilon_hat, 1e-12);
    }

    // Distortion of the sampled block alone (n_l = 0 view), measured against
    // each unlabeled representation.
    alws_smatrix* sraw = nullptr;
    check(alws_build_sampling_matrix(plan.get(), dist.get(), 0, cfg.p, &sraw));
    SmatrixPtr s(sraw);
    for (std::size_t j = 0; j < k; ++j) {
        alws_distortion rep;
        if (cfg.p == 2.0) {
            check(alws_exact_distortion_p2(data.unlabeled[j].get(), s.get(),
                                           &rep));
        } else {
            check(alws_monte_carlo_distortion(data.unlabeled[j].get(), s.get(),
                                              cfg.p, cfg.mc_trials, seed,
                                              &rep));
        }
        outcome.max_distortion = std::max(outcome.max_distortion, rep.epsilon_hat);
        record("sampling_distortion[" + std::to_string(j) + "]",
               rep.epsilon_hat, cfg.distortion_threshold);
    }

    // Full pipeline + guarantee ratio per model against the brute-force
    // reference optimum.
    alws_oracle* oraw = nullptr;
    check(alws_oracle_from_array(data.labels.data() + data.n_l,
                                 static_cast<int64_t>(data.n_u), &oraw));
    OraclePtr oracle(oraw);

    std::vector<const alws_matrix*> labeled_raw, unlabeled_raw;
    for (const MatrixPtr& m : data.labeled) labeled_raw.push_back(m.get());
    for (const MatrixPtr& m : data.unlabeled) unlabeled_raw.push_back(m.get());
    const alws_lewis_config lc = lewis_config_from(cfg);
    alws_result* rraw = nullptr;
    check(alws_run_one_shot(
        data.labeled.empty() ? nullptr : labeled_raw.data(),
        unlabeled_raw.data(), static_cast<int64_t>(k), data.labels.data(),
        static_cast<int64_t>(data.n_l), oracle.get(), tau, cfg.epsilon,
        cfg.p, parse_activation(cfg.activation), &lc, seed,
        cfg.constrained ? 1 : 0, &rraw));
    ResultPtr result(rraw);

    for (std::size_t j = 0; j < k; ++j) {
        alws_solution* solraw = nullptr;
        check(alws_result_solution(result.get(), static_cast<int64_t>(j),
                                   &solraw));
        SolutionPtr sol(solraw);
        const int64_t dim = alws_solution_dim(sol.get());
        std::vector<double> theta(static_cast<std::size_t>(dim));
        check(alws_solution_copy_theta(sol.get(), theta.data(), dim));

        const MatrixPtr full = stack_full(data, j);
        std::vector<double> theta_star(static_cast<std::size_t>(dim));
        double opt = 0.0;
        check(alws_brute_force_opt(full.get(), data.labels.data(),
                                   alws_matrix_rows(full.get()),
                                   parse_activation(cfg.activation), cfg.p,
                                   cfg.oracle_restarts, seed,
                                   theta_star.data(), &opt));
        double ratio = 0.0;
        check(alws_evaluate_guarantee(full.get(), data.labels.data(),
                                      alws_matrix_rows(full.get()),
                                      theta.data(), theta_star.data(), dim,
                                      parse_activation(cfg.activation), cfg.p,
                                      cfg.epsilon, &ratio));
        outcome.max_ratio = std::max(outcome.max_ratio, ratio);
        record("guarantee_ratio[" + std::to_string(j) + "]", ratio,
               cfg.ratio_threshold);
    }
    return outcome;
}

int cmd_verify(const RunConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    ensure_out_dir(cfg);
    const LoadedDataset data = load_dataset(cfg);

    if (cfg.seed_sweep > 0) {
        std::string csv = "seed,max_fp_residual,max_distortion,max_ratio,pass\n";
        bool all_pass = true;
        for (int i = 0; i < cfg.seed_sweep; ++i) {
            const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
            const VerifyOutcome out = verify_once(cfg, data, s, false);
            all_pass = all_pass && out.pass;
            csv += std::to_string(s) + "," + fmt(out.max_residual) + "," +
                   fmt(out.max_distortion) + "," + fmt(out.max_ratio) + "," +
                   (out.pass ? "true" : "false") + "\n";
            std::cout << "seed " << s << (out.pass ? " PASS" : " FAIL") << "\n";
        }
        atomic_write(cfg.out_dir + "/verify_seeds.csv", csv);
        std::cout << "wrote " << cfg.out_dir << "/verify_seeds.csv\n";
        return all_pass ? kExitOk : kExitCheckFailed;
    }

    const VerifyOutcome out = verify_once(cfg, data, seed, true);
    std::cout << (out.pass ? "all checks passed\n" : "some checks FAILED\n");
    return out.pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// diagnose: T(k) curve, coverage table, class imbalance.
// ---------------------------------------------------------------------------

int cmd_diagnose(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const std::vector<MatrixPtr> models =
        load_models(cfg.unlabeled, parse_format(cfg.format));
    const std::vector<WeightsPtr> ws = weights_per_model(models, cfg);
    const std::vector<const alws_weights*> raw = raw_handles(ws);
    const std::uint64_t n =
        static_cast<std::uint64_t>(alws_matrix_rows(models.front().get()));
    const int64_t k = static_cast<int64_t>(models.size());

    std::vector<double> sums(static_cast<std::size_t>(k));
    std::vector<double> bounds(static_cast<std::size_t>(k));
    check(alws_max_weight_sum_curve(raw.data(), k, n, sums.data(),
                                    bounds.data()));
    std::string curve_csv = "k,T,upper_bound\n";
    for (int64_t i = 0; i < k; ++i) {
        curve_csv += std::to_string(i + 1) + "," +
                     fmt(sums[static_cast<std::size_t>(i)]) + "," +
                     fmt(bounds[static_cast<std::size_t>(i)]) + "\n";
    }
    atomic_write(cfg.out_dir + "/curve.csv", curve_csv);

    std::string kappa_csv = "t,kappa\n";
    for (int t = 10; t <= 100; t += 10) {
        double kappa = 0.0;
        check(alws_coverage_kappa(raw.data(), k, static_cast<double>(t),
                                  &kappa));
        kappa_csv += std::to_string(t) + "," + fmt(kappa) + "\n";
    }
    atomic_write(cfg.out_dir + "/coverage.csv", kappa_csv);

    std::cout << "T(1)=" << fmt(sums.front()) << " T(" << k << ")="
              << fmt(sums.back()) << " bound(" << k << ")="
              << fmt(bounds.back()) << "\n";

    if (!cfg.labels.empty()) {
        const MatrixPtr labels_m = load_matrix(cfg.labels, ALWS_FORMAT_AUTO);
        const int64_t n_labels = alws_matrix_rows(labels_m.get());
        std::vector<double> values(static_cast<std::size_t>(n_labels));
        check(alws_matrix_copy(labels_m.get(), values.data(), n_labels));
        std::vector<int64_t> classes(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            classes[i] = static_cast<int64_t>(std::llround(values[i]));
        }
        double ratio = 0.0;
        check(alws_class_imbalance(classes.data(), n_labels, nullptr, 0,
                                   &ratio));
        atomic_write(cfg.out_dir + "/imbalance.txt", fmt(ratio) + "\n");
        std::cout << "class_imbalance=" << fmt(ratio) << "\n";
    }
    std::cout << "wrote " << cfg.out_dir << "/{curve.csv,coverage.csv}\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-shot active label selection by maximum Lewis weight "
                 "sampling (library version " +
                 std::string(alws_version()) + ")"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    // Flag storage; only flags the user passed override the config file.
    double p_flag = 0.0, eps_flag = 0.0;
    std::uint64_t tau_flag = 0, seed_flag = 0;
    std::string input_flag, out_dir_flag, format_flag;
    int sweep_flag = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--input", input_flag, "input matrix path");
        sub->add_option("--p", p_flag, "norm exponent p >= 1");
        sub->add_option("--epsilon", eps_flag, "accuracy parameter in (0,1)");
        sub->add_option("--tau", tau_flag, "distinct-query budget");
        sub->add_option("--seed", seed_flag, "RNG seed (mandatory for draws)");
        sub->add_option("--out-dir", out_dir_flag, "output directory");
        sub->add_option("--format", format_flag, "input format: csv|binary|auto");
    };

    CLI::App* weights = app.add_subcommand("weights", "lp weights of a matrix");
    CLI::App* sample = app.add_subcommand("sample", "max-weight sampling plan");
    CLI::App* pipeline = app.add_subcommand("pipeline", "full one-shot run");
    CLI::App* verify = app.add_subcommand("verify", "verification suite");
    CLI::App* diagnose = app.add_subcommand("diagnose", "weight diagnostics");
    for (CLI::App* sub : {weights, sample, pipeline, verify, diagnose}) {
        add_common(sub);
    }
    verify->add_option("--seed-sweep", sweep_flag,
                       "run the suite over this many consecutive seeds");

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (sub->count("--p") > 0) cfg.p = p_flag;
        if (sub->count("--epsilon") > 0) cfg.epsilon = eps_flag;
        if (sub->count("--tau") > 0) cfg.tau = tau_flag;
        if (sub->count("--seed") > 0) cfg.seed = seed_flag;
        if (sub->count("--input") > 0) cfg.input = input_flag;
        if (sub->count("--out-dir") > 0) cfg.out_dir = out_dir_flag;
        if (sub->count("--format") > 0) cfg.format = format_flag;
        if (sub == verify && sub->count("--seed-sweep") > 0) {
            cfg.seed_sweep = sweep_flag;
        }

        if (sub == weights) return cmd_weights(cfg);
        if (sub == sample) return cmd_sample(cfg);
        if (sub == pipeline) return cmd_pipeline(cfg);
        if (sub == verify) return cmd_verify(cfg);
        if (sub == diagnose) return cmd_diagnose(cfg);
        return kExitValidation;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
