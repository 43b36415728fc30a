#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lfm/detect.hpp"
#include "lfm/factor_model.hpp"
#include "lfm/mrle.hpp"
#include "lfm/operators.hpp"
#include "lfm/signed_graph.hpp"
#include "lfm/spr.hpp"

namespace lfm {

/// Which factors a method reads.
enum class ModelKind { Mrle, MrleNoNon, MrleAux, Spr, MrleSpr };

struct Method {
    ModelKind model;
    OperatorKind op;

    std::string name() const;
    static std::optional<Method> parse(std::string_view name);
    bool operator==(const Method&) const = default;
};

/// Every tunable the trainers and the classifier consume.
struct PipelineConfig {
    MrleConfig mrle;
    SprConfig spr;
    ClassifierConfig classifier;
    /// MRLE+au moves ceil(au_fraction * |held_out|) top IPneg edges into train_spam.
    double au_fraction = 0.01;
    double tau = 0.5;
};

/// Factor models trained on one split; only the ones a method list needs are filled.
struct TrainedModels {
    std::optional<FactorModel> mrle, mrle_no_non, mrle_aux, spr;
};

/// Seeds the trainers from one stage seed. All models trained from the same
/// split and stage seed are identical no matter which subset is requested.
TrainedModels train_models(const PipelineConfig& config, const SignedNetwork& network, const TrainTestSplit& split,
                           const std::vector<Method>& methods, std::uint64_t stage_seed);

/// Spam-oriented scores (higher = more suspicious) for `edges`.
///
/// Avg/Con/Sub and every MRLE-SPR operator go through a logistic-regression
/// classifier trained on the split's training-visible edges. Single-model
/// IPneg scores are the raw inner product; IPpos scores are its negation.
std::vector<double> score_edges(const Method& method, const TrainedModels& models, const PipelineConfig& config,
                                const SignedNetwork& network, const TrainTestSplit& split,
                                std::span<const EdgeId> edges);

/// threshold(tau) for classifier outputs, top_k(round(prevalence * n)) for raw rankings.
DecisionPolicy default_policy(const Method& method, const PipelineConfig& config, double prevalence,
                              std::size_t num_edges);

enum class Protocol { LabelSweep, Imbalance, Incompleteness };
std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);

/// Which parameter a LabelSweep varies.
enum class SweepParam { LabelFraction, N, D };

struct ExperimentConfig {
    PipelineConfig pipeline;
    std::vector<Method> methods;
    std::uint64_t master_seed = 1;
    std::size_t num_seeds = 1;
    bool balance = true;

    SweepParam sweep = SweepParam::LabelFraction;
    std::vector<double> label_fractions = {0.2, 0.25, 0.3, 0.4, 0.5};
    std::vector<double> n_grid = {5, 10, 20, 40};
    std::vector<double> d_grid = {10, 20, 30, 50};
    /// Fixed labelled fraction when sweeping n or d.
    double sweep_label_fraction = 0.3;
    std::vector<std::size_t> pk_grid = {100, 200, 300, 400, 500};

    /// Imbalance protocol: training normal count is ceil(imbalance_normal_fraction * |spam|).
    double imbalance_normal_fraction = 0.5;
    std::size_t imbalance_ratio = 10;

    std::vector<double> drop_degrees = {0.0, 0.03, 0.05, 0.07, 0.10};
    double incompleteness_label_fraction = 0.4;
};

std::vector<Method> default_methods();

struct ReportRow {
    double setting;
    std::string method;
    std::string metric;
    double value;
    std::uint64_t seed;
};

struct EvaluationReport {
    Protocol protocol;
    std::vector<ReportRow> rows;
    /// key = value lines describing the run.
    std::vector<std::string> snapshot;
};

/// Imbalance-protocol training split and its 1:ratio spam:normal test set.
struct ImbalanceSet {
    TrainTestSplit split;
    std::vector<EdgeId> eval_edges;
};

/// Training spam is ceil(spam_fraction * |spam|), training normal is fixed at
/// ceil(imbalance_normal_fraction * |spam|); test edges are unused ones.
ImbalanceSet make_imbalance_set(const SignedNetwork& network, const ExperimentConfig& config, double spam_fraction,
                                std::uint64_t seed);

/// Seed used by seed index `k` of an experiment; also what a standalone run
/// with the same master seed uses for k = 0.
std::uint64_t experiment_seed(std::uint64_t master, std::size_t k);

EvaluationReport run_experiment(Protocol protocol, const SignedNetwork& network, const ExperimentConfig& config);

/// One labelled-fraction cell: split, train, and score held-out edges.
std::vector<ReportRow> run_label_cell(const SignedNetwork& network, const ExperimentConfig& config,
                                      double label_fraction, double setting, const std::string& metric,
                                      std::uint64_t seed);

/// `protocol,setting,method,metric,value,seed` CSV.
void write_report_csv(std::ostream& out, const EvaluationReport& report);
/// Seed-averaged values as an aligned text table.
void write_report_summary(std::ostream& out, const EvaluationReport& report);

/// Shortest round-trip decimal.
std::string format_double(double v);

}  // namespace lfm
