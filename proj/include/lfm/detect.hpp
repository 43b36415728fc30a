#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lfm/factor_model.hpp"
#include "lfm/operators.hpp"

namespace lfm {

/// Feature rows with 0/1 labels (1 = spam).
struct LabeledFeatures {
    Matrix features;
    std::vector<double> labels;
};

struct LinearClassifier {
    std::vector<double> weights;
    double bias = 0.0;
    double l2 = 0.0;
};

struct ClassifierConfig {
    double l2 = 1e-4;
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    std::uint64_t seed = 1;
};

/// Full-batch gradient descent on L2-regularised logistic loss, starting from
/// zero weights. Examples are put in a canonical order first, so the result does
/// not depend on the order they were supplied in.
LinearClassifier train_classifier(const LabeledFeatures& data, const ClassifierConfig& config,
                                  std::vector<double>* loss_history = nullptr);

double predict(const LinearClassifier& classifier, std::span<const double> features);

std::vector<double> concat_features(const FactorModel& model_a, const FactorModel& model_b, OperatorKind kind,
                                    Index user, Index target);

struct DecisionPolicy {
    enum class Kind { Threshold, TopK } kind = Kind::Threshold;
    double tau = 0.5;
    std::size_t k = 0;

    static DecisionPolicy threshold(double tau) { return {Kind::Threshold, tau, 0}; }
    static DecisionPolicy top_k(std::size_t k) { return {Kind::TopK, 0.0, k}; }
};

/// Per-edge spam decisions; top-k ties go to the lower index.
std::vector<bool> decide(std::span<const double> scores, const DecisionPolicy& policy);

}  // namespace lfm
