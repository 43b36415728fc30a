#include "lfm/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lfm/error.hpp"
#include "lfm/kernels.hpp"

namespace lfm {

namespace {

LabeledFeatures canonical_order(const LabeledFeatures& data) {
    const std::size_t n = data.features.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (data.labels[a] != data.labels[b]) return data.labels[a] < data.labels[b];
        auto ra = data.features.row(a), rb = data.features.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    LabeledFeatures out{Matrix(n, data.features.cols()), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        auto src = data.features.row(order[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels[i] = data.labels[order[i]];
    }
    return out;
}

}  // namespace

LinearClassifier train_classifier(const LabeledFeatures& data, const ClassifierConfig& config,
                                  std::vector<double>* loss_history) {
    if (data.labels.size() != data.features.rows()) {
        throw Error(ErrorKind::Dimension, "label count does not match feature rows");
    }
    std::size_t positives = 0;
    for (double y : data.labels) {
        if (y != 0.0 && y != 1.0) throw Error(ErrorKind::Range, "labels must be 0 or 1");
        positives += y == 1.0;
    }
    if (positives == 0 || positives == data.labels.size()) {
        throw Error(ErrorKind::DegenerateTraining, "classifier needs examples of both classes");
    }
    const LabeledFeatures sorted = canonical_order(data);
    LinearClassifier clf{std::vector<double>(data.features.cols(), 0.0), 0.0, config.l2};
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto g = kernels::logistic_gradient(sorted.features, sorted.labels, clf.weights, clf.bias, config.l2);
        if (loss_history) loss_history->push_back(g.loss);
        for (std::size_t j = 0; j < clf.weights.size(); ++j) clf.weights[j] -= config.learning_rate * g.weights[j];
        clf.bias -= config.learning_rate * g.bias;
        if (!std::isfinite(clf.bias)) throw Error(ErrorKind::Divergence, "classifier diverged");
    }
    return clf;
}

double predict(const LinearClassifier& classifier, std::span<const double> features) {
    if (features.size() != classifier.weights.size()) {
        throw Error(ErrorKind::Dimension, "feature length " + std::to_string(features.size()) +
                                              " does not match classifier dimension " +
                                              std::to_string(classifier.weights.size()));
    }
    const double z = dot(classifier.weights, features) + classifier.bias;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    // Kept strictly positive where exp underflows.
    return std::max(e / (1.0 + e), std::numeric_limits<double>::denorm_min());
}

std::vector<double> concat_features(const FactorModel& model_a, const FactorModel& model_b, OperatorKind kind,
                                    Index user, Index target) {
    auto out = apply_operator(kind, model_a, user, target);
    auto tail = apply_operator(kind, model_b, user, target);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

std::vector<bool> decide(std::span<const double> scores, const DecisionPolicy& policy) {
    std::vector<bool> out(scores.size(), false);
    if (policy.kind == DecisionPolicy::Kind::Threshold) {
        for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= policy.tau;
        return out;
    }
    if (policy.k > scores.size()) {
        throw Error(ErrorKind::Range, "top_k = " + std::to_string(policy.k) + " exceeds " +
                                          std::to_string(scores.size()) + " edges");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    for (std::size_t i = 0; i < policy.k; ++i) out[order[i]] = true;
    return out;
}

}  // namespace lfm
