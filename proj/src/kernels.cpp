#include "lfm/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace lfm::kernels {

namespace {

// log(sigmoid(z))
double log_sigmoid(double z) {
    if (z > 0.0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

// log(1 + e^z)
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double prior_logit(double p0) { return std::log(p0 / (1.0 - p0)); }

double example_margin(const Matrix& x, std::size_t i, std::span<const double> w, double b) {
    return dot(x.row(i), w) + b;
}

}  // namespace

// f_a(x) is the logistic function shifted by logit(p0).
double log_activation(double x, double p0) { return log_sigmoid(x + prior_logit(p0)); }
double log_one_minus_activation(double x, double p0) { return log_sigmoid(-(x + prior_logit(p0))); }

double relation_nll(const FactorModel& model, const Relation& r) {
    const double xp = model.inner(EdgeLabel::Normal, r.user, r.target);
    const double xn = model.inner(EdgeLabel::Spam, r.user, r.target);
    const double p0 = model.p0;
    switch (r.kind) {
        case RelationKind::Nor: return -(log_activation(xp, p0) + log_one_minus_activation(xn, p0));
        case RelationKind::Sp: return -(log_one_minus_activation(xp, p0) + log_activation(xn, p0));
        case RelationKind::Non: return -(log_one_minus_activation(xp, p0) + log_one_minus_activation(xn, p0));
    }
    return 0.0;
}

double mrle_loss(const FactorModel& model, std::span<const Relation> relations) {
    const auto n = static_cast<std::ptrdiff_t>(relations.size());
    std::vector<double> terms(relations.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) terms[i] = relation_nll(model, relations[i]);
    double total = 0.0;
    for (double t : terms) total += t;
    return total;
}

std::vector<double> inner_products(const FactorModel& model, EdgeLabel level, std::span<const UserTarget> pairs) {
    const auto n = static_cast<std::ptrdiff_t>(pairs.size());
    std::vector<double> out(pairs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = model.inner(level, pairs[i].user, pairs[i].target);
    return out;
}

Matrix operator_features(OperatorKind kind, const FactorModel& model, std::span<const UserTarget> pairs) {
    Matrix out(pairs.size(), operator_dimension(kind, model));
    const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        apply_operator_into(kind, model, pairs[i].user, pairs[i].target, out.row(i));
    }
    return out;
}

LogisticGradient logistic_gradient(const Matrix& features, std::span<const double> labels,
                                   std::span<const double> weights, double bias, double l2) {
    const std::size_t rows = features.rows(), cols = features.cols();
    const auto n = static_cast<std::ptrdiff_t>(rows);
    std::vector<double> residual(rows), loss_terms(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double z = example_margin(features, i, weights, bias);
        residual[i] = sigmoid(z) - labels[i];
        loss_terms[i] = softplus(z) - labels[i] * z;
    }
    LogisticGradient g;
    g.weights.assign(cols, 0.0);
    const double inv_n = rows ? 1.0 / static_cast<double>(rows) : 0.0;
    const auto m = static_cast<std::ptrdiff_t>(cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += residual[i] * features.row(i)[j];
        g.weights[j] = s * inv_n + l2 * weights[j];
    }
    double loss = 0.0, bias_sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        loss += loss_terms[i];
        bias_sum += residual[i];
    }
    g.bias = bias_sum * inv_n;
    g.loss = loss * inv_n + 0.5 * l2 * dot(weights, weights);
    return g;
}

namespace reference {

double mrle_loss(const FactorModel& model, std::span<const Relation> relations) {
    double total = 0.0;
    for (const auto& r : relations) total += relation_nll(model, r);
    return total;
}

std::vector<double> inner_products(const FactorModel& model, EdgeLabel level, std::span<const UserTarget> pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(model.inner(level, p.user, p.target));
    return out;
}

Matrix operator_features(OperatorKind kind, const FactorModel& model, std::span<const UserTarget> pairs) {
    Matrix out(pairs.size(), operator_dimension(kind, model));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        apply_operator_into(kind, model, pairs[i].user, pairs[i].target, out.row(i));
    }
    return out;
}

LogisticGradient logistic_gradient(const Matrix& features, std::span<const double> labels,
                                   std::span<const double> weights, double bias, double l2) {
    const std::size_t rows = features.rows(), cols = features.cols();
    LogisticGradient g;
    g.weights.assign(cols, 0.0);
    double loss = 0.0, bias_sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const double z = example_margin(features, i, weights, bias);
        const double r = sigmoid(z) - labels[i];
        auto x = features.row(i);
        for (std::size_t j = 0; j < cols; ++j) g.weights[j] += r * x[j];
        loss += softplus(z) - labels[i] * z;
        bias_sum += r;
    }
    const double inv_n = rows ? 1.0 / static_cast<double>(rows) : 0.0;
    for (std::size_t j = 0; j < cols; ++j) g.weights[j] = g.weights[j] * inv_n + l2 * weights[j];
    g.bias = bias_sum * inv_n;
    g.loss = loss * inv_n + 0.5 * l2 * dot(weights, weights);
    return g;
}

}  // namespace reference

}  // namespace lfm::kernels
