#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (namespace
// lfm::kernels) and a plain serial version (lfm::kernels::reference) that the
// tests compare against. Reductions are done serially over per-item buffers so
// both versions produce bit-identical results regardless of thread count.

#include <span>
#include <vector>

#include "lfm/factor_model.hpp"
#include "lfm/mrle.hpp"
#include "lfm/operators.hpp"

namespace lfm::kernels {

/// log f_a(x) and log(1 - f_a(x)), stable for large |x|.
double log_activation(double x, double p0);
double log_one_minus_activation(double x, double p0);

/// Negative log-likelihood contribution of a single relation.
double relation_nll(const FactorModel& model, const Relation& r);

struct LogisticGradient {
    std::vector<double> weights;
    double bias = 0.0;
    double loss = 0.0;
};

double mrle_loss(const FactorModel& model, std::span<const Relation> relations);
std::vector<double> inner_products(const FactorModel& model, EdgeLabel level, std::span<const UserTarget> pairs);
Matrix operator_features(OperatorKind kind, const FactorModel& model, std::span<const UserTarget> pairs);
/// Mean logistic loss + (l2/2)|w|^2 and its gradient; labels are 0/1.
LogisticGradient logistic_gradient(const Matrix& features, std::span<const double> labels,
                                   std::span<const double> weights, double bias, double l2);

namespace reference {

double mrle_loss(const FactorModel& model, std::span<const Relation> relations);
std::vector<double> inner_products(const FactorModel& model, EdgeLabel level, std::span<const UserTarget> pairs);
Matrix operator_features(OperatorKind kind, const FactorModel& model, std::span<const UserTarget> pairs);
LogisticGradient logistic_gradient(const Matrix& features, std::span<const double> labels,
                                   std::span<const double> weights, double bias, double l2);

}  // namespace reference

}  // namespace lfm::kernels
