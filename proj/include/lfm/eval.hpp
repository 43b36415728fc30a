#pragma once

#include <span>
#include <vector>

namespace lfm {

/// Mann-Whitney AUC with ties counted as one half. `labels` are true for spam.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

/// Fraction of spam among the first k entries of `ranked_labels` (already in rank order).
double precision_at_k(const std::vector<bool>& ranked_labels, std::size_t k);

/// F1 with spam as the positive class; 0 when precision + recall is 0.
double f_measure(const std::vector<bool>& decisions, const std::vector<bool>& labels);

}  // namespace lfm
