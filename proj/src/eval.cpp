#include "lfm/eval.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lfm/error.hpp"

namespace lfm {

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) throw Error(ErrorKind::Dimension, "scores and labels differ in length");
    const std::size_t n = scores.size();
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw Error(ErrorKind::UndefinedMetric, "AUC needs both classes");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Twice the rank sum of positives, using mid-ranks for ties, kept integral.
    std::size_t twice_rank_sum = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t tied_pos = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) tied_pos += labels[order[j++]];
        // ranks i+1 .. j, mid-rank (i + 1 + j) / 2
        twice_rank_sum += tied_pos * (i + 1 + j);
        i = j;
    }
    const double u = static_cast<double>(twice_rank_sum) / 2.0 - static_cast<double>(pos * (pos + 1)) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double precision_at_k(const std::vector<bool>& ranked_labels, std::size_t k) {
    if (k == 0 || k > ranked_labels.size()) {
        throw Error(ErrorKind::Range, "k = " + std::to_string(k) + " outside [1, " +
                                          std::to_string(ranked_labels.size()) + "]");
    }
    const auto hits = std::count(ranked_labels.begin(), ranked_labels.begin() + static_cast<std::ptrdiff_t>(k), true);
    return static_cast<double>(hits) / static_cast<double>(k);
}

double f_measure(const std::vector<bool>& decisions, const std::vector<bool>& labels) {
    if (decisions.size() != labels.size()) throw Error(ErrorKind::Dimension, "decisions and labels differ in length");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        tp += decisions[i] && labels[i];
        fp += decisions[i] && !labels[i];
        fn += !decisions[i] && labels[i];
    }
    if (tp == 0) return 0.0;
    // 2PR / (P + R) reduced to a single division.
    return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace lfm
