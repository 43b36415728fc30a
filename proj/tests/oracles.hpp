#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance binary. Written directly from the definitions, with no shared code
// paths beyond the data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "lfm/factor_model.hpp"
#include "lfm/random.hpp"
#include "lfm/signed_graph.hpp"
#include "lfm/spr.hpp"

namespace oracle {

using lfm::EdgeLabel;
using lfm::Index;

/// Random network with every user/target named; label draws: spam, normal, unknown.
inline lfm::SignedNetwork random_network(lfm::Rng& rng, std::size_t users, std::size_t targets, double density,
                                         double unknown_rate = 0.1) {
    lfm::NameTable u, t;
    for (std::size_t i = 0; i < users; ++i) u.intern("u" + std::to_string(i));
    for (std::size_t i = 0; i < targets; ++i) t.intern("t" + std::to_string(i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<lfm::Edge> edges;
    for (Index a = 0; a < users; ++a) {
        for (Index b = 0; b < targets; ++b) {
            if (unit(rng) >= density) continue;
            std::optional<EdgeLabel> label;
            const double r = unit(rng);
            if (r >= unknown_rate) label = unit(rng) < 0.5 ? EdgeLabel::Spam : EdgeLabel::Normal;
            edges.push_back({a, b, label});
        }
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    return lfm::SignedNetwork(std::move(u), std::move(t), std::move(edges));
}

/// Arbitrary role assignment that respects known labels.
inline lfm::TrainTestSplit random_split(const lfm::SignedNetwork& net, lfm::Rng& rng, double keep = 0.6) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<lfm::EdgeRole> roles;
    for (const auto& e : net.edges()) {
        if (!e.label || unit(rng) >= keep) {
            roles.push_back(lfm::EdgeRole::HeldOut);
        } else {
            roles.push_back(*e.label == EdgeLabel::Spam ? lfm::EdgeRole::TrainSpam : lfm::EdgeRole::TrainNormal);
        }
    }
    return lfm::TrainTestSplit(std::move(roles), 0);
}

enum class Cls { Higher, Aux, Lower, Incomparable };

/// Classifies (user, target) by scanning the raw edge list.
inline Cls classify(const lfm::SignedNetwork& net, const lfm::TrainTestSplit& split, Index user, Index target,
                    EdgeLabel level, std::size_t xi) {
    const lfm::EdgeRole same = level == EdgeLabel::Spam ? lfm::EdgeRole::TrainSpam : lfm::EdgeRole::TrainNormal;
    std::size_t evidence = 0;
    for (lfm::EdgeId id = 0; id < net.num_edges(); ++id) {
        if (net.edge(id).target == target && split.role(id) == same) ++evidence;
    }
    for (lfm::EdgeId id = 0; id < net.num_edges(); ++id) {
        const auto& e = net.edge(id);
        if (e.user != user || e.target != target) continue;
        const auto role = split.role(id);
        if (role == lfm::EdgeRole::HeldOut) return evidence > xi ? Cls::Aux : Cls::Incomparable;
        return role == same ? Cls::Higher : Cls::Lower;
    }
    return Cls::Lower;
}

using Pair = std::tuple<Index, Index, Index>;  // user, higher, lower

/// Every (user, i, j) with i ranked above j at `level`, sorted.
inline std::vector<Pair> brute_force_pairs(const lfm::SignedNetwork& net, const lfm::TrainTestSplit& split,
                                           EdgeLabel level, std::size_t xi) {
    std::vector<Pair> out;
    for (Index u = 0; u < net.num_users(); ++u) {
        std::vector<Cls> cls;
        for (Index t = 0; t < net.num_targets(); ++t) cls.push_back(classify(net, split, u, t, level, xi));
        for (Index i = 0; i < net.num_targets(); ++i) {
            for (Index j = 0; j < net.num_targets(); ++j) {
                const bool top = cls[i] == Cls::Higher || cls[i] == Cls::Aux;
                if ((top && cls[j] == Cls::Lower) || (cls[i] == Cls::Aux && cls[j] == Cls::Incomparable)) {
                    out.emplace_back(u, i, j);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Pair> as_pairs(const std::vector<lfm::RankingTriple>& triples) {
    std::vector<Pair> out;
    for (const auto& t : triples) out.emplace_back(t.user, t.higher, t.lower);
    std::sort(out.begin(), out.end());
    return out;
}

/// Quadratic pair count: (wins + ties / 2) / (pos * neg).
inline double auc(std::span<const double> scores, const std::vector<bool>& labels) {
    std::size_t twice = 0, pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i]) ++pos; else ++neg;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            if (scores[i] > scores[j]) twice += 2;
            else if (scores[i] == scores[j]) twice += 1;
        }
    }
    return static_cast<double>(twice) / 2.0 / (static_cast<double>(pos) * static_cast<double>(neg));
}

inline double precision_at_k(const std::vector<bool>& ranked, std::size_t k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += ranked[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(k);
}

/// Harmonic mean of precision and recall: 2tp / (|predicted| + |actual|).
inline double f_measure(const std::vector<bool>& decisions, const std::vector<bool>& labels) {
    std::size_t tp = 0, predicted = 0, actual = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (decisions[i] && labels[i]) ++tp;
        if (decisions[i]) ++predicted;
        if (labels[i]) ++actual;
    }
    if (tp == 0) return 0.0;
    return static_cast<double>(2 * tp) / static_cast<double>(predicted + actual);
}

/// Central difference of `f` at x[k].
inline double central_difference(const std::function<double()>& f, double& x, double h) {
    const double x0 = x;
    x = x0 + h;
    const double up = f();
    x = x0 - h;
    const double down = f();
    x = x0;
    return (up - down) / (2.0 * h);
}

/// Either within `abs_tol` or within `rel_tol` of the larger magnitude.
inline bool close(double a, double b, double rel_tol, double abs_tol) {
    const double diff = std::abs(a - b);
    return diff <= abs_tol || diff <= rel_tol * std::max(std::abs(a), std::abs(b));
}

/// Hand-derived derivative of p0 e^x / (1 + p0 (e^x - 1)).
inline double activation_derivative(double x, double p0) {
    const double ex = std::exp(x);
    const double denom = 1.0 + p0 * (ex - 1.0);
    return p0 * (1.0 - p0) * ex / (denom * denom);
}

/// The worked example network: five targets, four users.
///   u1: t1 -, t3 -          u2: t2 +, t4 +, t5 +
///   u3: t1 ?, t3 ?, t4 ?    u4: t1 -, t4 -, t5 ?
/// Every "?" edge is held out; the rest are training-visible.
struct Example {
    lfm::SignedNetwork network;
    lfm::TrainTestSplit split;
};

inline Example worked_example() {
    lfm::NameTable u, t;
    for (const char* n : {"u1", "u2", "u3", "u4"}) u.intern(n);
    for (const char* n : {"t1", "t2", "t3", "t4", "t5"}) t.intern(n);
    const auto S = EdgeLabel::Spam;
    const auto N = EdgeLabel::Normal;
    std::vector<lfm::Edge> edges = {
        {0, 0, S}, {0, 2, S},
        {1, 1, N}, {1, 3, N}, {1, 4, N},
        {2, 0, S}, {2, 2, S}, {2, 3, S},
        {3, 0, S}, {3, 3, S}, {3, 4, N},
    };
    std::vector<lfm::EdgeRole> roles = {
        lfm::EdgeRole::TrainSpam, lfm::EdgeRole::TrainSpam,
        lfm::EdgeRole::TrainNormal, lfm::EdgeRole::TrainNormal, lfm::EdgeRole::TrainNormal,
        lfm::EdgeRole::HeldOut, lfm::EdgeRole::HeldOut, lfm::EdgeRole::HeldOut,
        lfm::EdgeRole::TrainSpam, lfm::EdgeRole::TrainSpam, lfm::EdgeRole::HeldOut,
    };
    lfm::SignedNetwork net(std::move(u), std::move(t), std::move(edges));
    return {std::move(net), lfm::TrainTestSplit(std::move(roles), 0)};
}

}  // namespace oracle
