#include "lfm/mrle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lfm/error.hpp"
#include "lfm/kernels.hpp"

namespace lfm {

namespace {

void index_by(std::size_t rows, const std::vector<Relation>& relations, bool by_user,
              std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& index) {
    offsets.assign(rows + 1, 0);
    for (const auto& r : relations) ++offsets[(by_user ? r.user : r.target) + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    index.assign(relations.size(), 0);
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::uint32_t i = 0; i < relations.size(); ++i) {
        index[cursor[by_user ? relations[i].user : relations[i].target]++] = i;
    }
}

// Uniform sample without replacement of up to n ids in [0, pool) that are not in
// the sorted `linked` adjacency.
std::vector<Index> sample_unlinked(std::size_t pool, std::span<const Incidence> linked, std::size_t n, Rng& rng) {
    const std::size_t eligible = pool - linked.size();
    std::vector<Index> out;
    if (n == 0 || eligible == 0) return out;
    auto is_linked = [&](Index id) {
        return std::binary_search(linked.begin(), linked.end(), Incidence{id, 0},
                                  [](const Incidence& a, const Incidence& b) { return a.other < b.other; });
    };
    if (n >= eligible || eligible <= 2 * n) {
        std::vector<Index> all;
        all.reserve(eligible);
        for (Index id = 0; id < pool; ++id) {
            if (!is_linked(id)) all.push_back(id);
        }
        const std::size_t take = std::min(n, eligible);
        for (std::size_t i = 0; i < take; ++i) {
            std::swap(all[i], all[i + uniform_index(rng, all.size() - i)]);
        }
        all.resize(take);
        return all;
    }
    out.reserve(n);
    while (out.size() < n) {
        auto id = static_cast<Index>(uniform_index(rng, pool));
        if (is_linked(id) || std::find(out.begin(), out.end(), id) != out.end()) continue;
        out.push_back(id);
    }
    return out;
}

void accumulate(std::span<double> acc, double coeff, std::span<const double> v) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += coeff * v[k];
}

// Shared body of the user and target gradients: the partner rows come from the
// opposite side's matrices.
FactorGradient relation_gradient(const FactorModel& model, std::span<const std::uint32_t> members,
                                 const RelationSets& relations, bool user_side) {
    FactorGradient g{std::vector<double>(model.d_pos(), 0.0), std::vector<double>(model.d_neg(), 0.0)};
    const auto all = relations.all();
    for (auto idx : members) {
        const Relation& r = all[idx];
        const auto score = edge_scores(model, r.user, r.target);
        auto partner_pos = user_side ? model.h_pos.row(r.target) : model.w_pos.row(r.user);
        auto partner_neg = user_side ? model.h_neg.row(r.target) : model.w_neg.row(r.user);
        switch (r.kind) {
            case RelationKind::Nor:
                accumulate(g.pos, -(1.0 - score.f_pos), partner_pos);
                accumulate(g.neg, score.f_neg, partner_neg);
                break;
            case RelationKind::Sp:
                accumulate(g.pos, score.f_pos, partner_pos);
                accumulate(g.neg, -(1.0 - score.f_neg), partner_neg);
                break;
            case RelationKind::Non:
                accumulate(g.pos, score.f_pos, partner_pos);
                accumulate(g.neg, score.f_neg, partner_neg);
                break;
        }
    }
    return g;
}

void descend(std::span<double> row, double lr, std::span<const double> grad) {
    for (std::size_t k = 0; k < row.size(); ++k) row[k] -= lr * grad[k];
}

}  // namespace

RelationSets::RelationSets(std::size_t num_users, std::size_t num_targets, std::vector<Relation> relations)
    : relations_(std::move(relations)) {
    for (const auto& r : relations_) {
        if (r.user >= num_users || r.target >= num_targets) {
            throw Error(ErrorKind::Range, "relation references an entity outside the model");
        }
    }
    index_by(num_users, relations_, true, user_offsets_, user_index_);
    index_by(num_targets, relations_, false, target_offsets_, target_index_);
}

std::span<const std::uint32_t> RelationSets::of_user(Index user) const {
    return {user_index_.data() + user_offsets_[user], user_offsets_[user + 1] - user_offsets_[user]};
}

std::span<const std::uint32_t> RelationSets::of_target(Index target) const {
    return {target_index_.data() + target_offsets_[target], target_offsets_[target + 1] - target_offsets_[target]};
}

std::size_t RelationSets::count(RelationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(relations_.begin(), relations_.end(), [kind](const Relation& r) { return r.kind == kind; }));
}

RelationSets build_relations(const SignedNetwork& network, const TrainTestSplit& split,
                             std::span<const UserTarget> non_pairs) {
    std::vector<Relation> rel;
    rel.reserve(split.num_training() + non_pairs.size());
    for (EdgeId id : split.train_normal()) rel.push_back({network.edge(id).user, network.edge(id).target, RelationKind::Nor});
    for (EdgeId id : split.train_spam()) rel.push_back({network.edge(id).user, network.edge(id).target, RelationKind::Sp});
    for (const auto& p : non_pairs) rel.push_back({p.user, p.target, RelationKind::Non});
    return RelationSets(network.num_users(), network.num_targets(), std::move(rel));
}

std::vector<Index> sample_non_targets(const SignedNetwork& network, Index user, std::size_t n, Rng& rng) {
    return sample_unlinked(network.num_targets(), network.user_adjacency(user), n, rng);
}

std::vector<Index> sample_non_users(const SignedNetwork& network, Index target, std::size_t n, Rng& rng) {
    return sample_unlinked(network.num_users(), network.target_adjacency(target), n, rng);
}

std::vector<UserTarget> sample_non_pairs(const SignedNetwork& network, std::size_t n, Rng& rng) {
    std::vector<UserTarget> pairs;
    if (n == 0) return pairs;
    for (Index u = 0; u < network.num_users(); ++u) {
        for (Index t : sample_non_targets(network, u, n, rng)) pairs.push_back({u, t});
    }
    for (Index t = 0; t < network.num_targets(); ++t) {
        for (Index u : sample_non_users(network, t, n, rng)) pairs.push_back({u, t});
    }
    return pairs;
}

double mrle_objective(const FactorModel& model, const RelationSets& relations) {
    return kernels::mrle_loss(model, relations.all());
}

FactorGradient mrle_user_gradient(const FactorModel& model, Index user, const RelationSets& relations) {
    return relation_gradient(model, relations.of_user(user), relations, true);
}

FactorGradient mrle_target_gradient(const FactorModel& model, Index target, const RelationSets& relations) {
    return relation_gradient(model, relations.of_target(target), relations, false);
}

FactorModel train_mrle(const MrleConfig& config, const SignedNetwork& network, const TrainTestSplit& split,
                       const EpochCallback& on_epoch) {
    if (!(config.learning_rate >= 0.0)) throw Error(ErrorKind::Range, "learning_rate must be >= 0");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = config.use_non ? config.n : 0;
    FactorModel model = init_model(network.num_users(), network.num_targets(), config.d_pos, config.d_neg,
                                   config.p0, config.init_scale, derive_seed(config.seed, "mrle-init"));

    Rng validation_rng(derive_seed(config.seed, "mrle-validation"));
    const auto validation_non = sample_non_pairs(network, n, validation_rng);
    const RelationSets validation = build_relations(network, split, validation_non);

    auto report = [&](std::size_t epoch) {
        const double loss = mrle_objective(model, validation);
        if (!std::isfinite(loss)) {
            throw Error(ErrorKind::Divergence, "MRLE loss became non-finite at epoch " + std::to_string(epoch));
        }
        if (on_epoch) {
            on_epoch(epoch, loss, std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::steady_clock::now() - start));
        }
    };
    report(0);

    Rng rng(derive_seed(config.seed, "mrle-non"));
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto non = sample_non_pairs(network, n, rng);
        const RelationSets relations = build_relations(network, split, non);
        for (Index u = 0; u < network.num_users(); ++u) {
            const auto g = mrle_user_gradient(model, u, relations);
            descend(model.w_pos.row(u), config.learning_rate, g.pos);
            descend(model.w_neg.row(u), config.learning_rate, g.neg);
        }
        for (Index t = 0; t < network.num_targets(); ++t) {
            const auto g = mrle_target_gradient(model, t, relations);
            descend(model.h_pos.row(t), config.learning_rate, g.pos);
            descend(model.h_neg.row(t), config.learning_rate, g.neg);
        }
        report(epoch);
    }
    return model;
}

TrainTestSplit augment_with_auxiliary(const TrainTestSplit& split, std::span<const EdgeId> ranked_edges,
                                      std::size_t k) {
    if (k > split.held_out().size()) {
        throw Error(ErrorKind::Range, "k = " + std::to_string(k) + " exceeds held-out size " +
                                          std::to_string(split.held_out().size()));
    }
    if (k > ranked_edges.size()) throw Error(ErrorKind::Range, "k exceeds ranking length");
    std::vector<EdgeRole> roles = split.roles();
    for (std::size_t i = 0; i < k; ++i) {
        const EdgeId id = ranked_edges[i];
        if (id >= roles.size() || roles[id] != EdgeRole::HeldOut) {
            throw Error(ErrorKind::Range, "ranked edge " + std::to_string(id) + " is not held out");
        }
        roles[id] = EdgeRole::TrainSpam;
    }
    return TrainTestSplit(std::move(roles), split.seed());
}

}  // namespace lfm
