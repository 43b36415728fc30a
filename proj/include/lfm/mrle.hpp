#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lfm/factor_model.hpp"
#include "lfm/random.hpp"
#include "lfm/signed_graph.hpp"

namespace lfm {

enum class RelationKind : std::uint8_t { Nor, Sp, Non };

struct Relation {
    Index user;
    Index target;
    RelationKind kind;
};

/// The three relation types of the likelihood objective, indexed from both
/// the user side and the target side.
class RelationSets {
public:
    RelationSets() = default;
    RelationSets(std::size_t num_users, std::size_t num_targets, std::vector<Relation> relations);

    std::span<const Relation> all() const { return relations_; }
    /// Indices into all() for relations touching `user` / `target`.
    std::span<const std::uint32_t> of_user(Index user) const;
    std::span<const std::uint32_t> of_target(Index target) const;

    std::size_t count(RelationKind kind) const;

private:
    std::vector<Relation> relations_;
    std::vector<std::uint32_t> user_offsets_, user_index_;
    std::vector<std::uint32_t> target_offsets_, target_index_;
};

/// Training-visible nor/sp edges plus the given sampled non pairs.
RelationSets build_relations(const SignedNetwork& network, const TrainTestSplit& split,
                             std::span<const UserTarget> non_pairs);

/// Up to `n` distinct targets with no edge (of any label) to `user`, uniform without replacement.
std::vector<Index> sample_non_targets(const SignedNetwork& network, Index user, std::size_t n, Rng& rng);
/// Mirror of sample_non_targets on the target side.
std::vector<Index> sample_non_users(const SignedNetwork& network, Index target, std::size_t n, Rng& rng);

/// n targets per user followed by n users per target.
std::vector<UserTarget> sample_non_pairs(const SignedNetwork& network, std::size_t n, Rng& rng);

/// Negative log-likelihood over nor, sp and non relations.
double mrle_objective(const FactorModel& model, const RelationSets& relations);

struct FactorGradient {
    std::vector<double> pos;
    std::vector<double> neg;
};

FactorGradient mrle_user_gradient(const FactorModel& model, Index user, const RelationSets& relations);
FactorGradient mrle_target_gradient(const FactorModel& model, Index target, const RelationSets& relations);

struct MrleConfig {
    std::size_t n = 20;
    double learning_rate = 0.005;
    std::size_t epochs = 100;
    double p0 = 0.01;
    std::size_t d_pos = 30;
    std::size_t d_neg = 30;
    double init_scale = 0.1;
    std::uint64_t seed = 1;
    bool use_non = true;
};

/// Called once per epoch with the epoch-end loss.
using EpochCallback = std::function<void(std::size_t epoch, double loss, std::chrono::milliseconds elapsed)>;

/// Alternating user/target gradient sweeps with per-epoch non-pair resampling.
FactorModel train_mrle(const MrleConfig& config, const SignedNetwork& network, const TrainTestSplit& split,
                       const EpochCallback& on_epoch = {});

/// Moves the first `k` held-out edges of `ranked_edges` into train_spam.
TrainTestSplit augment_with_auxiliary(const TrainTestSplit& split, std::span<const EdgeId> ranked_edges,
                                      std::size_t k);

}  // namespace lfm
