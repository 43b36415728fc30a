#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lfm/factor_model.hpp"
#include "lfm/random.hpp"
#include "lfm/signed_graph.hpp"

namespace lfm {

/// How a target sits in one user's ranking at a given level.
enum class TargetClass { Higher, AuxHigher, Lower, Incomparable };

std::string_view to_string(TargetClass c);

/// Training-visible evidence count of every target at `level`.
std::vector<std::size_t> evidence_counts(const SignedNetwork& network, const TrainTestSplit& split, EdgeLabel level);

TargetClass target_class(const SignedNetwork& network, const TrainTestSplit& split, Index user, Index target,
                         EdgeLabel level, std::size_t xi);

/// Same classification with precomputed evidence_counts(network, split, level).
TargetClass target_class(const SignedNetwork& network, const TrainTestSplit& split,
                         std::span<const std::size_t> evidence, Index user, Index target, EdgeLabel level,
                         std::size_t xi);

struct RankingTriple {
    Index user;
    Index higher;
    Index lower;
    EdgeLabel level;
    bool operator==(const RankingTriple&) const = default;
};

/// Comparable (higher, lower) target pairs for every user at one level.
///
/// Emitted relations: Higher > Lower, AuxHigher > Lower, AuxHigher > Incomparable.
/// Lower targets (including every unlinked target) are never stored; the k-th
/// Lower target of a user is recovered from the sorted list of its non-Lower
/// targets, so sampling needs memory proportional to the edge count only.
class RankingPairSource {
public:
    RankingPairSource(const SignedNetwork& network, const TrainTestSplit& split, EdgeLabel level, std::size_t xi);

    EdgeLabel level() const { return level_; }
    std::size_t num_users() const { return num_users_; }
    std::size_t num_pairs(Index user) const;
    std::size_t total_pairs() const;
    bool empty() const { return active_users_.empty(); }
    /// Users with at least one pair, ascending.
    const std::vector<Index>& active_users() const { return active_users_; }

    /// The r-th pair of `user` in enumeration order, r < num_pairs(user).
    RankingTriple pair_at(Index user, std::size_t r) const;

    std::vector<RankingTriple> enumerate_user(Index user) const;
    std::vector<RankingTriple> enumerate() const;

private:
    struct Row {
        std::uint32_t higher_begin, aux_begin, incomparable_begin, end;  // into classified_
        std::uint32_t excluded_begin, excluded_end;                       // into excluded_
    };
    std::size_t num_lower(Index user) const;
    Index kth_lower(Index user, std::size_t k) const;

    EdgeLabel level_;
    std::size_t num_users_ = 0;
    std::size_t num_targets_ = 0;
    std::vector<Row> rows_;
    std::vector<Index> classified_;  // per user: Higher..., AuxHigher..., Incomparable...
    std::vector<Index> excluded_;    // per user: sorted non-Lower targets
    std::vector<Index> active_users_;
};

RankingPairSource build_ranking_pairs(const SignedNetwork& network, const TrainTestSplit& split, EdgeLabel level,
                                      std::size_t xi);

/// Uniform over active users, then uniform over that user's pairs.
RankingTriple sample_triple(const RankingPairSource& source, Rng& rng);

/// `level<TAB>user<TAB>higher<TAB>lower` lines using external names.
void write_pair_dump(std::ostream& out, const SignedNetwork& network, const RankingPairSource& source);

/// ln sigma(x_ui - x_uj) - (lambda / 2) * (|W_u|^2 + |H_i|^2 + |H_j|^2) on raw inner products.
double triple_objective(const FactorModel& model, const RankingTriple& triple, double lambda);

/// One SGD step on the triple's three rows using their pre-step values.
void sgd_step(FactorModel& model, const RankingTriple& triple, double alpha, double lambda);

struct SprConfig {
    double alpha = 0.005;
    double lambda_pos = 0.01;
    double lambda_neg = 0.01;
    std::size_t xi = 2;
    /// 0 selects 1000 steps per training-visible edge.
    std::size_t iterations = 0;
    double p0 = 0.01;
    std::size_t d_pos = 30;
    std::size_t d_neg = 30;
    double init_scale = 0.1;
    std::uint64_t seed = 1;

    double lambda(EdgeLabel level) const { return level == EdgeLabel::Spam ? lambda_neg : lambda_pos; }
};

std::size_t effective_iterations(const SprConfig& config, const TrainTestSplit& split);

using WarningSink = std::function<void(const std::string&)>;
/// Epoch = one pass of num_training() steps; loss is the mean -ln sigma(x) over its triples.
using SprEpochCallback = std::function<void(std::size_t epoch, double loss, std::chrono::milliseconds elapsed)>;

/// Interleaves Normal and Spam level steps with independent triple streams.
FactorModel train_spr(const SprConfig& config, const SignedNetwork& network, const TrainTestSplit& split,
                      const WarningSink& warn = {}, const SprEpochCallback& on_epoch = {});

enum class InnerProductKind { IPneg, IPpos };

struct RankedEdge {
    EdgeId edge;
    double score;
};

/// Held-out edges in descending raw inner-product order, ties by (user, target).
std::vector<RankedEdge> rank_held_out(const FactorModel& model, const SignedNetwork& network,
                                      const TrainTestSplit& split, InnerProductKind kind);

}  // namespace lfm
