#include "lfm/spr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "lfm/error.hpp"
#include "lfm/kernels.hpp"

namespace lfm {

std::string_view to_string(TargetClass c) {
    switch (c) {
        case TargetClass::Higher: return "Higher";
        case TargetClass::AuxHigher: return "AuxHigher";
        case TargetClass::Lower: return "Lower";
        case TargetClass::Incomparable: return "Incomparable";
    }
    return "?";
}

std::vector<std::size_t> evidence_counts(const SignedNetwork& network, const TrainTestSplit& split, EdgeLabel level) {
    const EdgeRole wanted = level == EdgeLabel::Spam ? EdgeRole::TrainSpam : EdgeRole::TrainNormal;
    std::vector<std::size_t> counts(network.num_targets(), 0);
    for (EdgeId id = 0; id < network.num_edges(); ++id) {
        if (split.role(id) == wanted) ++counts[network.edge(id).target];
    }
    return counts;
}

namespace {

TargetClass classify_role(std::optional<EdgeRole> role, std::size_t evidence, EdgeLabel level, std::size_t xi) {
    if (!role) return TargetClass::Lower;
    const EdgeRole same = level == EdgeLabel::Spam ? EdgeRole::TrainSpam : EdgeRole::TrainNormal;
    switch (*role) {
        case EdgeRole::HeldOut: return evidence > xi ? TargetClass::AuxHigher : TargetClass::Incomparable;
        default: return *role == same ? TargetClass::Higher : TargetClass::Lower;
    }
}

}  // namespace

TargetClass target_class(const SignedNetwork& network, const TrainTestSplit& split,
                         std::span<const std::size_t> evidence, Index user, Index target, EdgeLabel level,
                         std::size_t xi) {
    auto id = network.find_edge(user, target);
    return classify_role(id ? std::optional<EdgeRole>(split.role(*id)) : std::nullopt, evidence[target], level, xi);
}

TargetClass target_class(const SignedNetwork& network, const TrainTestSplit& split, Index user, Index target,
                         EdgeLabel level, std::size_t xi) {
    std::vector<std::size_t> evidence(network.num_targets(), 0);
    evidence[target] = spam_evidence_count(network, split, target, level);
    return target_class(network, split, evidence, user, target, level, xi);
}

RankingPairSource::RankingPairSource(const SignedNetwork& network, const TrainTestSplit& split, EdgeLabel level,
                                     std::size_t xi)
    : level_(level), num_users_(network.num_users()), num_targets_(network.num_targets()) {
    const auto evidence = evidence_counts(network, split, level);
    rows_.reserve(num_users_);
    std::vector<Index> higher, aux, incomparable;
    for (Index u = 0; u < num_users_; ++u) {
        higher.clear();
        aux.clear();
        incomparable.clear();
        for (const auto& inc : network.user_adjacency(u)) {
            switch (classify_role(split.role(inc.edge), evidence[inc.other], level, xi)) {
                case TargetClass::Higher: higher.push_back(inc.other); break;
                case TargetClass::AuxHigher: aux.push_back(inc.other); break;
                case TargetClass::Incomparable: incomparable.push_back(inc.other); break;
                case TargetClass::Lower: break;
            }
        }
        Row row{};
        row.higher_begin = static_cast<std::uint32_t>(classified_.size());
        classified_.insert(classified_.end(), higher.begin(), higher.end());
        row.aux_begin = static_cast<std::uint32_t>(classified_.size());
        classified_.insert(classified_.end(), aux.begin(), aux.end());
        row.incomparable_begin = static_cast<std::uint32_t>(classified_.size());
        classified_.insert(classified_.end(), incomparable.begin(), incomparable.end());
        row.end = static_cast<std::uint32_t>(classified_.size());

        row.excluded_begin = static_cast<std::uint32_t>(excluded_.size());
        excluded_.insert(excluded_.end(), classified_.begin() + row.higher_begin, classified_.end());
        std::sort(excluded_.begin() + row.excluded_begin, excluded_.end());
        row.excluded_end = static_cast<std::uint32_t>(excluded_.size());
        rows_.push_back(row);
        if (num_pairs(u) > 0) active_users_.push_back(u);
    }
}

std::size_t RankingPairSource::num_lower(Index user) const {
    const Row& r = rows_[user];
    return num_targets_ - (r.excluded_end - r.excluded_begin);
}

std::size_t RankingPairSource::num_pairs(Index user) const {
    const Row& r = rows_[user];
    const std::size_t n_higher = r.aux_begin - r.higher_begin;
    const std::size_t n_aux = r.incomparable_begin - r.aux_begin;
    const std::size_t n_incomparable = r.end - r.incomparable_begin;
    return (n_higher + n_aux) * num_lower(user) + n_aux * n_incomparable;
}

std::size_t RankingPairSource::total_pairs() const {
    std::size_t total = 0;
    for (Index u : active_users_) total += num_pairs(u);
    return total;
}

Index RankingPairSource::kth_lower(Index user, std::size_t k) const {
    const Row& r = rows_[user];
    std::size_t candidate = k;
    for (auto i = r.excluded_begin; i < r.excluded_end; ++i) {
        if (excluded_[i] <= candidate) {
            ++candidate;
        } else {
            break;
        }
    }
    return static_cast<Index>(candidate);
}

RankingTriple RankingPairSource::pair_at(Index user, std::size_t index) const {
    const Row& r = rows_[user];
    const std::size_t n_top = r.incomparable_begin - r.higher_begin;  // Higher + AuxHigher
    const std::size_t n_lower = num_lower(user);
    if (index < n_top * n_lower) {
        return {user, classified_[r.higher_begin + index / n_lower], kth_lower(user, index % n_lower), level_};
    }
    index -= n_top * n_lower;
    const std::size_t n_incomparable = r.end - r.incomparable_begin;
    return {user, classified_[r.aux_begin + index / n_incomparable],
            classified_[r.incomparable_begin + index % n_incomparable], level_};
}

std::vector<RankingTriple> RankingPairSource::enumerate_user(Index user) const {
    std::vector<RankingTriple> out;
    const std::size_t n = num_pairs(user);
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(pair_at(user, i));
    return out;
}

std::vector<RankingTriple> RankingPairSource::enumerate() const {
    std::vector<RankingTriple> out;
    for (Index u : active_users_) {
        auto part = enumerate_user(u);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

RankingPairSource build_ranking_pairs(const SignedNetwork& network, const TrainTestSplit& split, EdgeLabel level,
                                      std::size_t xi) {
    return RankingPairSource(network, split, level, xi);
}

RankingTriple sample_triple(const RankingPairSource& source, Rng& rng) {
    if (source.empty()) throw Error(ErrorKind::NoPairs, "ranking pair source is empty");
    const auto& users = source.active_users();
    const Index u = users[uniform_index(rng, users.size())];
    return source.pair_at(u, uniform_index(rng, source.num_pairs(u)));
}

void write_pair_dump(std::ostream& out, const SignedNetwork& network, const RankingPairSource& source) {
    const char* level = source.level() == EdgeLabel::Spam ? "spam" : "normal";
    for (const auto& t : source.enumerate()) {
        out << level << '\t' << network.users().name(t.user) << '\t' << network.targets().name(t.higher) << '\t'
            << network.targets().name(t.lower) << '\n';
    }
}

namespace {

double squared_norm(std::span<const double> v) { return dot(v, v); }

double log_sigmoid(double z) {
    if (z > 0.0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

}  // namespace

double triple_objective(const FactorModel& model, const RankingTriple& triple, double lambda) {
    const Matrix& w = model.user_matrix(triple.level);
    const Matrix& h = model.target_matrix(triple.level);
    auto wu = w.row(triple.user);
    auto hi = h.row(triple.higher);
    auto hj = h.row(triple.lower);
    const double x = dot(wu, hi) - dot(wu, hj);
    return log_sigmoid(x) - 0.5 * lambda * (squared_norm(wu) + squared_norm(hi) + squared_norm(hj));
}

void sgd_step(FactorModel& model, const RankingTriple& triple, double alpha, double lambda) {
    Matrix& w = model.user_matrix(triple.level);
    Matrix& h = model.target_matrix(triple.level);
    auto wu = w.row(triple.user);
    auto hi = h.row(triple.higher);
    auto hj = h.row(triple.lower);
    const double x = dot(wu, hi) - dot(wu, hj);
    // 1 / (1 + e^x), computed without overflow.
    const double g = x > 0.0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
    for (std::size_t k = 0; k < wu.size(); ++k) {
        const double w0 = wu[k], i0 = hi[k], j0 = hj[k];
        wu[k] = w0 - alpha * (g * (j0 - i0) + lambda * w0);
        hi[k] = i0 - alpha * (g * -w0 + lambda * i0);
        hj[k] = j0 - alpha * (g * w0 + lambda * j0);
    }
}

std::size_t effective_iterations(const SprConfig& config, const TrainTestSplit& split) {
    return config.iterations ? config.iterations : 1000 * split.num_training();
}

FactorModel train_spr(const SprConfig& config, const SignedNetwork& network, const TrainTestSplit& split,
                      const WarningSink& warn, const SprEpochCallback& on_epoch) {
    if (!(config.alpha >= 0.0)) throw Error(ErrorKind::Range, "alpha must be >= 0");
    FactorModel model = init_model(network.num_users(), network.num_targets(), config.d_pos, config.d_neg,
                                   config.p0, config.init_scale, derive_seed(config.seed, "spr-init"));
    const RankingPairSource sources[2] = {build_ranking_pairs(network, split, EdgeLabel::Normal, config.xi),
                                          build_ranking_pairs(network, split, EdgeLabel::Spam, config.xi)};
    Rng rngs[2] = {Rng(derive_seed(config.seed, "spr-normal")), Rng(derive_seed(config.seed, "spr-spam"))};
    for (const auto& s : sources) {
        if (s.empty() && warn) {
            warn(std::string("no ranking pairs at ") + (s.level() == EdgeLabel::Spam ? "spam" : "normal") +
                 " level; its factors stay at initialization");
        }
    }
    const std::size_t iterations = effective_iterations(config, split);
    const std::size_t epoch_len = std::max<std::size_t>(1, split.num_training());
    const auto start = std::chrono::steady_clock::now();
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    auto report = [&](std::size_t it) {
        if (!on_epoch || (it % epoch_len != 0 && it != iterations)) return;
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        on_epoch((it + epoch_len - 1) / epoch_len, epoch_steps ? epoch_loss / static_cast<double>(epoch_steps) : 0.0,
                 elapsed);
        epoch_loss = 0.0;
        epoch_steps = 0;
    };
    for (std::size_t it = 0; it < iterations; ++it) {
        const int which = static_cast<int>(it % 2);
        const RankingPairSource& source = sources[which];
        if (source.empty()) {
            report(it + 1);
            continue;
        }
        const RankingTriple triple = sample_triple(source, rngs[which]);
        if (on_epoch) {
            const auto wu = model.user_matrix(triple.level).row(triple.user);
            const auto& h = model.target_matrix(triple.level);
            const double x = dot(wu, h.row(triple.higher)) - dot(wu, h.row(triple.lower));
            // -ln sigma(x) without overflow.
            epoch_loss += x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
            ++epoch_steps;
        }
        sgd_step(model, triple, config.alpha, config.lambda(triple.level));
        const Matrix& w = model.user_matrix(triple.level);
        const Matrix& h = model.target_matrix(triple.level);
        for (auto row : {w.row(triple.user), h.row(triple.higher), h.row(triple.lower)}) {
            for (double v : row) {
                if (!std::isfinite(v)) {
                    throw Error(ErrorKind::Divergence, "SPR factor became non-finite at step " + std::to_string(it));
                }
            }
        }
        report(it + 1);
    }
    return model;
}

std::vector<RankedEdge> rank_held_out(const FactorModel& model, const SignedNetwork& network,
                                      const TrainTestSplit& split, InnerProductKind kind) {
    std::vector<UserTarget> pairs;
    pairs.reserve(split.held_out().size());
    for (EdgeId id : split.held_out()) pairs.push_back({network.edge(id).user, network.edge(id).target});
    const auto scores = kernels::inner_products(
        model, kind == InnerProductKind::IPneg ? EdgeLabel::Spam : EdgeLabel::Normal, pairs);
    std::vector<RankedEdge> ranked;
    ranked.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) ranked.push_back({split.held_out()[i], scores[i]});
    std::sort(ranked.begin(), ranked.end(), [&](const RankedEdge& a, const RankedEdge& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto& ea = network.edge(a.edge);
        const auto& eb = network.edge(b.edge);
        if (ea.user != eb.user) return ea.user < eb.user;
        return ea.target < eb.target;
    });
    return ranked;
}

}  // namespace lfm
