#include "lfm/synth.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <string>

#include "lfm/error.hpp"
#include "lfm/random.hpp"

namespace lfm {

namespace {

std::size_t reachable(double off_class_rate, std::size_t home_pool, std::size_t off_pool) {
    return (off_class_rate < 1.0 ? home_pool : 0) + (off_class_rate > 0.0 ? off_pool : 0);
}

}  // namespace

SyntheticNetwork generate(const SynthParams& p) {
    for (double rate : {p.disguise_rate, p.camouflage_rate}) {
        if (!(rate >= 0.0 && rate <= 1.0)) throw Error(ErrorKind::Range, "synthetic rates must be in [0, 1]");
    }
    if (p.num_spammers > 0 &&
        p.edges_per_user > reachable(p.disguise_rate, p.num_malicious_targets, p.num_legit_targets)) {
        throw Error(ErrorKind::PoolExhausted, "spammers cannot reach edges_per_user distinct targets");
    }
    if (p.num_benign_users > 0 &&
        p.edges_per_user > reachable(p.camouflage_rate, p.num_legit_targets, p.num_malicious_targets)) {
        throw Error(ErrorKind::PoolExhausted, "benign users cannot reach edges_per_user distinct targets");
    }

    NameTable users, targets;
    for (std::size_t i = 0; i < p.num_benign_users; ++i) users.intern("b" + std::to_string(i));
    for (std::size_t i = 0; i < p.num_spammers; ++i) users.intern("s" + std::to_string(i));
    for (std::size_t i = 0; i < p.num_legit_targets; ++i) targets.intern("l" + std::to_string(i));
    for (std::size_t i = 0; i < p.num_malicious_targets; ++i) targets.intern("m" + std::to_string(i));
    const auto first_malicious = static_cast<Index>(p.num_legit_targets);

    GroundTruth truth;
    truth.user_is_spammer.assign(users.size(), false);
    for (std::size_t i = p.num_benign_users; i < users.size(); ++i) truth.user_is_spammer[i] = true;
    truth.target_is_malicious.assign(targets.size(), false);
    for (std::size_t i = first_malicious; i < targets.size(); ++i) truth.target_is_malicious[i] = true;

    Rng rng(derive_seed(p.seed, "synth"));
    std::bernoulli_distribution coin_disguise(p.disguise_rate), coin_camouflage(p.camouflage_rate);
    std::vector<Edge> edges;
    edges.reserve(users.size() * p.edges_per_user);
    std::vector<Index> chosen;
    for (Index u = 0; u < users.size(); ++u) {
        const bool spammer = truth.user_is_spammer[u];
        chosen.clear();
        std::size_t used[2] = {0, 0};
        while (chosen.size() < p.edges_per_user) {
            const bool off_class = spammer ? coin_disguise(rng) : coin_camouflage(rng);
            // Spammers' home class is malicious; benign users' is legit.
            const bool malicious = spammer != off_class;
            const std::size_t pool = malicious ? p.num_malicious_targets : p.num_legit_targets;
            // The coin is redrawn only when its pool is exhausted; duplicates resample the target alone.
            if (used[malicious] == pool) continue;
            Index t;
            do {
                t = static_cast<Index>((malicious ? first_malicious : 0) + uniform_index(rng, pool));
            } while (std::find(chosen.begin(), chosen.end(), t) != chosen.end());
            chosen.push_back(t);
            ++used[malicious];
            const EdgeLabel label = spammer && malicious ? EdgeLabel::Spam : EdgeLabel::Normal;
            edges.push_back(Edge{u, t, label});
        }
    }
    return {SignedNetwork(std::move(users), std::move(targets), std::move(edges)), std::move(truth)};
}

void write_roles(std::ostream& out, const SyntheticNetwork& synth) {
    const auto& net = synth.network;
    for (Index u = 0; u < net.num_users(); ++u) {
        out << net.users().name(u) << '\t' << (synth.truth.user_is_spammer[u] ? "spammer" : "benign") << '\n';
    }
    for (Index t = 0; t < net.num_targets(); ++t) {
        out << net.targets().name(t) << '\t' << (synth.truth.target_is_malicious[t] ? "malicious" : "legit") << '\n';
    }
}

}  // namespace lfm
