#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lfm/signed_graph.hpp"

namespace lfm {

/// Planted spam-campaign generator settings.
struct SynthParams {
    std::size_t num_benign_users = 100;
    std::size_t num_spammers = 20;
    std::size_t num_legit_targets = 80;
    std::size_t num_malicious_targets = 20;
    std::size_t edges_per_user = 10;
    /// Probability that a spammer edge goes to a legit target (labelled normal).
    double disguise_rate = 0.1;
    /// Probability that a benign user edge goes to a malicious target (labelled normal).
    double camouflage_rate = 0.05;
    std::uint64_t seed = 1;
};

struct GroundTruth {
    std::vector<bool> user_is_spammer;     // by user index
    std::vector<bool> target_is_malicious;  // by target index
};

struct SyntheticNetwork {
    SignedNetwork network;
    GroundTruth truth;
};

/// Users are benign `b<i>` then spammers `s<i>`; targets are legit `l<i>` then malicious `m<i>`.
SyntheticNetwork generate(const SynthParams& params);

/// `entity_token<TAB>{spammer|benign|malicious|legit}` lines.
void write_roles(std::ostream& out, const SyntheticNetwork& synth);

}  // namespace lfm
