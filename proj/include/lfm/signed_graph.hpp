#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lfm {

using Index = std::uint32_t;
using EdgeId = std::uint32_t;

enum class EdgeLabel : std::uint8_t { Normal, Spam };

/// Per-user / per-target adjacency entry. `edge` indexes SignedNetwork::edges().
struct Incidence {
    Index other;
    EdgeId edge;
};

struct UserTarget {
    Index user;
    Index target;
    bool operator==(const UserTarget&) const = default;
};

struct Edge {
    Index user;
    Index target;
    /// Empty for edges whose label was never known ("unknown" in edge-list files).
    std::optional<EdgeLabel> label;
};

/// Dense bidirectional mapping between external tokens and 0-based indices.
class NameTable {
public:
    Index intern(const std::string& name);
    std::optional<Index> find(const std::string& name) const;
    const std::string& name(Index index) const { return names_[index]; }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Index> lookup_;
};

/// Immutable signed bipartite user-target network.
///
/// Adjacency lists are sorted by counterpart index so (user, target) lookups
/// are a binary search over one user's row.
class SignedNetwork {
public:
    SignedNetwork() = default;

    /// Builds adjacency and validates indices / duplicates.
    SignedNetwork(NameTable users, NameTable targets, std::vector<Edge> edges);

    std::size_t num_users() const { return users_.size(); }
    std::size_t num_targets() const { return targets_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_[id]; }

    std::span<const Incidence> user_adjacency(Index user) const;
    std::span<const Incidence> target_adjacency(Index target) const;

    std::optional<EdgeId> find_edge(Index user, Index target) const;

    const NameTable& users() const { return users_; }
    const NameTable& targets() const { return targets_; }

    std::size_t count_label(EdgeLabel label) const;

private:
    NameTable users_;
    NameTable targets_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> user_offsets_;
    std::vector<Incidence> user_adj_;
    std::vector<std::uint32_t> target_offsets_;
    std::vector<Incidence> target_adj_;
};

/// Role of each edge as seen by the learners.
enum class EdgeRole : std::uint8_t { TrainSpam, TrainNormal, HeldOut };

/// Partition of a network's edges into training-visible spam, training-visible
/// normal, and held-out ("?") edges.
class TrainTestSplit {
public:
    TrainTestSplit() = default;
    TrainTestSplit(std::vector<EdgeRole> roles, std::uint64_t seed);

    EdgeRole role(EdgeId edge) const { return roles_[edge]; }
    const std::vector<EdgeRole>& roles() const { return roles_; }
    std::size_t num_edges() const { return roles_.size(); }

    const std::vector<EdgeId>& train_spam() const { return train_spam_; }
    const std::vector<EdgeId>& train_normal() const { return train_normal_; }
    const std::vector<EdgeId>& held_out() const { return held_out_; }
    std::size_t num_training() const { return train_spam_.size() + train_normal_.size(); }

    std::uint64_t seed() const { return seed_; }

    bool operator==(const TrainTestSplit& other) const { return roles_ == other.roles_; }

private:
    std::vector<EdgeRole> roles_;
    std::vector<EdgeId> train_spam_;
    std::vector<EdgeId> train_normal_;
    std::vector<EdgeId> held_out_;
    std::uint64_t seed_ = 0;
};

/// Reads `user<TAB>target<TAB>{normal|spam|unknown}` lines.
SignedNetwork parse_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const SignedNetwork& network);

/// Edge list with a fourth `{train|test}` column.
struct NetworkWithSplit {
    SignedNetwork network;
    TrainTestSplit split;
};
NetworkWithSplit parse_split_file(std::istream& in);
void write_split_file(std::ostream& out, const SignedNetwork& network, const TrainTestSplit& split);

/// Rebinds a split file's train/test column onto an already-loaded network
/// (matching edges by external names).
TrainTestSplit read_split_for(std::istream& in, const SignedNetwork& network);

/// `ceil(fraction * count)` that ignores floating-point fuzz at integer boundaries.
std::size_t fraction_ceil(double fraction, std::size_t count);
std::size_t fraction_floor(double fraction, std::size_t count);

TrainTestSplit make_split(const SignedNetwork& network, double label_fraction, bool balance,
                          std::uint64_t seed);

/// Number of training-visible edges with `level` incident to `target`.
std::size_t spam_evidence_count(const SignedNetwork& network, const TrainTestSplit& split,
                                Index target, EdgeLabel level);

/// Removes floor(fraction * |edges|) uniformly chosen edges; id spaces are kept.
SignedNetwork drop_edges(const SignedNetwork& network, double fraction, std::uint64_t seed);

}  // namespace lfm
