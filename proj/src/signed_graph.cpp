#include "lfm/signed_graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lfm/error.hpp"
#include "lfm/random.hpp"

namespace lfm {

Index NameTable::intern(const std::string& name) {
    auto [it, inserted] = lookup_.try_emplace(name, static_cast<Index>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
}

std::optional<Index> NameTable::find(const std::string& name) const {
    auto it = lookup_.find(name);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

namespace {

void build_csr(std::size_t rows, const std::vector<Edge>& edges, bool by_user,
               std::vector<std::uint32_t>& offsets, std::vector<Incidence>& adj) {
    offsets.assign(rows + 1, 0);
    for (const auto& e : edges) ++offsets[(by_user ? e.user : e.target) + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    adj.assign(edges.size(), Incidence{});
    std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (EdgeId id = 0; id < edges.size(); ++id) {
        const auto& e = edges[id];
        Index row = by_user ? e.user : e.target;
        adj[cursor[row]++] = Incidence{by_user ? e.target : e.user, id};
    }
    for (std::size_t r = 0; r < rows; ++r) {
        std::sort(adj.begin() + offsets[r], adj.begin() + offsets[r + 1],
                  [](const Incidence& a, const Incidence& b) { return a.other < b.other; });
    }
}

}  // namespace

SignedNetwork::SignedNetwork(NameTable users, NameTable targets, std::vector<Edge> edges)
    : users_(std::move(users)), targets_(std::move(targets)), edges_(std::move(edges)) {
    for (const auto& e : edges_) {
        if (e.user >= users_.size() || e.target >= targets_.size()) {
            throw Error(ErrorKind::Range, "edge references an entity outside the id space");
        }
    }
    build_csr(users_.size(), edges_, true, user_offsets_, user_adj_);
    build_csr(targets_.size(), edges_, false, target_offsets_, target_adj_);
    for (std::size_t u = 0; u < users_.size(); ++u) {
        for (auto i = user_offsets_[u] + 1; i < user_offsets_[u + 1]; ++i) {
            if (user_adj_[i].other == user_adj_[i - 1].other) {
                throw Error(ErrorKind::DuplicateEdge,
                            "duplicate edge " + users_.name(static_cast<Index>(u)) + " -> " +
                                targets_.name(user_adj_[i].other));
            }
        }
    }
}

std::span<const Incidence> SignedNetwork::user_adjacency(Index user) const {
    return {user_adj_.data() + user_offsets_[user], user_offsets_[user + 1] - user_offsets_[user]};
}

std::span<const Incidence> SignedNetwork::target_adjacency(Index target) const {
    return {target_adj_.data() + target_offsets_[target],
            target_offsets_[target + 1] - target_offsets_[target]};
}

std::optional<EdgeId> SignedNetwork::find_edge(Index user, Index target) const {
    auto row = user_adjacency(user);
    auto it = std::lower_bound(row.begin(), row.end(), target,
                               [](const Incidence& a, Index t) { return a.other < t; });
    if (it == row.end() || it->other != target) return std::nullopt;
    return it->edge;
}

std::size_t SignedNetwork::count_label(EdgeLabel label) const {
    return static_cast<std::size_t>(std::count_if(
        edges_.begin(), edges_.end(), [label](const Edge& e) { return e.label == label; }));
}

TrainTestSplit::TrainTestSplit(std::vector<EdgeRole> roles, std::uint64_t seed)
    : roles_(std::move(roles)), seed_(seed) {
    for (EdgeId id = 0; id < roles_.size(); ++id) {
        switch (roles_[id]) {
            case EdgeRole::TrainSpam: train_spam_.push_back(id); break;
            case EdgeRole::TrainNormal: train_normal_.push_back(id); break;
            case EdgeRole::HeldOut: held_out_.push_back(id); break;
        }
    }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool skip_line(const std::string& line) {
    return line.find_first_not_of(" \t") == std::string::npos || line.front() == '#';
}

std::optional<EdgeLabel> parse_label(const std::string& token, std::size_t line_no) {
    if (token == "normal") return EdgeLabel::Normal;
    if (token == "spam") return EdgeLabel::Spam;
    if (token == "unknown") return std::nullopt;
    throw Error(ErrorKind::Parse,
                "line " + std::to_string(line_no) + ": unknown label token '" + token + "'");
}

const char* label_token(const std::optional<EdgeLabel>& label) {
    if (!label) return "unknown";
    return *label == EdgeLabel::Spam ? "spam" : "normal";
}

struct RawRecord {
    std::string user, target;
    std::optional<EdgeLabel> label;
    std::optional<bool> train;
};

std::vector<RawRecord> read_records(std::istream& in, std::size_t fields_expected) {
    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (skip_line(line)) continue;
        auto fields = split_tabs(line);
        if (fields.size() != fields_expected) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(fields_expected) + " fields, got " +
                                              std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty()) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty entity token");
        }
        RawRecord rec{fields[0], fields[1], parse_label(fields[2], line_no), std::nullopt};
        if (fields_expected == 4) {
            if (fields[3] == "train") {
                rec.train = true;
            } else if (fields[3] == "test") {
                rec.train = false;
            } else {
                throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                                  ": split field must be train or test");
            }
            if (*rec.train && !rec.label) {
                throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                                  ": unknown-label edge cannot be in train");
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

SignedNetwork network_from_records(const std::vector<RawRecord>& records) {
    NameTable users, targets;
    std::vector<Edge> edges;
    edges.reserve(records.size());
    for (const auto& r : records) {
        edges.push_back(Edge{users.intern(r.user), targets.intern(r.target), r.label});
    }
    return SignedNetwork(std::move(users), std::move(targets), std::move(edges));
}

}  // namespace

SignedNetwork parse_edge_list(std::istream& in) { return network_from_records(read_records(in, 3)); }

void write_edge_list(std::ostream& out, const SignedNetwork& network) {
    for (const auto& e : network.edges()) {
        out << network.users().name(e.user) << '\t' << network.targets().name(e.target) << '\t'
            << label_token(e.label) << '\n';
    }
}

NetworkWithSplit parse_split_file(std::istream& in) {
    auto records = read_records(in, 4);
    auto network = network_from_records(records);
    std::vector<EdgeRole> roles(records.size(), EdgeRole::HeldOut);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (*records[i].train) {
            roles[i] = *records[i].label == EdgeLabel::Spam ? EdgeRole::TrainSpam : EdgeRole::TrainNormal;
        }
    }
    return {std::move(network), TrainTestSplit(std::move(roles), 0)};
}

void write_split_file(std::ostream& out, const SignedNetwork& network, const TrainTestSplit& split) {
    for (EdgeId id = 0; id < network.num_edges(); ++id) {
        const auto& e = network.edge(id);
        out << network.users().name(e.user) << '\t' << network.targets().name(e.target) << '\t'
            << label_token(e.label) << '\t'
            << (split.role(id) == EdgeRole::HeldOut ? "test" : "train") << '\n';
    }
}

TrainTestSplit read_split_for(std::istream& in, const SignedNetwork& network) {
    auto records = read_records(in, 4);
    std::vector<EdgeRole> roles(network.num_edges(), EdgeRole::HeldOut);
    std::vector<bool> seen(network.num_edges(), false);
    for (const auto& r : records) {
        auto u = network.users().find(r.user);
        auto t = network.targets().find(r.target);
        auto id = (u && t) ? network.find_edge(*u, *t) : std::nullopt;
        if (!id) throw Error(ErrorKind::Parse, "split file edge " + r.user + " -> " + r.target + " not in network");
        if (network.edge(*id).label != r.label) {
            throw Error(ErrorKind::Parse, "split file label mismatch for " + r.user + " -> " + r.target);
        }
        if (seen[*id]) throw Error(ErrorKind::DuplicateEdge, "duplicate edge in split file");
        seen[*id] = true;
        if (*r.train) roles[*id] = *r.label == EdgeLabel::Spam ? EdgeRole::TrainSpam : EdgeRole::TrainNormal;
    }
    return TrainTestSplit(std::move(roles), 0);
}

std::size_t fraction_ceil(double fraction, std::size_t count) {
    double x = fraction * static_cast<double>(count);
    double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(x));
}

std::size_t fraction_floor(double fraction, std::size_t count) {
    double x = fraction * static_cast<double>(count);
    double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::floor(x));
}

TrainTestSplit make_split(const SignedNetwork& network, double label_fraction, bool balance,
                          std::uint64_t seed) {
    if (!(label_fraction > 0.0 && label_fraction <= 1.0)) {
        throw Error(ErrorKind::Range, "label_fraction must be in (0, 1]");
    }
    std::vector<EdgeId> spam, normal;
    for (EdgeId id = 0; id < network.num_edges(); ++id) {
        const auto& label = network.edge(id).label;
        if (label == EdgeLabel::Spam) spam.push_back(id);
        if (label == EdgeLabel::Normal) normal.push_back(id);
    }
    if (spam.empty() || normal.empty()) {
        throw Error(ErrorKind::Range, "split needs at least one spam and one normal edge");
    }
    Rng rng(seed);
    std::shuffle(spam.begin(), spam.end(), rng);
    std::shuffle(normal.begin(), normal.end(), rng);

    std::size_t n_spam = fraction_ceil(label_fraction, spam.size());
    std::size_t n_normal = balance ? n_spam : fraction_ceil(label_fraction, normal.size());
    if (n_normal > normal.size()) {
        throw Error(ErrorKind::InsufficientNormal,
                    "balanced split needs " + std::to_string(n_normal) + " normal edges, only " +
                        std::to_string(normal.size()) + " exist");
    }
    std::vector<EdgeRole> roles(network.num_edges(), EdgeRole::HeldOut);
    for (std::size_t i = 0; i < n_spam; ++i) roles[spam[i]] = EdgeRole::TrainSpam;
    for (std::size_t i = 0; i < n_normal; ++i) roles[normal[i]] = EdgeRole::TrainNormal;
    return TrainTestSplit(std::move(roles), seed);
}

std::size_t spam_evidence_count(const SignedNetwork& network, const TrainTestSplit& split,
                                Index target, EdgeLabel level) {
    const EdgeRole wanted = level == EdgeLabel::Spam ? EdgeRole::TrainSpam : EdgeRole::TrainNormal;
    std::size_t count = 0;
    for (const auto& inc : network.target_adjacency(target)) {
        if (split.role(inc.edge) == wanted) ++count;
    }
    return count;
}

SignedNetwork drop_edges(const SignedNetwork& network, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw Error(ErrorKind::Range, "drop fraction must be in [0, 1)");
    std::size_t n_drop = fraction_floor(fraction, network.num_edges());
    std::vector<EdgeId> order(network.num_edges());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> dropped(network.num_edges(), false);
    for (std::size_t i = 0; i < n_drop; ++i) dropped[order[i]] = true;

    std::vector<Edge> kept;
    kept.reserve(network.num_edges() - n_drop);
    for (EdgeId id = 0; id < network.num_edges(); ++id) {
        if (!dropped[id]) kept.push_back(network.edge(id));
    }
    return SignedNetwork(network.users(), network.targets(), std::move(kept));
}

}  // namespace lfm
