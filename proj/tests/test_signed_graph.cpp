#include <set>
#include <sstream>

#include "doctest.h"
#include "lfm/error.hpp"
#include "lfm/signed_graph.hpp"
#include "oracles.hpp"

using namespace lfm;

namespace {

SignedNetwork parse(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

ErrorKind parse_error_kind(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

/// `spam` spam edges then `normal` normal edges, each on its own user/target.
SignedNetwork labelled_network(std::size_t spam, std::size_t normal) {
    NameTable u, t;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < spam + normal; ++i) {
        const Index a = u.intern("u" + std::to_string(i));
        const Index b = t.intern("t" + std::to_string(i % 7));
        edges.push_back({a, b, i < spam ? EdgeLabel::Spam : EdgeLabel::Normal});
    }
    return SignedNetwork(std::move(u), std::move(t), std::move(edges));
}

void check_partition(const SignedNetwork& net, const TrainTestSplit& split) {
    std::multiset<EdgeId> seen;
    for (EdgeId id : split.train_spam()) {
        CHECK(net.edge(id).label == EdgeLabel::Spam);
        seen.insert(id);
    }
    for (EdgeId id : split.train_normal()) {
        CHECK(net.edge(id).label == EdgeLabel::Normal);
        seen.insert(id);
    }
    for (EdgeId id : split.held_out()) seen.insert(id);
    REQUIRE(seen.size() == net.num_edges());
    EdgeId expected = 0;
    for (EdgeId id : seen) CHECK(id == expected++);
}

}  // namespace

TEST_SUITE("signed-graph") {

TEST_CASE("parse assigns ids in first-appearance order") {
    const auto net = parse("a\tX\tspam\nb\tX\tnormal");
    CHECK(net.num_users() == 2);
    CHECK(net.num_targets() == 1);
    REQUIRE(net.num_edges() == 2);
    CHECK(net.edge(0).label == EdgeLabel::Spam);
    CHECK(net.edge(1).label == EdgeLabel::Normal);
    CHECK(net.users().name(1) == "b");
    CHECK(net.users().find("a") == Index{0});
    CHECK_FALSE(net.users().find("c").has_value());
}

TEST_CASE("empty stream gives an empty network") {
    const auto net = parse("");
    CHECK(net.num_users() == 0);
    CHECK(net.num_targets() == 0);
    CHECK(net.num_edges() == 0);
}

TEST_CASE("comments, blank lines, CRLF and unknown labels") {
    const auto net = parse("# header\n\na\tX\tunknown\r\n  \nb\tY\tspam\n");
    REQUIRE(net.num_edges() == 2);
    CHECK_FALSE(net.edge(0).label.has_value());
    CHECK(net.edge(1).label == EdgeLabel::Spam);
}

TEST_CASE("malformed input is rejected with a line number") {
    CHECK(parse_error_kind("a\tX\tspam\na\tX\tspam") == ErrorKind::DuplicateEdge);
    CHECK(parse_error_kind("a\tX") == ErrorKind::Parse);
    CHECK(parse_error_kind("a\tX\tspam\textra") == ErrorKind::Parse);
    CHECK(parse_error_kind("a\tX\tSPAM") == ErrorKind::Parse);
    try {
        parse("a\tX\tspam\n# c\nb\tY\tweird\n");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("edge list round-trips through write/parse") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const auto net = oracle::random_network(rng, 6, 5, 0.5, 0.3);
        std::ostringstream out;
        write_edge_list(out, net);
        const auto back = parse(out.str());
        REQUIRE(back.num_edges() == net.num_edges());
        for (EdgeId id = 0; id < net.num_edges(); ++id) {
            CHECK(back.users().name(back.edge(id).user) == net.users().name(net.edge(id).user));
            CHECK(back.targets().name(back.edge(id).target) == net.targets().name(net.edge(id).target));
            CHECK(back.edge(id).label == net.edge(id).label);
        }
    }
}

TEST_CASE("adjacency views enumerate exactly the edge list") {
    Rng rng(11);
    for (int i = 0; i < 30; ++i) {
        const auto net = oracle::random_network(rng, 1 + rng() % 9, 1 + rng() % 9, 0.4);
        std::multiset<std::pair<Index, Index>> from_edges, from_users, from_targets;
        for (const auto& e : net.edges()) from_edges.insert({e.user, e.target});
        for (Index u = 0; u < net.num_users(); ++u) {
            Index prev = 0;
            bool first = true;
            for (const auto& inc : net.user_adjacency(u)) {
                CHECK(net.edge(inc.edge).user == u);
                CHECK(net.edge(inc.edge).target == inc.other);
                if (!first) CHECK(inc.other > prev);
                prev = inc.other;
                first = false;
                from_users.insert({u, inc.other});
            }
        }
        for (Index t = 0; t < net.num_targets(); ++t) {
            for (const auto& inc : net.target_adjacency(t)) {
                CHECK(net.edge(inc.edge).target == t);
                from_targets.insert({inc.other, t});
            }
        }
        CHECK(from_users == from_edges);
        CHECK(from_targets == from_edges);
        for (const auto& e : net.edges()) CHECK(net.find_edge(e.user, e.target).has_value());
    }
}

TEST_CASE("constructor rejects out-of-range ids and duplicates") {
    NameTable u, t;
    u.intern("a");
    t.intern("x");
    CHECK_THROWS_AS(SignedNetwork(u, t, {{0, 1, EdgeLabel::Spam}}), Error);
    CHECK_THROWS_AS(SignedNetwork(u, t, {{0, 0, EdgeLabel::Spam}, {0, 0, EdgeLabel::Normal}}), Error);
}

TEST_CASE("balanced split sizes") {
    const auto net = labelled_network(10, 10);
    const auto split = make_split(net, 0.5, true, 3);
    CHECK(split.train_spam().size() == 5);
    CHECK(split.train_normal().size() == 5);
    CHECK(split.held_out().size() == 10);
    check_partition(net, split);
}

TEST_CASE("full fraction with equal classes leaves nothing held out") {
    const auto net = labelled_network(6, 6);
    CHECK(make_split(net, 1.0, true, 9).held_out().empty());
}

TEST_CASE("split is deterministic in the seed") {
    const auto net = labelled_network(40, 60);
    CHECK(make_split(net, 0.3, true, 17) == make_split(net, 0.3, true, 17));
    CHECK_FALSE(make_split(net, 0.3, true, 17) == make_split(net, 0.3, true, 18));
}

TEST_CASE("unbalanced split takes the same fraction of normals") {
    const auto net = labelled_network(10, 30);
    const auto split = make_split(net, 0.2, false, 1);
    CHECK(split.train_spam().size() == 2);
    CHECK(split.train_normal().size() == 6);
}

TEST_CASE("split property: partition and label purity over random networks") {
    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        const auto net = oracle::random_network(rng, 8, 8, 0.5, 0.2);
        if (net.count_label(EdgeLabel::Spam) == 0 || net.count_label(EdgeLabel::Normal) == 0) continue;
        const double fraction = 0.1 + 0.1 * static_cast<double>(rng() % 9);
        const bool balance = rng() % 2;
        try {
            const auto split = make_split(net, fraction, balance, rng());
            check_partition(net, split);
            CHECK(split.train_spam().size() == fraction_ceil(fraction, net.count_label(EdgeLabel::Spam)));
            if (balance) CHECK(split.train_normal().size() == split.train_spam().size());
            for (EdgeId id = 0; id < net.num_edges(); ++id) {
                if (!net.edge(id).label) CHECK(split.role(id) == EdgeRole::HeldOut);
            }
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InsufficientNormal);
            CHECK(balance);
        }
    }
}

TEST_CASE("split preconditions") {
    CHECK_THROWS_AS(make_split(labelled_network(5, 5), 0.0, true, 1), Error);
    CHECK_THROWS_AS(make_split(labelled_network(5, 0), 0.5, true, 1), Error);
    try {
        make_split(labelled_network(10, 2), 0.5, true, 1);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientNormal);
    }
}

TEST_CASE("fraction helpers ignore fuzz at integer boundaries") {
    CHECK(fraction_ceil(0.3, 10) == 3);
    CHECK(fraction_ceil(0.1 * 3, 10) == 3);
    CHECK(fraction_ceil(0.31, 10) == 4);
    CHECK(fraction_floor(0.07, 100) == 7);
    CHECK(fraction_floor(0.1, 100) == 10);
}

TEST_CASE("evidence counts on the worked example") {
    const auto ex = oracle::worked_example();
    CHECK(spam_evidence_count(ex.network, ex.split, 0, EdgeLabel::Spam) == 2);
    CHECK(spam_evidence_count(ex.network, ex.split, 2, EdgeLabel::Spam) == 1);
    CHECK(spam_evidence_count(ex.network, ex.split, 1, EdgeLabel::Spam) == 0);
    CHECK(spam_evidence_count(ex.network, ex.split, 1, EdgeLabel::Normal) == 1);
}

TEST_CASE("split file round trip and rebinding") {
    Rng rng(2);
    const auto net = oracle::random_network(rng, 6, 6, 0.6, 0.2);
    const auto split = oracle::random_split(net, rng);
    std::ostringstream out;
    write_split_file(out, net, split);
    std::istringstream in(out.str());
    const auto back = parse_split_file(in);
    CHECK(back.network.num_edges() == net.num_edges());
    std::istringstream again(out.str());
    CHECK(read_split_for(again, net) == split);
}

TEST_CASE("drop_edges") {
    const auto net = labelled_network(50, 50);
    const auto same = drop_edges(net, 0.0, 4);
    CHECK(same.num_edges() == net.num_edges());
    for (EdgeId id = 0; id < net.num_edges(); ++id) {
        CHECK(same.edge(id).user == net.edge(id).user);
        CHECK(same.edge(id).target == net.edge(id).target);
    }
    const auto reduced = drop_edges(net, 0.1, 4);
    CHECK(reduced.num_edges() == 90);
    CHECK(reduced.num_users() == net.num_users());
    CHECK(reduced.num_targets() == net.num_targets());
    const auto again = drop_edges(net, 0.1, 4);
    for (EdgeId id = 0; id < reduced.num_edges(); ++id) {
        CHECK(again.edge(id).user == reduced.edge(id).user);
        CHECK(again.edge(id).target == reduced.edge(id).target);
        CHECK(net.find_edge(reduced.edge(id).user, reduced.edge(id).target).has_value());
    }
    CHECK_THROWS_AS(drop_edges(net, 1.0, 4), Error);
}

}
