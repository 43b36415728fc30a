#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "lfm/error.hpp"
#include "lfm/mrle.hpp"
#include "lfm/synth.hpp"
#include "oracles.hpp"

using namespace lfm;

namespace {

/// -log of the three likelihood factors, evaluated straight from the scores.
double brute_force_objective(const FactorModel& m, std::span<const Relation> relations) {
    double total = 0.0;
    for (const auto& r : relations) {
        const auto s = edge_scores(m, r.user, r.target);
        switch (r.kind) {
            case RelationKind::Nor: total -= std::log(s.f_pos) + std::log(1.0 - s.f_neg); break;
            case RelationKind::Sp: total -= std::log(1.0 - s.f_pos) + std::log(s.f_neg); break;
            case RelationKind::Non: total -= std::log(1.0 - s.f_pos) + std::log(1.0 - s.f_neg); break;
        }
    }
    return total;
}

FactorModel zero_model(std::size_t users, std::size_t targets, std::size_t d, double p0) {
    FactorModel m;
    m.w_pos = Matrix(users, d);
    m.w_neg = Matrix(users, d);
    m.h_pos = Matrix(targets, d);
    m.h_neg = Matrix(targets, d);
    m.p0 = p0;
    return m;
}

}  // namespace

TEST_SUITE("mrle") {

TEST_CASE("objective on hand-sized cases") {
    const auto m = zero_model(1, 1, 2, 0.5);
    const std::vector<Relation> one{{0, 0, RelationKind::Nor}};
    CHECK(mrle_objective(m, RelationSets(1, 1, one)) == doctest::Approx(std::log(4.0)));
    CHECK(mrle_objective(m, RelationSets(1, 1, {})) == 0.0);
}

TEST_CASE("objective matches a per-relation oracle") {
    Rng rng(4);
    for (int i = 0; i < 10; ++i) {
        const auto net = oracle::random_network(rng, 6, 6, 0.6);
        const auto split = oracle::random_split(net, rng);
        const auto rel = build_relations(net, split, sample_non_pairs(net, 3, rng));
        const auto m = init_model(6, 6, 4, 4, 0.05, 1.5, rng());
        const double expected = brute_force_objective(m, rel.all());
        CHECK(mrle_objective(m, rel) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(mrle_objective(m, rel) >= 0.0);
    }
}

TEST_CASE("relation sets hold training edges and both index views") {
    Rng rng(6);
    const auto net = oracle::random_network(rng, 7, 7, 0.5, 0.3);
    const auto split = oracle::random_split(net, rng);
    const auto rel = build_relations(net, split, {});
    CHECK(rel.count(RelationKind::Sp) == split.train_spam().size());
    CHECK(rel.count(RelationKind::Nor) == split.train_normal().size());
    CHECK(rel.count(RelationKind::Non) == 0);
    std::size_t by_user = 0, by_target = 0;
    for (Index u = 0; u < net.num_users(); ++u) {
        for (auto i : rel.of_user(u)) CHECK(rel.all()[i].user == u);
        by_user += rel.of_user(u).size();
    }
    for (Index t = 0; t < net.num_targets(); ++t) {
        for (auto i : rel.of_target(t)) CHECK(rel.all()[i].target == t);
        by_target += rel.of_target(t).size();
    }
    CHECK(by_user == rel.all().size());
    CHECK(by_target == rel.all().size());
}

TEST_CASE("gradients on hand-sized cases") {
    FactorModel m = zero_model(2, 2, 2, 0.5);
    m.h_pos.row(0)[0] = 2.0;
    m.h_neg.row(0)[1] = -4.0;
    m.w_neg.row(1)[0] = 6.0;
    // W[u] stays zero so F = p0 = 0.5 regardless of H.
    const RelationSets nor(2, 2, {{0, 0, RelationKind::Nor}});
    const auto g = mrle_user_gradient(m, 0, nor);
    CHECK(g.pos == std::vector<double>{-1.0, 0.0});
    CHECK(g.neg == std::vector<double>{0.0, -2.0});

    const auto idle = mrle_user_gradient(m, 1, nor);
    CHECK(idle.pos == std::vector<double>{0.0, 0.0});
    CHECK(idle.neg == std::vector<double>{0.0, 0.0});
    const auto idle_t = mrle_target_gradient(m, 1, nor);
    CHECK(idle_t.neg == std::vector<double>{0.0, 0.0});

    FactorModel z = zero_model(2, 2, 2, 0.5);
    z.w_neg.row(1)[0] = 6.0;
    const RelationSets sp(2, 2, {{1, 1, RelationKind::Sp}});
    CHECK(mrle_target_gradient(z, 1, sp).neg == std::vector<double>{-3.0, 0.0});
}

TEST_CASE("gradients match central differences") {
    Rng rng(8);
    for (int i = 0; i < 15; ++i) {
        const auto net = oracle::random_network(rng, 5, 5, 0.5);
        const auto split = oracle::random_split(net, rng);
        const auto rel = build_relations(net, split, sample_non_pairs(net, 2, rng));
        FactorModel m = init_model(5, 5, 3, 2, 0.1, 1.0, rng());
        auto objective = [&] { return mrle_objective(m, rel); };
        for (Index u = 0; u < 5; ++u) {
            const auto g = mrle_user_gradient(m, u, rel);
            for (std::size_t k = 0; k < 3; ++k) {
                CHECK(oracle::close(g.pos[k], oracle::central_difference(objective, m.w_pos.row(u)[k], 1e-5), 1e-5,
                                    1e-8));
            }
            for (std::size_t k = 0; k < 2; ++k) {
                CHECK(oracle::close(g.neg[k], oracle::central_difference(objective, m.w_neg.row(u)[k], 1e-5), 1e-5,
                                    1e-8));
            }
        }
        for (Index t = 0; t < 5; ++t) {
            const auto g = mrle_target_gradient(m, t, rel);
            for (std::size_t k = 0; k < 3; ++k) {
                CHECK(oracle::close(g.pos[k], oracle::central_difference(objective, m.h_pos.row(t)[k], 1e-5), 1e-5,
                                    1e-8));
            }
        }
    }
}

TEST_CASE("non sampling never touches an existing edge") {
    Rng rng(13);
    for (int i = 0; i < 40; ++i) {
        const auto net = oracle::random_network(rng, 6, 8, 0.5, 0.3);
        const std::size_t n = rng() % 6;
        for (Index u = 0; u < net.num_users(); ++u) {
            const auto ts = sample_non_targets(net, u, n, rng);
            const std::size_t eligible = net.num_targets() - net.user_adjacency(u).size();
            CHECK(ts.size() == std::min(n, eligible));
            CHECK(std::set<Index>(ts.begin(), ts.end()).size() == ts.size());
            for (Index t : ts) CHECK_FALSE(net.find_edge(u, t).has_value());
        }
        for (Index t = 0; t < net.num_targets(); ++t) {
            for (Index u : sample_non_users(net, t, n, rng)) CHECK_FALSE(net.find_edge(u, t).has_value());
        }
        for (const auto& p : sample_non_pairs(net, n, rng)) CHECK_FALSE(net.find_edge(p.user, p.target).has_value());
    }
}

TEST_CASE("non sampling edge cases") {
    NameTable u, t;
    u.intern("a");
    for (const char* n : {"x", "y", "z"}) t.intern(n);
    const SignedNetwork full(u, t, {{0, 0, EdgeLabel::Spam}, {0, 1, EdgeLabel::Normal}, {0, 2, std::nullopt}});
    Rng rng(1);
    CHECK(sample_non_targets(full, 0, 5, rng).empty());
    CHECK(sample_non_targets(full, 0, 0, rng).empty());
}

TEST_CASE("non sampling is uniform over eligible pairs") {
    NameTable u, t;
    u.intern("a");
    for (const char* n : {"t0", "t1", "t2", "t3", "t4"}) t.intern(n);
    const SignedNetwork net(u, t, {{0, 1, EdgeLabel::Spam}, {0, 3, EdgeLabel::Normal}});
    Rng rng(99);
    std::map<std::pair<Index, Index>, int> freq;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        auto s = sample_non_targets(net, 0, 2, rng);
        REQUIRE(s.size() == 2);
        std::sort(s.begin(), s.end());
        ++freq[{s[0], s[1]}];
    }
    // Eligible {0, 2, 4}: three unordered pairs, each with probability 1/3.
    REQUIRE(freq.size() == 3);
    const double p = 1.0 / 3.0, mean = draws * p, sigma = std::sqrt(draws * p * (1 - p));
    for (const auto& [pair, count] : freq) CHECK(std::abs(count - mean) <= 3 * sigma);
}

TEST_CASE("training separates a spam edge from a normal edge") {
    NameTable u, t;
    u.intern("a");
    u.intern("b");
    t.intern("x");
    t.intern("y");
    const SignedNetwork net(u, t, {{0, 0, EdgeLabel::Spam}, {1, 1, EdgeLabel::Normal}});
    const TrainTestSplit split({EdgeRole::TrainSpam, EdgeRole::TrainNormal}, 0);
    MrleConfig cfg;
    cfg.epochs = 200;
    cfg.d_pos = cfg.d_neg = 4;
    cfg.learning_rate = 0.05;
    const auto m = train_mrle(cfg, net, split);
    CHECK(edge_scores(m, 0, 0).f_neg > edge_scores(m, 1, 1).f_neg);
    CHECK(edge_scores(m, 1, 1).f_pos > edge_scores(m, 0, 0).f_pos);
}

TEST_CASE("training lowers the loss and reports every epoch") {
    SynthParams sp;
    sp.num_benign_users = 30;
    sp.num_spammers = 6;
    sp.num_legit_targets = 25;
    sp.num_malicious_targets = 6;
    sp.edges_per_user = 5;
    const auto synth = generate(sp);
    const auto split = make_split(synth.network, 0.5, true, 3);
    MrleConfig cfg;
    cfg.epochs = 30;
    cfg.d_pos = cfg.d_neg = 8;
    std::vector<double> losses;
    train_mrle(cfg, synth.network, split, [&](std::size_t epoch, double loss, auto) {
        CHECK(epoch == losses.size());
        losses.push_back(loss);
    });
    REQUIRE(losses.size() == 31);
    CHECK(losses.back() < losses.front());
}

TEST_CASE("zero learning rate and determinism") {
    Rng rng(2);
    const auto net = oracle::random_network(rng, 6, 6, 0.5);
    const auto split = oracle::random_split(net, rng);
    MrleConfig cfg;
    cfg.d_pos = cfg.d_neg = 3;
    cfg.epochs = 5;
    cfg.learning_rate = 0.0;
    cfg.seed = 77;
    const auto m = train_mrle(cfg, net, split);
    CHECK(m == init_model(6, 6, 3, 3, cfg.p0, cfg.init_scale, derive_seed(77, "mrle-init")));
    cfg.learning_rate = 0.01;
    CHECK(train_mrle(cfg, net, split) == train_mrle(cfg, net, split));
}

TEST_CASE("use_non off ignores every non relation") {
    Rng rng(3);
    const auto net = oracle::random_network(rng, 6, 6, 0.4);
    const auto split = oracle::random_split(net, rng);
    MrleConfig cfg;
    cfg.d_pos = cfg.d_neg = 3;
    cfg.epochs = 10;
    cfg.use_non = false;
    cfg.n = 50;
    const auto off = train_mrle(cfg, net, split);
    cfg.n = 0;
    cfg.use_non = true;
    CHECK(train_mrle(cfg, net, split) == off);
}

TEST_CASE("divergence is reported") {
    Rng rng(3);
    const auto net = oracle::random_network(rng, 6, 6, 0.6);
    const auto split = oracle::random_split(net, rng, 1.0);
    MrleConfig cfg;
    cfg.d_pos = cfg.d_neg = 3;
    cfg.epochs = 50;
    cfg.learning_rate = 1e200;
    try {
        train_mrle(cfg, net, split);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergence);
    }
}

TEST_CASE("auxiliary augmentation") {
    Rng rng(5);
    const auto net = oracle::random_network(rng, 7, 7, 0.6, 0.2);
    const auto split = oracle::random_split(net, rng, 0.4);
    const auto& held = split.held_out();
    REQUIRE(held.size() >= 3);
    CHECK(augment_with_auxiliary(split, held, 0) == split);
    const auto all = augment_with_auxiliary(split, held, held.size());
    CHECK(all.held_out().empty());

    const std::vector<EdgeId> top(held.rbegin(), held.rbegin() + 3);
    const auto aug = augment_with_auxiliary(split, top, 3);
    std::set<EdgeId> moved;
    for (EdgeId id = 0; id < net.num_edges(); ++id) {
        if (split.role(id) != aug.role(id)) {
            CHECK(split.role(id) == EdgeRole::HeldOut);
            CHECK(aug.role(id) == EdgeRole::TrainSpam);
            moved.insert(id);
        }
    }
    CHECK(moved == std::set<EdgeId>(top.begin(), top.end()));
    CHECK(aug.held_out().size() + aug.train_spam().size() + aug.train_normal().size() == net.num_edges());
    CHECK_THROWS_AS(augment_with_auxiliary(split, held, held.size() + 1), Error);
    if (!split.train_spam().empty()) CHECK_THROWS_AS(augment_with_auxiliary(split, split.train_spam(), 1), Error);
}

}
