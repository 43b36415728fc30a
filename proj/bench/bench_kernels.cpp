#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lfm/kernels.hpp"
#include "lfm/random.hpp"

using namespace lfm;

namespace {

constexpr std::size_t kUsers = 2000, kTargets = 1500;

const FactorModel& model() {
    static const FactorModel m = init_model(kUsers, kTargets, 30, 30, 0.01, 0.1, 7);
    return m;
}

std::vector<UserTarget> pairs(std::size_t n) {
    Rng rng(11);
    std::vector<UserTarget> out(n);
    for (auto& p : out) p = {static_cast<Index>(rng() % kUsers), static_cast<Index>(rng() % kTargets)};
    return out;
}

std::vector<Relation> relations(std::size_t n) {
    const RelationKind kinds[] = {RelationKind::Nor, RelationKind::Sp, RelationKind::Non};
    std::vector<Relation> out;
    std::size_t i = 0;
    for (const auto& p : pairs(n)) out.push_back({p.user, p.target, kinds[i++ % 3]});
    return out;
}

template <bool Parallel>
void BM_MrleLoss(benchmark::State& state) {
    const auto rel = relations(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Parallel ? kernels::mrle_loss(model(), rel) : kernels::reference::mrle_loss(model(), rel));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_InnerProducts(benchmark::State& state) {
    const auto p = pairs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto s = Parallel ? kernels::inner_products(model(), EdgeLabel::Spam, p)
                          : kernels::reference::inner_products(model(), EdgeLabel::Spam, p);
        benchmark::DoNotOptimize(s.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_OperatorFeatures(benchmark::State& state) {
    const auto p = pairs(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto x = Parallel ? kernels::operator_features(OperatorKind::Con, model(), p)
                          : kernels::reference::operator_features(OperatorKind::Con, model(), p);
        benchmark::DoNotOptimize(x.row(0).data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_LogisticGradient(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix x = kernels::reference::operator_features(OperatorKind::Con, model(), pairs(n));
    std::vector<double> labels(n), w(x.cols(), 0.01);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<double>(i % 2);
    for (auto _ : state) {
        auto g = Parallel ? kernels::logistic_gradient(x, labels, w, 0.0, 1e-4)
                          : kernels::reference::logistic_gradient(x, labels, w, 0.0, 1e-4);
        benchmark::DoNotOptimize(g.loss);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MrleLoss<false>)->Name("mrle_loss/reference")->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_MrleLoss<true>)->Name("mrle_loss/openmp")->Arg(1 << 14)->Arg(1 << 18)->UseRealTime();
BENCHMARK(BM_InnerProducts<false>)->Name("inner_products/reference")->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_InnerProducts<true>)->Name("inner_products/openmp")->Arg(1 << 14)->Arg(1 << 18)->UseRealTime();
BENCHMARK(BM_OperatorFeatures<false>)->Name("operator_features/reference")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_OperatorFeatures<true>)->Name("operator_features/openmp")->Arg(1 << 12)->Arg(1 << 16)->UseRealTime();
BENCHMARK(BM_LogisticGradient<false>)->Name("logistic_gradient/reference")->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_LogisticGradient<true>)->Name("logistic_gradient/openmp")->Arg(1 << 12)->Arg(1 << 15)->UseRealTime();

BENCHMARK_MAIN();
