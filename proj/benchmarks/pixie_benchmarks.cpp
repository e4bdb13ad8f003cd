#include <random>

#include <benchmark/benchmark.h>

#include "pixie/belief_propagation.hpp"
#include "pixie/cardinality.hpp"
#include "pixie/encoder.hpp"
#include "pixie/trainer.hpp"

using namespace pixie;

namespace {

Eigen::VectorXd random_theta(std::size_t d, std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd theta(static_cast<Eigen::Index>(d));
    for (auto& x : theta)
        x = n(rng);
    return theta;
}

Vocabulary svo_vocabulary(std::size_t predicates)
{
    Vocabulary v;
    for (std::size_t i = 0; i < predicates; ++i)
        v.add_predicate("p" + std::to_string(i), 1 + i % 7);
    v.add_label("ARG1");
    v.add_label("ARG2");
    return v;
}

std::vector<DependencyGraph> svo_corpus(std::size_t count, std::size_t predicates,
                                        std::mt19937_64& rng)
{
    std::uniform_int_distribution<PredicateId> pick(0, static_cast<PredicateId>(predicates - 1));
    std::vector<DependencyGraph> graphs;
    for (std::size_t i = 0; i < count; ++i)
        graphs.push_back({{pick(rng), pick(rng), pick(rng)}, {{1, 0, 0}, {1, 1, 2}}});
    return graphs;
}

void BM_CardinalityMarginals(benchmark::State& state)
{
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto c = static_cast<std::size_t>(state.range(1));
    std::mt19937_64 rng(1);
    const auto theta = random_theta(d, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(cardinality_marginals(theta, c));
}
BENCHMARK(BM_CardinalityMarginals)->Args({8, 3})->Args({50, 5})->Args({200, 20});

void BM_BpRefine(benchmark::State& state)
{
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto c = d / 10 + 1;
    std::mt19937_64 rng(2);
    auto wm = WorldModel::zeros(d, c, 2);
    std::normal_distribution<double> n(0.0, 0.1);
    for (auto& w : wm.weights)
        for (auto& x : w.reshaped())
            x = n(rng);
    const GraphTopology svo{3, {{1, 0, 0}, {1, 1, 2}}};
    const auto mf = MeanFieldSituation::uniform(3, d, static_cast<double>(c) / static_cast<double>(d));
    for (auto _ : state)
        benchmark::DoNotOptimize(bp_refine(mf, svo, wm));
}
BENCHMARK(BM_BpRefine)->Arg(8)->Arg(50)->Arg(200);

void BM_Encode(benchmark::State& state)
{
    const auto d = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    const auto params = EncoderParams::random(100, 2, d, d, d, 0.1, rng);
    const DependencyGraph g{{0u, 1u, 2u}, {{1, 0, 0}, {1, 1, 2}}};
    for (auto _ : state)
        benchmark::DoNotOptimize(encode(g, params, d / 10 + 1));
}
BENCHMARK(BM_Encode)->Arg(8)->Arg(50)->Arg(200);

void BM_TrainEpoch(benchmark::State& state)
{
    const auto d = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(4);
    const auto graphs = svo_corpus(64, 50, rng);
    ModelShape shape;
    shape.dim = d;
    shape.cardinality = d / 10 + 1;
    const auto initial = initialise_model(svo_vocabulary(50), shape, {}, rng);
    TrainConfig cfg;
    cfg.batch_size = 16;
    for (auto _ : state) {
        state.PauseTiming();
        auto model = initial;
        OptimiserStates states;
        auto r = epoch_rng(0, 0);
        state.ResumeTiming();
        benchmark::DoNotOptimize(train_epoch(graphs, model, states, cfg, r));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(graphs.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(8)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
