// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Tolerances are fixed below.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pixie/belief_propagation.hpp"
#include "pixie/cardinality.hpp"
#include "pixie/checkpoint.hpp"
#include "pixie/evaluate.hpp"
#include "pixie/oracle.hpp"
#include "pixie/trainer.hpp"
#include "pixie/verification.hpp"
#include "planted.hpp"

using namespace pixie;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 6)
{
    std::ostringstream s;
    s << std::setprecision(precision) << x;
    return s.str();
}

double sigmoid(double a)
{
    return 1.0 / (1.0 + std::exp(-a));
}

// Subset enumeration of P(unit i on | exactly C on) in long double.
std::vector<long double> enumerate_cardinality(const Eigen::VectorXd& theta, std::size_t c)
{
    const auto d = static_cast<std::size_t>(theta.size());
    std::vector<long double> on(d, 0.0L);
    long double z = 0.0L;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != c)
            continue;
        long double s = 0.0L;
        for (std::size_t i = 0; i < d; ++i)
            if (mask >> i & 1u)
                s += theta[static_cast<Eigen::Index>(i)];
        const long double w = std::exp(s);
        z += w;
        for (std::size_t i = 0; i < d; ++i)
            if (mask >> i & 1u)
                on[i] += w;
    }
    for (auto& x : on)
        x /= z;
    return on;
}

// 1. Gradient fidelity.
Outcome gradient_fidelity()
{
    const auto start = Clock::now();
    GradcheckOptions options;  // 50 instances, step 1e-5, tolerance 1e-4
    const auto report = run_gradcheck(1, options);
    const double secs = seconds_since(start);
    double worst = 0.0;
    for (const auto& c : report.checks)
        worst = std::max(worst, c.worst);
    const bool ok = report.passed() && options.instances == 50 && options.step == 1e-5
                    && options.tolerance == 1e-4 && secs < 60.0;
    return {ok, "worst relative error " + fmt(worst) + " over " + std::to_string(report.checks.size())
                    + " components x 50 instances, " + fmt(secs, 3) + " s"};
}

// 2. Probit approximation.
Outcome probit_approximation()
{
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> dims(1, 12);
    std::normal_distribution<double> weight(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    std::size_t done = 0;
    while (done < 1000) {
        const auto d = dims(rng);
        auto lex = LexicalModel::zeros(1, d);
        Eigen::VectorXd q(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            lex.weights(0, i) = weight(rng);
            q[i] = unit(rng);
        }
        const Eigen::VectorXd v = lex.weights.row(0).transpose();
        if ((v.array().square() * q.array() * (1.0 - q.array())).sum() > 4.0)
            continue;
        worst = std::max(worst, std::abs(expected_truth(q, 0, lex) - exact_expected_truth(q, 0, lex)));
        ++done;
    }

    auto one = LexicalModel::zeros(1, 1);
    one.weights(0, 0) = 2.0;
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(1, 0.5);
    const double approx = expected_truth(half, 0, one);
    const double exact = exact_expected_truth(half, 0, one);
    const bool pins = std::abs(approx - 0.7004) <= 5e-4 && std::abs(exact - 0.6904) <= 5e-5
                      && std::abs(exact - (0.5 * sigmoid(0.0) + 0.5 * sigmoid(2.0))) <= 1e-15;
    return {worst <= 0.05 && pins, "max gap " + fmt(worst) + " over 1000 draws; D=1 approx "
                                       + fmt(approx, 7) + " exact " + fmt(exact, 7)};
}

// 3. Cardinality machinery.
Outcome cardinality_machinery()
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> dims(1, 10);
    std::normal_distribution<double> n(0.0, 2.0);
    double worst = 0.0;
    double worst_sum = 0.0;
    bool flat_exact = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = dims(rng);
        const auto c = std::uniform_int_distribution<std::size_t>(1, d)(rng);
        Eigen::VectorXd theta(static_cast<Eigen::Index>(d));
        for (auto& x : theta)
            x = n(rng);
        const auto m = cardinality_marginals(theta, c);
        const auto ref = enumerate_cardinality(theta, c);
        for (std::size_t i = 0; i < d; ++i)
            worst = std::max(worst, static_cast<double>(std::abs(m[static_cast<Eigen::Index>(i)] - ref[i])));
        worst_sum = std::max(worst_sum, std::abs(m.sum() - static_cast<double>(c)));

        const auto flat = cardinality_marginals(Eigen::VectorXd::Constant(theta.size(), n(rng)), c);
        for (double x : flat)
            flat_exact = flat_exact && x == static_cast<double>(c) / static_cast<double>(d);
    }
    return {worst <= 1e-10 && worst_sum <= 1e-9 && flat_exact,
            "max error " + fmt(worst) + ", max |sum - C| " + fmt(worst_sum)
                + (flat_exact ? ", flat theta gives C/D exactly" : ", flat theta misses C/D")};
}

// 4. Belief propagation against enumeration.
Outcome bp_against_exact()
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const GraphTopology edge{2, {{0, 0, 1}}};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto wm = WorldModel::zeros(3, 1, 1);
        for (auto& x : wm.weights[0].reshaped())
            x = n(rng);
        MeanFieldSituation mf;
        for (int node = 0; node < 2; ++node)
            mf.q.push_back(Eigen::Vector3d(u(rng), u(rng), u(rng)));
        const auto out = bp_refine(mf, edge, wm, {20, 0.0});

        // With C = 1 each pixie is one unit: a 3 x 3 table.
        const auto theta = unary_potentials(mf);
        Eigen::Matrix3d joint;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                joint(i, j) = std::exp(theta[0][i] + theta[1][j] + wm.weights[0](i, j));
        joint /= joint.sum();
        const Eigen::Vector3d a = joint.rowwise().sum();
        const Eigen::Vector3d b = joint.colwise().sum().transpose();
        worst = std::max({worst, (out.q[0] - a).cwiseAbs().maxCoeff(),
                          (out.q[1] - b).cwiseAbs().maxCoeff()});
    }

    double single = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 6;
        const std::size_t c = 2;
        auto wm = WorldModel::zeros(d, c, 1);
        MeanFieldSituation mf;
        Eigen::VectorXd q(static_cast<Eigen::Index>(d));
        for (auto& x : q)
            x = u(rng);
        mf.q.push_back(q);
        const auto out = bp_refine(mf, GraphTopology{1, {}}, wm, {1, 0.5});
        const auto ref = enumerate_cardinality(unary_potentials(mf)[0], c);
        for (std::size_t i = 0; i < d; ++i)
            single = std::max(single, static_cast<double>(std::abs(out.q[0][static_cast<Eigen::Index>(i)] - ref[i])));
    }
    return {worst <= 1e-6 && single <= 1e-6,
            "two-node max error " + fmt(worst) + ", single-node one-pass max error " + fmt(single)};
}

// 5. KL descent with encoder-only updates.
Outcome kl_descent()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(5);
    TinySpec spec;
    spec.min_dim = spec.max_dim = 6;
    spec.cardinality = 2;
    spec.min_vocab = spec.max_vocab = 8;
    spec.max_nodes = 3;
    spec.mask_rate = 0.0;
    TinyInstance inst;
    do
        inst = random_tiny_instance(rng, spec);
    while (inst.graph.node_count() != 3);
    inst.input = inst.graph;
    const ObjectiveWeights weights{1.0, 0.0};
    const auto& m = inst.model;
    const auto kl = [&] {
        return exact_kl(encode(inst.graph, m.encoder, m.cardinality()), inst.graph, m.world, m.lexical);
    };

    AdamState state;
    const double first = kl();
    double previous = first;
    std::size_t non_increasing = 0;
    for (int step = 0; step < 200; ++step) {
        const auto g = grad_encoder(inst.graph, inst.input, m.world, m.lexical, m.encoder,
                                    inst.samples, weights);
        adam_step(inst.model.encoder, g.grad, state, 1e-3, 0.0);
        const double now = kl();
        non_increasing += now <= previous;
        previous = now;
    }
    const double secs = seconds_since(start);
    return {non_increasing >= 190 && previous < first && secs < 120.0,
            "KL " + fmt(first) + " -> " + fmt(previous) + ", non-increasing in "
                + std::to_string(non_increasing) + "/200 steps, " + fmt(secs, 3) + " s"};
}

// 6. Likelihood ascent.
Outcome likelihood_ascent()
{
    std::mt19937_64 rng(6);
    std::size_t gains = 0;
    for (int trial = 0; trial < 50; ++trial)
        gains += likelihood_ascent_gain(random_tiny_instance(rng), 1e-3) > 0.0;
    return {gains >= 45, std::to_string(gains) + "/50 steps raise the exact log-likelihood"};
}

// 7. End-to-end learning on a planted corpus.
Outcome end_to_end()
{
    const auto start = Clock::now();
    const std::uint64_t seed = 7;
    std::mt19937_64 rng(seed);
    const testing::PlantedSpec planted_spec;  // D = 8, C = 3, vocab 20
    const auto planted = testing::make_planted_model(planted_spec, rng);
    const auto train = testing::sample_corpus(planted, 500, rng);
    const auto held = testing::sample_corpus(planted, 200, rng);
    const auto bench = testing::planted_ranking_benchmark(planted, 10, 10, rng);
    const auto vocab = testing::corpus_vocabulary(planted, train);

    ModelShape shape;
    shape.dim = planted_spec.dim;
    shape.cardinality = planted_spec.cardinality;
    InitConfig init;
    init.lexical_scale = 1.0;
    init.lexical_density = 1.0;
    init.encoder_stddev = 0.5;
    std::mt19937_64 init_rng(seed);
    auto model = initialise_model(vocab, shape, init, init_rng);

    TrainConfig cfg;
    cfg.world.learning_rate = 0.001;
    cfg.lexical.learning_rate = 0.03;
    cfg.encoder.learning_rate = 0.03;
    cfg.beta = 5.0;
    cfg.alpha = 1.0;
    cfg.dropout_rate = 0.4;
    cfg.batch_size = 16;
    cfg.epochs = 20;
    cfg.seed = seed;
    OptimiserStates states;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        auto r = epoch_rng(seed, e);
        train_epoch(train, model, states, cfg, r);
    }

    std::mt19937_64 probe_rng(99);
    std::uniform_int_distribution<NodeId> node(0, 2);
    std::uniform_int_distribution<PredicateId> pred(0, static_cast<PredicateId>(vocab.predicate_count() - 1));
    std::size_t wins = 0;
    for (auto g : held) {
        const auto n = node(probe_rng);
        const auto truth = *g.nodes[n];
        PredicateId other = 0;
        do
            other = pred(probe_rng);
        while (other == truth);
        g.nodes[n] = kMasked;
        wins += infer_truth(g, n, truth, model) > infer_truth(g, n, other, model);
    }
    const double probe_rate = static_cast<double>(wins) / static_cast<double>(held.size());

    const auto report = score_ranking(bench, model);
    std::mt19937_64 base_rng(0);
    const auto lists = relevance_lists(report);
    const double baseline = random_baseline_map(lists, 1000, base_rng);
    const double ratio = report.map / baseline;
    const double secs = seconds_since(start);
    return {probe_rate >= 0.80 && ratio >= 2.0 && report.terms.size() == 10 && secs < 300.0,
            "probes " + fmt(probe_rate, 3) + " (need 0.80), MAP " + fmt(report.map, 4) + " vs baseline "
                + fmt(baseline, 4) + " = " + fmt(ratio, 3) + "x (need 2x), " + fmt(secs, 3) + " s"};
}

// 8. Metric correctness.
Outcome metric_correctness()
{
    const double tol = 1e-12;
    const std::vector<double> xs{1, 2, 3};
    const std::vector<double> ys{3, 1, 2};
    const std::vector<double> rev{3, 2, 1};
    const double ap_top = average_precision({true, false, false});
    const double ap_split = average_precision({true, false, true});
    const double rho_rev = spearman(xs, rev).rho;
    const double rho_mix = spearman(xs, ys).rho;
    const bool ok = std::abs(ap_top - 1.0) <= tol && std::abs(ap_split - 5.0 / 6.0) <= tol
                    && std::abs(rho_rev + 1.0) <= tol && std::abs(rho_mix + 0.5) <= tol;
    return {ok, "AP " + fmt(ap_top, 15) + ", " + fmt(ap_split, 15) + "; rho " + fmt(rho_rev, 15)
                    + ", " + fmt(rho_mix, 15)};
}

// 9. Reproducibility and persistence.
Outcome reproducibility()
{
    std::mt19937_64 rng(9);
    testing::PlantedSpec spec;
    spec.dim = 6;
    spec.cardinality = 2;
    spec.vocab = 12;
    const auto planted = testing::make_planted_model(spec, rng);
    const auto graphs = testing::sample_corpus(planted, 120, rng);
    const auto vocab = testing::corpus_vocabulary(planted, graphs);

    const auto fresh = [&] {
        Checkpoint ckpt;
        ModelShape shape;
        shape.dim = spec.dim;
        shape.cardinality = spec.cardinality;
        std::mt19937_64 init(11);
        ckpt.model = initialise_model(vocab, shape, {}, init);
        ckpt.config.batch_size = 16;
        ckpt.config.epochs = 3;
        ckpt.config.encoder.learning_rate = 0.01;
        ckpt.config.lexical.learning_rate = 0.01;
        ckpt.seed = 11;
        return ckpt;
    };
    const auto run = [&](Checkpoint& ckpt, std::size_t until, std::vector<std::string>& metrics) {
        for (std::size_t e = ckpt.epoch; e < until; ++e) {
            auto r = epoch_rng(ckpt.seed, e);
            auto m = train_epoch(graphs, ckpt.model, ckpt.optimiser, ckpt.config, r);
            m.epoch = e + 1;
            ckpt.epoch = e + 1;
            metrics.push_back(m.to_json(false).dump());
        }
    };

    std::vector<std::string> metrics_a;
    std::vector<std::string> metrics_b;
    auto a = fresh();
    auto b = fresh();
    run(a, 3, metrics_a);
    run(b, 3, metrics_b);
    const bool bitwise = serialise(a) == serialise(b) && metrics_a == metrics_b;

    const auto text = serialise(a);
    const bool persisted = serialise(deserialise(text)) == text;

    std::vector<std::string> metrics_c;
    auto c = fresh();
    run(c, 1, metrics_c);
    auto resumed = deserialise(serialise(c));
    run(resumed, 3, metrics_c);
    const bool resume = metrics_c == metrics_a && serialise(resumed) == text;

    return {bitwise && persisted && resume,
            std::string("repeat run ") + (bitwise ? "identical" : "differs") + ", save/load/save "
                + (persisted ? "identical" : "differs") + ", resume "
                + (resume ? "matches" : "differs")};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gradient fidelity", gradient_fidelity},
        {"probit approximation", probit_approximation},
        {"cardinality machinery", cardinality_machinery},
        {"belief propagation vs exact", bp_against_exact},
        {"KL descent", kl_descent},
        {"likelihood ascent", likelihood_ascent},
        {"end-to-end learning", end_to_end},
        {"metric correctness", metric_correctness},
        {"reproducibility and persistence", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.passed;
        std::cout << (o.passed ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
