#include "pixie/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pixie/belief_propagation.hpp"
#include "pixie/cardinality.hpp"
#include "pixie/numeric.hpp"
#include "pixie/oracle.hpp"

namespace pixie {

namespace {

constexpr std::uint32_t kGradcheckTag = 1;
constexpr std::uint32_t kProbitTag = 2;
constexpr std::uint32_t kCardinalityTag = 3;
constexpr std::uint32_t kBpTag = 4;
constexpr std::uint32_t kPosteriorTag = 5;
constexpr std::uint32_t kDivergenceTag = 6;
constexpr std::uint32_t kLikelihoodTag = 7;

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint32_t tag, std::size_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      tag, static_cast<std::uint32_t>(trial)};
    return std::mt19937_64(seq);
}

std::size_t uniform_index(std::size_t lo, std::size_t hi, std::mt19937_64& rng)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void fill_normal(Eigen::Ref<Eigen::MatrixXd> m, double sd, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, sd);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = normal(rng);
}

void scale_views(const TensorViews& views, double factor)
{
    for (const auto& v : views)
        for (double& x : v)
            x *= factor;
}

struct Tally {
    Component component;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst = 0.0;
    double tolerance = 0.0;

    void add(double error)
    {
        ++trials;
        worst = std::max(worst, error);
        if (!(error <= tolerance))
            ++failures;
    }

    CheckResult result(std::string detail = {}) const
    {
        return {component, failures == 0, trials, failures, worst, tolerance, std::move(detail)};
    }
};

// Enumerated single-node marginals for theta under a cardinality factor.
Eigen::VectorXd enumerated_marginals(const Eigen::VectorXd& theta, std::size_t cardinality)
{
    const auto dim = static_cast<std::size_t>(theta.size());
    const auto pixies = enumerate_pixies(dim, cardinality);
    std::vector<double> logs;
    logs.reserve(pixies.size());
    for (const auto& x : pixies) {
        double s = 0.0;
        for (auto i : x.active)
            s += theta[static_cast<Eigen::Index>(i)];
        logs.push_back(s);
    }
    const double log_z = log_sum_exp(logs);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
    for (std::size_t k = 0; k < pixies.size(); ++k) {
        const double p = std::exp(logs[k] - log_z);
        for (auto i : pixies[k].active)
            m[static_cast<Eigen::Index>(i)] += p;
    }
    return m;
}

double max_abs_diff(const MeanFieldSituation& a, const MeanFieldSituation& b)
{
    double worst = 0.0;
    for (std::size_t n = 0; n < a.node_count(); ++n)
        worst = std::max(worst, (a.q[n] - b.q[n]).cwiseAbs().maxCoeff());
    return worst;
}

Vocabulary tiny_vocabulary(std::size_t vocab_size, std::mt19937_64& rng)
{
    Vocabulary vocab;
    for (std::size_t r = 0; r < vocab_size; ++r)
        vocab.add_predicate("p" + std::to_string(r), uniform_index(1, 5, rng));
    vocab.add_label("ARG1");
    vocab.add_label("ARG2");
    return vocab;
}

using RealL = long double;
using VectorL = Eigen::Matrix<RealL, Eigen::Dynamic, 1>;
using NodesL = std::vector<VectorL>;

RealL sigmoid_l(RealL x)
{
    if (x >= 0)
        return 1 / (1 + std::exp(-x));
    const RealL e = std::exp(x);
    return e / (1 + e);
}

NodesL layer_l(const ConvLayer& layer, const NodesL& in, const GraphTopology& topo, bool tanh_act)
{
    NodesL out;
    for (const auto& h : in)
        out.push_back(layer.self.cast<RealL>() * h + layer.bias.cast<RealL>());
    for (const auto& e : topo.edges) {
        out[e.source] += layer.head[e.label].cast<RealL>() * in[e.target];
        out[e.target] += layer.inverse[e.label].cast<RealL>() * in[e.source];
    }
    for (auto& a : out)
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a[i] = tanh_act ? std::tanh(a[i]) : sigmoid_l(a[i]);
    return out;
}

RealL truth_l(const VectorL& q, PredicateId r, const LexicalModel& lex)
{
    const VectorL v = lex.weights.row(r).transpose().cast<RealL>();
    const RealL mean = v.dot(q) + static_cast<RealL>(lex.bias_of(r));
    RealL var = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i)
        var += v[i] * v[i] * q[i] * (1 - q[i]);
    const RealL pi = std::acos(RealL(-1));
    const RealL t = sigmoid_l(mean / std::sqrt(1 + pi / 8 * var));
    return std::clamp<RealL>(t, kTruthFloor, 1 - static_cast<RealL>(kTruthFloor));
}


RealL log_sum_exp_l(const std::vector<RealL>& xs)
{
    RealL m = -std::numeric_limits<RealL>::infinity();
    for (RealL x : xs)
        m = std::max(m, x);
    RealL s = 0;
    for (RealL x : xs)
        s += std::exp(x - m);
    return m + std::log(s);
}

RealL mean_energy_l(const MeanFieldSituation& mf, const GraphTopology& topo, const WorldModel& wm)
{
    RealL e = 0;
    for (const auto& edge : topo.edges)
        e -= mf.q[edge.source].cast<RealL>().dot(wm.weight(edge.label).cast<RealL>()
                                                   * mf.q[edge.target].cast<RealL>());
    return e;
}

RealL reference_world_surrogate(const MeanFieldSituation& post, const MeanFieldSituation& prior,
                                const GraphTopology& topo, const WorldModel& wm)
{
    return -mean_energy_l(post, topo, wm) + mean_energy_l(prior, topo, wm);
}

RealL reference_lexical_objective(const DependencyGraph& g, const MeanFieldSituation& post,
                                  const NodeSamples& samples, const LexicalModel& lex,
                                  const ObjectiveWeights& w)
{
    RealL total = 0;
    for (NodeId n = 0; n < g.node_count(); ++n) {
        if (!g.nodes[n])
            continue;
        const VectorL q = post.q[n].cast<RealL>();
        const RealL t = truth_l(q, *g.nodes[n], lex);
        RealL sum = t;
        for (auto s : samples[n])
            sum += truth_l(q, s, lex);
        total += std::min<RealL>(0, std::log(t) - std::log(sum))
                 + static_cast<RealL>(w.alpha) * std::log(t);
    }
    return static_cast<RealL>(w.beta) * total;
}

// log P(g) by direct enumeration of every assignment.
RealL reference_log_likelihood(const DependencyGraph& g, const WorldModel& wm,
                               const LexicalModel& lex)
{
    const auto pixies = enumerate_pixies(wm.dim, wm.cardinality);
    const auto k = pixies.size();
    const auto nodes = g.node_count();
    std::vector<std::vector<RealL>> gen(nodes, std::vector<RealL>(k, 0));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<RealL> t(lex.predicate_count());
        RealL total = 0;
        for (PredicateId r = 0; r < lex.predicate_count(); ++r) {
            RealL a = static_cast<RealL>(lex.bias_of(r));
            for (auto i : pixies[j].active)
                a += lex.weights(r, static_cast<Eigen::Index>(i));
            t[r] = std::clamp<RealL>(sigmoid_l(a), kTruthFloor, 1 - static_cast<RealL>(kTruthFloor));
            total += t[r];
        }
        for (NodeId n = 0; n < nodes; ++n)
            if (g.nodes[n])
                gen[n][j] = std::log(t[*g.nodes[n]]) - std::log(total);
    }
    std::vector<RealL> joint;
    std::vector<RealL> prior;
    std::vector<std::size_t> a(nodes, 0);
    while (true) {
        RealL neg_energy = 0;
        for (const auto& e : g.edges)
            for (auto i : pixies[a[e.source]].active)
                for (auto j : pixies[a[e.target]].active)
                    neg_energy += wm.weight(e.label)(static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j));
        RealL log_gen = 0;
        for (NodeId n = 0; n < nodes; ++n)
            log_gen += gen[n][a[n]];
        prior.push_back(neg_energy);
        joint.push_back(neg_energy + log_gen);
        std::size_t pos = nodes;
        while (pos > 0 && ++a[pos - 1] == k)
            a[--pos] = 0;
        if (pos == 0)
            break;
    }
    return log_sum_exp_l(joint) - log_sum_exp_l(prior);
}

CheckResult gradient_check(Component component, const GradcheckOptions& options,
                           std::uint64_t seed)
{
    Tally tally{component};
    tally.tolerance = options.tolerance;
    std::size_t entries = 0;
    for (std::size_t i = 0; i < options.instances; ++i) {
        auto rng = trial_rng(seed, kGradcheckTag, i);
        auto inst = random_tiny_instance(rng, options.spec);
        auto& model = inst.model;
        const auto C = model.cardinality();
        const auto topo = topology_of(inst.graph);
        const auto labels = model.vocabulary.label_count();
        GradientComparison cmp;

        switch (component) {
        case Component::Encoder: {
            auto analytic = grad_encoder(inst.graph, inst.input, model.world, model.lexical,
                                         model.encoder, inst.samples, inst.weights)
                                .grad;
            if (options.fault == component)
                scale_views(tensors(analytic), 1.1);
            const auto numeric = finite_differences(
                tensors(model.encoder),
                [&] { return reference_encoder_objective(inst); },
                options.step);
            cmp = compare_gradients(tensors(std::as_const(analytic)), numeric, options.floor);
            break;
        }
        case Component::World: {
            const auto post = encode(inst.graph, model.encoder, C);
            const auto prior = bp_refine(post, topo, model.world);
            auto analytic = grad_world(post, prior, topo, labels);
            if (options.fault == component)
                scale_views(tensors(analytic), 1.1);
            const auto numeric = finite_differences(
                tensors(model.world),
                [&] { return reference_world_surrogate(post, prior, topo, model.world); },
                options.step);
            cmp = compare_gradients(tensors(std::as_const(analytic)), numeric, options.floor);
            break;
        }
        case Component::WorldExact: {
            auto analytic = exact_world_gradient(inst.graph, model.world, model.lexical);
            if (options.fault == component)
                scale_views(tensors(analytic), 1.1);
            const auto numeric = finite_differences(
                tensors(model.world),
                [&] { return reference_log_likelihood(inst.graph, model.world, model.lexical); },
                options.step);
            cmp = compare_gradients(tensors(std::as_const(analytic)), numeric, options.floor);
            break;
        }
        case Component::Lexical: {
            const auto post = encode(inst.graph, model.encoder, C);
            auto analytic =
                grad_lexical(inst.graph, post, inst.samples, model.lexical, inst.weights);
            if (options.fault == component)
                scale_views(tensors(analytic), 1.1);
            const auto numeric = finite_differences(
                tensors(model.lexical),
                [&] {
                    return reference_lexical_objective(inst.graph, post, inst.samples,
                                                       model.lexical, inst.weights);
                },
                options.step);
            cmp = compare_gradients(tensors(std::as_const(analytic)), numeric, options.floor);
            break;
        }
        default:
            break;
        }
        entries += cmp.entries;
        tally.add(cmp.max_relative_error);
    }
    return tally.result(std::to_string(entries) + " gradient entries compared");
}

CheckResult check_probit(std::uint64_t seed, const OracleCheckOptions& o)
{
    Tally tally{Component::Probit};
    tally.tolerance = o.probit_tolerance;
    for (std::size_t t = 0; t < o.probit_trials; ++t) {
        auto rng = trial_rng(seed, kProbitTag, t);
        const auto dim = uniform_index(1, 12, rng);
        auto lex = LexicalModel::zeros(1, dim);
        fill_normal(lex.weights, 1.0, rng);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Eigen::VectorXd q(static_cast<Eigen::Index>(dim));
        for (Eigen::Index i = 0; i < q.size(); ++i)
            q[i] = unit(rng);
        const Eigen::VectorXd v = lex.weights.row(0).transpose();
        const double var = (v.array().square() * q.array() * (1.0 - q.array())).sum();
        if (var > o.probit_max_variance)
            lex.weights *= std::sqrt(o.probit_max_variance / var);
        double approx = expected_truth(q, 0, lex);
        if (o.fault == Component::Probit)
            approx += 0.1;
        tally.add(std::abs(approx - exact_expected_truth(q, 0, lex)));
    }
    return tally.result("max |probit - exact| over random (v, q)");
}

CheckResult check_cardinality(std::uint64_t seed, const OracleCheckOptions& o)
{
    Tally tally{Component::Cardinality};
    tally.tolerance = o.cardinality_tolerance;
    for (std::size_t t = 0; t < o.cardinality_trials; ++t) {
        auto rng = trial_rng(seed, kCardinalityTag, t);
        const auto dim = uniform_index(1, 10, rng);
        const auto cardinality = uniform_index(1, dim, rng);
        Eigen::VectorXd theta(static_cast<Eigen::Index>(dim));
        fill_normal(theta, 2.0, rng);
        Eigen::VectorXd m = cardinality_marginals(theta, cardinality);
        if (o.fault == Component::Cardinality)
            m[0] += 1e-3;
        const auto expected = enumerated_marginals(theta, cardinality);
        const double sum_error = std::abs(m.sum() - static_cast<double>(cardinality));
        tally.add(std::max((m - expected).cwiseAbs().maxCoeff(), sum_error / 10.0));
        // Flat potentials must give exactly C/D.
        const Eigen::VectorXd flat = Eigen::VectorXd::Constant(theta.size(), theta[0]);
        const auto uniform = cardinality_marginals(flat, cardinality);
        const double target = static_cast<double>(cardinality) / static_cast<double>(dim);
        tally.add((uniform.array() == target).all() ? 0.0 : 1.0);
    }
    return tally.result("marginals vs subset enumeration, sums, flat-theta symmetry");
}

CheckResult check_bp(std::uint64_t seed, const OracleCheckOptions& o)
{
    Tally tally{Component::BeliefPropagation};
    tally.tolerance = o.bp_tolerance;
    const BpOptions bp{o.bp_iterations, 0.0};
    std::uniform_real_distribution<double> interior(0.05, 0.95);
    for (std::size_t t = 0; t < o.bp_trials; ++t) {
        auto rng = trial_rng(seed, kBpTag, t);
        // Two nodes, D = 3, C = 1.
        auto wm = WorldModel::zeros(3, 1, 2);
        for (auto& w : wm.weights)
            fill_normal(w, 1.0, rng);
        const GraphTopology topo{2, {{0, static_cast<LabelId>(uniform_index(0, 1, rng)), 1}}};
        auto mf = MeanFieldSituation::uniform(2, 3, 0.0);
        for (auto& q : mf.q)
            for (Eigen::Index i = 0; i < q.size(); ++i)
                q[i] = interior(rng);
        auto refined = bp_refine(mf, topo, wm, bp);
        if (o.fault == Component::BeliefPropagation)
            refined.q[0][0] += 1e-3;
        const auto exact = exact_prior(topo, wm, unary_potentials(mf)).unit_marginals();
        tally.add(max_abs_diff(refined, exact));

        // One node with a random cardinality: exact in a single pass.
        const auto dim = uniform_index(2, 6, rng);
        auto single = WorldModel::zeros(dim, uniform_index(1, dim, rng), 2);
        auto mf1 = MeanFieldSituation::uniform(1, dim, 0.0);
        for (Eigen::Index i = 0; i < mf1.q[0].size(); ++i)
            mf1.q[0][i] = interior(rng);
        const GraphTopology lone{1, {}};
        auto one_pass = bp_refine(mf1, lone, single, {1, 0.0});
        if (o.fault == Component::BeliefPropagation)
            one_pass.q[0][0] += 1e-3;
        tally.add(max_abs_diff(one_pass, exact_prior(lone, single, unary_potentials(mf1))
                                             .unit_marginals()));
    }
    return tally.result("two-node D=3 C=1 models and single nodes vs the exact prior");
}

CheckResult check_posterior(std::uint64_t seed, const OracleCheckOptions& o)
{
    Tally tally{Component::Posterior};
    tally.tolerance = 1e-12;
    for (std::size_t t = 0; t < o.posterior_trials; ++t) {
        auto rng = trial_rng(seed, kPosteriorTag, t);
        const auto inst = random_tiny_instance(rng);
        const auto post = exact_posterior(inst.graph, inst.model.world, inst.model.lexical);
        double total = 0.0;
        for (double p : post.probabilities)
            total += p;
        if (o.fault == Component::Posterior)
            total *= 1.001;
        tally.add(std::abs(total - 1.0));
    }

    // Single node, D = 2, C = 1, v_p = (2, 0), v_q = (0, 2), p observed:
    // P({0}) / P({1}) = sigmoid(2) / sigmoid(0).
    Vocabulary vocab;
    vocab.add_predicate("p");
    vocab.add_predicate("q");
    auto lex = LexicalModel::zeros(2, 2);
    lex.weights << 2.0, 0.0, 0.0, 2.0;
    const DependencyGraph g{{PredicateId{0}}, {}};
    const auto post = exact_posterior(g, WorldModel::zeros(2, 1, 0), lex);
    double ratio = post.probabilities[0] / post.probabilities[1];
    if (o.fault == Component::Posterior)
        ratio *= 1.001;
    tally.add(std::abs(ratio / (sigmoid(2.0) / sigmoid(0.0)) - 1.0));
    return tally.result("normalisation and the two-configuration closed form");
}

CheckResult check_divergence(std::uint64_t seed, const OracleCheckOptions& o)
{
    Tally tally{Component::Divergence};
    tally.tolerance = 1e-9;
    for (std::size_t t = 0; t < o.divergence_trials; ++t) {
        auto rng = trial_rng(seed, kDivergenceTag, t);
        const auto inst = random_tiny_instance(rng);
        const auto& m = inst.model;
        double kl = exact_kl(encode(inst.graph, m.encoder, m.cardinality()), inst.graph, m.world,
                             m.lexical);
        if (o.fault == Component::Divergence)
            kl = -1.0;
        tally.add(kl >= 0.0 && std::isfinite(kl) ? 0.0 : 1.0);

        // A one-node C = 1 posterior is product form: q_i = P_i / (1 + P_i)
        // conditions to it exactly.
        const auto dim = uniform_index(2, 6, rng);
        const auto vocab_size = uniform_index(2, 6, rng);
        auto lex = LexicalModel::zeros(vocab_size, dim);
        fill_normal(lex.weights, 1.0, rng);
        const auto wm = WorldModel::zeros(dim, 1, 0);
        const DependencyGraph g{{static_cast<PredicateId>(uniform_index(0, vocab_size - 1, rng))},
                                {}};
        const auto post = exact_posterior(g, wm, lex);
        auto mf = post.unit_marginals();
        mf.q[0] = mf.q[0].unaryExpr([](double p) { return p / (1.0 + p); });
        double matched = exact_kl(mf, g, wm, lex);
        if (o.fault == Component::Divergence)
            matched += 1e-3;
        tally.add(std::abs(matched));
    }
    return tally.result("non-negativity and zero at a matching product-form posterior");
}

CheckResult check_likelihood(std::uint64_t seed, const OracleCheckOptions& o)
{
    std::size_t ascended = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < o.likelihood_trials; ++t) {
        auto rng = trial_rng(seed, kLikelihoodTag, t);
        auto inst = random_tiny_instance(rng);
        for (auto& n : inst.graph.nodes)
            if (!n)
                n = PredicateId{0};
        inst.samples = full_vocabulary_samples(inst.graph, inst.model.lexical.predicate_count());
        double gain = likelihood_ascent_gain(inst, o.likelihood_step);
        if (o.fault == Component::Likelihood)
            gain = -std::abs(gain) - 1.0;
        if (gain > 0.0)
            ++ascended;
        worst = std::min(worst, gain);
    }
    CheckResult r;
    r.component = Component::Likelihood;
    r.trials = o.likelihood_trials;
    r.failures = o.likelihood_trials - ascended;
    r.worst = static_cast<double>(ascended);
    r.tolerance = static_cast<double>(o.likelihood_required);
    r.passed = ascended >= o.likelihood_required;
    std::ostringstream detail;
    detail << ascended << " of " << o.likelihood_trials
           << " steps increased the exact log-likelihood; most negative change " << worst;
    r.detail = detail.str();
    return r;
}

}  // namespace

long double reference_encoder_objective(const TinyInstance& instance)
{
    const auto& m = instance.model;
    const auto& p = m.encoder;
    const auto& input = instance.input;
    const auto topo = topology_of(input);

    NodesL h0;
    for (NodeId n = 0; n < input.node_count(); ++n) {
        if (input.nodes[n]) {
            h0.push_back(p.embeddings.col(*input.nodes[n]).cast<RealL>());
            continue;
        }
        VectorL e = p.drop.cast<RealL>();
        for (const auto& edge : input.edges) {
            if (edge.source == n)
                e += p.drop_head.col(edge.label).cast<RealL>();
            if (edge.target == n)
                e += p.drop_inverse.col(edge.label).cast<RealL>();
        }
        h0.push_back(e);
    }
    auto q = layer_l(p.layer2, layer_l(p.layer1, h0, topo, true), topo, false);
    const auto c = static_cast<RealL>(m.cardinality());
    for (auto& v : q) {
        const RealL total = v.sum();
        if (total > c)
            v *= c / total;
    }

    RealL energy = 0;
    for (const auto& e : topo.edges)
        energy -= q[e.source].dot(m.world.weight(e.label).cast<RealL>() * q[e.target]);
    RealL entropy = 0;
    for (const auto& v : q)
        for (Eigen::Index i = 0; i < v.size(); ++i)
            for (RealL x : {v[i], 1 - v[i]})
                if (x > 0)
                    entropy -= x * std::log(x);
    RealL observed = 0;
    const auto& targets = instance.graph;
    for (NodeId n = 0; n < targets.node_count(); ++n) {
        if (!targets.nodes[n])
            continue;
        const auto r = *targets.nodes[n];
        const RealL t = truth_l(q[n], r, m.lexical);
        RealL total = t;
        for (auto s : instance.samples[n])
            total += truth_l(q[n], s, m.lexical);
        observed += std::min<RealL>(0, std::log(t) - std::log(total))
                    + static_cast<RealL>(instance.weights.alpha) * std::log(t);
    }
    return energy - static_cast<RealL>(instance.weights.beta) * observed - entropy;
}

std::string_view to_string(Component c)
{
    switch (c) {
    case Component::Encoder: return "encoder";
    case Component::World: return "world";
    case Component::WorldExact: return "world_exact";
    case Component::Lexical: return "lexical";
    case Component::Probit: return "probit";
    case Component::Cardinality: return "cardinality";
    case Component::BeliefPropagation: return "belief_propagation";
    case Component::Posterior: return "posterior";
    case Component::Divergence: return "divergence";
    case Component::Likelihood: return "likelihood";
    }
    return "unknown";
}

std::optional<Component> component_from_string(std::string_view name)
{
    for (auto c : {Component::Encoder, Component::World, Component::WorldExact,
                   Component::Lexical, Component::Probit, Component::Cardinality,
                   Component::BeliefPropagation, Component::Posterior, Component::Divergence,
                   Component::Likelihood})
        if (to_string(c) == name)
            return c;
    return std::nullopt;
}

bool VerificationReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> VerificationReport::failing() const
{
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.passed)
            out.emplace_back(to_string(c.component));
    return out;
}

nlohmann::json VerificationReport::to_json() const
{
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : checks)
        list.push_back({{"component", to_string(c.component)},
                        {"passed", c.passed},
                        {"trials", c.trials},
                        {"failures", c.failures},
                        {"worst", c.worst},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    return {{"suite", suite},
            {"seed", seed},
            {"passed", passed()},
            {"failing", failing()},
            {"checks", list}};
}

DependencyGraph random_graph(std::size_t nodes, std::size_t vocab_size, std::size_t label_count,
                             std::mt19937_64& rng)
{
    if (nodes == 0 || vocab_size == 0 || (nodes > 1 && label_count == 0))
        throw std::invalid_argument("random graph needs nodes, predicates and labels");
    DependencyGraph g;
    for (std::size_t n = 0; n < nodes; ++n)
        g.nodes.emplace_back(static_cast<PredicateId>(uniform_index(0, vocab_size - 1, rng)));
    for (NodeId n = 1; n < nodes; ++n) {
        const auto parent = uniform_index(0, n - 1, rng);
        auto label = static_cast<LabelId>(uniform_index(0, label_count - 1, rng));
        const bool parent_is_head = uniform_index(0, 1, rng) == 1;
        auto taken = [&](NodeId source, LabelId l) {
            return std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
                return e.source == source && e.label == l;
            });
        };
        if (parent_is_head) {
            for (std::size_t k = 0; k < label_count && taken(parent, label); ++k)
                label = static_cast<LabelId>((label + 1) % label_count);
            if (!taken(parent, label)) {
                g.edges.push_back({parent, label, n});
                continue;
            }
        }
        g.edges.push_back({n, label, parent});
    }
    return g;
}

NodeSamples full_vocabulary_samples(const DependencyGraph& graph, std::size_t vocab_size)
{
    NodeSamples samples(graph.node_count());
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        if (!graph.nodes[n])
            continue;
        for (std::size_t r = 0; r < vocab_size; ++r)
            if (r != *graph.nodes[n])
                samples[n].push_back(static_cast<PredicateId>(r));
    }
    return samples;
}

TinyInstance random_tiny_instance(std::mt19937_64& rng, const TinySpec& spec)
{
    const auto dim = uniform_index(spec.min_dim, spec.max_dim, rng);
    const auto cardinality = std::min(spec.cardinality, dim);
    const auto vocab_size = uniform_index(spec.min_vocab, spec.max_vocab, rng);
    const auto nodes = uniform_index(1, spec.max_nodes, rng);

    TinyInstance inst;
    auto& m = inst.model;
    m.vocabulary = tiny_vocabulary(vocab_size, rng);
    const auto labels = m.vocabulary.label_count();

    inst.graph = random_graph(nodes, vocab_size, labels, rng);
    std::bernoulli_distribution coin(0.25);
    if (nodes > 1 && coin(rng))
        inst.graph.nodes[uniform_index(0, nodes - 1, rng)] = kMasked;
    inst.input = apply_mask(inst.graph, spec.mask_rate, rng);

    m.world = WorldModel::zeros(dim, cardinality, labels);
    for (auto& w : m.world.weights)
        fill_normal(w, spec.world_scale, rng);
    m.lexical = LexicalModel::zeros(vocab_size, dim, coin(rng));
    fill_normal(m.lexical.weights, spec.lexical_scale, rng);
    if (m.lexical.use_bias)
        fill_normal(m.lexical.bias, 0.5, rng);
    m.encoder = EncoderParams::random(vocab_size, labels, dim, dim, dim, spec.encoder_scale, rng);
    fill_normal(m.encoder.layer1.bias, spec.encoder_scale, rng);
    fill_normal(m.encoder.layer2.bias, spec.encoder_scale, rng);

    inst.samples = full_vocabulary_samples(inst.graph, vocab_size);
    inst.weights.beta = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
    inst.weights.alpha = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
    return inst;
}

std::vector<std::vector<double>> finite_differences(const TensorViews& params,
                                                    const std::function<long double()>& f,
                                                    double step)
{
    std::vector<std::vector<double>> out;
    out.reserve(params.size());
    for (const auto& view : params) {
        std::vector<double> grad(view.size());
        for (std::size_t i = 0; i < view.size(); ++i) {
            const double saved = view[i];
            const double hi = saved + step;
            const double lo = saved - step;
            view[i] = hi;
            const long double up = f();
            view[i] = lo;
            const long double down = f();
            view[i] = saved;
            grad[i] = static_cast<double>((up - down) / (static_cast<long double>(hi) - lo));
        }
        out.push_back(std::move(grad));
    }
    return out;
}

GradientComparison compare_gradients(const ConstTensorViews& analytic,
                                     const std::vector<std::vector<double>>& numeric,
                                     double floor)
{
    if (analytic.size() != numeric.size())
        throw std::invalid_argument("gradient tensor counts differ");
    GradientComparison out;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        if (analytic[k].size() != numeric[k].size())
            throw std::invalid_argument("gradient tensor sizes differ");
        for (std::size_t i = 0; i < analytic[k].size(); ++i) {
            const double a = analytic[k][i];
            const double n = numeric[k][i];
            const double err = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
            ++out.entries;
            if (err > out.max_relative_error || std::isnan(err)) {
                out.max_relative_error = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
                out.analytic = a;
                out.numeric = n;
            }
        }
    }
    return out;
}

VerificationReport run_gradcheck(std::uint64_t seed, const GradcheckOptions& options)
{
    VerificationReport report;
    report.suite = "gradcheck";
    report.seed = seed;
    for (auto c : {Component::Encoder, Component::World, Component::WorldExact,
                   Component::Lexical})
        report.checks.push_back(gradient_check(c, options, seed));
    return report;
}

VerificationReport run_oracle_check(std::uint64_t seed, const OracleCheckOptions& options)
{
    VerificationReport report;
    report.suite = "oracle-check";
    report.seed = seed;
    report.checks.push_back(check_probit(seed, options));
    report.checks.push_back(check_cardinality(seed, options));
    report.checks.push_back(check_bp(seed, options));
    report.checks.push_back(check_posterior(seed, options));
    report.checks.push_back(check_divergence(seed, options));
    report.checks.push_back(check_likelihood(seed, options));
    return report;
}

double likelihood_ascent_gain(const TinyInstance& instance, double step, const BpOptions& bp)
{
    const auto& g = instance.graph;
    const auto& m = instance.model;
    const auto topo = topology_of(g);
    const double before = exact_log_likelihood(g, m.world, m.lexical);

    const auto post = exact_posterior(g, m.world, m.lexical).unit_marginals();
    const auto prior = bp_refine(post, topo, m.world, bp);
    const auto gw = grad_world(post, prior, topo, m.world.label_count());
    const auto gl = grad_lexical(g, post, instance.samples, m.lexical, instance.weights);

    auto world = m.world;
    for (std::size_t l = 0; l < gw.size(); ++l)
        world.weights[l] += step * gw[l];
    auto lex = m.lexical;
    lex.weights += step * gl.weights;
    if (lex.use_bias)
        lex.bias += step * gl.bias;
    return exact_log_likelihood(g, world, lex) - before;
}

}  // namespace pixie
