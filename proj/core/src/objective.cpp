#include "pixie/objective.hpp"

#include <algorithm>
#include <cmath>

#include "pixie/errors.hpp"
#include "pixie/numeric.hpp"

namespace pixie {

namespace {

constexpr double kEntropyClamp = 1e-12;

void check_alignment(const DependencyGraph& targets, const MeanFieldSituation& mf,
                     const NodeSamples& samples)
{
    if (mf.node_count() != targets.node_count())
        throw ShapeError("mean-field situation does not match graph");
    if (samples.size() != targets.node_count())
        throw ShapeError("one negative-sample list per node required");
}

// Generation and truth contributions of one observed node. Coefficients
// give d(gen + alpha * truth)/dt for the observed predicate and for each
// sample.
struct NodeTerms {
    double generation = 0.0;
    double truth = 0.0;
    ExpectedTruthGrad observed;
    std::vector<ExpectedTruthGrad> negatives;
    double observed_coeff = 0.0;
    double negative_coeff = 0.0;
};

NodeTerms node_terms(const Eigen::VectorXd& q, PredicateId r, std::span<const PredicateId> samples,
                     const LexicalModel& lex, double alpha)
{
    NodeTerms t;
    t.observed = expected_truth_grad(q, r, lex);
    double total = t.observed.value;
    t.negatives.reserve(samples.size());
    for (auto s : samples) {
        t.negatives.push_back(expected_truth_grad(q, s, lex));
        total += t.negatives.back().value;
    }
    t.generation = std::min(0.0, std::log(t.observed.value) - std::log(total));
    t.truth = std::log(t.observed.value);
    t.observed_coeff = (1.0 + alpha) / t.observed.value - 1.0 / total;
    t.negative_coeff = -1.0 / total;
    return t;
}

}  // namespace

double entropy(const MeanFieldSituation& mf)
{
    double h = 0.0;
    for (const auto& q : mf.q)
        for (Eigen::Index i = 0; i < q.size(); ++i)
            h -= x_log_x(q[i]) + x_log_x(1.0 - q[i]);
    return h;
}

ObjectiveBreakdown encoder_objective(const DependencyGraph& targets, const MeanFieldSituation& mf,
                                     const WorldModel& wm, const LexicalModel& lex,
                                     const NodeSamples& samples, const ObjectiveWeights& weights)
{
    check_alignment(targets, mf, samples);
    ObjectiveBreakdown out;
    out.energy = mean_energy(mf, topology_of(targets), wm);
    double generation = 0.0;
    double truth = 0.0;
    for (NodeId n = 0; n < targets.node_count(); ++n) {
        const auto& r = targets.nodes[n];
        if (!r)
            continue;
        generation += sampled_log_gen_prob(mf.q[n], *r, samples[n], lex);
        truth += std::log(expected_truth(mf.q[n], *r, lex));
    }
    out.generation = -weights.beta * generation;
    out.truth = -weights.beta * weights.alpha * truth;
    out.entropy = -entropy(mf);
    out.total = out.energy + out.generation + out.truth + out.entropy;
    return out;
}

std::vector<Eigen::VectorXd> objective_grad_q(const DependencyGraph& targets,
                                              const MeanFieldSituation& mf, const WorldModel& wm,
                                              const LexicalModel& lex, const NodeSamples& samples,
                                              const ObjectiveWeights& weights)
{
    check_alignment(targets, mf, samples);
    std::vector<Eigen::VectorXd> grad;
    grad.reserve(mf.node_count());

    // -H contributes logit(q) per unit.
    for (const auto& q : mf.q)
        grad.push_back(q.unaryExpr([](double p) {
            return logit(std::clamp(p, kEntropyClamp, 1.0 - kEntropyClamp));
        }));

    // Energy: E = -sum q(src)^T W q(tgt).
    for (const auto& e : targets.edges) {
        const auto& w = wm.weight(e.label);
        grad[e.source].noalias() -= w * mf.q[e.target];
        grad[e.target].noalias() -= w.transpose() * mf.q[e.source];
    }

    for (NodeId n = 0; n < targets.node_count(); ++n) {
        const auto& r = targets.nodes[n];
        if (!r)
            continue;
        const auto terms = node_terms(mf.q[n], *r, samples[n], lex, weights.alpha);
        Eigen::VectorXd d = terms.observed_coeff * terms.observed.d_q;
        for (const auto& neg : terms.negatives)
            d += terms.negative_coeff * neg.d_q;
        grad[n] -= weights.beta * d;
    }
    return grad;
}

EncoderGradient grad_encoder(const DependencyGraph& targets, const DependencyGraph& input,
                             const WorldModel& wm, const LexicalModel& lex,
                             const EncoderParams& params, const NodeSamples& samples,
                             const ObjectiveWeights& weights)
{
    if (topology_of(targets) != topology_of(input))
        throw ShapeError("encoder input and target graphs differ in structure");
    const auto tape = encode_with_tape(input, params, wm.cardinality);
    EncoderGradient out;
    out.objective = encoder_objective(targets, tape.output, wm, lex, samples, weights);
    const auto d_q = objective_grad_q(targets, tape.output, wm, lex, samples, weights);
    out.grad = encode_backward(tape, params, d_q);
    out.output = tape.output;
    return out;
}

std::vector<Eigen::MatrixXd> grad_world(const MeanFieldSituation& posterior,
                                        const MeanFieldSituation& refined_prior,
                                        const GraphTopology& topology, std::size_t label_count)
{
    if (posterior.node_count() != topology.node_count
        || refined_prior.node_count() != topology.node_count)
        throw ShapeError("mean-field situations do not match the topology");
    for (std::size_t n = 0; n < topology.node_count; ++n)
        if (posterior.q[n].size() != refined_prior.q[n].size())
            throw ShapeError("posterior and prior vectors differ in length");
    auto grad = energy_stats(posterior, topology, label_count);
    const auto prior = energy_stats(refined_prior, topology, label_count);
    for (std::size_t l = 0; l < label_count; ++l)
        grad[l] -= prior[l];
    return grad;
}

double lexical_objective(const DependencyGraph& targets, const MeanFieldSituation& posterior,
                         const NodeSamples& samples, const LexicalModel& lex,
                         const ObjectiveWeights& weights)
{
    check_alignment(targets, posterior, samples);
    double total = 0.0;
    for (NodeId n = 0; n < targets.node_count(); ++n) {
        const auto& r = targets.nodes[n];
        if (!r)
            continue;
        total += sampled_log_gen_prob(posterior.q[n], *r, samples[n], lex)
                 + weights.alpha * std::log(expected_truth(posterior.q[n], *r, lex));
    }
    return weights.beta * total;
}

LexicalModel grad_lexical(const DependencyGraph& targets, const MeanFieldSituation& posterior,
                          const NodeSamples& samples, const LexicalModel& lex,
                          const ObjectiveWeights& weights)
{
    check_alignment(targets, posterior, samples);
    auto grad = LexicalModel::zeros(lex.predicate_count(), lex.dim(), lex.use_bias);
    for (NodeId n = 0; n < targets.node_count(); ++n) {
        const auto& r = targets.nodes[n];
        if (!r)
            continue;
        const auto terms = node_terms(posterior.q[n], *r, samples[n], lex, weights.alpha);
        const double c_obs = weights.beta * terms.observed_coeff;
        grad.weights.row(*r) += c_obs * terms.observed.d_v.transpose();
        grad.bias[*r] += c_obs * terms.observed.d_b;
        const double c_neg = weights.beta * terms.negative_coeff;
        for (std::size_t k = 0; k < samples[n].size(); ++k) {
            const auto s = samples[n][k];
            grad.weights.row(s) += c_neg * terms.negatives[k].d_v.transpose();
            grad.bias[s] += c_neg * terms.negatives[k].d_b;
        }
    }
    return grad;
}

}  // namespace pixie
