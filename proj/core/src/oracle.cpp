#include "pixie/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "pixie/cardinality.hpp"
#include "pixie/errors.hpp"
#include "pixie/numeric.hpp"

namespace pixie {

namespace {

constexpr double kKlClamp = 1e-12;

void check_graph(const DependencyGraph& graph, const WorldModel& wm, const LexicalModel& lex)
{
    wm.validate();
    if (lex.dim() != wm.dim)
        throw ShapeError("lexical model and world model disagree on D");
    validate_structure(graph.node_count(), graph.edges, wm.label_count());
    for (const auto& r : graph.nodes)
        if (r && *r >= lex.predicate_count())
            throw std::out_of_range("graph predicate outside the lexical model");
}

// log P(r_n | pixie k) per node, zero rows for MASKED nodes.
std::vector<std::vector<double>> generation_table(const DependencyGraph& graph,
                                                  const std::vector<Pixie>& pixies,
                                                  const LexicalModel& lex)
{
    std::vector<std::vector<double>> table(graph.node_count(),
                                           std::vector<double>(pixies.size(), 0.0));
    for (NodeId n = 0; n < graph.node_count(); ++n) {
        if (!graph.nodes[n])
            continue;
        for (std::size_t k = 0; k < pixies.size(); ++k)
            table[n][k] = generation_log_prob(pixies[k], *graph.nodes[n], lex);
    }
    return table;
}

}  // namespace

SituationDistribution exact_posterior(const DependencyGraph& graph, const WorldModel& wm,
                                      const LexicalModel& lex, std::size_t budget)
{
    check_graph(graph, wm, lex);
    const auto pixies = enumerate_pixies(wm.dim, wm.cardinality);
    const auto table = generation_table(graph, pixies, lex);
    return enumerate_situations(
        topology_of(graph), wm, [&](std::size_t n, std::size_t k) { return table[n][k]; }, budget);
}

double exact_log_likelihood(const DependencyGraph& graph, const WorldModel& wm,
                            const LexicalModel& lex, std::size_t budget)
{
    const auto posterior = exact_posterior(graph, wm, lex, budget);
    const auto prior = exact_prior(topology_of(graph), wm, budget);
    return posterior.log_partition - prior.log_partition;
}

std::vector<double> conditioned_log_probs(const Eigen::VectorXd& q, std::size_t cardinality)
{
    const auto dim = static_cast<std::size_t>(q.size());
    const Eigen::VectorXd theta =
        q.unaryExpr([](double p) { return logit(std::clamp(p, kKlClamp, 1.0 - kKlClamp)); });
    const double log_z = cardinality_log_partition(theta, cardinality);
    const auto pixies = enumerate_pixies(dim, cardinality);
    std::vector<double> out;
    out.reserve(pixies.size());
    for (const auto& x : pixies) {
        double s = 0.0;
        for (auto i : x.active)
            s += theta[static_cast<Eigen::Index>(i)];
        out.push_back(s - log_z);
    }
    return out;
}

double exact_kl(const MeanFieldSituation& mf, const DependencyGraph& graph, const WorldModel& wm,
                const LexicalModel& lex, std::size_t budget)
{
    if (mf.node_count() != graph.node_count())
        throw ShapeError("mean-field situation does not match graph");
    for (const auto& q : mf.q)
        if (static_cast<std::size_t>(q.size()) != wm.dim)
            throw ShapeError("mean-field vector length differs from D");
    const auto posterior = exact_posterior(graph, wm, lex, budget);

    std::vector<std::vector<double>> log_q;
    log_q.reserve(mf.node_count());
    for (const auto& q : mf.q)
        log_q.push_back(conditioned_log_probs(q, wm.cardinality));

    double kl = 0.0;
    for (std::size_t s = 0; s < posterior.size(); ++s) {
        const auto a = posterior.assignment(s);
        double lq = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n)
            lq += log_q[n][a[n]];
        const double qs = std::exp(lq);
        if (qs > 0.0)
            kl += qs * (lq - posterior.log_probabilities[s]);
    }
    return std::max(kl, 0.0);
}

std::vector<Eigen::MatrixXd> exact_energy_stats(const SituationDistribution& dist,
                                                const GraphTopology& topology,
                                                std::size_t label_count)
{
    if (dist.node_count != topology.node_count)
        throw ShapeError("distribution does not match the topology");
    std::vector<Eigen::MatrixXd> stats(label_count,
                                       Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dist.dim),
                                                             static_cast<Eigen::Index>(dist.dim)));
    for (std::size_t s = 0; s < dist.size(); ++s) {
        const double p = dist.probabilities[s];
        if (p == 0.0)
            continue;
        const auto a = dist.assignment(s);
        for (const auto& e : topology.edges) {
            auto& m = stats.at(e.label);
            for (auto i : dist.pixies[a[e.source]].active)
                for (auto j : dist.pixies[a[e.target]].active)
                    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += p;
        }
    }
    return stats;
}

std::vector<Eigen::MatrixXd> exact_world_gradient(const DependencyGraph& graph,
                                                  const WorldModel& wm, const LexicalModel& lex,
                                                  std::size_t budget)
{
    const auto topo = topology_of(graph);
    auto grad = exact_energy_stats(exact_posterior(graph, wm, lex, budget), topo, wm.label_count());
    const auto prior = exact_energy_stats(exact_prior(topo, wm, budget), topo, wm.label_count());
    for (std::size_t l = 0; l < grad.size(); ++l)
        grad[l] -= prior[l];
    return grad;
}

}  // namespace pixie
