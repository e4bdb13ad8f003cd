#include "pixie/belief_propagation.hpp"

#include <stdexcept>

#include "pixie/cardinality.hpp"
#include "pixie/errors.hpp"
#include "pixie/numeric.hpp"

namespace pixie {

namespace {

// Message to the receiving units given the sender's cavity potentials.
// `coupling` column j holds the weights linking every sender unit to
// receiver unit j.
Eigen::VectorXd pixie_message(const Eigen::VectorXd& cavity, const Eigen::MatrixXd& coupling,
                              std::size_t cardinality)
{
    const double base = cardinality_log_partition(cavity, cardinality);
    Eigen::VectorXd msg(coupling.cols());
    for (Eigen::Index j = 0; j < coupling.cols(); ++j)
        msg[j] = cardinality_log_partition(cavity + coupling.col(j), cardinality) - base;
    return msg;
}

}  // namespace

std::vector<Eigen::VectorXd> unary_potentials(const MeanFieldSituation& mf)
{
    std::vector<Eigen::VectorXd> theta;
    theta.reserve(mf.q.size());
    for (const auto& q : mf.q)
        theta.push_back(q.unaryExpr([](double p) {
            return logit(std::clamp(p, kBpClamp, 1.0 - kBpClamp));
        }));
    return theta;
}

MeanFieldSituation bp_refine(const MeanFieldSituation& mf, const GraphTopology& topology,
                             const WorldModel& wm, const BpOptions& options)
{
    if (!(options.damping >= 0.0 && options.damping < 1.0))
        throw std::invalid_argument("BP damping must lie in [0, 1)");
    if (mf.node_count() != topology.node_count)
        throw ShapeError("mean-field situation does not match topology");
    for (const auto& q : mf.q)
        if (static_cast<std::size_t>(q.size()) != wm.dim)
            throw ShapeError("mean-field vector length differs from D");

    const auto theta = unary_potentials(mf);
    const auto n_edges = topology.edges.size();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(wm.dim));
    // to_target[e]: message along e into its target; to_source[e]: back into its source.
    std::vector<Eigen::VectorXd> to_target(n_edges, zero);
    std::vector<Eigen::VectorXd> to_source(n_edges, zero);

    auto incoming_sums = [&] {
        std::vector<Eigen::VectorXd> sum(topology.node_count, zero);
        for (std::size_t e = 0; e < n_edges; ++e) {
            sum[topology.edges[e].target] += to_target[e];
            sum[topology.edges[e].source] += to_source[e];
        }
        return sum;
    };

    for (std::size_t it = 0; it < options.iterations && n_edges > 0; ++it) {
        const auto incoming = incoming_sums();
        std::vector<Eigen::VectorXd> next_target(n_edges), next_source(n_edges);
        for (std::size_t e = 0; e < n_edges; ++e) {
            const auto& edge = topology.edges[e];
            const auto& w = wm.weight(edge.label);
            const Eigen::VectorXd cavity_src = theta[edge.source] + incoming[edge.source]
                                               - to_source[e];
            const Eigen::VectorXd cavity_tgt = theta[edge.target] + incoming[edge.target]
                                               - to_target[e];
            next_target[e] = pixie_message(cavity_src, w, wm.cardinality);
            next_source[e] = pixie_message(cavity_tgt, w.transpose(), wm.cardinality);
        }
        const double d = options.damping;
        for (std::size_t e = 0; e < n_edges; ++e) {
            to_target[e] = (1.0 - d) * next_target[e] + d * to_target[e];
            to_source[e] = (1.0 - d) * next_source[e] + d * to_source[e];
        }
    }

    const auto incoming = incoming_sums();
    MeanFieldSituation out;
    out.q.reserve(topology.node_count);
    for (std::size_t n = 0; n < topology.node_count; ++n)
        out.q.push_back(cardinality_marginals(theta[n] + incoming[n], wm.cardinality));
    return out;
}

}  // namespace pixie
