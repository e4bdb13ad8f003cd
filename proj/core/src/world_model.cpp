#include "pixie/world_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pixie/errors.hpp"
#include "pixie/numeric.hpp"

namespace pixie {

WorldModel WorldModel::zeros(std::size_t dim, std::size_t cardinality, std::size_t label_count)
{
    WorldModel wm;
    wm.dim = dim;
    wm.cardinality = cardinality;
    wm.weights.assign(label_count, Eigen::MatrixXd::Zero(dim, dim));
    return wm;
}

const Eigen::MatrixXd& WorldModel::weight(LabelId label) const
{
    if (label >= weights.size())
        throw ShapeError("world model has no matrix for label " + std::to_string(label));
    return weights[label];
}

void WorldModel::validate() const
{
    if (cardinality < 1 || cardinality > dim)
        throw ShapeError("world model needs 1 <= C <= D");
    for (const auto& w : weights) {
        if (static_cast<std::size_t>(w.rows()) != dim || static_cast<std::size_t>(w.cols()) != dim)
            throw ShapeError("world weight matrix is not D x D");
        if (!w.allFinite())
            throw ShapeError("world weight matrix has non-finite entries");
    }
}

Eigen::VectorXd Pixie::indicator(std::size_t dim) const
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (auto i : active)
        x[static_cast<Eigen::Index>(i)] = 1.0;
    return x;
}

MeanFieldSituation MeanFieldSituation::uniform(std::size_t nodes, std::size_t dim, double value)
{
    MeanFieldSituation mf;
    mf.q.assign(nodes, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), value));
    return mf;
}

MeanFieldSituation MeanFieldSituation::from_situation(const Situation& s, std::size_t dim)
{
    MeanFieldSituation mf;
    for (const auto& p : s.pixies)
        mf.q.push_back(p.indicator(dim));
    return mf;
}

bool MeanFieldSituation::is_valid(std::size_t cardinality, double tol) const
{
    for (const auto& v : q) {
        if (v.size() != q.front().size())
            return false;
        if ((v.array() < 0.0).any() || (v.array() > 1.0).any() || !v.allFinite())
            return false;
        if (v.sum() > static_cast<double>(cardinality) + tol)
            return false;
    }
    return true;
}

double energy(const Situation& s, const WorldModel& wm)
{
    if (s.pixies.size() != s.topology.node_count)
        throw ShapeError("situation has one pixie per node");
    double total = 0.0;
    for (const auto& e : s.topology.edges) {
        const auto& w = wm.weight(e.label);
        for (auto i : s.pixies[e.source].active)
            for (auto j : s.pixies[e.target].active)
                total += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return -total;
}

double mean_energy(const MeanFieldSituation& mf, const GraphTopology& topology,
                   const WorldModel& wm)
{
    if (mf.node_count() != topology.node_count)
        throw ShapeError("mean-field situation does not match topology");
    double total = 0.0;
    for (const auto& e : topology.edges)
        total += mf.q[e.source].dot(wm.weight(e.label) * mf.q[e.target]);
    return -total;
}

std::vector<Eigen::MatrixXd> energy_stats(const MeanFieldSituation& mf,
                                          const GraphTopology& topology,
                                          std::size_t label_count)
{
    if (mf.node_count() != topology.node_count)
        throw ShapeError("mean-field situation does not match topology");
    const auto dim = mf.q.empty() ? 0 : mf.q.front().size();
    std::vector<Eigen::MatrixXd> stats(label_count, Eigen::MatrixXd::Zero(dim, dim));
    for (const auto& e : topology.edges) {
        if (e.label >= label_count)
            throw ShapeError("edge label outside statistics range");
        stats[e.label].noalias() += mf.q[e.source] * mf.q[e.target].transpose();
    }
    return stats;
}

std::vector<Pixie> enumerate_pixies(std::size_t dim, std::size_t cardinality)
{
    std::vector<Pixie> out;
    if (cardinality > dim)
        return out;
    std::vector<std::size_t> idx(cardinality);
    for (std::size_t i = 0; i < cardinality; ++i)
        idx[i] = i;
    while (true) {
        out.push_back({idx});
        // advance to the next combination in lexicographic order
        std::size_t k = cardinality;
        while (k > 0 && idx[k - 1] == dim - cardinality + (k - 1))
            --k;
        if (k == 0)
            break;
        ++idx[k - 1];
        for (std::size_t j = k; j < cardinality; ++j)
            idx[j] = idx[j - 1] + 1;
    }
    return out;
}

std::vector<std::size_t> SituationDistribution::assignment(std::size_t index) const
{
    std::vector<std::size_t> out(node_count);
    const auto k = pixies.size();
    for (std::size_t n = node_count; n-- > 0;) {
        out[n] = index % k;
        index /= k;
    }
    return out;
}

Situation SituationDistribution::situation(std::size_t index, const GraphTopology& topology) const
{
    Situation s{topology, {}};
    for (auto k : assignment(index))
        s.pixies.push_back(pixies[k]);
    return s;
}

MeanFieldSituation SituationDistribution::unit_marginals() const
{
    auto mf = MeanFieldSituation::uniform(node_count, dim, 0.0);
    for (std::size_t idx = 0; idx < probabilities.size(); ++idx) {
        const double p = probabilities[idx];
        if (p == 0.0)
            continue;
        const auto a = assignment(idx);
        for (std::size_t n = 0; n < node_count; ++n)
            for (auto i : pixies[a[n]].active)
                mf.q[n][static_cast<Eigen::Index>(i)] += p;
    }
    return mf;
}

std::vector<double> SituationDistribution::node_marginal(std::size_t node) const
{
    std::vector<double> out(pixies.size(), 0.0);
    for (std::size_t idx = 0; idx < probabilities.size(); ++idx)
        out[assignment(idx)[node]] += probabilities[idx];
    return out;
}

SituationDistribution enumerate_situations(const GraphTopology& topology, const WorldModel& wm,
                                           const NodeLogFactor& node_factor, std::size_t budget)
{
    SituationDistribution dist;
    dist.node_count = topology.node_count;
    dist.dim = wm.dim;
    dist.pixies = enumerate_pixies(wm.dim, wm.cardinality);
    const std::size_t k = dist.pixies.size();

    std::size_t total = 1;
    for (std::size_t n = 0; n < topology.node_count; ++n) {
        if (k != 0 && total > budget / k)
            throw BudgetExceeded("exact enumeration needs more than "
                                 + std::to_string(budget) + " configurations");
        total *= k;
    }
    if (total > budget)
        throw BudgetExceeded("exact enumeration needs more than " + std::to_string(budget)
                             + " configurations");

    // Negative energy contributed by each edge for every pair of pixies.
    std::vector<Eigen::MatrixXd> edge_table;
    for (const auto& e : topology.edges) {
        const auto& w = wm.weight(e.label);
        Eigen::MatrixXd t(k, k);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
                double s = 0.0;
                for (auto i : dist.pixies[a].active)
                    for (auto j : dist.pixies[b].active)
                        s += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                t(a, b) = s;
            }
        edge_table.push_back(std::move(t));
    }
    Eigen::MatrixXd unary(topology.node_count, k);
    for (std::size_t n = 0; n < topology.node_count; ++n)
        for (std::size_t a = 0; a < k; ++a)
            unary(n, a) = node_factor ? node_factor(n, a) : 0.0;

    std::vector<double> logw(total);
    std::vector<std::size_t> digits(topology.node_count, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        double lw = 0.0;
        for (std::size_t n = 0; n < topology.node_count; ++n)
            lw += unary(n, digits[n]);
        for (std::size_t ei = 0; ei < topology.edges.size(); ++ei) {
            const auto& e = topology.edges[ei];
            lw += edge_table[ei](digits[e.source], digits[e.target]);
        }
        logw[idx] = lw;
        for (std::size_t n = topology.node_count; n-- > 0;) {
            if (++digits[n] < k)
                break;
            digits[n] = 0;
        }
    }

    dist.log_partition = log_sum_exp(logw);
    dist.probabilities.resize(total);
    double sum = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        logw[idx] -= dist.log_partition;
        dist.probabilities[idx] = std::exp(logw[idx]);
        sum += dist.probabilities[idx];
    }
    for (auto& p : dist.probabilities)
        p /= sum;
    dist.log_probabilities = std::move(logw);
    return dist;
}

SituationDistribution exact_prior(const GraphTopology& topology, const WorldModel& wm,
                                  std::size_t budget)
{
    return enumerate_situations(topology, wm, nullptr, budget);
}

SituationDistribution exact_prior(const GraphTopology& topology, const WorldModel& wm,
                                  const std::vector<Eigen::VectorXd>& unary_log_potentials,
                                  std::size_t budget)
{
    if (unary_log_potentials.size() != topology.node_count)
        throw ShapeError("one unary vector per node required");
    const auto pixies = enumerate_pixies(wm.dim, wm.cardinality);
    return enumerate_situations(
        topology, wm,
        [&](std::size_t n, std::size_t a) {
            double s = 0.0;
            for (auto i : pixies[a].active)
                s += unary_log_potentials[n][static_cast<Eigen::Index>(i)];
            return s;
        },
        budget);
}

}  // namespace pixie
