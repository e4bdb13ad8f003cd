#pragma once

// The cardinality-restricted Boltzmann machine over situations.
//
// A situation assigns every node of a graph topology a pixie: a binary
// vector of `dim` units with exactly `cardinality` active. Its energy is
//
//     E(s) = - sum over edges x -l-> y of  x^T w(l) y
//
// so that P(s) is proportional to exp(-E(s)).

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "pixie/graph.hpp"

namespace pixie {

inline constexpr std::size_t kDefaultEnumerationBudget = 1'000'000;

struct WorldModel {
    std::size_t dim = 0;          // D
    std::size_t cardinality = 0;  // C
    std::vector<Eigen::MatrixXd> weights;  // one D x D matrix per label

    static WorldModel zeros(std::size_t dim, std::size_t cardinality, std::size_t label_count);

    std::size_t label_count() const { return weights.size(); }
    const Eigen::MatrixXd& weight(LabelId label) const;

    // Throws ShapeError unless 1 <= C <= D, every matrix is D x D and finite.
    void validate() const;
};

// Active unit indices, sorted ascending.
struct Pixie {
    std::vector<std::size_t> active;

    Eigen::VectorXd indicator(std::size_t dim) const;

    friend bool operator==(const Pixie&, const Pixie&) = default;
};

struct Situation {
    GraphTopology topology;
    std::vector<Pixie> pixies;
};

// Independent per-unit activation probabilities, one vector per node.
struct MeanFieldSituation {
    std::vector<Eigen::VectorXd> q;

    std::size_t node_count() const { return q.size(); }

    static MeanFieldSituation uniform(std::size_t nodes, std::size_t dim, double value);
    static MeanFieldSituation from_situation(const Situation& s, std::size_t dim);

    // Entries in [0,1], per-node sums at most C + tol, consistent length.
    bool is_valid(std::size_t cardinality, double tol = 1e-9) const;
};

double energy(const Situation& s, const WorldModel& wm);

// Energy evaluated at the mean vectors. Because E is linear in each node's
// pixie and edges join distinct nodes, this is the exact expectation of E
// under independent Bernoulli units.
double mean_energy(const MeanFieldSituation& mf, const GraphTopology& topology,
                   const WorldModel& wm);

// Per-label sums over edges of the outer products q(source) q(target)^T.
std::vector<Eigen::MatrixXd> energy_stats(const MeanFieldSituation& mf,
                                          const GraphTopology& topology,
                                          std::size_t label_count);

// All C-subsets of [0, D) in lexicographic order.
std::vector<Pixie> enumerate_pixies(std::size_t dim, std::size_t cardinality);

// A normalised table over every assignment of pixies to nodes. Assignment
// index is mixed-radix over `pixies`, node 0 most significant.
struct SituationDistribution {
    std::size_t node_count = 0;
    std::size_t dim = 0;
    std::vector<Pixie> pixies;
    std::vector<double> probabilities;
    std::vector<double> log_probabilities;
    double log_partition = 0.0;  // log of the unnormalised total

    std::size_t size() const { return probabilities.size(); }

    // Pixie index per node for one assignment.
    std::vector<std::size_t> assignment(std::size_t index) const;
    Situation situation(std::size_t index, const GraphTopology& topology) const;

    MeanFieldSituation unit_marginals() const;
    // Marginal distribution of one node over `pixies`.
    std::vector<double> node_marginal(std::size_t node) const;
};

// Extra log-potential for giving node `n` the pixie with index `k`.
using NodeLogFactor = std::function<double(std::size_t node, std::size_t pixie_index)>;

// Enumerates exp(-E(s) + sum_n node_factor(n, k_n)) over all situations.
// Throws BudgetExceeded if (D choose C)^nodes exceeds `budget`.
SituationDistribution enumerate_situations(const GraphTopology& topology, const WorldModel& wm,
                                           const NodeLogFactor& node_factor,
                                           std::size_t budget = kDefaultEnumerationBudget);

SituationDistribution exact_prior(const GraphTopology& topology, const WorldModel& wm,
                                  std::size_t budget = kDefaultEnumerationBudget);

// Prior multiplied by independent per-unit evidence exp(theta_n . x_n).
SituationDistribution exact_prior(const GraphTopology& topology, const WorldModel& wm,
                                  const std::vector<Eigen::VectorXd>& unary_log_potentials,
                                  std::size_t budget = kDefaultEnumerationBudget);

}  // namespace pixie
