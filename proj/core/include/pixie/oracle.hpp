#pragma once

// Brute-force inference over every situation of a tiny model: the reference
// against which the encoder, belief propagation and the gradients are judged.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "pixie/graph.hpp"
#include "pixie/lexical_model.hpp"
#include "pixie/world_model.hpp"

namespace pixie {

// P(s | g) proportional to exp(-E(s)) times P(r_X | x_X) over observed
// nodes, with generation normalised over the full vocabulary. MASKED nodes
// are marginalised.
SituationDistribution exact_posterior(const DependencyGraph& graph, const WorldModel& wm,
                                      const LexicalModel& lex,
                                      std::size_t budget = kDefaultEnumerationBudget);

// log P(g) = log sum_s P(s) prod_X P(r_X | x_X).
double exact_log_likelihood(const DependencyGraph& graph, const WorldModel& wm,
                            const LexicalModel& lex,
                            std::size_t budget = kDefaultEnumerationBudget);

// KL(Q || P(. | g)) where Q is the independent Bernoulli distribution given
// by `mf`, conditioned on exactly C active units per node. Entries of q are
// clamped to [1e-12, 1 - 1e-12].
double exact_kl(const MeanFieldSituation& mf, const DependencyGraph& graph, const WorldModel& wm,
                const LexicalModel& lex, std::size_t budget = kDefaultEnumerationBudget);

// Log-probability of each of the C-subsets of one node under the
// conditioned Bernoulli distribution, in enumerate_pixies order.
std::vector<double> conditioned_log_probs(const Eigen::VectorXd& q, std::size_t cardinality);

// Per-label sums over edges of E[x(source) x(target)^T] under `dist`.
std::vector<Eigen::MatrixXd> exact_energy_stats(const SituationDistribution& dist,
                                                const GraphTopology& topology,
                                                std::size_t label_count);

// d log P(g) / d w(l): exact posterior statistics minus exact prior ones.
std::vector<Eigen::MatrixXd> exact_world_gradient(const DependencyGraph& graph,
                                                  const WorldModel& wm, const LexicalModel& lex,
                                                  std::size_t budget = kDefaultEnumerationBudget);

}  // namespace pixie
