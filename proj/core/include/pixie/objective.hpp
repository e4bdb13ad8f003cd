#pragma once

// Training objectives and their analytic gradients.
//
// Encoder (minimised; the KL divergence to the posterior up to a constant):
//
//   L = E(q) - beta * sum_{observed X} [ log t(r_X) / (t(r_X) + sum_{s in S_X} t(s))
//                                        + alpha * log t(r_X) ] - H(q)
//
// with t the probit-approximated expected truth at q(X) and H the entropy of
// the independent Bernoulli units. Nodes that are MASKED in the target graph
// contribute only through energy and entropy.
//
// Generative model (ascended): the world gradient is the difference of
// energy statistics between the posterior and the refined prior mean-field
// situations; the lexical gradient is that of the bracketed generation and
// truth terms above, with q held fixed.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pixie/encoder.hpp"
#include "pixie/graph.hpp"
#include "pixie/lexical_model.hpp"
#include "pixie/world_model.hpp"

namespace pixie {

struct ObjectiveWeights {
    double beta = 5.0;   // generation-term upweighting
    double alpha = 1.0;  // weight of the truth term
};

// Negative samples per node; each list is distinct and excludes that node's
// observed predicate. Entries for MASKED nodes are ignored.
using NodeSamples = std::vector<std::vector<PredicateId>>;

// Weighted terms of L; `total` is their sum.
struct ObjectiveBreakdown {
    double energy = 0.0;      // E(q)
    double generation = 0.0;  // -beta * sum of sampled log generation probabilities
    double truth = 0.0;       // -beta * alpha * sum of log t(r_X)
    double entropy = 0.0;     // -H(q)
    double total = 0.0;
};

// H = -sum over units of q log q + (1-q) log(1-q), with 0 log 0 = 0.
double entropy(const MeanFieldSituation& mf);

// `targets` supplies the observed predicates; `mf` is the encoder output,
// normally for a masked copy of `targets`.
ObjectiveBreakdown encoder_objective(const DependencyGraph& targets, const MeanFieldSituation& mf,
                                     const WorldModel& wm, const LexicalModel& lex,
                                     const NodeSamples& samples, const ObjectiveWeights& weights);

// dL/dq per node for fixed (w, v).
std::vector<Eigen::VectorXd> objective_grad_q(const DependencyGraph& targets,
                                              const MeanFieldSituation& mf, const WorldModel& wm,
                                              const LexicalModel& lex, const NodeSamples& samples,
                                              const ObjectiveWeights& weights);

struct EncoderGradient {
    ObjectiveBreakdown objective;
    MeanFieldSituation output;
    EncoderParams grad;
};

// Encodes `input` (the possibly masked graph), evaluates L against `targets`
// and back-propagates to every encoder parameter.
EncoderGradient grad_encoder(const DependencyGraph& targets, const DependencyGraph& input,
                             const WorldModel& wm, const LexicalModel& lex,
                             const EncoderParams& params, const NodeSamples& samples,
                             const ObjectiveWeights& weights);

// Log-likelihood ascent direction for the world weights:
// energy_stats(posterior) - energy_stats(refined prior).
std::vector<Eigen::MatrixXd> grad_world(const MeanFieldSituation& posterior,
                                        const MeanFieldSituation& refined_prior,
                                        const GraphTopology& topology, std::size_t label_count);

// The generation and truth terms as a function of the lexical model alone.
double lexical_objective(const DependencyGraph& targets, const MeanFieldSituation& posterior,
                         const NodeSamples& samples, const LexicalModel& lex,
                         const ObjectiveWeights& weights);

// Gradient of lexical_objective with respect to every v_r (and b_r); rows
// of predicates that were neither observed nor sampled stay zero.
LexicalModel grad_lexical(const DependencyGraph& targets, const MeanFieldSituation& posterior,
                          const NodeSamples& samples, const LexicalModel& lex,
                          const ObjectiveWeights& weights);

}  // namespace pixie
