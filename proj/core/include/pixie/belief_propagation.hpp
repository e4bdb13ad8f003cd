#pragma once

#include <cstddef>

#include "pixie/world_model.hpp"

namespace pixie {

struct BpOptions {
    std::size_t iterations = 5;
    double damping = 0.5;  // weight on the previous message, in [0, 1)
};

inline constexpr double kBpClamp = 1e-6;

// Pulls a mean-field situation toward the CaRBM prior by damped synchronous
// loopy belief propagation.
//
// Each node carries its cardinality factor and unary evidence
// theta = logit(clamp(q)). For an edge x -l-> y the pairwise factors
// exp(w_ij x_i y_j) are summed out against the sender's whole pixie (its
// cavity distribution, cardinality included), giving one log-odds message
// per receiving unit:
//
//     m_j = log Z_C(eta + w(:, j)) - log Z_C(eta)
//
// where eta is the sender's unary plus all incoming messages except the one
// travelling back along this edge. The result holds each node's unit
// marginals under its cardinality factor with theta plus incoming messages.
// With zero iterations this is just the cardinality projection of q.
MeanFieldSituation bp_refine(const MeanFieldSituation& mf, const GraphTopology& topology,
                             const WorldModel& wm, const BpOptions& options = {});

// theta = logit(clamp(q, 1e-6, 1 - 1e-6)) per node.
std::vector<Eigen::VectorXd> unary_potentials(const MeanFieldSituation& mf);

}  // namespace pixie
