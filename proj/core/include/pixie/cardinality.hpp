#pragma once

// Sum-product over a cardinality factor. For independent log-potentials
// theta over D binary units constrained to exactly C active,
//
//     P(x) ∝ exp(theta . x) [sum(x) = C]
//
// the normaliser and per-unit marginals are computed by a counting-chain
// dynamic programme in O(D C), entirely in the log domain.

#include <cstddef>

#include <Eigen/Core>

namespace pixie {

// log of sum over C-subsets S of exp(sum_{i in S} theta_i); -inf if C > D.
double cardinality_log_partition(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 std::size_t cardinality);

// P(unit i active). Sums to C up to rounding; exactly C/D when theta is flat.
Eigen::VectorXd cardinality_marginals(const Eigen::Ref<const Eigen::VectorXd>& theta,
                                      std::size_t cardinality);

}  // namespace pixie
