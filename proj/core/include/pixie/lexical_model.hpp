#pragma once

// Semantic functions: one logistic classifier per predicate,
//
//     t_r(x) = sigmoid(v_r . x + b_r),
//
// and the generation distribution P(r | x) = t_r(x) / sum_r' t_r'(x).
// Under a mean-field pixie the expectation of t_r is approximated by the
// probit rescaling sigmoid(E[a] / sqrt(1 + pi/8 Var[a])).

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pixie/graph.hpp"
#include "pixie/world_model.hpp"

namespace pixie {

inline constexpr double kTruthFloor = 1e-12;
inline constexpr std::size_t kMaxExactTruthDim = 20;

struct LexicalModel {
    Eigen::MatrixXd weights;  // predicates x D; row r is v_r
    Eigen::VectorXd bias;     // per predicate; ignored unless use_bias
    bool use_bias = false;

    static LexicalModel zeros(std::size_t predicates, std::size_t dim, bool use_bias = false);

    std::size_t predicate_count() const { return static_cast<std::size_t>(weights.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(weights.cols()); }
    double bias_of(PredicateId r) const { return use_bias ? bias[r] : 0.0; }

    void validate() const;
};

// Truth probability of an exact pixie, strictly inside (0, 1).
double truth_prob(const Pixie& x, PredicateId r, const LexicalModel& lex);

double expected_truth(const Eigen::VectorXd& q, PredicateId r, const LexicalModel& lex);

// Probit value plus its partial derivatives. All derivatives are zero when
// the value sits on the numerical floor.
struct ExpectedTruthGrad {
    double value = 0.0;
    Eigen::VectorXd d_q;  // d value / d q
    Eigen::VectorXd d_v;  // d value / d v_r
    double d_b = 0.0;     // d value / d b_r (zero without bias)
};
ExpectedTruthGrad expected_truth_grad(const Eigen::VectorXd& q, PredicateId r,
                                      const LexicalModel& lex);

// Brute-force expectation over all 2^D binary vectors; D <= 20.
double exact_expected_truth(const Eigen::VectorXd& q, PredicateId r, const LexicalModel& lex);

// P(r) = t_r / sum t over the candidates.
std::vector<double> predicate_distribution(const Pixie& x, std::span<const PredicateId> candidates,
                                           const LexicalModel& lex);
std::vector<double> predicate_distribution(const Eigen::VectorXd& q,
                                           std::span<const PredicateId> candidates,
                                           const LexicalModel& lex);

// log P(r | x) normalised over the whole vocabulary, exact pixie.
double generation_log_prob(const Pixie& x, PredicateId r, const LexicalModel& lex);

// log[t(r) / (t(r) + sum_{s in samples} t(s))] with expected truths; <= 0.
// `samples` must be distinct and exclude r (see distinct_negatives).
double sampled_log_gen_prob(const Eigen::VectorXd& q, PredicateId r,
                            std::span<const PredicateId> samples, const LexicalModel& lex);

// Deduplicates raw draws (first occurrence order) and drops `observed`.
std::vector<PredicateId> distinct_negatives(std::span<const PredicateId> draws,
                                            PredicateId observed);

}  // namespace pixie
