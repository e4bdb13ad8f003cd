#include "pixie/lexical_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pixie/errors.hpp"
#include "pixie/numeric.hpp"

namespace pixie {

namespace {

constexpr double kProbitScale = std::numbers::pi / 8.0;

void check_predicate(PredicateId r, const LexicalModel& lex)
{
    if (r >= lex.predicate_count())
        throw std::out_of_range("unknown predicate id " + std::to_string(r));
}

void check_dim(const Eigen::VectorXd& q, const LexicalModel& lex)
{
    if (static_cast<std::size_t>(q.size()) != lex.dim())
        throw ShapeError("mean-field vector length differs from lexical model D");
}

double floor_truth(double t) { return std::clamp(t, kTruthFloor, 1.0 - kTruthFloor); }

}  // namespace

LexicalModel LexicalModel::zeros(std::size_t predicates, std::size_t dim, bool use_bias)
{
    LexicalModel lex;
    lex.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(predicates),
                                        static_cast<Eigen::Index>(dim));
    lex.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(predicates));
    lex.use_bias = use_bias;
    return lex;
}

void LexicalModel::validate() const
{
    if (bias.size() != weights.rows())
        throw ShapeError("lexical bias length differs from predicate count");
    if (!weights.allFinite() || !bias.allFinite())
        throw ShapeError("lexical model has non-finite entries");
}

double truth_prob(const Pixie& x, PredicateId r, const LexicalModel& lex)
{
    check_predicate(r, lex);
    // Same arithmetic as expected_truth on the indicator, so the two agree bitwise.
    const double a = lex.weights.row(r).dot(x.indicator(lex.dim()).transpose()) + lex.bias_of(r);
    return floor_truth(sigmoid(a));
}

double expected_truth(const Eigen::VectorXd& q, PredicateId r, const LexicalModel& lex)
{
    check_predicate(r, lex);
    check_dim(q, lex);
    const auto v = lex.weights.row(r).transpose();
    const double mean = v.dot(q) + lex.bias_of(r);
    const double var = (v.array().square() * q.array() * (1.0 - q.array())).sum();
    return floor_truth(sigmoid(mean / std::sqrt(1.0 + kProbitScale * var)));
}

ExpectedTruthGrad expected_truth_grad(const Eigen::VectorXd& q, PredicateId r,
                                      const LexicalModel& lex)
{
    check_predicate(r, lex);
    check_dim(q, lex);
    const Eigen::VectorXd v = lex.weights.row(r).transpose();
    const double mean = v.dot(q) + lex.bias_of(r);
    const Eigen::ArrayXd spread = q.array() * (1.0 - q.array());
    const double var = (v.array().square() * spread).sum();
    const double scale = 1.0 / std::sqrt(1.0 + kProbitScale * var);
    const double z = mean * scale;
    const double t = sigmoid(z);

    ExpectedTruthGrad g;
    g.value = floor_truth(t);
    g.d_q = Eigen::VectorXd::Zero(q.size());
    g.d_v = Eigen::VectorXd::Zero(q.size());
    if (g.value != t)
        return g;

    const double dt_dz = t * (1.0 - t);
    const double dz_dmean = scale;
    const double dz_dvar = -0.5 * kProbitScale * mean * scale * scale * scale;

    g.d_q = dt_dz
            * (dz_dmean * v.array()
               + dz_dvar * v.array().square() * (1.0 - 2.0 * q.array()))
                  .matrix();
    g.d_v = dt_dz * (dz_dmean * q.array() + dz_dvar * 2.0 * v.array() * spread).matrix();
    g.d_b = lex.use_bias ? dt_dz * dz_dmean : 0.0;
    return g;
}

double exact_expected_truth(const Eigen::VectorXd& q, PredicateId r, const LexicalModel& lex)
{
    check_predicate(r, lex);
    check_dim(q, lex);
    const auto dim = static_cast<std::size_t>(q.size());
    if (dim > kMaxExactTruthDim)
        throw BudgetExceeded("exact expected truth enumerates at most 2^20 configurations");

    const auto v = lex.weights.row(r);
    const double b = lex.bias_of(r);
    double total = 0.0;
    const std::size_t configs = std::size_t{1} << dim;
    for (std::size_t bits = 0; bits < configs; ++bits) {
        double weight = 1.0;
        double a = b;
        for (std::size_t i = 0; i < dim; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            if (bits >> i & 1U) {
                weight *= q[ii];
                a += v[ii];
            } else {
                weight *= 1.0 - q[ii];
            }
        }
        if (weight != 0.0)
            total += weight * sigmoid(a);
    }
    return total;
}

namespace {

std::vector<double> normalise(std::vector<double> t)
{
    double sum = 0.0;
    for (double x : t)
        sum += x;
    for (double& x : t)
        x /= sum;
    return t;
}

}  // namespace

std::vector<double> predicate_distribution(const Pixie& x, std::span<const PredicateId> candidates,
                                           const LexicalModel& lex)
{
    if (candidates.empty())
        throw std::invalid_argument("predicate distribution needs at least one candidate");
    std::vector<double> t;
    t.reserve(candidates.size());
    for (auto r : candidates)
        t.push_back(truth_prob(x, r, lex));
    return normalise(std::move(t));
}

std::vector<double> predicate_distribution(const Eigen::VectorXd& q,
                                           std::span<const PredicateId> candidates,
                                           const LexicalModel& lex)
{
    if (candidates.empty())
        throw std::invalid_argument("predicate distribution needs at least one candidate");
    std::vector<double> t;
    t.reserve(candidates.size());
    for (auto r : candidates)
        t.push_back(expected_truth(q, r, lex));
    return normalise(std::move(t));
}

double generation_log_prob(const Pixie& x, PredicateId r, const LexicalModel& lex)
{
    double total = 0.0;
    for (PredicateId s = 0; s < lex.predicate_count(); ++s)
        total += truth_prob(x, s, lex);
    return std::log(truth_prob(x, r, lex)) - std::log(total);
}

double sampled_log_gen_prob(const Eigen::VectorXd& q, PredicateId r,
                            std::span<const PredicateId> samples, const LexicalModel& lex)
{
    const double observed = expected_truth(q, r, lex);
    double total = observed;
    for (auto s : samples)
        total += expected_truth(q, s, lex);
    return std::min(0.0, std::log(observed) - std::log(total));
}

std::vector<PredicateId> distinct_negatives(std::span<const PredicateId> draws,
                                            PredicateId observed)
{
    std::vector<PredicateId> out;
    for (auto r : draws) {
        if (r == observed || std::find(out.begin(), out.end(), r) != out.end())
            continue;
        out.push_back(r);
    }
    return out;
}

}  // namespace pixie
