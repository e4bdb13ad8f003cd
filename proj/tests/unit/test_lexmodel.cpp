#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "pixie/errors.hpp"
#include "pixie/lexical_model.hpp"

using namespace pixie;

namespace {

double sigmoid(double a)
{
    return 1.0 / (1.0 + std::exp(-a));
}

LexicalModel random_lexicon(std::size_t predicates, std::size_t dim, double scale,
                            std::mt19937_64& rng)
{
    auto lex = LexicalModel::zeros(predicates, dim);
    std::normal_distribution<double> n(0.0, scale);
    for (auto& x : lex.weights.reshaped())
        x = n(rng);
    return lex;
}

Eigen::VectorXd random_q(std::size_t dim, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd q(static_cast<Eigen::Index>(dim));
    for (auto& x : q)
        x = u(rng);
    return q;
}

}  // namespace

TEST_SUITE("lexmodel") {

TEST_CASE("truth of a zero classifier is one half")
{
    const auto lex = LexicalModel::zeros(2, 4);
    CHECK(truth_prob(Pixie{{0, 3}}, 1, lex) == 0.5);
    CHECK(expected_truth(Eigen::Vector4d(0.1, 0.9, 0.3, 0.7), 0, lex) == 0.5);
}

TEST_CASE("truth of log three is three quarters")
{
    auto lex = LexicalModel::zeros(1, 2);
    lex.weights.row(0) << std::log(3.0), 0.0;
    CHECK(truth_prob(Pixie{{0}}, 0, lex) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("truth is strictly monotone in active weights")
{
    std::mt19937_64 rng(1);
    auto lex = random_lexicon(1, 5, 1.0, rng);
    const Pixie x{{1, 4}};
    const double before = truth_prob(x, 0, lex);
    lex.weights(0, 4) += 0.1;
    CHECK(truth_prob(x, 0, lex) > before);
    const double raised = truth_prob(x, 0, lex);
    lex.weights(0, 2) += 5.0;
    CHECK(truth_prob(x, 0, lex) == raised);
}

TEST_CASE("truth uses the bias only when enabled")
{
    auto lex = LexicalModel::zeros(1, 2, true);
    lex.bias[0] = std::log(3.0);
    CHECK(truth_prob(Pixie{{0}}, 0, lex) == doctest::Approx(0.75).epsilon(1e-15));
    lex.use_bias = false;
    CHECK(truth_prob(Pixie{{0}}, 0, lex) == 0.5);
}

TEST_CASE("unknown predicates and mismatched shapes are errors")
{
    const auto lex = LexicalModel::zeros(2, 3);
    CHECK_THROWS_AS(truth_prob(Pixie{{0}}, 2, lex), std::out_of_range);
    CHECK_THROWS_AS(expected_truth(Eigen::Vector2d(0.5, 0.5), 0, lex), ShapeError);
    auto bad = lex;
    bad.weights(0, 0) = INFINITY;
    CHECK_THROWS_AS(bad.validate(), ShapeError);
}

TEST_CASE("probit on a single unit")
{
    auto lex = LexicalModel::zeros(1, 1);
    lex.weights(0, 0) = 2.0;
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(1, 0.5);

    const double approx = sigmoid(1.0 / std::sqrt(1.0 + std::numbers::pi / 8.0));
    CHECK(expected_truth(q, 0, lex) == doctest::Approx(approx).epsilon(1e-15));
    CHECK(expected_truth(q, 0, lex) == doctest::Approx(0.7000144407062076).epsilon(1e-12));
    CHECK(std::abs(expected_truth(q, 0, lex) - 0.7004) < 5e-4);

    const double exact = 0.5 * sigmoid(0.0) + 0.5 * sigmoid(2.0);
    CHECK(exact_expected_truth(q, 0, lex) == doctest::Approx(exact).epsilon(1e-15));
    CHECK(exact_expected_truth(q, 0, lex) == doctest::Approx(0.6903985389889411).epsilon(1e-12));
    CHECK(std::abs(expected_truth(q, 0, lex) - exact_expected_truth(q, 0, lex))
          == doctest::Approx(0.010).epsilon(0.02));
}

TEST_CASE("binary q has zero variance and reproduces truth_prob")
{
    std::mt19937_64 rng(4);
    const auto lex = random_lexicon(3, 6, 1.5, rng);
    for (const auto& x : enumerate_pixies(6, 2)) {
        const auto q = x.indicator(6);
        for (PredicateId r = 0; r < 3; ++r) {
            CHECK(expected_truth(q, r, lex) == doctest::Approx(truth_prob(x, r, lex)).epsilon(1e-14));
            CHECK(exact_expected_truth(q, r, lex)
                  == doctest::Approx(truth_prob(x, r, lex)).epsilon(1e-14));
        }
    }
}

TEST_CASE("exact expected truth is linear in each q")
{
    std::mt19937_64 rng(6);
    const auto lex = random_lexicon(1, 5, 1.0, rng);
    auto q = random_q(5, rng);
    const auto at = [&](double v) {
        q[2] = v;
        return exact_expected_truth(q, 0, lex);
    };
    const double lo = at(0.0);
    const double hi = at(1.0);
    CHECK(at(0.3) == doctest::Approx(0.7 * lo + 0.3 * hi).epsilon(1e-13));
}

TEST_CASE("probit stays within 0.05 of the exact expectation")
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> dims(1, 12);
    int checked = 0;
    while (checked < 300) {
        const auto d = dims(rng);
        const auto lex = random_lexicon(1, d, 1.0, rng);
        const auto q = random_q(d, rng);
        const Eigen::VectorXd v = lex.weights.row(0).transpose();
        const double var = (v.array().square() * q.array() * (1.0 - q.array())).sum();
        if (var > 4.0)
            continue;
        CHECK(std::abs(expected_truth(q, 0, lex) - exact_expected_truth(q, 0, lex)) <= 0.05);
        ++checked;
    }
}

TEST_CASE("exact expected truth has an enumeration limit")
{
    const auto lex = LexicalModel::zeros(1, 21);
    CHECK_THROWS_AS(exact_expected_truth(Eigen::VectorXd::Constant(21, 0.5), 0, lex),
                    BudgetExceeded);
}

TEST_CASE("predicate distribution examples")
{
    auto lex = LexicalModel::zeros(3, 1);
    const Pixie x{{0}};
    const std::vector<PredicateId> two{0, 1};
    const auto even = predicate_distribution(x, two, lex);
    CHECK(even[0] == 0.5);
    CHECK(even[1] == 0.5);

    // logits chosen so the truths are exactly 0.2, 0.3 and 0.5
    lex.weights(0, 0) = std::log(0.2 / 0.8);
    lex.weights(1, 0) = std::log(0.3 / 0.7);
    lex.weights(2, 0) = 0.0;
    const std::vector<PredicateId> all{0, 1, 2};
    const auto p = predicate_distribution(x, all, lex);
    CHECK(p[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(predicate_distribution(x, std::span<const PredicateId>{}, lex),
                    std::invalid_argument);
}

TEST_CASE("predicate distribution is a ratio of sigmoids rather than a softmax")
{
    auto lex = LexicalModel::zeros(2, 1);
    lex.weights(0, 0) = 1.0;
    lex.weights(1, 0) = -1.0;
    const Pixie x{{0}};
    const std::vector<PredicateId> both{0, 1};
    const auto before = predicate_distribution(x, both, lex);
    lex.weights.array() += 2.0;
    const auto after = predicate_distribution(x, both, lex);
    CHECK(std::abs(after[0] - before[0]) > 1e-3);
}

TEST_CASE("predicate distribution sums to one and permutes with its candidates")
{
    std::mt19937_64 rng(12);
    const auto lex = random_lexicon(6, 4, 2.0, rng);
    const auto q = random_q(4, rng);
    const std::vector<PredicateId> order{0, 1, 2, 3, 4, 5};
    const std::vector<PredicateId> shuffled{3, 5, 0, 2, 4, 1};
    const auto a = predicate_distribution(q, order, lex);
    const auto b = predicate_distribution(q, shuffled, lex);
    CHECK(std::abs(std::accumulate(a.begin(), a.end(), 0.0) - 1.0) < 1e-12);
    for (std::size_t i = 0; i < shuffled.size(); ++i)
        CHECK(b[i] == doctest::Approx(a[shuffled[i]]).epsilon(1e-14));
}

TEST_CASE("sampled generation probability")
{
    std::mt19937_64 rng(3);
    const auto lex = random_lexicon(5, 4, 1.0, rng);
    const auto q = random_q(4, rng);
    CHECK(sampled_log_gen_prob(q, 2, {}, lex) == 0.0);

    const auto flat = LexicalModel::zeros(2, 4);
    const std::vector<PredicateId> one{1};
    CHECK(sampled_log_gen_prob(q, 0, one, flat) == doctest::Approx(std::log(0.5)).epsilon(1e-15));

    const std::vector<PredicateId> rest{0, 1, 3, 4};
    const std::vector<PredicateId> all{0, 1, 2, 3, 4};
    const auto p = predicate_distribution(q, all, lex);
    CHECK(std::abs(sampled_log_gen_prob(q, 2, rest, lex) - std::log(p[2])) < 1e-12);
    CHECK(sampled_log_gen_prob(q, 2, rest, lex) <= 0.0);
}

TEST_CASE("generation log probability over the full vocabulary")
{
    std::mt19937_64 rng(8);
    const auto lex = random_lexicon(4, 5, 1.0, rng);
    const Pixie x{{1, 3}};
    double total = 0.0;
    for (PredicateId r = 0; r < 4; ++r)
        total += std::exp(generation_log_prob(x, r, lex));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distinct negatives drop duplicates and the observed predicate")
{
    const std::vector<PredicateId> draws{4, 2, 4, 7, 2, 1, 7};
    CHECK(distinct_negatives(draws, 7) == std::vector<PredicateId>{4, 2, 1});
    CHECK(distinct_negatives({}, 0).empty());
}

TEST_CASE("probit gradient matches central differences")
{
    std::mt19937_64 rng(15);
    auto lex = random_lexicon(2, 4, 1.0, rng);
    lex.use_bias = true;
    lex.bias = Eigen::Vector2d(0.3, -0.2);
    auto q = random_q(4, rng);
    const auto g = expected_truth_grad(q, 1, lex);
    CHECK(g.value == expected_truth(q, 1, lex));
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 4; ++i) {
        auto up = q;
        auto down = q;
        up[i] += h;
        down[i] -= h;
        const double fd = (expected_truth(up, 1, lex) - expected_truth(down, 1, lex)) / (2 * h);
        CHECK(g.d_q[i] == doctest::Approx(fd).epsilon(1e-6));
    }
    auto up = lex;
    auto down = lex;
    up.bias[1] += h;
    down.bias[1] -= h;
    const double fd_b = (expected_truth(q, 1, up) - expected_truth(q, 1, down)) / (2 * h);
    CHECK(g.d_b == doctest::Approx(fd_b).epsilon(1e-6));
}

}
