#pragma once

// Self-checks on randomised tiny models: analytic gradients against central
// finite differences, and every approximation against brute-force
// enumeration. A fault can be injected into one component to confirm the
// suites notice.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pixie/belief_propagation.hpp"
#include "pixie/model.hpp"
#include "pixie/objective.hpp"
#include "pixie/optimiser.hpp"

namespace pixie {

enum class Component {
    Encoder,
    World,
    WorldExact,
    Lexical,
    Probit,
    Cardinality,
    BeliefPropagation,
    Posterior,
    Divergence,
    Likelihood,
};

std::string_view to_string(Component c);
std::optional<Component> component_from_string(std::string_view name);

struct CheckResult {
    Component component = Component::Encoder;
    bool passed = false;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst = 0.0;      // largest error seen, or the pass fraction for ratio checks
    double tolerance = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    std::vector<std::string> failing() const;
    nlohmann::json to_json() const;
};

struct TinySpec {
    std::size_t min_dim = 3;
    std::size_t max_dim = 6;
    std::size_t cardinality = 2;
    std::size_t max_nodes = 3;
    std::size_t min_vocab = 2;
    std::size_t max_vocab = 8;
    double world_scale = 0.5;
    double lexical_scale = 1.0;
    double encoder_scale = 0.5;
    double mask_rate = 0.3;
};

// A random model with a random graph, its masked copy and full-vocabulary
// negative samples. Labels are ARG1 and ARG2.
struct TinyInstance {
    DependencyGraph graph;
    DependencyGraph input;
    ModelStack model;
    NodeSamples samples;
    ObjectiveWeights weights;
};

TinyInstance random_tiny_instance(std::mt19937_64& rng, const TinySpec& spec = {});

// A random tree over `nodes` nodes with every predicate observed.
DependencyGraph random_graph(std::size_t nodes, std::size_t vocab_size, std::size_t label_count,
                             std::mt19937_64& rng);

// Every predicate other than the observed one, for each observed node.
NodeSamples full_vocabulary_samples(const DependencyGraph& graph, std::size_t vocab_size);

// Central differences of `f` with respect to every entry of `params`. Each
// entry is restored after use; the quotient divides by the step actually
// representable around the entry.
std::vector<std::vector<double>> finite_differences(const TensorViews& params,
                                                    const std::function<long double()>& f,
                                                    double step);

// The encoder objective of `instance` recomputed independently in long
// double from the current parameter values.
long double reference_encoder_objective(const TinyInstance& instance);

struct GradientComparison {
    double max_relative_error = 0.0;
    std::size_t entries = 0;
    double analytic = 0.0;  // at the worst entry
    double numeric = 0.0;
};

// Relative error |a - n| / max(|a|, |n|, floor), maximised over entries.
GradientComparison compare_gradients(const ConstTensorViews& analytic,
                                     const std::vector<std::vector<double>>& numeric,
                                     double floor);

struct GradcheckOptions {
    std::size_t instances = 50;
    double step = 1e-5;
    double tolerance = 1e-4;
    double floor = 1e-8;
    TinySpec spec;
    std::optional<Component> fault;
};

VerificationReport run_gradcheck(std::uint64_t seed, const GradcheckOptions& options = {});

struct OracleCheckOptions {
    std::size_t probit_trials = 1000;
    double probit_tolerance = 0.05;
    double probit_max_variance = 4.0;
    std::size_t cardinality_trials = 100;
    double cardinality_tolerance = 1e-10;
    std::size_t bp_trials = 20;
    std::size_t bp_iterations = 20;
    double bp_tolerance = 1e-6;
    std::size_t posterior_trials = 20;
    std::size_t divergence_trials = 20;
    std::size_t likelihood_trials = 50;
    std::size_t likelihood_required = 45;
    double likelihood_step = 1e-3;
    std::optional<Component> fault;
};

VerificationReport run_oracle_check(std::uint64_t seed, const OracleCheckOptions& options = {});

// The likelihood-ascent trial used by the oracle suite: steps (w, v) along
// (grad_world, grad_lexical) with the exact posterior marginals as the
// mean-field posterior and reports the change in exact log-likelihood.
double likelihood_ascent_gain(const TinyInstance& instance, double step,
                              const BpOptions& bp = {});

}  // namespace pixie
