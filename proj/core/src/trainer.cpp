#include "pixie/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "pixie/errors.hpp"

namespace pixie {

namespace {

void require(bool ok, const char* field, const char* rule)
{
    if (!ok)
        throw std::invalid_argument(std::string("train config: ") + field + " " + rule);
}

void check_group(const GroupRates& g, const char* lr_name, const char* l2_name)
{
    require(std::isfinite(g.learning_rate) && g.learning_rate >= 0.0, lr_name,
            "must be finite and >= 0");
    require(std::isfinite(g.l2) && g.l2 >= 0.0, l2_name, "must be finite and >= 0");
}

std::vector<double> frequencies(const Vocabulary& vocab)
{
    std::vector<double> w;
    w.reserve(vocab.predicate_count());
    for (const auto& p : vocab.predicates())
        w.push_back(static_cast<double>(p.frequency));
    return w;
}

void accumulate(const TensorViews& dst, const ConstTensorViews& src, double scale)
{
    for (std::size_t k = 0; k < dst.size(); ++k)
        for (std::size_t i = 0; i < dst[k].size(); ++i)
            dst[k][i] += scale * src[k][i];
}

NodeSamples draw_samples(const DependencyGraph& g, const NegativeSampler& sampler, std::size_t n,
                         std::mt19937_64& rng)
{
    NodeSamples samples(g.node_count());
    for (NodeId i = 0; i < g.node_count(); ++i) {
        if (!g.nodes[i])
            continue;
        const auto draws = sampler.draw(n, rng);
        samples[i] = distinct_negatives(draws, *g.nodes[i]);
    }
    return samples;
}

}  // namespace

void TrainConfig::validate() const
{
    check_group(world, "world.learning_rate", "world.l2");
    check_group(lexical, "lexical.learning_rate", "lexical.l2");
    check_group(encoder, "encoder.learning_rate", "encoder.l2");
    require(std::isfinite(beta) && beta >= 0.0, "beta", "must be finite and >= 0");
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha", "must be finite and >= 0");
    require(dropout_rate >= 0.0 && dropout_rate <= 1.0, "dropout_rate", "must lie in [0, 1]");
    require(bp_damping >= 0.0 && bp_damping < 1.0, "bp_damping", "must lie in [0, 1)");
    require(batch_size >= 1, "batch_size", "must be >= 1");
    require(enumeration_budget >= 1, "enumeration_budget", "must be >= 1");
}

nlohmann::json EpochMetrics::to_json(bool include_time) const
{
    nlohmann::json j = {
        {"epoch", epoch},
        {"graphs", graphs},
        {"batches", batches},
        {"objective", objective},
        {"terms",
         {{"energy", energy}, {"generation", generation}, {"truth", truth}, {"entropy", entropy}}},
        {"grad_norm",
         {{"world", grad_norm_world}, {"lexical", grad_norm_lexical}, {"encoder", grad_norm_encoder}}},
    };
    if (include_time)
        j["wall_seconds"] = wall_seconds;
    return j;
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, bool uniform)
    : size_(vocab.predicate_count()), uniform_(uniform)
{
    if (!uniform_) {
        const auto w = frequencies(vocab);
        if (std::accumulate(w.begin(), w.end(), 0.0) > 0.0)
            weighted_ = std::discrete_distribution<PredicateId>(w.begin(), w.end());
        else
            uniform_ = true;
    }
}

std::vector<PredicateId> NegativeSampler::draw(std::size_t n, std::mt19937_64& rng) const
{
    std::vector<PredicateId> out;
    if (n == 0)
        return out;
    if (size_ == 0)
        throw std::invalid_argument("cannot sample from an empty vocabulary");
    out.reserve(n);
    if (uniform_) {
        std::uniform_int_distribution<PredicateId> pick(0, static_cast<PredicateId>(size_ - 1));
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(pick(rng));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(weighted_(rng));
    }
    return out;
}

std::vector<PredicateId> negative_sample(const Vocabulary& vocab, std::size_t n,
                                         std::mt19937_64& rng, bool uniform)
{
    return NegativeSampler(vocab, uniform).draw(n, rng);
}

std::mt19937_64 epoch_rng(std::uint64_t seed, std::size_t epoch)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(epoch) >> 32)};
    return std::mt19937_64(seq);
}

EpochMetrics train_epoch(std::span<const DependencyGraph> graphs, ModelStack& model,
                         OptimiserStates& states, const TrainConfig& config, std::mt19937_64& rng)
{
    config.validate();
    model.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto weights = config.objective_weights();
    const auto bp = config.bp_options();
    const auto C = model.cardinality();
    const auto labels = model.vocabulary.label_count();
    const NegativeSampler sampler(model.vocabulary, config.uniform_negatives);

    for (const auto& g : graphs)
        validate(g, model.vocabulary);

    std::vector<std::size_t> order(graphs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    EpochMetrics m;
    m.graphs = graphs.size();
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
        const auto end = std::min(order.size(), begin + config.batch_size);
        const double scale = 1.0 / static_cast<double>(end - begin);

        auto enc_grad = EncoderParams::zeros(model.encoder.predicate_count(), labels,
                                             model.encoder.layer1.in_size(),
                                             model.encoder.layer1.out_size(), model.dim());
        auto world_grad = WorldModel::zeros(model.dim(), C, labels);
        auto lex_grad = LexicalModel::zeros(model.lexical.predicate_count(), model.dim(),
                                            model.lexical.use_bias);

        for (std::size_t k = begin; k < end; ++k) {
            const auto& g = graphs[order[k]];
            const auto masked = apply_mask(g, config.dropout_rate, rng);
            const auto samples = draw_samples(g, sampler, config.negatives, rng);

            const auto eg = grad_encoder(g, masked, model.world, model.lexical, model.encoder,
                                         samples, weights);
            accumulate(tensors(enc_grad), tensors(eg.grad), scale);

            const auto topo = topology_of(g);
            const auto posterior = encode(g, model.encoder, C);
            const auto prior = bp_refine(posterior, topo, model.world, bp);
            // Ascent directions, negated for the minimising optimiser.
            accumulate(tensors(world_grad.weights),
                       tensors(grad_world(posterior, prior, topo, labels)), -scale);
            accumulate(tensors(lex_grad),
                       tensors(grad_lexical(g, posterior, samples, model.lexical, weights)),
                       -scale);

            m.objective += eg.objective.total;
            m.energy += eg.objective.energy;
            m.generation += eg.objective.generation;
            m.truth += eg.objective.truth;
            m.entropy += eg.objective.entropy;
        }

        m.grad_norm_encoder += l2_norm(tensors(std::as_const(enc_grad)));
        m.grad_norm_world += l2_norm(tensors(std::as_const(world_grad)));
        m.grad_norm_lexical += l2_norm(tensors(std::as_const(lex_grad)));

        adam_step(model.encoder, enc_grad, states.encoder, config.encoder.learning_rate,
                  config.encoder.l2);
        adam_step(model.world, world_grad, states.world, config.world.learning_rate,
                  config.world.l2);
        adam_step(model.lexical, lex_grad, states.lexical, config.lexical.learning_rate,
                  config.lexical.l2);
        ++m.batches;
    }

    if (m.graphs > 0) {
        const auto n = static_cast<double>(m.graphs);
        m.objective /= n;
        m.energy /= n;
        m.generation /= n;
        m.truth /= n;
        m.entropy /= n;
    }
    if (m.batches > 0) {
        const auto b = static_cast<double>(m.batches);
        m.grad_norm_encoder /= b;
        m.grad_norm_world /= b;
        m.grad_norm_lexical /= b;
    }
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
}

}  // namespace pixie
