#include "pixie/model.hpp"

#include <string>

#include "pixie/errors.hpp"

namespace pixie {

namespace {

void sparse_gaussian(Eigen::Ref<Eigen::MatrixXd> m, double scale, double density,
                     std::mt19937_64& rng)
{
    std::bernoulli_distribution keep(density);
    std::normal_distribution<double> normal(0.0, scale);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const bool nonzero = keep(rng);
            const double value = normal(rng);
            m(i, j) = nonzero ? value : 0.0;
        }
}

}  // namespace

void ModelStack::validate() const
{
    world.validate();
    lexical.validate();
    encoder.validate(world.dim);
    const auto preds = vocabulary.predicate_count();
    const auto labels = vocabulary.label_count();
    if (world.label_count() != labels)
        throw ShapeError("world model has " + std::to_string(world.label_count())
                         + " label matrices, vocabulary has " + std::to_string(labels)
                         + " labels");
    if (lexical.predicate_count() != preds || lexical.dim() != world.dim)
        throw ShapeError("lexical model shape disagrees with vocabulary or D");
    if (encoder.predicate_count() != preds || encoder.label_count() != labels)
        throw ShapeError("encoder shape disagrees with vocabulary");
}

ModelStack initialise_model(Vocabulary vocabulary, const ModelShape& shape,
                            const InitConfig& init, std::mt19937_64& rng)
{
    if (shape.cardinality < 1 || shape.cardinality > shape.dim)
        throw ShapeError("model shape needs 1 <= C <= D");
    ModelStack stack;
    const auto preds = vocabulary.predicate_count();
    const auto labels = vocabulary.label_count();
    stack.vocabulary = std::move(vocabulary);

    stack.world = WorldModel::zeros(shape.dim, shape.cardinality, labels);
    for (auto& w : stack.world.weights)
        sparse_gaussian(w, init.world_scale, init.world_density, rng);

    stack.lexical = LexicalModel::zeros(preds, shape.dim, shape.use_bias);
    sparse_gaussian(stack.lexical.weights, init.lexical_scale, init.lexical_density, rng);

    stack.encoder = EncoderParams::random(preds, labels, shape.h0(), shape.h1(), shape.dim,
                                          init.encoder_stddev, rng);
    return stack;
}

}  // namespace pixie
