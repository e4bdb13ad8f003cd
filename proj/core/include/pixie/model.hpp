#pragma once

#include <cstddef>
#include <random>

#include "pixie/encoder.hpp"
#include "pixie/graph.hpp"
#include "pixie/lexical_model.hpp"
#include "pixie/world_model.hpp"

namespace pixie {

struct ModelShape {
    std::size_t dim = 200;
    std::size_t cardinality = 20;
    std::size_t hidden0 = 0;  // 0 means D
    std::size_t hidden1 = 0;  // 0 means D
    bool use_bias = false;

    std::size_t h0() const { return hidden0 == 0 ? dim : hidden0; }
    std::size_t h1() const { return hidden1 == 0 ? dim : hidden1; }
};

// Sparse Gaussian initialisation: each entry is nonzero with probability
// `density` and then drawn from N(0, scale^2).
struct InitConfig {
    double world_scale = 0.1;
    double world_density = 0.1;
    double lexical_scale = 0.1;
    double lexical_density = 0.1;
    double encoder_stddev = 0.1;
};

// Everything needed to encode, score and train.
struct ModelStack {
    Vocabulary vocabulary;
    WorldModel world;
    LexicalModel lexical;
    EncoderParams encoder;

    std::size_t dim() const { return world.dim; }
    std::size_t cardinality() const { return world.cardinality; }

    // Cross-checks every component against the vocabulary and D.
    void validate() const;
};

ModelStack initialise_model(Vocabulary vocabulary, const ModelShape& shape,
                            const InitConfig& init, std::mt19937_64& rng);

}  // namespace pixie
