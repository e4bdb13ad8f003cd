#pragma once

// Graph-convolutional inference network: dependency graph -> mean-field
// situation.
//
//   h0(X) = e(p)                              if X observes predicate p
//         = e_drop + sum_{X -l-> Y} e_drop(l)
//                  + sum_{Y -l-> X} e_drop(l^-1)   if X is MASKED
//   h1(X) = tanh(W1_self h0(X) + sum_{X -l-> Y} W1(l) h0(Y)
//                              + sum_{Y -l-> X} W1(l^-1) h0(Y) + b1)
//   s(X)  = sigmoid(same form, layer 2, over h1)
//   q(X)  = s(X) * C / sum(s(X))   if sum(s(X)) > C, else s(X)

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pixie/graph.hpp"
#include "pixie/world_model.hpp"

namespace pixie {

struct ConvLayer {
    Eigen::MatrixXd self;                 // out x in
    std::vector<Eigen::MatrixXd> head;    // per label: applied to dependents, W(l)
    std::vector<Eigen::MatrixXd> inverse; // per label: applied to heads, W(l^-1)
    Eigen::VectorXd bias;                 // out

    static ConvLayer zeros(std::size_t in, std::size_t out, std::size_t labels);

    std::size_t in_size() const { return static_cast<std::size_t>(self.cols()); }
    std::size_t out_size() const { return static_cast<std::size_t>(self.rows()); }
};

struct EncoderParams {
    Eigen::MatrixXd embeddings;      // H0 x predicates; column p is e(p)
    Eigen::VectorXd drop;            // H0
    Eigen::MatrixXd drop_head;       // H0 x labels; column l is e_drop(l)
    Eigen::MatrixXd drop_inverse;    // H0 x labels; column l is e_drop(l^-1)
    ConvLayer layer1;                // H0 -> H1
    ConvLayer layer2;                // H1 -> D

    static EncoderParams zeros(std::size_t predicates, std::size_t labels, std::size_t h0,
                               std::size_t h1, std::size_t dim);
    // Weights drawn from N(0, stddev^2), biases zero.
    static EncoderParams random(std::size_t predicates, std::size_t labels, std::size_t h0,
                                std::size_t h1, std::size_t dim, double stddev,
                                std::mt19937_64& rng);

    std::size_t predicate_count() const { return static_cast<std::size_t>(embeddings.cols()); }
    std::size_t label_count() const { return static_cast<std::size_t>(drop_head.cols()); }
    std::size_t output_dim() const { return layer2.out_size(); }

    // Throws ShapeError on any inconsistency, including output size != dim.
    void validate(std::size_t dim) const;
};

enum class Activation { Tanh, Sigmoid };

using NodeVectors = std::vector<Eigen::VectorXd>;

Eigen::VectorXd embed_node(const DependencyGraph& graph, NodeId node, const EncoderParams& params);

NodeVectors conv_layer(const ConvLayer& layer, const NodeVectors& inputs,
                       const GraphTopology& topology, Activation activation);

// Rescales q to sum to C when its sum exceeds C.
Eigen::VectorXd normalise_cardinality(const Eigen::VectorXd& q, std::size_t cardinality);

// Intermediate values kept for the backward pass.
struct EncoderTape {
    GraphTopology topology;
    std::vector<NodePredicate> nodes;
    std::size_t cardinality = 0;
    NodeVectors input;    // h0
    NodeVectors hidden;   // h1
    NodeVectors squashed; // s, before normalisation
    MeanFieldSituation output;
};

EncoderTape encode_with_tape(const DependencyGraph& graph, const EncoderParams& params,
                             std::size_t cardinality);
MeanFieldSituation encode(const DependencyGraph& graph, const EncoderParams& params,
                          std::size_t cardinality);

// Reverse-mode pass: given dL/dq per node, returns dL/dparams shaped like
// `params`.
EncoderParams encode_backward(const EncoderTape& tape, const EncoderParams& params,
                              const std::vector<Eigen::VectorXd>& d_output);

}  // namespace pixie
