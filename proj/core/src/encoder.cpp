#include "pixie/encoder.hpp"

#include <cmath>
#include <string>

#include "pixie/errors.hpp"
#include "pixie/numeric.hpp"

namespace pixie {

namespace {

Eigen::MatrixXd gaussian(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, stddev);
    Eigen::MatrixXd m(rows, cols);
    // Column-major fill keeps the draw order tied to storage order.
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = normal(rng);
    return m;
}

ConvLayer random_layer(std::size_t in, std::size_t out, std::size_t labels, double stddev,
                       std::mt19937_64& rng)
{
    ConvLayer layer;
    layer.self = gaussian(out, in, stddev, rng);
    for (std::size_t l = 0; l < labels; ++l)
        layer.head.push_back(gaussian(out, in, stddev, rng));
    for (std::size_t l = 0; l < labels; ++l)
        layer.inverse.push_back(gaussian(out, in, stddev, rng));
    layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
    return layer;
}

void check_layer(const ConvLayer& layer, std::size_t in, std::size_t labels, const char* name)
{
    const auto fail = [&](const std::string& what) {
        throw ShapeError(std::string("encoder ") + name + ": " + what);
    };
    const auto out = layer.out_size();
    if (layer.in_size() != in)
        fail("input size mismatch");
    if (layer.head.size() != labels || layer.inverse.size() != labels)
        fail("one matrix per label and direction required");
    for (const auto* group : {&layer.head, &layer.inverse})
        for (const auto& w : *group)
            if (static_cast<std::size_t>(w.rows()) != out || static_cast<std::size_t>(w.cols()) != in)
                fail("label matrix shape mismatch");
    if (static_cast<std::size_t>(layer.bias.size()) != out)
        fail("bias size mismatch");
}

}  // namespace

ConvLayer ConvLayer::zeros(std::size_t in, std::size_t out, std::size_t labels)
{
    ConvLayer layer;
    layer.self = Eigen::MatrixXd::Zero(out, in);
    layer.head.assign(labels, Eigen::MatrixXd::Zero(out, in));
    layer.inverse.assign(labels, Eigen::MatrixXd::Zero(out, in));
    layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
    return layer;
}

EncoderParams EncoderParams::zeros(std::size_t predicates, std::size_t labels, std::size_t h0,
                                   std::size_t h1, std::size_t dim)
{
    EncoderParams p;
    p.embeddings = Eigen::MatrixXd::Zero(h0, predicates);
    p.drop = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h0));
    p.drop_head = Eigen::MatrixXd::Zero(h0, labels);
    p.drop_inverse = Eigen::MatrixXd::Zero(h0, labels);
    p.layer1 = ConvLayer::zeros(h0, h1, labels);
    p.layer2 = ConvLayer::zeros(h1, dim, labels);
    return p;
}

EncoderParams EncoderParams::random(std::size_t predicates, std::size_t labels, std::size_t h0,
                                    std::size_t h1, std::size_t dim, double stddev,
                                    std::mt19937_64& rng)
{
    EncoderParams p;
    p.embeddings = gaussian(h0, predicates, stddev, rng);
    p.drop = gaussian(h0, 1, stddev, rng).col(0);
    p.drop_head = gaussian(h0, labels, stddev, rng);
    p.drop_inverse = gaussian(h0, labels, stddev, rng);
    p.layer1 = random_layer(h0, h1, labels, stddev, rng);
    p.layer2 = random_layer(h1, dim, labels, stddev, rng);
    return p;
}

void EncoderParams::validate(std::size_t dim) const
{
    const auto h0 = static_cast<std::size_t>(embeddings.rows());
    const auto labels = label_count();
    if (static_cast<std::size_t>(drop.size()) != h0
        || static_cast<std::size_t>(drop_head.rows()) != h0
        || static_cast<std::size_t>(drop_inverse.rows()) != h0
        || static_cast<std::size_t>(drop_inverse.cols()) != labels)
        throw ShapeError("encoder embeddings disagree on H0 or label count");
    check_layer(layer1, h0, labels, "layer 1");
    check_layer(layer2, layer1.out_size(), labels, "layer 2");
    if (layer2.out_size() != dim)
        throw ShapeError("encoder output size " + std::to_string(layer2.out_size())
                         + " differs from D = " + std::to_string(dim));
}

Eigen::VectorXd embed_node(const DependencyGraph& graph, NodeId node, const EncoderParams& params)
{
    if (node >= graph.node_count())
        throw std::out_of_range("node outside graph");
    if (const auto& p = graph.nodes[node]) {
        if (*p >= params.predicate_count())
            throw ShapeError("predicate id outside encoder embeddings");
        return params.embeddings.col(*p);
    }
    Eigen::VectorXd e = params.drop;
    for (const auto& edge : graph.edges) {
        if (edge.source == node)
            e += params.drop_head.col(edge.label);
        if (edge.target == node)
            e += params.drop_inverse.col(edge.label);
    }
    return e;
}

NodeVectors conv_layer(const ConvLayer& layer, const NodeVectors& inputs,
                       const GraphTopology& topology, Activation activation)
{
    if (inputs.size() != topology.node_count)
        throw ShapeError("one input vector per node required");
    for (const auto& h : inputs)
        if (static_cast<std::size_t>(h.size()) != layer.in_size())
            throw ShapeError("conv layer input size mismatch");

    NodeVectors pre;
    pre.reserve(inputs.size());
    for (const auto& h : inputs)
        pre.push_back(layer.self * h + layer.bias);
    for (const auto& e : topology.edges) {
        if (e.label >= layer.head.size())
            throw ShapeError("edge label outside encoder label range");
        pre[e.source].noalias() += layer.head[e.label] * inputs[e.target];
        pre[e.target].noalias() += layer.inverse[e.label] * inputs[e.source];
    }
    for (auto& a : pre) {
        if (activation == Activation::Tanh)
            a = a.array().tanh().matrix();
        else
            a = a.unaryExpr([](double x) { return sigmoid(x); });
    }
    return pre;
}

Eigen::VectorXd normalise_cardinality(const Eigen::VectorXd& q, std::size_t cardinality)
{
    const double total = q.sum();
    const double c = static_cast<double>(cardinality);
    if (total > c)
        return q * (c / total);
    return q;
}

EncoderTape encode_with_tape(const DependencyGraph& graph, const EncoderParams& params,
                             std::size_t cardinality)
{
    EncoderTape tape;
    tape.topology = topology_of(graph);
    tape.nodes = graph.nodes;
    tape.cardinality = cardinality;
    tape.input.reserve(graph.node_count());
    for (NodeId n = 0; n < graph.node_count(); ++n)
        tape.input.push_back(embed_node(graph, n, params));
    tape.hidden = conv_layer(params.layer1, tape.input, tape.topology, Activation::Tanh);
    tape.squashed = conv_layer(params.layer2, tape.hidden, tape.topology, Activation::Sigmoid);
    tape.output.q.reserve(graph.node_count());
    for (const auto& s : tape.squashed)
        tape.output.q.push_back(normalise_cardinality(s, cardinality));
    return tape;
}

MeanFieldSituation encode(const DependencyGraph& graph, const EncoderParams& params,
                          std::size_t cardinality)
{
    return encode_with_tape(graph, params, cardinality).output;
}

namespace {

// Accumulates layer gradients; returns dL/d(inputs).
NodeVectors conv_backward(const ConvLayer& layer, const NodeVectors& inputs,
                          const NodeVectors& outputs, const NodeVectors& d_outputs,
                          const GraphTopology& topology, Activation activation, ConvLayer& grad)
{
    NodeVectors d_pre;
    d_pre.reserve(outputs.size());
    for (std::size_t n = 0; n < outputs.size(); ++n) {
        const auto& y = outputs[n].array();
        if (activation == Activation::Tanh)
            d_pre.push_back((d_outputs[n].array() * (1.0 - y.square())).matrix());
        else
            d_pre.push_back((d_outputs[n].array() * y * (1.0 - y)).matrix());
    }

    NodeVectors d_inputs;
    d_inputs.reserve(inputs.size());
    for (std::size_t n = 0; n < inputs.size(); ++n) {
        grad.self.noalias() += d_pre[n] * inputs[n].transpose();
        grad.bias += d_pre[n];
        d_inputs.push_back(layer.self.transpose() * d_pre[n]);
    }
    for (const auto& e : topology.edges) {
        grad.head[e.label].noalias() += d_pre[e.source] * inputs[e.target].transpose();
        d_inputs[e.target].noalias() += layer.head[e.label].transpose() * d_pre[e.source];
        grad.inverse[e.label].noalias() += d_pre[e.target] * inputs[e.source].transpose();
        d_inputs[e.source].noalias() += layer.inverse[e.label].transpose() * d_pre[e.target];
    }
    return d_inputs;
}

}  // namespace

EncoderParams encode_backward(const EncoderTape& tape, const EncoderParams& params,
                              const std::vector<Eigen::VectorXd>& d_output)
{
    if (d_output.size() != tape.output.node_count())
        throw ShapeError("one output gradient per node required");

    auto grad = EncoderParams::zeros(params.predicate_count(), params.label_count(),
                                     static_cast<std::size_t>(params.embeddings.rows()),
                                     params.layer1.out_size(), params.layer2.out_size());

    // Through the cardinality normalisation.
    NodeVectors d_squashed;
    d_squashed.reserve(d_output.size());
    const double c = static_cast<double>(tape.cardinality);
    for (std::size_t n = 0; n < d_output.size(); ++n) {
        const auto& s = tape.squashed[n];
        const double total = s.sum();
        if (total > c) {
            const double ratio = c / total;
            d_squashed.push_back(ratio
                                 * (d_output[n].array() - d_output[n].dot(s) / total).matrix());
        } else {
            d_squashed.push_back(d_output[n]);
        }
    }

    const auto d_hidden = conv_backward(params.layer2, tape.hidden, tape.squashed, d_squashed,
                                        tape.topology, Activation::Sigmoid, grad.layer2);
    const auto d_input = conv_backward(params.layer1, tape.input, tape.hidden, d_hidden,
                                       tape.topology, Activation::Tanh, grad.layer1);

    for (std::size_t n = 0; n < tape.nodes.size(); ++n) {
        if (const auto& p = tape.nodes[n]) {
            grad.embeddings.col(*p) += d_input[n];
            continue;
        }
        grad.drop += d_input[n];
        for (const auto& e : tape.topology.edges) {
            if (e.source == n)
                grad.drop_head.col(e.label) += d_input[n];
            if (e.target == n)
                grad.drop_inverse.col(e.label) += d_input[n];
        }
    }
    return grad;
}

}  // namespace pixie
