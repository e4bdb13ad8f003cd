#include "pixie/optimiser.hpp"

#include <cmath>

#include "pixie/errors.hpp"

namespace pixie {

namespace {

template <typename View, typename Dense>
void push(std::vector<View>& out, Dense& m)
{
    out.emplace_back(m.data(), static_cast<std::size_t>(m.size()));
}

template <typename View, typename Layer>
void push_layer(std::vector<View>& out, Layer& layer)
{
    push(out, layer.self);
    for (auto& w : layer.head)
        push(out, w);
    for (auto& w : layer.inverse)
        push(out, w);
    push(out, layer.bias);
}

template <typename View, typename Params>
std::vector<View> encoder_views(Params& p)
{
    std::vector<View> out;
    push(out, p.embeddings);
    push(out, p.drop);
    push(out, p.drop_head);
    push(out, p.drop_inverse);
    push_layer(out, p.layer1);
    push_layer(out, p.layer2);
    return out;
}

}  // namespace

TensorViews tensors(std::vector<Eigen::MatrixXd>& ms)
{
    TensorViews out;
    for (auto& m : ms)
        push(out, m);
    return out;
}

ConstTensorViews tensors(const std::vector<Eigen::MatrixXd>& ms)
{
    ConstTensorViews out;
    for (const auto& m : ms)
        push(out, m);
    return out;
}

TensorViews tensors(WorldModel& wm) { return tensors(wm.weights); }
ConstTensorViews tensors(const WorldModel& wm) { return tensors(wm.weights); }

TensorViews tensors(LexicalModel& lex)
{
    TensorViews out;
    push(out, lex.weights);
    push(out, lex.bias);
    return out;
}

ConstTensorViews tensors(const LexicalModel& lex)
{
    ConstTensorViews out;
    push(out, lex.weights);
    push(out, lex.bias);
    return out;
}

TensorViews tensors(EncoderParams& p) { return encoder_views<std::span<double>>(p); }
ConstTensorViews tensors(const EncoderParams& p) { return encoder_views<std::span<const double>>(p); }

double l2_norm(const ConstTensorViews& views)
{
    double s = 0.0;
    for (const auto& v : views)
        for (double x : v)
            s += x * x;
    return std::sqrt(s);
}

void adam_step(const TensorViews& params, const ConstTensorViews& grads, AdamState& state,
               double learning_rate, double l2, const AdamHyper& hyper)
{
    if (params.size() != grads.size())
        throw ShapeError("parameter and gradient tensor counts differ");
    for (std::size_t k = 0; k < params.size(); ++k)
        if (params[k].size() != grads[k].size())
            throw ShapeError("parameter and gradient tensor sizes differ");

    if (state.step == 0 && state.first.empty()) {
        for (const auto& p : params) {
            state.first.emplace_back(p.size(), 0.0);
            state.second.emplace_back(p.size(), 0.0);
        }
    }
    if (state.first.size() != params.size())
        throw ShapeError("optimiser state does not match parameters");
    for (std::size_t k = 0; k < params.size(); ++k)
        if (state.first[k].size() != params[k].size() || state.second[k].size() != params[k].size())
            throw ShapeError("optimiser state does not match parameters");

    ++state.step;
    const auto t = static_cast<double>(state.step);
    const double correct1 = 1.0 - std::pow(hyper.beta1, t);
    const double correct2 = 1.0 - std::pow(hyper.beta2, t);

    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& m = state.first[k];
        auto& v = state.second[k];
        const auto p = params[k];
        const auto g = grads[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g[i] + l2 * p[i];
            m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * gi;
            v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * gi * gi;
            p[i] -= learning_rate * (m[i] / correct1) / (std::sqrt(v[i] / correct2) + hyper.epsilon);
        }
    }
}

}  // namespace pixie
