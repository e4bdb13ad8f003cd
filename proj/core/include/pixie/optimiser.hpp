#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pixie/encoder.hpp"
#include "pixie/lexical_model.hpp"
#include "pixie/world_model.hpp"

namespace pixie {

// Flat views over every parameter tensor of a model, in a fixed order.
using TensorViews = std::vector<std::span<double>>;
using ConstTensorViews = std::vector<std::span<const double>>;

TensorViews tensors(std::vector<Eigen::MatrixXd>& ms);
ConstTensorViews tensors(const std::vector<Eigen::MatrixXd>& ms);
TensorViews tensors(WorldModel& wm);
ConstTensorViews tensors(const WorldModel& wm);
TensorViews tensors(LexicalModel& lex);
ConstTensorViews tensors(const LexicalModel& lex);
TensorViews tensors(EncoderParams& p);
ConstTensorViews tensors(const EncoderParams& p);

double l2_norm(const ConstTensorViews& views);

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;
    std::uint64_t step = 0;

    friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update; `l2 * param` is added to the gradient
// before the moments. Moments are allocated on the first step.
void adam_step(const TensorViews& params, const ConstTensorViews& grads, AdamState& state,
               double learning_rate, double l2, const AdamHyper& hyper = {});

template <typename Params, typename Grads>
void adam_step(Params& params, const Grads& grads, AdamState& state, double learning_rate,
               double l2, const AdamHyper& hyper = {})
{
    adam_step(tensors(params), tensors(grads), state, learning_rate, l2, hyper);
}

}  // namespace pixie
