#pragma once

#include "ebgan/numerics.hpp"

#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

namespace ebgan {

enum class Activation { Relu, Sigmoid, Identity, Tanh };

std::string activation_name(Activation a);
Activation activation_from_name(std::string_view name);

/// Parameters of a fully connected network; also reused as the carrier for
/// parameter-shaped gradients and optimizer moments.
struct MlpParams {
    std::vector<std::size_t> layer_sizes;
    Activation hidden_activation = Activation::Relu;
    Activation output_activation = Activation::Sigmoid;
    std::vector<Matrix> weights;  // per layer, out x in
    std::vector<Matrix> biases;   // per layer, 1 x out

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t param_count() const;
    bool same_shape(const MlpParams& o) const;
};

/// Zero-valued parameters with the same shapes and activations.
MlpParams zeros_like(const MlpParams& p);

/// Visit the weight and bias tensors of one network in a fixed order.
template <typename P, typename F>
void for_each_tensor(P& p, F&& f) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        f(p.weights[l]);
        f(p.biases[l]);
    }
}

bool all_finite(const MlpParams& p);
double max_abs_diff(const MlpParams& a, const MlpParams& b);
double max_abs(const MlpParams& a);

/// Per-batch intermediate values kept for the backward pass.
struct ForwardCache {
    Matrix input;
    std::vector<Matrix> pre_activations;  // per layer, batch x out
    std::vector<Matrix> activations;      // per layer, batch x out
};

/// weights ~ N(0, init_std^2 / fan_in), biases zero.
MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes,
                   Activation hidden_activation, Activation output_activation,
                   double init_std, RngStream& stream);

std::pair<Matrix, ForwardCache> forward(const MlpParams& params, const Matrix& x);

/// Forward pass without keeping intermediates.
Matrix forward_only(const MlpParams& params, const Matrix& x);

struct BackwardOptions {
    bool param_grads = true;
    bool input_grad = true;
};

/// Exact reverse-mode gradients of sum_ij dY_ij * Y_ij with respect to the
/// parameters and the input; gradients are summed over the batch.
std::pair<MlpParams, Matrix> backward(const MlpParams& params,
                                      const ForwardCache& cache, const Matrix& dy,
                                      BackwardOptions opts = {});

/// Backward pass whose cotangent is given at the final pre-activation, with
/// the output-activation derivative already folded in by the caller. Losses
/// composed with a sigmoid output use this so saturated outputs keep their
/// analytically finite gradients.
std::pair<MlpParams, Matrix> backward_from_logits(const MlpParams& params,
                                                  const ForwardCache& cache,
                                                  const Matrix& dz_last,
                                                  BackwardOptions opts = {});

/// Central-difference gradient estimate per parameter; test oracle for
/// analytic backward passes.
MlpParams finite_diff_grad(const std::function<double(const MlpParams&)>& loss,
                           const MlpParams& params, double h);

/// Versioned textual checkpoint; values round-trip exactly.
void save_mlp(const MlpParams& params, const std::filesystem::path& path);
MlpParams load_mlp(const std::filesystem::path& path);

}  // namespace ebgan
