#pragma once

#include "ebgan/nn.hpp"
#include "ebgan/numerics.hpp"

#include <functional>
#include <vector>

namespace ebgan {

/// Decreasing step sizes w_t = c1 * (t + c2)^(-zeta1).
struct StepSchedule {
    double c1 = 2.0;
    double c2 = 1000.0;
    double zeta1 = 0.75;

    StepSchedule() = default;
    StepSchedule(double c1_, double c2_, double zeta1_);
    void validate() const;
    bool operator==(const StepSchedule&) const = default;
};

double step_size(std::size_t t, const StepSchedule& sched);

/// Momentum state for MSGLD; shapes mirror the parameters it accompanies.
struct MsgldState {
    MlpParams momentum;
    double alpha = 0.9;
    double rho = 1.0;
    double tau = 0.01;
};

MsgldState make_msgld_state(const MlpParams& theta, double alpha, double rho,
                            double tau);

/// One MSGLD update:
///   theta += eps * (grad + rho * m) + N(0, 2 * tau * eps)
///   m      = alpha * m + (1 - alpha) * grad
/// The momentum update uses the raw gradient, not the noised drift. Noise is
/// drawn entry by entry in tensor order, so the stream advance is identical
/// for tau = 0 and tau > 0.
void msgld_step(MlpParams& theta, MsgldState& state, const MlpParams& grad,
                double eps, RngStream& stream);

/// Scalar special case, used for low-dimensional sampling checks.
void msgld_step_scalar(double& theta, double& momentum, double grad, double alpha,
                       double rho, double tau, double eps, RngStream& stream);

/// Stochastic approximation update theta += w * h.
void sa_update(MlpParams& theta, const MlpParams& h, double w);

struct AdamState {
    MlpParams m;  // first moments
    MlpParams v;  // second moments
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::size_t step = 0;
};

AdamState make_adam_state(const MlpParams& theta, double beta1, double beta2);

/// Bias-corrected Adam ascent step: pass the gradient of the objective being
/// maximized.
void adam_step(MlpParams& theta, AdamState& state, const MlpParams& grad,
               double lr);

/// Robbins-Monro iteration on the linear mean field h(theta) = theta_star -
/// theta with additive N(0, noise_std^2) observation noise:
///   theta_{k+1} = theta_k + w_k * (h(theta_k) + xi_k),   k = 1..iterations
/// Returns the trajectory theta_0 .. theta_T.
std::vector<double> sa_root_find_toy(double theta_star, double theta0,
                                     double noise_std,
                                     const std::function<double(std::size_t)>& step_at,
                                     std::size_t iterations, RngStream& stream);

}  // namespace ebgan
