#include "ebgan/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace ebgan {

StepSchedule::StepSchedule(double c1_, double c2_, double zeta1_)
    : c1(c1_), c2(c2_), zeta1(zeta1_) {
    validate();
}

void StepSchedule::validate() const {
    if (!(c1 > 0.0)) throw std::invalid_argument("StepSchedule: c1 must be > 0");
    if (!(c2 > 0.0)) throw std::invalid_argument("StepSchedule: c2 must be > 0");
    if (!(zeta1 > 0.5 && zeta1 <= 1.0)) {
        throw std::invalid_argument("StepSchedule: zeta1 must lie in (0.5, 1]");
    }
}

double step_size(std::size_t t, const StepSchedule& sched) {
    return sched.c1 * std::pow(static_cast<double>(t) + sched.c2, -sched.zeta1);
}

MsgldState make_msgld_state(const MlpParams& theta, double alpha, double rho,
                            double tau) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("MsgldState: alpha must lie in [0, 1)");
    }
    if (rho < 0.0) throw std::invalid_argument("MsgldState: rho must be >= 0");
    if (tau < 0.0) throw std::invalid_argument("MsgldState: tau must be >= 0");
    return MsgldState{zeros_like(theta), alpha, rho, tau};
}

void msgld_step(MlpParams& theta, MsgldState& state, const MlpParams& grad,
                double eps, RngStream& stream) {
    if (!(eps > 0.0)) throw std::invalid_argument("msgld_step: eps must be > 0");
    if (!theta.same_shape(grad) || !theta.same_shape(state.momentum)) {
        throw std::invalid_argument("msgld_step: shape mismatch");
    }
    const double noise_std = std::sqrt(2.0 * state.tau * eps);
    for (std::size_t l = 0; l < theta.layer_count(); ++l) {
        auto update = [&](Matrix& th, Matrix& m, const Matrix& g) {
            for (std::size_t i = 0; i < th.size(); ++i) {
                th.data[i] += eps * (g.data[i] + state.rho * m.data[i]) +
                              stream.next_gaussian(0.0, noise_std);
                m.data[i] = state.alpha * m.data[i] + (1.0 - state.alpha) * g.data[i];
            }
        };
        update(theta.weights[l], state.momentum.weights[l], grad.weights[l]);
        update(theta.biases[l], state.momentum.biases[l], grad.biases[l]);
    }
}

void msgld_step_scalar(double& theta, double& momentum, double grad, double alpha,
                       double rho, double tau, double eps, RngStream& stream) {
    if (!(eps > 0.0)) throw std::invalid_argument("msgld_step_scalar: eps must be > 0");
    const double noise_std = std::sqrt(2.0 * tau * eps);
    theta += eps * (grad + rho * momentum) + stream.next_gaussian(0.0, noise_std);
    momentum = alpha * momentum + (1.0 - alpha) * grad;
}

void sa_update(MlpParams& theta, const MlpParams& h, double w) {
    if (!theta.same_shape(h)) throw std::invalid_argument("sa_update: shape mismatch");
    for (std::size_t l = 0; l < theta.layer_count(); ++l) {
        auto update = [&](Matrix& th, const Matrix& hh) {
            for (std::size_t i = 0; i < th.size(); ++i) {
                th.data[i] += w * hh.data[i];
            }
        };
        update(theta.weights[l], h.weights[l]);
        update(theta.biases[l], h.biases[l]);
    }
}

AdamState make_adam_state(const MlpParams& theta, double beta1, double beta2) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw std::invalid_argument("AdamState: betas must lie in [0, 1)");
    }
    AdamState st;
    st.m = zeros_like(theta);
    st.v = zeros_like(theta);
    st.beta1 = beta1;
    st.beta2 = beta2;
    return st;
}

void adam_step(MlpParams& theta, AdamState& state, const MlpParams& grad,
               double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be > 0");
    if (!theta.same_shape(grad) || !theta.same_shape(state.m)) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    state.step += 1;
    const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < theta.layer_count(); ++l) {
        auto update = [&](Matrix& th, Matrix& m, Matrix& v, const Matrix& g) {
            for (std::size_t i = 0; i < th.size(); ++i) {
                const double gi = g.data[i];
                m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * gi;
                v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * gi * gi;
                const double m_hat = m.data[i] / corr1;
                const double v_hat = v.data[i] / corr2;
                th.data[i] += lr * m_hat / (std::sqrt(v_hat) + state.eps_adam);
            }
        };
        update(theta.weights[l], state.m.weights[l], state.v.weights[l],
               grad.weights[l]);
        update(theta.biases[l], state.m.biases[l], state.v.biases[l],
               grad.biases[l]);
    }
}

std::vector<double> sa_root_find_toy(double theta_star, double theta0,
                                     double noise_std,
                                     const std::function<double(std::size_t)>& step_at,
                                     std::size_t iterations, RngStream& stream) {
    std::vector<double> trajectory;
    trajectory.reserve(iterations + 1);
    trajectory.push_back(theta0);
    double theta = theta0;
    for (std::size_t k = 1; k <= iterations; ++k) {
        const double xi = stream.next_gaussian(0.0, noise_std);
        theta += step_at(k) * ((theta_star - theta) + xi);
        trajectory.push_back(theta);
    }
    return trajectory;
}

}  // namespace ebgan
