#pragma once

#include "ebgan/nn.hpp"
#include "ebgan/numerics.hpp"

#include <span>

namespace ebgan {

/// Discriminator metrics. Log is phi_1, Log1m is phi_2; the remaining kinds
/// are the admissible generator metrics phi_3, each strictly increasing in D.
enum class PhiKind {
    Log,        // log(D)
    Log1m,      // log(1 - D)
    NegLog1m,   // -log(1 - D)
    LogNS,      // log(D), non-saturating generator objective
    NegSq,      // -(1 - D)^2
    IdentityD,  // D
};

std::string phi_name(PhiKind k);
PhiKind phi_from_name(std::string_view name);
bool is_phi3_kind(PhiKind k);

/// Discriminator outputs are clamped this far away from {0,1} before any log.
inline constexpr double kEpsClip = 1e-7;

/// Clamp a discriminator output into [kEpsClip, 1 - kEpsClip].
double clamp_d(double d);

/// Value and derivative of a metric at d in the open interval (0,1).
double phi(PhiKind kind, double d);
double phi_prime(PhiKind kind, double d);

struct PriorSpec {
    enum class Kind { IsotropicGaussian };
    Kind kind = Kind::IsotropicGaussian;
    double zeta2 = 10.0;  // prior variance

    bool operator==(const PriorSpec&) const = default;
};

/// Gradient of sum_i phi3(D(G(z_i))) with respect to the generator
/// parameters; shared by the posterior estimator and the baselines.
MlpParams phi3_sum_grad(const MlpParams& theta_g, const MlpParams& theta_d,
                        const Matrix& z_batch, PhiKind phi3);

/// Stochastic gradient of the generator log-posterior:
/// (N/n) sum_i grad phi3(D(G(z_i))) + grad log p(theta_g | prior).
MlpParams gen_log_post_grad(const MlpParams& theta_g, const MlpParams& theta_d,
                            const Matrix& z_batch, std::size_t total_data_size,
                            const PriorSpec& prior, PhiKind phi3);

/// Averaged ascent direction H for the discriminator:
/// (1/(n*J_g)) sum_j sum_i grad [phi1(D(x_i)) + phi2(D(G_j(z_i)))].
/// z_batches holds one latent batch per generator; passing a single batch
/// shares it across all generators.
MlpParams disc_ascent_grad(const MlpParams& theta_d,
                           std::span<const MlpParams> generators,
                           const Matrix& x_batch,
                           std::span<const Matrix> z_batches);

/// Monte Carlo estimate of the discriminator objective:
/// mean phi1(D(x_real)) + mean phi2(D(x_fake)).
double disc_objective_estimate(const MlpParams& theta_d, const Matrix& x_real,
                               const Matrix& x_fake, PhiKind phi1 = PhiKind::Log,
                               PhiKind phi2 = PhiKind::Log1m);

}  // namespace ebgan
