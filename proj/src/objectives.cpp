#include "ebgan/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ebgan {

std::string phi_name(PhiKind k) {
    switch (k) {
        case PhiKind::Log: return "log";
        case PhiKind::Log1m: return "log1m";
        case PhiKind::NegLog1m: return "neglog1m";
        case PhiKind::LogNS: return "logd";
        case PhiKind::NegSq: return "negsq";
        case PhiKind::IdentityD: return "identity";
    }
    throw std::logic_error("phi_name: bad enum");
}

PhiKind phi_from_name(std::string_view name) {
    if (name == "log") return PhiKind::Log;
    if (name == "log1m") return PhiKind::Log1m;
    if (name == "neglog1m") return PhiKind::NegLog1m;
    if (name == "logd") return PhiKind::LogNS;
    if (name == "negsq") return PhiKind::NegSq;
    if (name == "identity") return PhiKind::IdentityD;
    throw std::invalid_argument("unknown phi kind '" + std::string(name) + "'");
}

bool is_phi3_kind(PhiKind k) {
    return k == PhiKind::NegLog1m || k == PhiKind::LogNS ||
           k == PhiKind::NegSq || k == PhiKind::IdentityD;
}

double clamp_d(double d) {
    if (!std::isfinite(d)) {
        throw std::domain_error("clamp_d: non-finite discriminator output");
    }
    return std::clamp(d, kEpsClip, 1.0 - kEpsClip);
}

namespace {

void check_domain(double d) {
    if (!(d > 0.0 && d < 1.0)) {
        throw std::domain_error("phi: d must lie in (0,1); clamp first");
    }
}

}  // namespace

double phi(PhiKind kind, double d) {
    check_domain(d);
    switch (kind) {
        case PhiKind::Log: return std::log(d);
        case PhiKind::Log1m: return std::log1p(-d);
        case PhiKind::NegLog1m: return -std::log1p(-d);
        case PhiKind::LogNS: return std::log(d);
        case PhiKind::NegSq: return -(1.0 - d) * (1.0 - d);
        case PhiKind::IdentityD: return d;
    }
    throw std::logic_error("phi: bad enum");
}

double phi_prime(PhiKind kind, double d) {
    check_domain(d);
    switch (kind) {
        case PhiKind::Log: return 1.0 / d;
        case PhiKind::Log1m: return -1.0 / (1.0 - d);
        case PhiKind::NegLog1m: return 1.0 / (1.0 - d);
        case PhiKind::LogNS: return 1.0 / d;
        case PhiKind::NegSq: return 2.0 * (1.0 - d);
        case PhiKind::IdentityD: return 1.0;
    }
    throw std::logic_error("phi_prime: bad enum");
}

namespace {

// d/dz of phi(sigmoid(z)) written directly in terms of d = sigmoid(z). The
// algebraic form stays finite at saturated outputs, where the naive product
// phi'(d) * sigmoid'(z) underflows to zero.
double phi_logit_prime(PhiKind kind, double d) {
    switch (kind) {
        case PhiKind::Log: return 1.0 - d;
        case PhiKind::Log1m: return -d;
        case PhiKind::NegLog1m: return d;
        case PhiKind::LogNS: return 1.0 - d;
        case PhiKind::NegSq: return 2.0 * d * (1.0 - d) * (1.0 - d);
        case PhiKind::IdentityD: return d * (1.0 - d);
    }
    throw std::logic_error("phi_logit_prime: bad enum");
}

// Cotangent at the discriminator's final pre-activation: c * dphi/dz.
Matrix phi_logit_cotangent(const Matrix& d_out, PhiKind kind, double scale_factor) {
    Matrix dz(d_out.rows, d_out.cols);
    for (std::size_t i = 0; i < d_out.size(); ++i) {
        dz.data[i] = scale_factor * phi_logit_prime(kind, d_out.data[i]);
    }
    return dz;
}

void require_sigmoid_output(const MlpParams& theta_d, const char* who) {
    if (theta_d.output_activation != Activation::Sigmoid) {
        throw std::invalid_argument(std::string(who) +
                                    ": discriminator output must be sigmoid");
    }
}

void accumulate(MlpParams& total, const MlpParams& part) {
    for (std::size_t l = 0; l < total.layer_count(); ++l) {
        for (std::size_t i = 0; i < total.weights[l].size(); ++i) {
            total.weights[l].data[i] += part.weights[l].data[i];
        }
        for (std::size_t i = 0; i < total.biases[l].size(); ++i) {
            total.biases[l].data[i] += part.biases[l].data[i];
        }
    }
}

}  // namespace

MlpParams phi3_sum_grad(const MlpParams& theta_g, const MlpParams& theta_d,
                        const Matrix& z_batch, PhiKind phi3) {
    if (!is_phi3_kind(phi3)) {
        throw std::invalid_argument("phi3_sum_grad: not a phi3 metric");
    }
    if (theta_g.output_dim() != theta_d.input_dim()) {
        throw std::invalid_argument("phi3_sum_grad: generator/discriminator width mismatch");
    }
    require_sigmoid_output(theta_d, "phi3_sum_grad");
    auto [fake, g_cache] = forward(theta_g, z_batch);
    auto [d_out, d_cache] = forward(theta_d, fake);
    Matrix dz_top = phi_logit_cotangent(d_out, phi3, 1.0);
    auto [d_grads, d_fake] = backward_from_logits(
        theta_d, d_cache, dz_top, {.param_grads = false, .input_grad = true});
    auto [g_grads, dz_in] =
        backward(theta_g, g_cache, d_fake, {.param_grads = true, .input_grad = false});
    return std::move(g_grads);
}

MlpParams gen_log_post_grad(const MlpParams& theta_g, const MlpParams& theta_d,
                            const Matrix& z_batch, std::size_t total_data_size,
                            const PriorSpec& prior, PhiKind phi3) {
    const std::size_t n = z_batch.rows;
    if (n < 1) throw std::invalid_argument("gen_log_post_grad: empty latent batch");
    if (total_data_size < n) {
        throw std::invalid_argument("gen_log_post_grad: N must be >= mini-batch size");
    }
    if (!(prior.zeta2 > 0.0)) {
        throw std::invalid_argument("gen_log_post_grad: prior variance must be > 0");
    }
    MlpParams grads = phi3_sum_grad(theta_g, theta_d, z_batch, phi3);
    const double temper = static_cast<double>(total_data_size) / static_cast<double>(n);
    const double inv_zeta2 = 1.0 / prior.zeta2;
    for (std::size_t l = 0; l < grads.layer_count(); ++l) {
        auto apply = [&](Matrix& g, const Matrix& th) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                g.data[i] = temper * g.data[i] - th.data[i] * inv_zeta2;
            }
        };
        apply(grads.weights[l], theta_g.weights[l]);
        apply(grads.biases[l], theta_g.biases[l]);
    }
    return grads;
}

MlpParams disc_ascent_grad(const MlpParams& theta_d,
                           std::span<const MlpParams> generators,
                           const Matrix& x_batch,
                           std::span<const Matrix> z_batches) {
    if (generators.empty()) {
        throw std::invalid_argument("disc_ascent_grad: empty generator list");
    }
    if (z_batches.size() != generators.size() && z_batches.size() != 1) {
        throw std::invalid_argument(
            "disc_ascent_grad: need one latent batch per generator, or a single shared one");
    }
    const std::size_t n = x_batch.rows;
    if (n < 1) throw std::invalid_argument("disc_ascent_grad: empty data batch");
    const std::size_t j_g = generators.size();

    require_sigmoid_output(theta_d, "disc_ascent_grad");

    // Fake terms first, accumulated in generator-index order; the real-data
    // term is added once at the end (its phi_1 part is identical for every j,
    // so the j-sum collapses to weight 1/n).
    const double fake_w = 1.0 / (static_cast<double>(n) * static_cast<double>(j_g));
    MlpParams h;
    for (std::size_t j = 0; j < j_g; ++j) {
        const Matrix& z = z_batches.size() == 1 ? z_batches[0] : z_batches[j];
        if (z.rows != n) {
            throw std::invalid_argument(
                "disc_ascent_grad: latent batch size must match data batch size");
        }
        if (generators[j].output_dim() != theta_d.input_dim()) {
            throw std::invalid_argument(
                "disc_ascent_grad: generator output width mismatch");
        }
        Matrix fake = forward_only(generators[j], z);
        auto [d_fake, fake_cache] = forward(theta_d, fake);
        Matrix dz_fake = phi_logit_cotangent(d_fake, PhiKind::Log1m, fake_w);
        auto [part, dx2_unused] = backward_from_logits(
            theta_d, fake_cache, dz_fake, {.param_grads = true, .input_grad = false});
        if (j == 0) {
            h = std::move(part);
        } else {
            accumulate(h, part);
        }
    }

    auto [d_real, real_cache] = forward(theta_d, x_batch);
    Matrix dz_real =
        phi_logit_cotangent(d_real, PhiKind::Log, 1.0 / static_cast<double>(n));
    auto [real_part, dx_unused] = backward_from_logits(
        theta_d, real_cache, dz_real, {.param_grads = true, .input_grad = false});
    accumulate(h, real_part);
    return std::move(h);
}

double disc_objective_estimate(const MlpParams& theta_d, const Matrix& x_real,
                               const Matrix& x_fake, PhiKind phi1, PhiKind phi2) {
    if (x_real.rows < 1 || x_fake.rows < 1) {
        throw std::invalid_argument("disc_objective_estimate: empty batch");
    }
    const Matrix d_real = forward_only(theta_d, x_real);
    const Matrix d_fake = forward_only(theta_d, x_fake);
    double real_sum = 0.0;
    for (double d : d_real.data) real_sum += phi(phi1, clamp_d(d));
    double fake_sum = 0.0;
    for (double d : d_fake.data) fake_sum += phi(phi2, clamp_d(d));
    return real_sum / static_cast<double>(d_real.size()) +
           fake_sum / static_cast<double>(d_fake.size());
}

}  // namespace ebgan
