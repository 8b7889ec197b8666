#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebgan/objectives.hpp"

#include <cmath>
#include <vector>

using namespace ebgan;

namespace {

MlpParams random_net(const std::vector<std::size_t>& sizes, Activation out,
                     std::uint64_t seed) {
    RngStream s = make_stream(seed, "net");
    return init_mlp(sizes, Activation::Relu, out, 1.0, s);
}

MlpParams zero_net(const std::vector<std::size_t>& sizes, Activation out) {
    MlpParams p = random_net(sizes, out, 0xDEAD);
    for_each_tensor(p, [](Matrix& t) { t.data.assign(t.data.size(), 0.0); });
    return p;
}

double rel_grad_error(const MlpParams& analytic, const MlpParams& numeric) {
    double worst = 0.0;
    for (std::size_t l = 0; l < analytic.layer_count(); ++l) {
        auto cmp = [&](const Matrix& a, const Matrix& n) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double denom =
                    std::max({std::abs(a.data[i]), std::abs(n.data[i]), 1e-5});
                worst = std::max(worst, std::abs(a.data[i] - n.data[i]) / denom);
            }
        };
        cmp(analytic.weights[l], numeric.weights[l]);
        cmp(analytic.biases[l], numeric.biases[l]);
    }
    return worst;
}

const std::vector<PhiKind> kPhi3Kinds = {PhiKind::NegLog1m, PhiKind::LogNS,
                                         PhiKind::NegSq, PhiKind::IdentityD};

// Central differences average the two one-sided slopes when a ReLU
// pre-activation sits within the probe width of zero, so finite-difference
// trials require a kink margin; callers resample until it holds.
bool relu_margin_ok(const ForwardCache& cache, std::size_t hidden_layers,
                    double margin) {
    for (std::size_t l = 0; l < hidden_layers; ++l) {
        for (double z : cache.pre_activations[l].data) {
            if (std::abs(z) < margin) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("phi values at reference points") {
    CHECK(phi(PhiKind::Log, 0.5) == doctest::Approx(-0.6931471805599453).epsilon(1e-12));
    CHECK(std::abs(phi(PhiKind::NegSq, 1.0 - kEpsClip)) < 1e-13);
    CHECK(phi(PhiKind::NegLog1m, 0.9) ==
          doctest::Approx(2.3025850929940455).epsilon(1e-12));
    CHECK(phi(PhiKind::Log1m, 0.9) ==
          doctest::Approx(-2.3025850929940455).epsilon(1e-12));
    CHECK(phi(PhiKind::IdentityD, 0.25) == 0.25);
}

TEST_CASE("phi rejects values outside (0,1)") {
    CHECK_THROWS_AS(phi(PhiKind::Log, 0.0), std::domain_error);
    CHECK_THROWS_AS(phi(PhiKind::Log, 1.0), std::domain_error);
    CHECK_THROWS_AS(phi_prime(PhiKind::NegSq, -0.1), std::domain_error);
    CHECK(clamp_d(0.0) == kEpsClip);
    CHECK(clamp_d(1.0) == 1.0 - kEpsClip);
    CHECK(clamp_d(0.3) == 0.3);
    CHECK_THROWS_AS(clamp_d(std::nan("")), std::domain_error);
}

TEST_CASE("every phi3 variant is strictly increasing on the clamped interval") {
    for (PhiKind kind : kPhi3Kinds) {
        CHECK(is_phi3_kind(kind));
        for (int i = 0; i <= 10000; ++i) {
            const double d =
                kEpsClip + (1.0 - 2.0 * kEpsClip) * static_cast<double>(i) / 10000.0;
            CHECK(phi_prime(kind, d) > 0.0);
        }
    }
    CHECK(!is_phi3_kind(PhiKind::Log1m));
}

TEST_CASE("phi_prime matches finite differences of phi") {
    const std::vector<PhiKind> all = {PhiKind::Log,      PhiKind::Log1m,
                                      PhiKind::NegLog1m, PhiKind::LogNS,
                                      PhiKind::NegSq,    PhiKind::IdentityD};
    for (PhiKind kind : all) {
        for (double d : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double h = 1e-6;
            const double fd = (phi(kind, d + h) - phi(kind, d - h)) / (2.0 * h);
            CHECK(phi_prime(kind, d) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("zero discriminator and zero generator sit at a gradient fixed point") {
    MlpParams theta_d = zero_net({4, 6, 1}, Activation::Sigmoid);
    MlpParams theta_g = zero_net({3, 5, 4}, Activation::Identity);
    RngStream zs = make_stream(1, "z");
    Matrix z = sample_gaussian(zs, 8, 3, 0.0, 1.0);
    PriorSpec prior{PriorSpec::Kind::IsotropicGaussian, 1.0};
    MlpParams g = gen_log_post_grad(theta_g, theta_d, z, 100, prior, PhiKind::NegLog1m);
    CHECK(max_abs(g) == 0.0);
}

TEST_CASE("with a zero discriminator the gradient is the prior score") {
    MlpParams theta_d = zero_net({4, 6, 1}, Activation::Sigmoid);
    MlpParams theta_g = random_net({3, 5, 4}, Activation::Identity, 21);
    RngStream zs = make_stream(2, "z");
    Matrix z = sample_gaussian(zs, 8, 3, 0.0, 1.0);
    PriorSpec prior{PriorSpec::Kind::IsotropicGaussian, 1.0};
    MlpParams g = gen_log_post_grad(theta_g, theta_d, z, 100, prior, PhiKind::NegLog1m);
    for (std::size_t l = 0; l < g.layer_count(); ++l) {
        CHECK(max_abs_diff(g.weights[l], scale(theta_g.weights[l], -1.0)) == 0.0);
        CHECK(max_abs_diff(g.biases[l], scale(theta_g.biases[l], -1.0)) == 0.0);
    }
}

TEST_CASE("generator posterior gradient matches finite differences for every phi3") {
    const std::size_t n = 4;
    const std::size_t total = 40;
    PriorSpec prior{PriorSpec::Kind::IsotropicGaussian, 2.0};
    std::uint64_t draw = 0;
    for (PhiKind kind : kPhi3Kinds) {
        for (int rep = 0; rep < 3; ++rep) {
            MlpParams theta_d, theta_g;
            Matrix z;
            while (true) {
                ++draw;
                theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 1000 + draw);
                theta_g = random_net({3, 5, 4}, Activation::Identity, 2000 + draw);
                RngStream zs = make_stream(3000 + draw, "z");
                z = sample_gaussian(zs, n, 3, 0.0, 1.0);
                auto [fake, g_cache] = forward(theta_g, z);
                auto [d, d_cache] = forward(theta_d, fake);
                if (relu_margin_ok(g_cache, 1, 1e-3) &&
                    relu_margin_ok(d_cache, 1, 1e-3)) {
                    break;
                }
            }

            MlpParams analytic =
                gen_log_post_grad(theta_g, theta_d, z, total, prior, kind);
            auto loss = [&](const MlpParams& q) {
                const Matrix fake = forward_only(q, z);
                const Matrix d = forward_only(theta_d, fake);
                double acc = 0.0;
                for (double v : d.data) acc += phi(kind, clamp_d(v));
                acc *= static_cast<double>(total) / static_cast<double>(n);
                double sq = 0.0;
                for_each_tensor(q, [&sq](const Matrix& t) {
                    for (double v : t.data) sq += v * v;
                });
                return acc - sq / (2.0 * prior.zeta2);
            };
            MlpParams numeric = finite_diff_grad(loss, theta_g, 1e-5);
            CHECK(rel_grad_error(analytic, numeric) <= 1e-4);
        }
    }
}

TEST_CASE("zero discriminator gives a zero ascent direction H") {
    MlpParams theta_d = zero_net({4, 6, 1}, Activation::Sigmoid);
    std::vector<MlpParams> gens;
    gens.push_back(random_net({3, 5, 4}, Activation::Identity, 31));
    RngStream s = make_stream(4, "batch");
    Matrix x = sample_gaussian(s, 8, 4, 0.0, 1.0);
    Matrix z = sample_gaussian(s, 8, 3, 0.0, 1.0);
    std::vector<Matrix> zs{z};
    MlpParams h = disc_ascent_grad(theta_d, gens, x, zs);
    CHECK(max_abs(h) == 0.0);
}

TEST_CASE("H with the fake batch equal to the real batch matches finite differences") {
    MlpParams theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 41);
    // Pass-through generator: fake batch == latent batch == real batch.
    MlpParams gen;
    gen.layer_sizes = {4, 4};
    gen.output_activation = Activation::Identity;
    gen.weights.push_back(Matrix::identity(4));
    gen.biases.emplace_back(1, 4);

    RngStream s = make_stream(5, "batch");
    Matrix x = sample_gaussian(s, 6, 4, 0.0, 1.0);
    std::vector<MlpParams> gens{gen};
    std::vector<Matrix> zs{x};
    MlpParams analytic = disc_ascent_grad(theta_d, gens, x, zs);

    auto objective = [&](const MlpParams& q) {
        const Matrix d = forward_only(q, x);
        double acc = 0.0;
        for (double v : d.data) {
            acc += phi(PhiKind::Log, clamp_d(v)) + phi(PhiKind::Log1m, clamp_d(v));
        }
        return acc / static_cast<double>(x.rows);
    };
    MlpParams numeric = finite_diff_grad(objective, theta_d, 1e-5);
    CHECK(rel_grad_error(analytic, numeric) <= 1e-4);
}

TEST_CASE("H matches finite differences with distinct generators and batches") {
    std::uint64_t draw = 0;
    for (int rep = 0; rep < 3; ++rep) {
        MlpParams theta_d;
        std::vector<MlpParams> gens;
        Matrix x;
        std::vector<Matrix> zs;
        while (true) {
            ++draw;
            theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 5000 + draw);
            gens.clear();
            gens.push_back(random_net({3, 5, 4}, Activation::Identity, 6000 + draw));
            gens.push_back(random_net({3, 5, 4}, Activation::Identity, 7000 + draw));
            RngStream s = make_stream(8000 + draw, "batch");
            x = sample_gaussian(s, 5, 4, 0.0, 1.0);
            zs.clear();
            zs.push_back(sample_gaussian(s, 5, 3, 0.0, 1.0));
            zs.push_back(sample_gaussian(s, 5, 3, 0.0, 1.0));

            bool clean = relu_margin_ok(forward(theta_d, x).second, 1, 1e-3);
            for (std::size_t j = 0; clean && j < gens.size(); ++j) {
                auto [fake, g_cache] = forward(gens[j], zs[j]);
                clean = relu_margin_ok(g_cache, 1, 1e-3) &&
                        relu_margin_ok(forward(theta_d, fake).second, 1, 1e-3);
            }
            if (clean) break;
        }

        MlpParams analytic = disc_ascent_grad(theta_d, gens, x, zs);
        auto objective = [&](const MlpParams& q) {
            double acc = 0.0;
            const Matrix d_real = forward_only(q, x);
            for (std::size_t j = 0; j < gens.size(); ++j) {
                for (double v : d_real.data) acc += phi(PhiKind::Log, clamp_d(v));
                const Matrix d_fake = forward_only(q, forward_only(gens[j], zs[j]));
                for (double v : d_fake.data) acc += phi(PhiKind::Log1m, clamp_d(v));
            }
            return acc / static_cast<double>(x.rows * gens.size());
        };
        MlpParams numeric = finite_diff_grad(objective, theta_d, 1e-5);
        CHECK(rel_grad_error(analytic, numeric) <= 1e-4);
    }
}

TEST_CASE("duplicating a generator with a shared latent batch leaves H unchanged") {
    MlpParams theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 51);
    MlpParams gen = random_net({3, 5, 4}, Activation::Identity, 52);
    RngStream s = make_stream(6, "batch");
    Matrix x = sample_gaussian(s, 7, 4, 0.0, 1.0);
    Matrix z = sample_gaussian(s, 7, 3, 0.0, 1.0);

    std::vector<MlpParams> one{gen};
    std::vector<MlpParams> two{gen, gen};
    std::vector<Matrix> shared{z};
    MlpParams h1 = disc_ascent_grad(theta_d, one, x, shared);
    MlpParams h2 = disc_ascent_grad(theta_d, two, x, shared);
    CHECK(max_abs_diff(h1, h2) == 0.0);
}

TEST_CASE("H input validation") {
    MlpParams theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 61);
    RngStream s = make_stream(7, "batch");
    Matrix x = sample_gaussian(s, 5, 4, 0.0, 1.0);
    std::vector<MlpParams> none;
    std::vector<Matrix> zs{x};
    CHECK_THROWS_AS(disc_ascent_grad(theta_d, none, x, zs), std::invalid_argument);
}

TEST_CASE("minimax pairing: generator data term is minus the phi2 route") {
    // phi3 = -phi2 makes the z-dependent part of the generator gradient equal
    // to -1 times the discriminator's phi2 gradient contracted through the
    // generator, on a shared latent batch.
    MlpParams theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 71);
    MlpParams theta_g = random_net({3, 5, 4}, Activation::Identity, 72);
    RngStream zs = make_stream(8, "z");
    Matrix z = sample_gaussian(zs, 9, 3, 0.0, 1.0);

    MlpParams via_phi3 = phi3_sum_grad(theta_g, theta_d, z, PhiKind::NegLog1m);

    auto [fake, g_cache] = forward(theta_g, z);
    auto [d_out, d_cache] = forward(theta_d, fake);
    Matrix dy(d_out.rows, d_out.cols);
    for (std::size_t i = 0; i < d_out.size(); ++i) {
        dy.data[i] = phi_prime(PhiKind::Log1m, clamp_d(d_out.data[i]));
    }
    auto [d_grads, d_fake] =
        backward(theta_d, d_cache, dy, {.param_grads = false, .input_grad = true});
    auto [via_phi2, dz_unused] = backward(theta_g, g_cache, d_fake);

    for (std::size_t l = 0; l < via_phi3.layer_count(); ++l) {
        CHECK(max_abs_diff(via_phi3.weights[l], scale(via_phi2.weights[l], -1.0)) <
              1e-9);
        CHECK(max_abs_diff(via_phi3.biases[l], scale(via_phi2.biases[l], -1.0)) <
              1e-9);
    }
}

TEST_CASE("discriminator objective estimate at reference discriminators") {
    MlpParams half = zero_net({4, 6, 1}, Activation::Sigmoid);
    RngStream s = make_stream(9, "batch");
    Matrix x = sample_gaussian(s, 10, 4, 0.0, 1.0);
    Matrix f = sample_gaussian(s, 10, 4, 0.0, 1.0);
    CHECK(disc_objective_estimate(half, x, f) ==
          doctest::Approx(-1.3862943611198906).epsilon(1e-12));

    // Constant D = 0.9 via a zero net with output bias log(9).
    MlpParams nine = zero_net({4, 6, 1}, Activation::Sigmoid);
    nine.biases[1].at(0, 0) = 2.1972245773362196;
    CHECK(disc_objective_estimate(nine, x, f) ==
          doctest::Approx(-2.407945608651872).epsilon(1e-9));
}

TEST_CASE("objective estimate is invariant under row permutation") {
    MlpParams theta_d = random_net({4, 6, 1}, Activation::Sigmoid, 81);
    RngStream s = make_stream(10, "batch");
    Matrix x = sample_gaussian(s, 12, 4, 0.0, 1.0);
    Matrix f = sample_gaussian(s, 12, 4, 0.0, 1.0);
    Matrix x_rev(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i) {
        std::copy(x.row_ptr(x.rows - 1 - i), x.row_ptr(x.rows - 1 - i) + x.cols,
                  x_rev.row_ptr(i));
    }
    CHECK(disc_objective_estimate(theta_d, x, f) ==
          doctest::Approx(disc_objective_estimate(theta_d, x_rev, f)).epsilon(1e-12));
}
