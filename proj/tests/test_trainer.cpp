#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebgan/trainer.hpp"

#include "ebgan/metrics.hpp"

#include <cmath>

using namespace ebgan;

namespace {

MixtureSpec tiny_mixture() {
    MixtureSpec spec;
    spec.components = 3;
    spec.latent_dim = 2;
    spec.output_dim = 8;
    spec.per_component = 20;
    spec.mean_std = 2.0;
    spec.map_std = 1.0;
    spec.seed = 99;
    return spec;
}

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.method = TrainMethod::Ebgan;
    cfg.j_g = 2;
    cfg.batch_size = 5;
    cfg.iterations = 3;
    cfg.phi3 = PhiKind::NegLog1m;
    cfg.sched = StepSchedule(1.0, 10.0, 0.75);
    cfg.gen_lr = 0.01;
    cfg.tau = 0.01;
    cfg.prior.zeta2 = 1.0;
    cfg.disc_sizes = {8, 6, 1};
    cfg.gen_sizes = {4, 6, 8};
    cfg.latent.dim = 4;
    cfg.seed = 5;
    cfg.metric_every = 1;
    cfg.init_std = 0.5;
    cfg.eval_real_size = 16;
    cfg.eval_latent_size = 16;
    return cfg;
}

bool records_equal(const std::vector<MetricsRecord>& a,
                   const std::vector<MetricsRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].iter != b[i].iter || a[i].w_t != b[i].w_t ||
            a[i].eps_t != b[i].eps_t || a[i].mean_d_real != b[i].mean_d_real ||
            a[i].mean_d_fake != b[i].mean_d_fake ||
            a[i].jd_estimate != b[i].jd_estimate) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("zero iterations leaves parameters at their initial values") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.iterations = 0;
    RunLog log = train(cfg, ds);
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].iter == 0);
    CHECK(log.records[0].w_t == 0.0);

    RngStream ds_stream = make_stream(cfg.seed, "init-disc");
    MlpParams disc0 = init_mlp(cfg.disc_sizes, Activation::Relu, Activation::Sigmoid,
                               cfg.init_std, ds_stream);
    CHECK(max_abs_diff(log.discriminator, disc0) == 0.0);
    REQUIRE(log.ensemble.size() == cfg.j_g);
    for (std::size_t j = 1; j <= cfg.j_g; ++j) {
        RngStream gs = make_stream(cfg.seed, "init-gen", j, 0);
        MlpParams gen0 = init_mlp(cfg.gen_sizes, Activation::Relu,
                                  Activation::Identity, cfg.init_std, gs);
        CHECK(max_abs_diff(log.ensemble.params[j - 1], gen0) == 0.0);
        CHECK(max_abs(log.ensemble.msgld[j - 1].momentum) == 0.0);
    }
}

TEST_CASE("one ensemble iteration equals the hand-composed operation sequence") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.j_g = 1;
    cfg.iterations = 1;
    cfg.tau = 0.0;
    RunLog log = train_ebgan(cfg, ds);

    // Recompose iteration t = 1 from the module operations with the same
    // stream labels the trainer uses.
    RngStream ds_stream = make_stream(cfg.seed, "init-disc");
    MlpParams disc = init_mlp(cfg.disc_sizes, Activation::Relu, Activation::Sigmoid,
                              cfg.init_std, ds_stream);
    RngStream gs = make_stream(cfg.seed, "init-gen", 1, 0);
    MlpParams gen = init_mlp(cfg.gen_sizes, Activation::Relu, Activation::Identity,
                             cfg.init_std, gs);
    MsgldState state = make_msgld_state(gen, cfg.alpha, cfg.rho, cfg.tau);

    RngStream gen_stream = make_stream(cfg.seed, "gen", 1, 1);
    Matrix z = sample_latent(cfg.latent, cfg.batch_size, gen_stream);
    MlpParams grad = gen_log_post_grad(gen, disc, z, ds.size(), cfg.prior, cfg.phi3);
    msgld_step(gen, state, grad, cfg.gen_lr, gen_stream);

    RngStream batch_stream = make_stream(cfg.seed, "batch", 0, 1);
    Matrix x = minibatch(ds, cfg.batch_size, batch_stream);
    RngStream z_stream = make_stream(cfg.seed, "disc", 1, 1);
    std::vector<Matrix> zs{sample_latent(cfg.latent, cfg.batch_size, z_stream)};
    std::vector<MlpParams> gens{gen};
    MlpParams h = disc_ascent_grad(disc, gens, x, zs);
    sa_update(disc, h, step_size(1, cfg.sched));

    CHECK(max_abs_diff(log.discriminator, disc) == 0.0);
    CHECK(max_abs_diff(log.ensemble.params[0], gen) == 0.0);
    CHECK(max_abs_diff(log.ensemble.msgld[0].momentum, state.momentum) == 0.0);
}

TEST_CASE("identical config and seed give bitwise-identical run logs") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    RunLog a = train(cfg, ds);
    RunLog b = train(cfg, ds);
    CHECK(records_equal(a.records, b.records));
    CHECK(max_abs_diff(a.discriminator, b.discriminator) == 0.0);
    for (std::size_t j = 0; j < cfg.j_g; ++j) {
        CHECK(max_abs_diff(a.ensemble.params[j], b.ensemble.params[j]) == 0.0);
    }
}

TEST_CASE("logged w_t and eps_t match the schedule exactly") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.iterations = 7;
    RunLog log = train(cfg, ds);
    for (const MetricsRecord& rec : log.records) {
        if (rec.iter == 0) continue;
        CHECK(rec.w_t == step_size(rec.iter, cfg.sched));
        CHECK(rec.eps_t == cfg.gen_lr);
    }
    std::size_t prev = 0;
    for (std::size_t i = 1; i < log.records.size(); ++i) {
        CHECK(log.records[i].iter > prev);
        prev = log.records[i].iter;
    }
}

TEST_CASE("decaying generator learning rate is logged per iteration") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.iterations = 4;
    cfg.gen_lr_decay = true;
    cfg.gen_lr_zeta2 = 0.6;
    cfg.gen_lr_t0 = 10.0;
    RunLog log = train(cfg, ds);
    for (const MetricsRecord& rec : log.records) {
        if (rec.iter == 0) continue;
        const double expected =
            cfg.gen_lr * std::pow(static_cast<double>(rec.iter) + cfg.gen_lr_t0,
                                  -cfg.gen_lr_zeta2);
        CHECK(rec.eps_t == expected);
    }
}

TEST_CASE("baseline with zero iterations or zero learning rates stays put") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.method = TrainMethod::GanMinimax;
    cfg.iterations = 0;
    RunLog log0 = train(cfg, ds);
    CHECK(log0.records.size() == 1);
    CHECK(log0.ensemble.size() == 1);

    cfg.iterations = 5;
    cfg.gen_lr = 0.0;
    cfg.disc_lr = 0.0;
    RunLog frozen = train(cfg, ds);
    CHECK(max_abs_diff(frozen.discriminator, log0.discriminator) == 0.0);
    CHECK(max_abs_diff(frozen.ensemble.params[0], log0.ensemble.params[0]) == 0.0);
}

TEST_CASE("one baseline iteration equals the hand-composed adam sequence") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.method = TrainMethod::GanNonSaturating;
    cfg.iterations = 1;
    RunLog log = train(cfg, ds);

    RngStream ds_stream = make_stream(cfg.seed, "init-disc");
    MlpParams disc = init_mlp(cfg.disc_sizes, Activation::Relu, Activation::Sigmoid,
                              cfg.init_std, ds_stream);
    RngStream gs = make_stream(cfg.seed, "init-gen", 1, 0);
    MlpParams gen = init_mlp(cfg.gen_sizes, Activation::Relu, Activation::Identity,
                             cfg.init_std, gs);
    AdamState adam_d = make_adam_state(disc, cfg.adam_beta1, cfg.adam_beta2);
    AdamState adam_g = make_adam_state(gen, cfg.adam_beta1, cfg.adam_beta2);

    RngStream batch_stream = make_stream(cfg.seed, "batch", 0, 1);
    Matrix x = minibatch(ds, cfg.batch_size, batch_stream);
    RngStream zd_stream = make_stream(cfg.seed, "disc", 1, 1);
    Matrix z_d = sample_latent(cfg.latent, cfg.batch_size, zd_stream);
    std::vector<MlpParams> gens{gen};
    std::vector<Matrix> zds{z_d};
    MlpParams h = disc_ascent_grad(disc, gens, x, zds);
    adam_step(disc, adam_d, h, cfg.disc_lr);

    RngStream zg_stream = make_stream(cfg.seed, "gen", 1, 1);
    Matrix z_g = sample_latent(cfg.latent, cfg.batch_size, zg_stream);
    MlpParams g = phi3_sum_grad(gen, disc, z_g, PhiKind::LogNS);
    for_each_tensor(g, [&](Matrix& t) {
        for (double& v : t.data) v *= 1.0 / static_cast<double>(cfg.batch_size);
    });
    adam_step(gen, adam_g, g, cfg.gen_lr);

    CHECK(max_abs_diff(log.discriminator, disc) == 0.0);
    CHECK(max_abs_diff(log.ensemble.params[0], gen) == 0.0);
}

TEST_CASE("sample_fake shapes, ordering, and the constant-generator case") {
    GeneratorEnsemble ensemble;
    MlpParams gen;
    gen.layer_sizes = {4, 8};
    gen.output_activation = Activation::Identity;
    gen.weights.emplace_back(8, 4);
    gen.biases.emplace_back(1, 8);
    ensemble.params.push_back(gen);

    LatentSpec latent{4, LatentSpec::Dist::StdGaussian};
    RngStream s = make_stream(6, "fake");
    Matrix fake = sample_fake(ensemble, 3, latent, s);
    CHECK(fake.rows == 3);
    CHECK(fake.cols == 8);
    for (double v : fake.data) CHECK(v == 0.0);

    ensemble.params.push_back(gen);
    RngStream s2 = make_stream(6, "fake");
    Matrix fake2 = sample_fake(ensemble, 3, latent, s2);
    CHECK(fake2.rows == 6);

    RngStream s3 = make_stream(6, "fake");
    Matrix fake3 = sample_fake(ensemble, 3, latent, s3);
    CHECK(fake2.data == fake3.data);
}

TEST_CASE("H is invariant to generator index order up to summation rounding") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    RngStream ds_stream = make_stream(cfg.seed, "init-disc");
    MlpParams disc = init_mlp(cfg.disc_sizes, Activation::Relu, Activation::Sigmoid,
                              cfg.init_std, ds_stream);
    RngStream g1s = make_stream(cfg.seed, "init-gen", 1, 0);
    RngStream g2s = make_stream(cfg.seed, "init-gen", 2, 0);
    MlpParams g1 = init_mlp(cfg.gen_sizes, Activation::Relu, Activation::Identity,
                            cfg.init_std, g1s);
    MlpParams g2 = init_mlp(cfg.gen_sizes, Activation::Relu, Activation::Identity,
                            cfg.init_std, g2s);
    RngStream bs = make_stream(cfg.seed, "batch", 0, 1);
    Matrix x = minibatch(ds, cfg.batch_size, bs);
    RngStream z1s = make_stream(cfg.seed, "disc", 1, 1);
    RngStream z2s = make_stream(cfg.seed, "disc", 2, 1);
    Matrix z1 = sample_latent(cfg.latent, cfg.batch_size, z1s);
    Matrix z2 = sample_latent(cfg.latent, cfg.batch_size, z2s);

    std::vector<MlpParams> fwd{g1, g2};
    std::vector<Matrix> fwd_z{z1, z2};
    std::vector<MlpParams> rev{g2, g1};
    std::vector<Matrix> rev_z{z2, z1};
    MlpParams h_fwd = disc_ascent_grad(disc, fwd, x, fwd_z);
    MlpParams h_rev = disc_ascent_grad(disc, rev, x, rev_z);
    CHECK(max_abs_diff(h_fwd, h_rev) < 1e-12);
}

TEST_CASE("exploding configuration aborts with the offending iteration") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.gen_lr = 1e155;
    cfg.tau = 0.0;
    cfg.iterations = 10;
    try {
        train(cfg, ds);
        FAIL("expected TrainAbortError");
    } catch (const TrainAbortError& e) {
        CHECK(e.iteration() >= 1);
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
    }
}

TEST_CASE("config validation rejects inconsistent setups") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.j_g = 0;
    CHECK_THROWS_AS(train(cfg, ds), std::invalid_argument);
    cfg = tiny_config();
    cfg.gen_sizes.back() = 7;  // mismatch with discriminator input
    CHECK_THROWS_AS(train(cfg, ds), std::invalid_argument);
    cfg = tiny_config();
    cfg.phi3 = PhiKind::Log1m;
    CHECK_THROWS_AS(train(cfg, ds), std::invalid_argument);
    cfg = tiny_config();
    cfg.batch_size = ds.size() + 1;
    CHECK_THROWS_AS(train(cfg, ds), std::invalid_argument);
    cfg = tiny_config();
    cfg.method = TrainMethod::GanMinimax;
    CHECK_THROWS_AS(train_ebgan(cfg, ds), std::invalid_argument);
}

TEST_CASE("shared latent batches across generators stay deterministic") {
    MixtureDataset ds = generate_mixture(tiny_mixture());
    TrainConfig cfg = tiny_config();
    cfg.share_z = true;
    RunLog a = train(cfg, ds);
    RunLog b = train(cfg, ds);
    CHECK(records_equal(a.records, b.records));
    CHECK(max_abs_diff(a.discriminator, b.discriminator) == 0.0);
}

TEST_CASE("window_mean averages the requested iteration range") {
    RunLog log;
    for (std::size_t t : {0, 10, 20, 30, 40}) {
        MetricsRecord r;
        r.iter = t;
        r.mean_d_real = static_cast<double>(t);
        log.records.push_back(r);
    }
    CHECK(window_mean(log, 10, 30, &MetricsRecord::mean_d_real) == 20.0);
    CHECK(window_mean(log, 0, 40, &MetricsRecord::mean_d_real) == 20.0);
    CHECK_THROWS_AS(window_mean(log, 41, 50, &MetricsRecord::mean_d_real),
                    std::invalid_argument);
}
