#include "ebgan/trainer.hpp"

#include "ebgan/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ebgan {

std::string method_name(TrainMethod m) {
    switch (m) {
        case TrainMethod::Ebgan: return "ebgan";
        case TrainMethod::GanMinimax: return "gan_minimax";
        case TrainMethod::GanNonSaturating: return "gan_nonsat";
    }
    throw std::logic_error("method_name: bad enum");
}

TrainMethod method_from_name(std::string_view name) {
    if (name == "ebgan") return TrainMethod::Ebgan;
    if (name == "gan_minimax") return TrainMethod::GanMinimax;
    if (name == "gan_nonsat") return TrainMethod::GanNonSaturating;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (j_g < 1) throw std::invalid_argument("TrainConfig: j_g must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (metric_every < 1) throw std::invalid_argument("TrainConfig: metric_every must be >= 1");
    if (disc_sizes.size() < 2 || gen_sizes.size() < 2) {
        throw std::invalid_argument("TrainConfig: networks need at least two layer sizes");
    }
    if (disc_sizes.back() != 1) {
        throw std::invalid_argument("TrainConfig: discriminator must have one output");
    }
    if (gen_sizes.front() != latent.dim) {
        throw std::invalid_argument("TrainConfig: generator input must match latent dim");
    }
    if (gen_sizes.back() != disc_sizes.front()) {
        throw std::invalid_argument(
            "TrainConfig: generator output must match discriminator input");
    }
    if (!is_phi3_kind(phi3)) throw std::invalid_argument("TrainConfig: phi3 is not a phi3 metric");
    sched.validate();
    if (!(gen_lr >= 0.0)) throw std::invalid_argument("TrainConfig: gen_lr must be >= 0");
    if (!(disc_lr >= 0.0)) throw std::invalid_argument("TrainConfig: disc_lr must be >= 0");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("TrainConfig: alpha outside [0,1)");
    if (rho < 0.0) throw std::invalid_argument("TrainConfig: rho must be >= 0");
    if (tau < 0.0) throw std::invalid_argument("TrainConfig: tau must be >= 0");
    if (!(prior.zeta2 > 0.0)) throw std::invalid_argument("TrainConfig: prior variance must be > 0");
    if (!(init_std > 0.0)) throw std::invalid_argument("TrainConfig: init_std must be > 0");
    if (eval_real_size < 1 || eval_latent_size < 1) {
        throw std::invalid_argument("TrainConfig: evaluation sizes must be >= 1");
    }
}

TrainAbortError::TrainAbortError(std::size_t iteration, const std::string& message)
    : std::runtime_error("iteration " + std::to_string(iteration) + ": " + message),
      iteration_(iteration) {}

namespace {

double gen_learning_rate(const TrainConfig& cfg, std::size_t t) {
    if (!cfg.gen_lr_decay) return cfg.gen_lr;
    return cfg.gen_lr *
           std::pow(static_cast<double>(t) + cfg.gen_lr_t0, -cfg.gen_lr_zeta2);
}

// Fixed per-run evaluation sets; the logged series measures parameter
// movement, not batch noise.
struct EvalSets {
    Matrix real;
    Matrix latent;
};

EvalSets make_eval_sets(const TrainConfig& cfg, const MixtureDataset& ds) {
    RngStream real_stream = make_stream(cfg.seed, "eval-real");
    RngStream latent_stream = make_stream(cfg.seed, "eval-z");
    EvalSets ev;
    ev.real = minibatch(ds, std::min(cfg.eval_real_size, ds.size()), real_stream);
    ev.latent = sample_latent(cfg.latent, cfg.eval_latent_size, latent_stream);
    return ev;
}

// Each generator maps its slice of the fixed latent rows, so the fake
// evaluation set is an equal-weight draw from the ensemble mixture.
Matrix ensemble_eval_fake(const GeneratorEnsemble& ensemble, const Matrix& latent) {
    const std::size_t j_g = ensemble.size();
    const std::size_t n = latent.rows;
    const std::size_t d_out = ensemble.params.front().output_dim();
    Matrix fake(n, d_out);
    for (std::size_t j = 0; j < j_g; ++j) {
        const std::size_t lo = j * n / j_g;
        const std::size_t hi = (j + 1) * n / j_g;
        if (lo == hi) continue;
        Matrix slice(hi - lo, latent.cols);
        std::copy(latent.row_ptr(lo), latent.row_ptr(hi), slice.data.data());
        Matrix out = forward_only(ensemble.params[j], slice);
        std::copy(out.data.begin(), out.data.end(), fake.row_ptr(lo));
    }
    return fake;
}

MetricsRecord measure(std::size_t t, double w_t, double eps_t,
                      const MlpParams& disc, const GeneratorEnsemble& ensemble,
                      const EvalSets& ev) {
    MetricsRecord rec;
    rec.iter = t;
    rec.w_t = w_t;
    rec.eps_t = eps_t;
    const Matrix fake = ensemble_eval_fake(ensemble, ev.latent);
    auto [mean_real, mean_fake] = disc_means(disc, ev.real, fake);
    rec.mean_d_real = mean_real;
    rec.mean_d_fake = mean_fake;
    rec.jd_estimate = disc_objective_estimate(disc, ev.real, fake);
    return rec;
}

void guard_finite(std::size_t t, const MlpParams& disc,
                  const GeneratorEnsemble& ensemble) {
    if (!all_finite(disc)) {
        throw TrainAbortError(t, "discriminator parameters went non-finite");
    }
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        if (!all_finite(ensemble.params[j])) {
            throw TrainAbortError(
                t, "generator " + std::to_string(j + 1) + " parameters went non-finite");
        }
    }
}

void guard_record(std::size_t t, const MetricsRecord& rec) {
    if (!std::isfinite(rec.mean_d_real) || !std::isfinite(rec.mean_d_fake) ||
        !std::isfinite(rec.jd_estimate)) {
        throw TrainAbortError(t, "logged losses went non-finite");
    }
}

GeneratorEnsemble init_ensemble(const TrainConfig& cfg, std::size_t count) {
    GeneratorEnsemble ensemble;
    ensemble.params.reserve(count);
    ensemble.msgld.reserve(count);
    for (std::size_t j = 1; j <= count; ++j) {
        RngStream stream = make_stream(cfg.seed, "init-gen", j, 0);
        ensemble.params.push_back(init_mlp(cfg.gen_sizes, Activation::Relu,
                                           Activation::Identity, cfg.init_std, stream));
        ensemble.msgld.push_back(
            make_msgld_state(ensemble.params.back(), cfg.alpha, cfg.rho, cfg.tau));
    }
    return ensemble;
}

MlpParams init_discriminator(const TrainConfig& cfg) {
    RngStream stream = make_stream(cfg.seed, "init-disc");
    return init_mlp(cfg.disc_sizes, Activation::Relu, Activation::Sigmoid,
                    cfg.init_std, stream);
}

void check_dataset(const TrainConfig& cfg, const MixtureDataset& ds) {
    if (ds.x.cols != cfg.disc_sizes.front()) {
        throw std::invalid_argument("train: dataset width does not match discriminator input");
    }
    if (cfg.batch_size > ds.size()) {
        throw std::invalid_argument("train: batch_size exceeds dataset size");
    }
}

}  // namespace

RunLog train_ebgan(const TrainConfig& cfg, const MixtureDataset& ds) {
    if (cfg.method != TrainMethod::Ebgan) {
        throw std::invalid_argument("train_ebgan: config method mismatch");
    }
    cfg.validate();
    check_dataset(cfg, ds);

    const std::size_t n = cfg.batch_size;
    const std::size_t total = ds.size();

    RunLog log;
    log.discriminator = init_discriminator(cfg);
    log.ensemble = init_ensemble(cfg, cfg.j_g);
    const EvalSets ev = make_eval_sets(cfg, ds);

    log.records.push_back(measure(0, 0.0, 0.0, log.discriminator, log.ensemble, ev));
    guard_record(0, log.records.back());

    std::vector<Matrix> z_batches;
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const double eps_t = gen_learning_rate(cfg, t);

        // (i) Sampling step against the frozen discriminator.
        for (std::size_t j = 1; j <= cfg.j_g; ++j) {
            RngStream gen_stream = make_stream(cfg.seed, "gen", j, t);
            const Matrix z = sample_latent(cfg.latent, n, gen_stream);
            const MlpParams grad = gen_log_post_grad(
                log.ensemble.params[j - 1], log.discriminator, z, total, cfg.prior,
                cfg.phi3);
            msgld_step(log.ensemble.params[j - 1], log.ensemble.msgld[j - 1], grad,
                       eps_t, gen_stream);
        }

        // (ii) Parameter updating step over all updated generators.
        RngStream batch_stream = make_stream(cfg.seed, "batch", 0, t);
        const Matrix x = minibatch(ds, n, batch_stream);
        z_batches.clear();
        if (cfg.share_z) {
            RngStream z_stream = make_stream(cfg.seed, "disc", 0, t);
            z_batches.push_back(sample_latent(cfg.latent, n, z_stream));
        } else {
            for (std::size_t j = 1; j <= cfg.j_g; ++j) {
                RngStream z_stream = make_stream(cfg.seed, "disc", j, t);
                z_batches.push_back(sample_latent(cfg.latent, n, z_stream));
            }
        }
        const MlpParams h = disc_ascent_grad(log.discriminator, log.ensemble.params,
                                             x, z_batches);
        const double w_t = step_size(t, cfg.sched);
        sa_update(log.discriminator, h, w_t);

        guard_finite(t, log.discriminator, log.ensemble);
        if (t % cfg.metric_every == 0 || t == cfg.iterations) {
            log.records.push_back(
                measure(t, w_t, eps_t, log.discriminator, log.ensemble, ev));
            guard_record(t, log.records.back());
        }
    }
    return log;
}

RunLog train_gan_baseline(const TrainConfig& cfg, const MixtureDataset& ds) {
    if (cfg.method != TrainMethod::GanMinimax &&
        cfg.method != TrainMethod::GanNonSaturating) {
        throw std::invalid_argument("train_gan_baseline: config method mismatch");
    }
    cfg.validate();
    check_dataset(cfg, ds);
    const PhiKind phi3 = cfg.method == TrainMethod::GanMinimax ? PhiKind::NegLog1m
                                                               : PhiKind::LogNS;
    const std::size_t n = cfg.batch_size;

    RunLog log;
    log.discriminator = init_discriminator(cfg);
    log.ensemble = init_ensemble(cfg, 1);
    AdamState adam_d = make_adam_state(log.discriminator, cfg.adam_beta1, cfg.adam_beta2);
    AdamState adam_g =
        make_adam_state(log.ensemble.params[0], cfg.adam_beta1, cfg.adam_beta2);
    const EvalSets ev = make_eval_sets(cfg, ds);

    log.records.push_back(measure(0, 0.0, 0.0, log.discriminator, log.ensemble, ev));
    guard_record(0, log.records.back());

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        // Discriminator ascent.
        RngStream batch_stream = make_stream(cfg.seed, "batch", 0, t);
        const Matrix x = minibatch(ds, n, batch_stream);
        RngStream zd_stream = make_stream(cfg.seed, "disc", 1, t);
        const Matrix z_d = sample_latent(cfg.latent, n, zd_stream);
        if (cfg.disc_lr > 0.0) {
            const MlpParams h = disc_ascent_grad(
                log.discriminator, log.ensemble.params, x, {&z_d, 1});
            adam_step(log.discriminator, adam_d, h, cfg.disc_lr);
        }

        // Generator ascent on the mini-batch estimate of its objective.
        RngStream zg_stream = make_stream(cfg.seed, "gen", 1, t);
        const Matrix z_g = sample_latent(cfg.latent, n, zg_stream);
        if (cfg.gen_lr > 0.0) {
            MlpParams g = phi3_sum_grad(log.ensemble.params[0], log.discriminator,
                                        z_g, phi3);
            const double inv_n = 1.0 / static_cast<double>(n);
            for_each_tensor(g, [&](Matrix& m) {
                for (double& v : m.data) v *= inv_n;
            });
            adam_step(log.ensemble.params[0], adam_g, g, cfg.gen_lr);
        }

        guard_finite(t, log.discriminator, log.ensemble);
        if (t % cfg.metric_every == 0 || t == cfg.iterations) {
            log.records.push_back(measure(t, cfg.disc_lr, cfg.gen_lr,
                                          log.discriminator, log.ensemble, ev));
            guard_record(t, log.records.back());
        }
    }
    return log;
}

RunLog train(const TrainConfig& cfg, const MixtureDataset& ds) {
    return cfg.method == TrainMethod::Ebgan ? train_ebgan(cfg, ds)
                                            : train_gan_baseline(cfg, ds);
}

Matrix sample_fake(const GeneratorEnsemble& ensemble, std::size_t per_gen,
                   const LatentSpec& latent, RngStream& stream) {
    if (per_gen < 1) throw std::invalid_argument("sample_fake: per_gen must be >= 1");
    if (ensemble.size() == 0) throw std::invalid_argument("sample_fake: empty ensemble");
    const std::size_t d_out = ensemble.params.front().output_dim();
    Matrix fake(ensemble.size() * per_gen, d_out);
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        const Matrix z = sample_latent(latent, per_gen, stream);
        const Matrix out = forward_only(ensemble.params[j], z);
        std::copy(out.data.begin(), out.data.end(), fake.row_ptr(j * per_gen));
    }
    return fake;
}

double window_mean(const RunLog& log, std::size_t lo, std::size_t hi,
                   double MetricsRecord::* field) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const MetricsRecord& rec : log.records) {
        if (rec.iter >= lo && rec.iter <= hi) {
            sum += rec.*field;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("window_mean: no records in window");
    return sum / static_cast<double>(count);
}

}  // namespace ebgan
