#pragma once

#include "ebgan/data.hpp"
#include "ebgan/nn.hpp"
#include "ebgan/objectives.hpp"
#include "ebgan/samplers.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ebgan {

enum class TrainMethod { Ebgan, GanMinimax, GanNonSaturating };

std::string method_name(TrainMethod m);
TrainMethod method_from_name(std::string_view name);

struct TrainConfig {
    TrainMethod method = TrainMethod::Ebgan;
    std::size_t j_g = 10;           // generators in the ensemble
    std::size_t batch_size = 100;   // n
    std::size_t iterations = 2500;  // T
    PhiKind phi3 = PhiKind::NegLog1m;
    StepSchedule sched{};  // discriminator step sizes w_t (ensemble method)
    double gen_lr = 0.005;
    // Optional decay eps_t = gen_lr * (t + gen_lr_t0)^(-gen_lr_zeta2);
    // a constant learning rate is the default.
    bool gen_lr_decay = false;
    double gen_lr_zeta2 = 0.0;
    double gen_lr_t0 = 0.0;
    double alpha = 0.9;  // momentum smoothing
    double rho = 1.0;    // momentum bias factor
    double tau = 0.01;   // temperature
    PriorSpec prior{};
    std::vector<std::size_t> disc_sizes{100, 1000, 1};
    std::vector<std::size_t> gen_sizes{10, 1000, 100};
    LatentSpec latent{};
    double adam_beta1 = 0.5;  // baselines
    double adam_beta2 = 0.999;
    double disc_lr = 2e-4;  // baselines; gen_lr doubles as the Adam rate
    std::uint64_t seed = 1;
    std::size_t metric_every = 10;
    double init_std = 1.0;
    std::size_t eval_real_size = 512;
    std::size_t eval_latent_size = 512;
    bool share_z = false;  // share one latent batch across generators in H

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct MetricsRecord {
    std::size_t iter = 0;
    double w_t = 0.0;    // discriminator step applied at this iteration
    double eps_t = 0.0;  // generator learning rate applied at this iteration
    double mean_d_real = 0.0;
    double mean_d_fake = 0.0;
    double jd_estimate = 0.0;
};

struct GeneratorEnsemble {
    std::vector<MlpParams> params;
    std::vector<MsgldState> msgld;
    std::size_t size() const { return params.size(); }
};

struct RunLog {
    std::vector<MetricsRecord> records;  // strictly increasing iterations
    MlpParams discriminator;
    GeneratorEnsemble ensemble;
};

/// Raised when a parameter or logged loss goes non-finite; carries the
/// offending iteration.
class TrainAbortError : public std::runtime_error {
public:
    TrainAbortError(std::size_t iteration, const std::string& message);
    std::size_t iteration() const { return iteration_; }

private:
    std::size_t iteration_;
};

/// Ensemble training: per iteration, every generator takes one MSGLD step on
/// its log-posterior against the frozen discriminator, then the
/// discriminator takes one stochastic-approximation step along the averaged
/// ascent direction over all freshly updated generators.
RunLog train_ebgan(const TrainConfig& cfg, const MixtureDataset& ds);

/// Single-generator baseline: alternating Adam ascent on the discriminator
/// and generator objectives. The generator metric is -log(1-D) for
/// GanMinimax and log(D) for GanNonSaturating.
RunLog train_gan_baseline(const TrainConfig& cfg, const MixtureDataset& ds);

/// Dispatch on cfg.method.
RunLog train(const TrainConfig& cfg, const MixtureDataset& ds);

/// per_gen samples from each generator, concatenated in index order.
Matrix sample_fake(const GeneratorEnsemble& ensemble, std::size_t per_gen,
                   const LatentSpec& latent, RngStream& stream);

/// Mean of a logged series over records with lo <= iter <= hi.
double window_mean(const RunLog& log, std::size_t lo, std::size_t hi,
                   double MetricsRecord::* field);

}  // namespace ebgan
