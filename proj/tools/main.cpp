#include "ebgan/config.hpp"
#include "ebgan/data.hpp"
#include "ebgan/experiment.hpp"
#include "ebgan/oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

namespace {

using namespace ebgan;

ExperimentConfig load_with_overrides(const std::string& path,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& method) {
    ExperimentConfig cfg = load_config(path);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!method.empty()) cfg.train.method = method_from_name(method);
    cfg.validate();
    return cfg;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::uint64_t>& seeds, const std::string& method,
            std::size_t jobs) {
    const ExperimentConfig cfg = load_with_overrides(config_path, seeds, method);
    const MixtureDataset ds = generate_mixture(cfg.mixture);
    const RunOptions opts{out_dir, jobs, true};
    const auto outcomes = run_experiment(cfg, ds, opts);
    for (const SeedOutcome& o : outcomes) {
        std::printf("seed %llu: final mean D(real)=%.4f mean D(fake)=%.4f covered=%zu/%zu\n",
                    static_cast<unsigned long long>(o.seed),
                    final_window_mean(o.log, &MetricsRecord::mean_d_real),
                    final_window_mean(o.log, &MetricsRecord::mean_d_fake),
                    o.coverage.covered_count, o.coverage.components.size());
    }
    std::printf("outputs written under %s\n", out_dir.c_str());
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                const std::string& out_dir, std::size_t jobs) {
    std::vector<ExperimentConfig> cfgs;
    for (const std::string& p : config_paths) cfgs.push_back(load_config(p));
    const RunOptions opts{out_dir, jobs, true};
    const auto rows = compare_experiments(cfgs, opts);
    std::printf("%-16s %6s %12s %12s %8s\n", "label", "seed", "real_gap",
                "fake_gap", "covered");
    for (const CompareRow& r : rows) {
        std::printf("%-16s %6llu %12.4f %12.4f %8zu\n", r.label.c_str(),
                    static_cast<unsigned long long>(r.seed), r.mean_real_gap,
                    r.mean_fake_gap, r.covered_count);
    }
    std::printf("summary written to %s/summary.csv\n", out_dir.c_str());
    return 0;
}

// Print the closed-form-vs-bruteforce optimal discriminator check and the
// mixing-path minimum of the virtual criterion on random histograms.
int cmd_oracle(std::uint64_t seed, std::size_t pairs, std::size_t bins) {
    RngStream stream = make_stream(seed, "oracle-cli");
    auto random_hist = [&stream](std::size_t n) {
        Histogram h(n);
        double sum = 0.0;
        for (double& v : h) {
            v = stream.next_uniform() + 1e-3;
            sum += v;
        }
        for (double& v : h) v /= sum;
        return h;
    };

    std::printf("optimal discriminator: formula p/(p+q) vs per-bin brute force\n");
    std::printf("%6s %14s\n", "pair", "max |diff|");
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const Histogram p = random_hist(bins);
        const Histogram q = random_hist(bins);
        const auto formula = optimal_discriminator(p, q);
        const auto brute = bruteforce_max_jd(p, q, 2001);
        double diff = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            diff = std::max(diff, std::abs(formula[b] - brute[b]));
        }
        worst = std::max(worst, diff);
        std::printf("%6zu %14.3e\n", i + 1, diff);
    }
    std::printf("worst disagreement over %zu pairs: %.3e\n\n", pairs, worst);

    std::printf("virtual criterion along q(s) = (1-s) q0 + s p\n");
    std::printf("%6s %10s %16s %16s\n", "trial", "argmin s", "min C", "C + log 4");
    for (std::size_t i = 0; i < 5; ++i) {
        const Histogram p = random_hist(bins);
        const Histogram q0 = random_hist(bins);
        const SweepResult res = sweep_minimum(p, q0, 1001);
        std::printf("%6zu %10.4f %16.9f %16.3e\n", i + 1, res.s_at_min,
                    res.value_at_min, res.value_at_min + std::log(4.0));
    }
    return 0;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_file) {
    const ExperimentConfig cfg = load_config(config_path);
    const MixtureDataset ds = generate_mixture(cfg.mixture);
    save_dataset_csv(ds, out_file);
    std::printf("wrote %zu rows x %zu features to %s\n", ds.x.rows, ds.x.cols,
                out_file.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Empirical Bayesian GAN: training, baselines, and equilibrium checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, method, out_file;
    std::vector<std::string> config_paths;
    std::vector<std::uint64_t> seeds;
    std::size_t jobs = 1;
    std::uint64_t oracle_seed = 7;
    std::size_t oracle_pairs = 10;
    std::size_t oracle_bins = 8;

    CLI::App* run = app.add_subcommand("run", "train one config across its seed list");
    run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seeds, "override the config seed list");
    run->add_option("--method", method, "override the config method");
    run->add_option("--jobs", jobs, "concurrent seeds");

    CLI::App* compare = app.add_subcommand("compare", "run several configs on one dataset");
    compare->add_option("--config", config_paths, "config files (two or more)")
        ->required()
        ->expected(2, -1)
        ->check(CLI::ExistingFile);
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_option("--jobs", jobs, "concurrent seeds");

    CLI::App* oracle = app.add_subcommand("oracle", "print equilibrium verification tables");
    oracle->add_option("--seed", oracle_seed, "rng seed");
    oracle->add_option("--pairs", oracle_pairs, "random histogram pairs");
    oracle->add_option("--bins", oracle_bins, "bins per histogram");

    CLI::App* gen_data = app.add_subcommand("gen-data", "write the mixture dataset as CSV");
    gen_data->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    gen_data->add_option("--out", out_file, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seeds, method, jobs);
        if (compare->parsed()) return cmd_compare(config_paths, out_dir, jobs);
        if (oracle->parsed()) return cmd_oracle(oracle_seed, oracle_pairs, oracle_bins);
        if (gen_data->parsed()) return cmd_gen_data(config_path, out_file);
    } catch (const ebgan::TrainAbortError& e) {
        std::cerr << "training aborted at " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
