#include "ebgan/experiment.hpp"

#include "ebgan/svg.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <thread>

namespace ebgan {

namespace {

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count;
                     i = next.fetch_add(1)) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string metrics_csv(const RunLog& log) {
    std::string out = "iter,w_t,eps_t,mean_d_real,mean_d_fake,jd_estimate\n";
    for (const MetricsRecord& r : log.records) {
        out += std::to_string(r.iter);
        out += ',';
        out += fmt17(r.w_t);
        out += ',';
        out += fmt17(r.eps_t);
        out += ',';
        out += fmt17(r.mean_d_real);
        out += ',';
        out += fmt17(r.mean_d_fake);
        out += ',';
        out += fmt17(r.jd_estimate);
        out += '\n';
    }
    return out;
}

std::string coverage_json(const CoverageReport& report) {
    nlohmann::ordered_json j;
    j["min_fraction"] = report.min_fraction;
    j["radius_quantile"] = report.radius_quantile;
    j["covered_count"] = report.covered_count;
    j["components"] = nlohmann::ordered_json::array();
    for (const ComponentCoverage& c : report.components) {
        nlohmann::ordered_json cj;
        cj["component"] = c.component;
        cj["fraction"] = c.fraction;
        cj["median_distance"] = c.median_distance;
        cj["radius"] = c.radius;
        cj["covered"] = c.covered;
        j["components"].push_back(cj);
    }
    return j.dump(2) + "\n";
}

std::string pca_points_csv(const Pca2Projection& proj, const MixtureDataset& ds,
                           const Matrix& fake, const CoverageReport& report) {
    const Matrix real_pts = project(proj, ds.x);
    const Matrix fake_pts = project(proj, fake);
    std::string out = "x,y,source,component\n";
    for (std::size_t i = 0; i < real_pts.rows; ++i) {
        out += fmt17(real_pts.at(i, 0)) + ',' + fmt17(real_pts.at(i, 1)) +
               ",real," + std::to_string(ds.labels[i]) + '\n';
    }
    for (std::size_t i = 0; i < fake_pts.rows; ++i) {
        out += fmt17(fake_pts.at(i, 0)) + ',' + fmt17(fake_pts.at(i, 1)) +
               ",fake," + std::to_string(report.assignment[i]) + '\n';
    }
    return out;
}

std::string convergence_svg(const RunLog& log) {
    Series real{"mean D(real)", {}, {}};
    Series fake{"mean D(fake)", {}, {}};
    for (const MetricsRecord& r : log.records) {
        real.x.push_back(static_cast<double>(r.iter));
        real.y.push_back(r.mean_d_real);
        fake.x.push_back(static_cast<double>(r.iter));
        fake.y.push_back(r.mean_d_fake);
    }
    return render_line_chart({real, fake}, "Nash equilibrium convergence",
                             "iteration", "mean discriminator output", {0.5});
}

std::string coverage_svg(const Pca2Projection& proj, const MixtureDataset& ds,
                         const Matrix& fake) {
    const Matrix real_pts = project(proj, ds.x);
    const Matrix fake_pts = project(proj, fake);
    std::vector<ScatterPoint> pts;
    auto push = [&pts](const Matrix& m, std::size_t cls) {
        // Stride-subsample so the plot stays light; the CSV holds all rows.
        const std::size_t stride = std::max<std::size_t>(1, m.rows / 2000);
        for (std::size_t i = 0; i < m.rows; i += stride) {
            pts.push_back({m.at(i, 0), m.at(i, 1), cls});
        }
    };
    push(real_pts, 0);
    push(fake_pts, 1);
    return render_scatter(pts, {"real", "fake"}, "Component recovery (PCA)",
                          "PC1", "PC2");
}

void write_seed_outputs(const ExperimentConfig& cfg, const MixtureDataset& ds,
                        const SeedOutcome& outcome, const Matrix& fake,
                        const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "checkpoints");
    write_text_file(dir / "metrics.csv", metrics_csv(outcome.log));
    write_text_file(dir / "coverage.json", coverage_json(outcome.coverage));

    const Pca2Projection proj = pca2(ds.x);
    write_text_file(dir / "pca_points.csv",
                    pca_points_csv(proj, ds, fake, outcome.coverage));
    write_text_file(dir / "convergence.svg", convergence_svg(outcome.log));
    write_text_file(dir / "coverage.svg", coverage_svg(proj, ds, fake));

    ExperimentConfig resolved = cfg;
    resolved.seeds = {outcome.seed};
    save_config(resolved, dir / "resolved_config.txt");

    save_mlp(outcome.log.discriminator, dir / "checkpoints" / "discriminator.mlp");
    for (std::size_t j = 0; j < outcome.log.ensemble.size(); ++j) {
        char name[48];
        std::snprintf(name, sizeof(name), "generator_%02zu.mlp", j + 1);
        save_mlp(outcome.log.ensemble.params[j], dir / "checkpoints" / name);
    }
}

}  // namespace

double final_window_mean(const RunLog& log, double MetricsRecord::* field) {
    const std::size_t last = log.records.back().iter;
    const std::size_t lo = last >= 100 ? last - 100 : 0;
    return window_mean(log, lo, last, field);
}

std::vector<SeedOutcome> run_experiment(const ExperimentConfig& cfg,
                                        const MixtureDataset& ds,
                                        const RunOptions& opts) {
    cfg.validate();
    std::vector<SeedOutcome> outcomes(cfg.seeds.size());
    if (opts.write_outputs) std::filesystem::create_directories(opts.out_dir);

    parallel_for(cfg.seeds.size(), opts.jobs, [&](std::size_t i) {
        TrainConfig tc = cfg.train;
        tc.seed = cfg.seeds[i];
        SeedOutcome& outcome = outcomes[i];
        outcome.seed = tc.seed;
        outcome.log = train(tc, ds);

        RngStream fake_stream = make_stream(tc.seed, "fake-final");
        const Matrix fake = sample_fake(outcome.log.ensemble, cfg.fake_per_generator,
                                        tc.latent, fake_stream);
        outcome.coverage = mode_coverage(fake, ds, cfg.coverage.min_fraction,
                                         cfg.coverage.radius_quantile);
        if (opts.write_outputs) {
            const auto dir = opts.out_dir / ("seed_" + std::to_string(tc.seed));
            std::filesystem::create_directories(dir);
            write_seed_outputs(cfg, ds, outcome, fake, dir);
        }
    });
    return outcomes;
}

std::vector<CompareRow> compare_experiments(const std::vector<ExperimentConfig>& cfgs,
                                            const RunOptions& opts) {
    if (cfgs.size() < 2) {
        throw std::invalid_argument("compare: need at least two configs");
    }
    for (const ExperimentConfig& c : cfgs) {
        if (!(c.mixture == cfgs.front().mixture)) {
            throw std::invalid_argument("compare: configs must share the dataset spec");
        }
        if (c.seeds != cfgs.front().seeds) {
            throw std::invalid_argument("compare: configs must share the seed list");
        }
    }
    const MixtureDataset ds = generate_mixture(cfgs.front().mixture);

    std::vector<CompareRow> rows;
    for (const ExperimentConfig& c : cfgs) {
        RunOptions sub = opts;
        sub.out_dir = opts.out_dir / c.label;
        const std::vector<SeedOutcome> outcomes = run_experiment(c, ds, sub);
        for (const SeedOutcome& o : outcomes) {
            CompareRow row;
            row.label = c.label;
            row.seed = o.seed;
            row.final_mean_d_real = final_window_mean(o.log, &MetricsRecord::mean_d_real);
            row.final_mean_d_fake = final_window_mean(o.log, &MetricsRecord::mean_d_fake);
            row.mean_real_gap = std::abs(row.final_mean_d_real - 0.5);
            row.mean_fake_gap = std::abs(row.final_mean_d_fake - 0.5);
            row.covered_count = o.coverage.covered_count;
            rows.push_back(row);
        }
    }
    if (opts.write_outputs) {
        std::filesystem::create_directories(opts.out_dir);
        write_text_file(opts.out_dir / "summary.csv", summary_csv(rows));
    }
    return rows;
}

std::string summary_csv(const std::vector<CompareRow>& rows) {
    std::string out =
        "label,seed,final_mean_d_real,final_mean_d_fake,mean_real_gap,"
        "mean_fake_gap,covered_count\n";
    for (const CompareRow& r : rows) {
        out += r.label + ',' + std::to_string(r.seed) + ',' +
               fmt17(r.final_mean_d_real) + ',' + fmt17(r.final_mean_d_fake) + ',' +
               fmt17(r.mean_real_gap) + ',' + fmt17(r.mean_fake_gap) + ',' +
               std::to_string(r.covered_count) + '\n';
    }
    return out;
}

}  // namespace ebgan
