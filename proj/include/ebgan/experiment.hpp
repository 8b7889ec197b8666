#pragma once

#include "ebgan/config.hpp"
#include "ebgan/metrics.hpp"
#include "ebgan/trainer.hpp"

#include <filesystem>
#include <vector>

namespace ebgan {

struct SeedOutcome {
    std::uint64_t seed = 0;
    RunLog log;
    CoverageReport coverage;
};

struct RunOptions {
    std::filesystem::path out_dir;
    std::size_t jobs = 1;
    bool write_outputs = true;
};

/// Train cfg once per seed (seeds may run concurrently; each writes only its
/// own subdirectory). Per-seed outputs: metrics.csv, coverage.json,
/// pca_points.csv, convergence.svg, coverage.svg, checkpoints/, and the
/// resolved config.
std::vector<SeedOutcome> run_experiment(const ExperimentConfig& cfg,
                                        const MixtureDataset& ds,
                                        const RunOptions& opts);

struct CompareRow {
    std::string label;
    std::uint64_t seed = 0;
    double final_mean_d_real = 0.0;
    double final_mean_d_fake = 0.0;
    double mean_real_gap = 0.0;  // |final-window mean - 0.5|
    double mean_fake_gap = 0.0;
    std::size_t covered_count = 0;
};

/// Run >= 2 configs that share the dataset spec and seed list; emits each
/// config's artifacts under out_dir/<label>/ plus a side-by-side summary.csv.
std::vector<CompareRow> compare_experiments(const std::vector<ExperimentConfig>& cfgs,
                                            const RunOptions& opts);

std::string summary_csv(const std::vector<CompareRow>& rows);

/// Mean of a series over the trailing 100-iteration window.
double final_window_mean(const RunLog& log, double MetricsRecord::* field);

}  // namespace ebgan
