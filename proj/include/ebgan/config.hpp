#pragma once

#include "ebgan/data.hpp"
#include "ebgan/trainer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ebgan {

struct CoverageParams {
    double min_fraction = 0.02;
    double radius_quantile = 0.95;

    bool operator==(const CoverageParams&) const = default;
};

/// Everything one experiment needs: training setup, dataset recipe, metric
/// parameters, and the seed list. Parsed from a flat key = value file; the
/// resolved copy echoed next to each run's outputs reparses to an equal
/// config.
struct ExperimentConfig {
    std::string label = "run";
    TrainConfig train;
    MixtureSpec mixture;
    CoverageParams coverage;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::size_t fake_per_generator = 1000;

    void validate() const;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Parse flat "key = value" text ('#' starts a comment). Unknown keys and
/// malformed values raise std::invalid_argument naming the key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, defaults included.
std::string serialize_config(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

}  // namespace ebgan
