#pragma once

#include "ebgan/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ebgan {

/// Generating recipe for the synthetic multi-modal benchmark: K cluster
/// means in a low-dimensional latent space, each mapped to the output space
/// by its own random matrix.
struct MixtureSpec {
    std::size_t components = 10;       // K
    std::size_t latent_dim = 2;
    std::size_t output_dim = 100;
    std::size_t per_component = 1000;
    double mean_std = 5.0;     // std of cluster mean entries
    double map_std = 5.0;      // std of mapping matrix entries
    double within_scale = 0.5;
    std::uint64_t seed = 42;

    void validate() const;
    bool operator==(const MixtureSpec&) const = default;
};

struct MixtureDataset {
    Matrix x;                         // N x output_dim
    std::vector<std::size_t> labels;  // component index per row
    MixtureSpec spec;
    Matrix means;              // K x latent_dim
    std::vector<Matrix> maps;  // per component, output_dim x latent_dim
    Matrix centroids;          // K x output_dim, mean mapped through its matrix

    std::size_t size() const { return x.rows; }
};

/// Deterministic function of the spec: rows of component j are
/// (N(0, I) * within_scale + mean_j) * map_j^T, in component-major order.
MixtureDataset generate_mixture(const MixtureSpec& spec);

/// n rows drawn uniformly without replacement.
Matrix minibatch(const MixtureDataset& ds, std::size_t n, RngStream& stream);

struct LatentSpec {
    enum class Dist { StdGaussian, Uniform01 };
    std::size_t dim = 10;
    Dist dist = Dist::StdGaussian;

    bool operator==(const LatentSpec&) const = default;
};

Matrix sample_latent(const LatentSpec& spec, std::size_t n, RngStream& stream);

struct LabeledRows {
    Matrix x;
    std::vector<std::size_t> labels;
};

/// CSV with one feature column per output dimension plus a final label column.
void save_dataset_csv(const MixtureDataset& ds, const std::filesystem::path& path);
LabeledRows load_dataset_csv(const std::filesystem::path& path);

}  // namespace ebgan
