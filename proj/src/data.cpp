#include "ebgan/data.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ebgan {

void MixtureSpec::validate() const {
    if (components < 1) throw std::invalid_argument("MixtureSpec: components must be >= 1");
    if (latent_dim < 1 || output_dim < 1 || per_component < 1) {
        throw std::invalid_argument("MixtureSpec: dimensions must be >= 1");
    }
    if (mean_std < 0.0 || map_std < 0.0 || within_scale < 0.0) {
        throw std::invalid_argument("MixtureSpec: scales must be >= 0");
    }
}

namespace {

// out[k] = sum_d latent[d] * map(k, d); the same loop maps sample rows and
// centroids so the within_scale = 0 case reproduces centroids bit-exactly.
void map_row(const double* latent, const Matrix& map, double* out) {
    for (std::size_t k = 0; k < map.rows; ++k) {
        double acc = 0.0;
        for (std::size_t d = 0; d < map.cols; ++d) {
            acc += latent[d] * map.at(k, d);
        }
        out[k] = acc;
    }
}

}  // namespace

MixtureDataset generate_mixture(const MixtureSpec& spec) {
    spec.validate();
    const std::size_t k = spec.components;
    const std::size_t n_total = k * spec.per_component;

    RngStream mean_stream = make_stream(spec.seed, "mixture-means");
    RngStream map_stream = make_stream(spec.seed, "mixture-maps");
    RngStream noise_stream = make_stream(spec.seed, "mixture-noise");

    MixtureDataset ds;
    ds.spec = spec;
    ds.means = sample_gaussian(mean_stream, k, spec.latent_dim, 0.0, spec.mean_std);
    ds.maps.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        ds.maps.push_back(sample_gaussian(map_stream, spec.output_dim,
                                          spec.latent_dim, 0.0, spec.map_std));
    }

    ds.x = Matrix(n_total, spec.output_dim);
    ds.centroids = Matrix(k, spec.output_dim);
    ds.labels.resize(n_total);

    std::vector<double> latent(spec.latent_dim);
    std::size_t row = 0;
    for (std::size_t j = 0; j < k; ++j) {
        map_row(ds.means.row_ptr(j), ds.maps[j], ds.centroids.row_ptr(j));
        for (std::size_t i = 0; i < spec.per_component; ++i, ++row) {
            for (std::size_t d = 0; d < spec.latent_dim; ++d) {
                latent[d] = noise_stream.next_gaussian(0.0, 1.0) * spec.within_scale +
                            ds.means.at(j, d);
            }
            map_row(latent.data(), ds.maps[j], ds.x.row_ptr(row));
            ds.labels[row] = j;
        }
    }
    return ds;
}

Matrix minibatch(const MixtureDataset& ds, std::size_t n, RngStream& stream) {
    const std::size_t total = ds.size();
    if (n < 1 || n > total) {
        throw std::invalid_argument("minibatch: need 1 <= n <= dataset size");
    }
    // Partial Fisher-Yates over row indices.
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    Matrix batch(n, ds.x.cols);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + stream.next_below(total - i);
        std::swap(idx[i], idx[j]);
        const double* src = ds.x.row_ptr(idx[i]);
        std::copy(src, src + ds.x.cols, batch.row_ptr(i));
    }
    return batch;
}

Matrix sample_latent(const LatentSpec& spec, std::size_t n, RngStream& stream) {
    if (spec.dim < 1) throw std::invalid_argument("sample_latent: dim must be >= 1");
    if (n < 1) throw std::invalid_argument("sample_latent: n must be >= 1");
    Matrix z(n, spec.dim);
    switch (spec.dist) {
        case LatentSpec::Dist::StdGaussian:
            for (double& v : z.data) v = stream.next_gaussian(0.0, 1.0);
            break;
        case LatentSpec::Dist::Uniform01:
            for (double& v : z.data) v = stream.next_uniform();
            break;
    }
    return z;
}

void save_dataset_csv(const MixtureDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset_csv: cannot open " + path.string());
    for (std::size_t j = 0; j < ds.x.cols; ++j) out << 'f' << j << ',';
    out << "label\n";
    for (std::size_t i = 0; i < ds.x.rows; ++i) {
        for (std::size_t j = 0; j < ds.x.cols; ++j) {
            out << fmt17(ds.x.at(i, j)) << ',';
        }
        out << ds.labels[i] << '\n';
    }
    if (!out) throw std::runtime_error("save_dataset_csv: write failed");
}

LabeledRows load_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_dataset_csv: empty file");
    std::size_t cols = 0;
    for (char c : line) cols += (c == ',');

    std::vector<double> values;
    std::vector<std::size_t> labels;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t j = 0; j < cols; ++j) {
            if (!std::getline(ss, cell, ',')) {
                throw std::runtime_error("load_dataset_csv: short row");
            }
            values.push_back(parse_double(cell));
        }
        if (!std::getline(ss, cell)) throw std::runtime_error("load_dataset_csv: missing label");
        labels.push_back(static_cast<std::size_t>(std::stoull(cell)));
        ++rows;
    }
    LabeledRows lr;
    lr.x = Matrix(rows, cols);
    lr.x.data = std::move(values);
    lr.labels = std::move(labels);
    return lr;
}

}  // namespace ebgan
