#include "ebgan/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ebgan {

std::pair<double, double> disc_means(const MlpParams& theta_d,
                                     const Matrix& real_eval,
                                     const Matrix& fake_eval) {
    if (real_eval.rows < 1 || fake_eval.rows < 1) {
        throw std::invalid_argument("disc_means: empty evaluation set");
    }
    auto mean_of = [&](const Matrix& x) {
        const Matrix d = forward_only(theta_d, x);
        double sum = 0.0;
        for (double v : d.data) sum += v;
        return sum / static_cast<double>(d.size());
    };
    return {mean_of(real_eval), mean_of(fake_eval)};
}

Pca2Projection pca2(const Matrix& real_data) {
    const std::size_t n = real_data.rows;
    const std::size_t d = real_data.cols;
    if (n < 3) throw std::invalid_argument("pca2: need at least 3 rows");
    if (d < 2) throw std::invalid_argument("pca2: need at least 2 columns");

    using ERowMat =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const ERowMat> x(real_data.data.data(),
                                static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(d));
    Eigen::RowVectorXd mean = x.colwise().mean();
    ERowMat centered = x.rowwise() - mean;
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("pca2: eigendecomposition failed");
    }
    const auto& evals = solver.eigenvalues();  // ascending
    const double lambda1 = evals[static_cast<Eigen::Index>(d) - 1];
    const double lambda2 = evals[static_cast<Eigen::Index>(d) - 2];
    if (!(lambda2 > 1e-12 * std::max(1.0, lambda1))) {
        throw std::domain_error("pca2: data has fewer than 2 positive variance directions");
    }

    Pca2Projection proj;
    proj.mean.assign(mean.data(), mean.data() + d);
    proj.directions = Matrix(2, d);
    proj.explained[0] = lambda1;
    proj.explained[1] = lambda2;
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd v =
            solver.eigenvectors().col(static_cast<Eigen::Index>(d) - 1 - c);
        // Canonical sign: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        for (std::size_t j = 0; j < d; ++j) {
            proj.directions.at(static_cast<std::size_t>(c), j) = v[static_cast<Eigen::Index>(j)];
        }
    }
    return proj;
}

Matrix project(const Pca2Projection& proj, const Matrix& x) {
    const std::size_t d = proj.mean.size();
    if (x.cols != d) throw std::invalid_argument("project: dimension mismatch");
    Matrix out(x.rows, 2);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (int c = 0; c < 2; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                acc += (x.at(i, j) - proj.mean[j]) *
                       proj.directions.at(static_cast<std::size_t>(c), j);
            }
            out.at(i, static_cast<std::size_t>(c)) = acc;
        }
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

double sq_distance(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

CoverageReport mode_coverage(const Matrix& fake, const MixtureDataset& ds,
                             double min_fraction, double radius_quantile) {
    if (fake.rows < 1) throw std::invalid_argument("mode_coverage: no fake samples");
    if (fake.cols != ds.x.cols) {
        throw std::invalid_argument("mode_coverage: dimension mismatch with dataset");
    }
    if (!(min_fraction > 0.0 && min_fraction < 1.0)) {
        throw std::invalid_argument("mode_coverage: min_fraction outside (0,1)");
    }
    if (!(radius_quantile > 0.0 && radius_quantile < 1.0)) {
        throw std::invalid_argument("mode_coverage: radius_quantile outside (0,1)");
    }
    const std::size_t k = ds.centroids.rows;
    const std::size_t d = ds.x.cols;

    CoverageReport report;
    report.min_fraction = min_fraction;
    report.radius_quantile = radius_quantile;
    report.assignment.resize(fake.rows);

    std::vector<std::vector<double>> fake_dists(k);
    for (std::size_t i = 0; i < fake.rows; ++i) {
        std::size_t best = 0;
        double best_d = sq_distance(fake.row_ptr(i), ds.centroids.row_ptr(0), d);
        for (std::size_t j = 1; j < k; ++j) {
            const double dist = sq_distance(fake.row_ptr(i), ds.centroids.row_ptr(j), d);
            if (dist < best_d) {
                best_d = dist;
                best = j;
            }
        }
        report.assignment[i] = best;
        fake_dists[best].push_back(std::sqrt(best_d));
    }

    std::vector<std::vector<double>> real_dists(k);
    for (std::size_t i = 0; i < ds.x.rows; ++i) {
        const std::size_t j = ds.labels[i];
        real_dists[j].push_back(
            std::sqrt(sq_distance(ds.x.row_ptr(i), ds.centroids.row_ptr(j), d)));
    }

    report.components.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        ComponentCoverage& c = report.components[j];
        c.component = j;
        c.fraction =
            static_cast<double>(fake_dists[j].size()) / static_cast<double>(fake.rows);
        c.radius = real_dists[j].empty() ? 0.0 : quantile(real_dists[j], radius_quantile);
        if (!fake_dists[j].empty()) {
            c.median_distance = quantile(fake_dists[j], 0.5);
        }
        c.covered = !fake_dists[j].empty() && c.fraction >= min_fraction &&
                    c.median_distance <= c.radius;
        report.covered_count += c.covered ? 1 : 0;
    }
    return report;
}

double posterior_average(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("posterior_average: empty list");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace ebgan
