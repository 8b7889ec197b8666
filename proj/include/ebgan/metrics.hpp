#pragma once

#include "ebgan/data.hpp"
#include "ebgan/nn.hpp"
#include "ebgan/numerics.hpp"

#include <span>
#include <utility>
#include <vector>

namespace ebgan {

/// Arithmetic means of D over a real and a fake evaluation set; both drift
/// toward 1/2 as training approaches the equilibrium.
std::pair<double, double> disc_means(const MlpParams& theta_d,
                                     const Matrix& real_eval,
                                     const Matrix& fake_eval);

struct Pca2Projection {
    std::vector<double> mean;  // per input dimension
    Matrix directions;         // 2 x d, orthonormal rows
    double explained[2];       // eigenvalues, nonincreasing
};

/// Top-2 eigenvectors of the sample covariance (divisor n-1). Signs are
/// canonicalized so the entry of largest magnitude is positive.
Pca2Projection pca2(const Matrix& real_data);

/// Centered dot products with the two principal directions.
Matrix project(const Pca2Projection& proj, const Matrix& x);

struct ComponentCoverage {
    std::size_t component = 0;
    double fraction = 0.0;         // share of fake rows assigned here
    double median_distance = 0.0;  // of assigned fakes to the centroid
    double radius = 0.0;           // quantile of real distances to the centroid
    bool covered = false;
};

struct CoverageReport {
    double min_fraction = 0.02;
    double radius_quantile = 0.95;
    std::size_t covered_count = 0;
    std::vector<ComponentCoverage> components;
    std::vector<std::size_t> assignment;  // nearest centroid per fake row
};

/// Assign each fake row to its nearest centroid; component j counts as
/// covered when it holds at least min_fraction of the fakes and the median
/// distance of those fakes is within the radius_quantile quantile of the
/// real samples' distances for j.
CoverageReport mode_coverage(const Matrix& fake, const MixtureDataset& ds,
                             double min_fraction = 0.02,
                             double radius_quantile = 0.95);

/// Posterior-sample estimate of a test function: the plain average.
double posterior_average(std::span<const double> values);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace ebgan
