#pragma once

#include <cstddef>
#include <vector>

namespace ebgan {

/// Discrete probability vector standing in for a data or model density.
using Histogram = std::vector<double>;

/// Entries must be >= 0 and sum to 1 within 1e-12.
void validate_histogram(const Histogram& h);

/// Closed-form per-bin maximizer p/(p+q) of p*log(D) + q*log(1-D);
/// bins with p = q = 0 get 0.5 by convention.
std::vector<double> optimal_discriminator(const Histogram& p, const Histogram& q);

/// Independent per-bin maximization of p*log(D) + q*log(1-D) by dense grid
/// scan over [0,1] followed by ternary-search refinement; checks the
/// closed form without using it.
std::vector<double> bruteforce_max_jd(const Histogram& p, const Histogram& q,
                                      std::size_t grid_points);

/// C(p, q) = sum_x [ p log(p/(p+q)) + q log(q/(p+q)) ], with 0*log 0 := 0.
/// Globally minimized at -log 4, attained exactly when q = p.
double virtual_criterion(const Histogram& p, const Histogram& q);

struct SweepResult {
    double s_at_min = 0.0;
    double value_at_min = 0.0;
    double value_at_start = 0.0;  // C at s = 0, i.e. C(p, q0)
};

/// Evaluate C along the mixing path q(s) = (1-s)*q0 + s*p on a uniform grid
/// of grid_points values of s in [0, 1] and return the minimizer.
SweepResult sweep_minimum(const Histogram& p, const Histogram& q0,
                          std::size_t grid_points);

}  // namespace ebgan
