#include "ebgan/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace ebgan {

void validate_histogram(const Histogram& h) {
    if (h.empty()) throw std::invalid_argument("histogram: empty");
    double sum = 0.0;
    for (double v : h) {
        if (!(v >= 0.0)) throw std::invalid_argument("histogram: negative or NaN entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("histogram: entries must sum to 1");
    }
}

std::vector<double> optimal_discriminator(const Histogram& p, const Histogram& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("optimal_discriminator: length mismatch");
    }
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        d[i] = (p[i] == 0.0 && q[i] == 0.0) ? 0.5 : p[i] / (p[i] + q[i]);
    }
    return d;
}

namespace {

// Per-bin integrand p*log(D) + q*log(1-D) with the 0*log 0 := 0 convention,
// so boundary values are exact when a mass vanishes.
double bin_objective(double p, double q, double d) {
    const double t1 = (p == 0.0) ? 0.0 : p * std::log(d);
    const double t2 = (q == 0.0) ? 0.0 : q * std::log(1.0 - d);
    return t1 + t2;
}

double maximize_bin(double p, double q, std::size_t grid_points) {
    if (p == 0.0 && q == 0.0) return 0.5;
    double best_d = 0.0;
    double best_v = bin_objective(p, q, 0.0);
    for (std::size_t i = 1; i < grid_points; ++i) {
        const double d =
            static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double v = bin_objective(p, q, d);
        if (v > best_v) {
            best_v = v;
            best_d = d;
        }
    }
    // The objective is strictly concave on (0,1), so ternary search around
    // the best grid point converges to the maximizer.
    const double step = 1.0 / static_cast<double>(grid_points - 1);
    double lo = std::max(0.0, best_d - step);
    double hi = std::min(1.0, best_d + step);
    while (hi - lo > 1e-10) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (bin_objective(p, q, m1) < bin_objective(p, q, m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> bruteforce_max_jd(const Histogram& p, const Histogram& q,
                                      std::size_t grid_points) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("bruteforce_max_jd: length mismatch");
    }
    if (grid_points < 3) {
        throw std::invalid_argument("bruteforce_max_jd: need at least 3 grid points");
    }
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        d[i] = maximize_bin(p[i], q[i], grid_points);
    }
    return d;
}

double virtual_criterion(const Histogram& p, const Histogram& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("virtual_criterion: length mismatch");
    }
    double c = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double denom = p[i] + q[i];
        if (p[i] > 0.0) c += p[i] * std::log(p[i] / denom);
        if (q[i] > 0.0) c += q[i] * std::log(q[i] / denom);
    }
    return c;
}

SweepResult sweep_minimum(const Histogram& p, const Histogram& q0,
                          std::size_t grid_points) {
    if (p.size() != q0.size()) {
        throw std::invalid_argument("sweep_minimum: length mismatch");
    }
    if (grid_points < 2) {
        throw std::invalid_argument("sweep_minimum: need at least 2 grid points");
    }
    SweepResult result;
    Histogram q(p.size());
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double s =
            static_cast<double>(i) / static_cast<double>(grid_points - 1);
        for (std::size_t b = 0; b < p.size(); ++b) {
            q[b] = (1.0 - s) * q0[b] + s * p[b];
        }
        const double c = virtual_criterion(p, q);
        if (i == 0) {
            result.value_at_start = c;
            result.s_at_min = s;
            result.value_at_min = c;
        } else if (c < result.value_at_min) {
            result.s_at_min = s;
            result.value_at_min = c;
        }
    }
    return result;
}

}  // namespace ebgan
