#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ebgan {

/// Deterministic counter-based random stream (SplitMix64 core).
///
/// A stream is a pure function of (seed, label): the i-th draw depends only
/// on the derived key and the draw counter, so streams can be recreated at
/// any point and derived per-(generator, iteration) without shared state.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label);

    /// Derive an independent child stream; extra integer tags allow
    /// per-index derivation such as ("gen", j, t) without string building.
    RngStream substream(std::string_view label, std::uint64_t a = 0,
                        std::uint64_t b = 0) const;

    std::uint64_t next_u64();
    /// Unbiased draw in [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound);
    /// Uniform draw in [0, 1).
    double next_uniform();
    /// One N(mean, std^2) draw via Box-Muller (cosine branch, two uniforms
    /// per draw; the method is fixed so sequences are reproducible).
    double next_gaussian(double mean, double std_dev);

    std::uint64_t seed() const { return seed_; }
    const std::string& label() const { return label_; }
    std::uint64_t counter() const { return counter_; }

private:
    RngStream(std::uint64_t seed, std::string key, std::uint64_t derived_key);

    std::uint64_t seed_ = 0;
    std::string label_;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

RngStream make_stream(std::uint64_t seed, std::string_view label);
/// Stream keyed by (seed, label, a, b), e.g. per (generator, iteration).
RngStream make_stream(std::uint64_t seed, std::string_view label, std::uint64_t a,
                      std::uint64_t b);

/// Dense row-major matrix of doubles; the universal numeric carrier.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    static Matrix zeros(std::size_t r, std::size_t c) { return Matrix(r, c); }
    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double* row_ptr(std::size_t i) { return data.data() + i * cols; }
    const double* row_ptr(std::size_t i) const { return data.data() + i * cols; }
    std::size_t size() const { return data.size(); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

/// rows x cols matrix of independent N(mean, std^2) draws; advances the stream.
Matrix sample_gaussian(RngStream& stream, std::size_t rows, std::size_t cols,
                       double mean, double std_dev);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);
Matrix hadamard(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Locale-independent decimal formatting with 17 significant digits, enough
/// to round-trip any double exactly.
std::string fmt17(double v);
double parse_double(std::string_view s);

}  // namespace ebgan
