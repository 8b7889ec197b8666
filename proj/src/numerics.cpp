#include "ebgan/numerics.hpp"

#include <Eigen/Core>

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ebgan {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output mix.
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_key(std::uint64_t parent, std::string_view label,
                         std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = mix64(parent + kGamma);
    k = mix64(k ^ fnv1a64(label));
    k = mix64(k + a * kGamma);
    k = mix64(k + b * kGamma);
    return k;
}

using ERowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<ERowMat>;
using ECMap = Eigen::Map<const ERowMat>;

ECMap cmap(const Matrix& m) {
    return ECMap(m.data.data(), static_cast<Eigen::Index>(m.rows),
                 static_cast<Eigen::Index>(m.cols));
}

EMap map(Matrix& m) {
    return EMap(m.data.data(), static_cast<Eigen::Index>(m.rows),
                static_cast<Eigen::Index>(m.cols));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view label)
    : seed_(seed), label_(label) {
    key_ = derive_key(mix64(seed), label, 0, 0);
}

RngStream::RngStream(std::uint64_t seed, std::string key_label,
                     std::uint64_t derived_key)
    : seed_(seed), label_(std::move(key_label)), key_(derived_key) {}

RngStream RngStream::substream(std::string_view label, std::uint64_t a,
                               std::uint64_t b) const {
    std::string child_label = label_;
    child_label += '/';
    child_label += label;
    return RngStream(seed_, std::move(child_label), derive_key(key_, label, a, b));
}

std::uint64_t RngStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (draw >= limit);
    return draw % bound;
}

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gaussian(double mean, double std_dev) {
    if (std_dev < 0.0) {
        throw std::invalid_argument("next_gaussian: std_dev must be >= 0");
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - next_uniform();
    double u2 = next_uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    return mean + std_dev * z;
}

RngStream make_stream(std::uint64_t seed, std::string_view label) {
    return RngStream(seed, label);
}

RngStream make_stream(std::uint64_t seed, std::string_view label, std::uint64_t a,
                      std::uint64_t b) {
    return RngStream(seed, label).substream("idx", a, b);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != m.cols) {
            throw std::invalid_argument("from_rows: ragged row lengths");
        }
        std::size_t j = 0;
        for (double v : r) m.at(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix sample_gaussian(RngStream& stream, std::size_t rows, std::size_t cols,
                       double mean, double std_dev) {
    if (std_dev < 0.0) {
        throw std::invalid_argument("sample_gaussian: std_dev must be >= 0");
    }
    Matrix m(rows, cols);
    for (double& v : m.data) v = stream.next_gaussian(mean, std_dev);
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("matmul: inner dimensions disagree");
    }
    Matrix c(a.rows, b.cols);
    map(c).noalias() = cmap(a) * cmap(b);
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    map(t) = cmap(a).transpose();
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("add: shape mismatch");
    Matrix c(a.rows, a.cols);
    map(c) = cmap(a) + cmap(b);
    return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("sub: shape mismatch");
    Matrix c(a.rows, a.cols);
    map(c) = cmap(a) - cmap(b);
    return c;
}

Matrix scale(const Matrix& a, double c) {
    Matrix r(a.rows, a.cols);
    map(r) = cmap(a) * c;
    return r;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("hadamard: shape mismatch");
    Matrix c(a.rows, a.cols);
    map(c) = cmap(a).cwiseProduct(cmap(b));
    return c;
}

bool all_finite(const Matrix& a) {
    for (double v : a.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

std::string fmt17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v,
                             std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
        throw std::invalid_argument("parse_double: bad number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace ebgan
