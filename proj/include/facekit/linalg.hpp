#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "facekit/error.hpp"

namespace facekit {

/// Dense row-major matrix of doubles. Doubles as a feature series
/// (rows = frames, cols = dimensions) throughout the library.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values.data() + r * cols, cols);
    }
    std::span<double> row(std::size_t r) {
        return std::span<double>(values.data() + r * cols, cols);
    }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

/// y = M x, checked.
std::vector<double> matvec(const Matrix& m, std::span<const double> x);

void require_same_dim(std::size_t a, std::size_t b, const char* what);
void require_finite(std::span<const double> values, const char* what);

}  // namespace facekit
