#include "facekit/linalg.hpp"

#include <cmath>
#include <string>

namespace facekit {

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
    if (m.cols != x.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "matvec: matrix has " + std::to_string(m.cols) + " columns, vector has " +
                        std::to_string(x.size()) + " entries");
    }
    std::vector<double> out(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        const double* row = m.values.data() + r * m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
    return out;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": " + std::to_string(a) +
                                                      " vs " + std::to_string(b));
    }
}

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFinite, std::string(what) + ": non-finite value");
        }
    }
}

}  // namespace facekit
