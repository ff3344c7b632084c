#pragma once

#include <cstddef>
#include <vector>

namespace qus {

struct NnlsResult {
    std::vector<double> x;       // coefficients, all >= 0
    double l2_residual = 0.0;    // ||A x - b||_2
    double max_residual = 0.0;   // max_i |(A x - b)_i|
};

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
// `a` is row-major with `rows` x `cols`. Sized for small dense systems;
// recovers consistent systems to solver precision.
NnlsResult nnls(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                const std::vector<double>& b, std::size_t max_iter = 0);

} // namespace qus
