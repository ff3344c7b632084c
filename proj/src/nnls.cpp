#include "qus/nnls.hpp"

#include "qus/error.hpp"

#include <algorithm>
#include <cmath>

namespace qus {

namespace {

// Least squares on the passive columns via normal equations with partial
// pivoting. Near-singular pivots zero the coefficient, which sends that
// column back to the active set.
std::vector<double> solve_passive(const std::vector<double>& a, std::size_t rows,
                                  std::size_t cols, const std::vector<double>& b,
                                  const std::vector<std::size_t>& passive) {
    const std::size_t p = passive.size();
    std::vector<double> m(p * (p + 1), 0.0);  // augmented [AtA | Atb]
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows; ++r)
                s += a[r * cols + passive[i]] * a[r * cols + passive[j]];
            m[i * (p + 1) + j] = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + passive[i]] * b[r];
        m[i * (p + 1) + p] = s;
    }

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(m[r * (p + 1) + col]) > std::fabs(m[piv * (p + 1) + col])) piv = r;
        if (piv != col)
            for (std::size_t k = 0; k <= p; ++k)
                std::swap(m[col * (p + 1) + k], m[piv * (p + 1) + k]);
        double d = m[col * (p + 1) + col];
        if (std::fabs(d) < 1e-13) {
            m[col * (p + 1) + col] = 1.0;
            for (std::size_t k = col + 1; k <= p; ++k) m[col * (p + 1) + k] = 0.0;
            continue;
        }
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            double f = m[r * (p + 1) + col] / d;
            if (f == 0.0) continue;
            for (std::size_t k = col; k <= p; ++k) m[r * (p + 1) + k] -= f * m[col * (p + 1) + k];
        }
    }
    std::vector<double> z(p);
    for (std::size_t i = 0; i < p; ++i) z[i] = m[i * (p + 1) + p] / m[i * (p + 1) + i];
    return z;
}

} // namespace

NnlsResult nnls(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                const std::vector<double>& b, std::size_t max_iter) {
    if (a.size() != rows * cols || b.size() != rows) throw DomainError("nnls: shape mismatch");
    if (max_iter == 0) max_iter = 6 * cols + 30;

    std::vector<double> x(cols, 0.0);
    std::vector<bool> in_passive(cols, false);
    std::vector<std::size_t> passive;
    std::vector<double> resid = b;

    const double grad_tol = 1e-13;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // gradient of 0.5||Ax-b||^2 restricted to the active set
        double best = grad_tol;
        std::size_t best_j = cols;
        for (std::size_t j = 0; j < cols; ++j) {
            if (in_passive[j]) continue;
            double g = 0.0;
            for (std::size_t r = 0; r < rows; ++r) g += a[r * cols + j] * resid[r];
            if (g > best) {
                best = g;
                best_j = j;
            }
        }
        if (best_j == cols) break;
        in_passive[best_j] = true;
        passive.push_back(best_j);

        for (std::size_t inner = 0; inner <= max_iter; ++inner) {
            std::vector<double> z = solve_passive(a, rows, cols, b, passive);
            bool feasible = true;
            for (double v : z)
                if (v <= 0.0) feasible = false;
            if (feasible) {
                for (std::size_t i = 0; i < passive.size(); ++i) x[passive[i]] = z[i];
                break;
            }
            double alpha = 1.0;
            for (std::size_t i = 0; i < passive.size(); ++i)
                if (z[i] <= 0.0) {
                    double xi = x[passive[i]];
                    double step = xi / (xi - z[i]);
                    alpha = std::min(alpha, step);
                }
            for (std::size_t i = 0; i < passive.size(); ++i)
                x[passive[i]] += alpha * (z[i] - x[passive[i]]);
            // drop columns pinned at zero
            std::vector<std::size_t> keep;
            for (std::size_t j : passive) {
                if (x[j] > 1e-14) {
                    keep.push_back(j);
                } else {
                    x[j] = 0.0;
                    in_passive[j] = false;
                }
            }
            passive = std::move(keep);
            if (passive.empty()) break;
        }

        for (std::size_t r = 0; r < rows; ++r) {
            double s = 0.0;
            for (std::size_t j : passive) s += a[r * cols + j] * x[j];
            resid[r] = b[r] - s;
        }
    }

    NnlsResult out;
    out.x = std::move(x);
    double l2 = 0.0, mx = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        l2 += resid[r] * resid[r];
        mx = std::max(mx, std::fabs(resid[r]));
    }
    out.l2_residual = std::sqrt(l2);
    out.max_residual = mx;
    return out;
}

} // namespace qus
