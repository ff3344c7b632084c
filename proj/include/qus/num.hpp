#pragma once

#include "qus/vecops.hpp"

#include <gmpxx.h>

#include <cmath>
#include <cstddef>

namespace qus {

// Exact rational weights for the law-test mode. GMP rationals keep bind and
// disintegration chains exact; the float mode uses the stated 1e-12
// tolerances instead.
using Rat = mpq_class;

inline Rat ratio(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

namespace num {

template <class T>
inline constexpr bool is_exact = false;
template <>
inline constexpr bool is_exact<Rat> = true;

inline double to_double(double x) { return x; }
inline double to_double(const Rat& x) { return x.get_d(); }

inline double abs_val(double x) { return std::fabs(x); }
inline Rat abs_val(const Rat& x) { return abs(x); }

// |a-b| <= tol, with tol ignored in exact mode.
inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
inline bool close(const Rat& a, const Rat& b, double) { return a == b; }

// Inner loops. The double overloads route through the runtime-dispatched
// vecops backends; other scalar types take the generic path.
template <class T>
T vsum(const T* a, std::size_t n) {
    T s(0);
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}
inline double vsum(const double* a, std::size_t n) { return vecops::sum(a, n); }

template <class T>
T vdot(const T* a, const T* b, std::size_t n) {
    T s(0);
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}
inline double vdot(const double* a, const double* b, std::size_t n) {
    return vecops::dot(a, b, n);
}

template <class T>
void vaxpy(const T& c, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}
inline void vaxpy(double c, const double* x, double* y, std::size_t n) {
    vecops::axpy(c, x, y, n);
}

template <class T>
T vmax_abs_diff(const T* a, const T* b, std::size_t n) {
    T m(0);
    for (std::size_t i = 0; i < n; ++i) {
        T d = abs_val(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}
inline double vmax_abs_diff(const double* a, const double* b, std::size_t n) {
    return vecops::max_abs_diff(a, b, n);
}

template <class T>
T vl1_diff(const T* a, const T* b, std::size_t n) {
    T s(0);
    for (std::size_t i = 0; i < n; ++i) s += abs_val(a[i] - b[i]);
    return s;
}
inline double vl1_diff(const double* a, const double* b, std::size_t n) {
    return vecops::l1_diff(a, b, n);
}

} // namespace num

} // namespace qus
