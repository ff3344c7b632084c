#include "qus/vecops.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace qus::vecops {

namespace detail {

namespace {

double sum_scalar(const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double c, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

void scale_scalar(double* x, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

double l1_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops{sum_scalar,   dot_scalar,     axpy_scalar,
                         scale_scalar, l1_diff_scalar, max_abs_diff_scalar};
    return ops;
}

} // namespace detail

namespace {

struct Dispatch {
    const detail::Ops* ops;
    Backend backend;
};

Dispatch pick(Backend b) {
    switch (b) {
        case Backend::scalar:
            return {&detail::scalar_ops(), Backend::scalar};
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (detail::avx2_supported()) return {&detail::avx2_ops(), Backend::avx2};
#endif
            throw std::runtime_error("vecops: avx2 backend not supported on this CPU");
        case Backend::neon:
#if defined(__aarch64__)
            return {&detail::neon_ops(), Backend::neon};
#else
            throw std::runtime_error("vecops: neon backend not supported on this CPU");
#endif
    }
    return {&detail::scalar_ops(), Backend::scalar};
}

Dispatch pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (detail::avx2_supported()) return {&detail::avx2_ops(), Backend::avx2};
#elif defined(__aarch64__)
    return {&detail::neon_ops(), Backend::neon};
#endif
    return {&detail::scalar_ops(), Backend::scalar};
}

Dispatch pick_initial() {
    if (const char* env = std::getenv("QUS_SIMD")) {
        std::string v(env);
        if (v == "scalar") return pick(Backend::scalar);
        if (v == "avx2") return pick(Backend::avx2);
        if (v == "neon") return pick(Backend::neon);
        // "auto" or anything else falls through
    }
    return pick_auto();
}

Dispatch& dispatch() {
    static Dispatch d = pick_initial();
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

void force_backend(Backend b) { dispatch() = pick(b); }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

double sum(const double* a, std::size_t n) { return dispatch().ops->sum(a, n); }
double dot(const double* a, const double* b, std::size_t n) { return dispatch().ops->dot(a, b, n); }
void axpy(double c, const double* x, double* y, std::size_t n) { dispatch().ops->axpy(c, x, y, n); }
void scale(double* x, double c, std::size_t n) { dispatch().ops->scale(x, c, n); }
double l1_diff(const double* a, const double* b, std::size_t n) { return dispatch().ops->l1_diff(a, b, n); }
double max_abs_diff(const double* a, const double* b, std::size_t n) {
    return dispatch().ops->max_abs_diff(a, b, n);
}

} // namespace qus::vecops
