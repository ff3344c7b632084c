#pragma once

#include <cstddef>
#include <string>

namespace qus::vecops {

// Dense double-array primitives backing the exact-distribution arithmetic.
// A scalar reference implementation always exists; AVX2 (x86-64) and NEON
// (aarch64) variants are selected at runtime. The variants may reassociate
// sums, so results can differ from scalar by a few ulps.
enum class Backend { scalar, avx2, neon };

Backend active_backend();

// Forces a backend. Throws std::runtime_error if unsupported on this CPU.
// The environment variable QUS_SIMD=scalar|avx2|neon|auto is honored at
// first use.
void force_backend(Backend b);

const char* backend_name(Backend b);

double sum(const double* a, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
// y += c * x
void axpy(double c, const double* x, double* y, std::size_t n);
void scale(double* x, double c, std::size_t n);
double l1_diff(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

namespace detail {

struct Ops {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
    double (*l1_diff)(const double*, const double*, std::size_t);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
};

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
bool avx2_supported();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

} // namespace detail

} // namespace qus::vecops
