#pragma once

#include "qus/kernel.hpp"

#include <array>
#include <optional>

namespace qus {

// Conditional rows on zero-mass (y,z) cells are only fixed almost surely;
// this picks the canonical filler.
enum class Fallback { uniform, dirac_first };

template <class T>
struct Disintegration {
    Kernel<T> cond;  // (Y x Z) -> X
    Kernel<T> marg;  // Z -> Y
};

// Factors K : Z -> (X x Y) as cond (x) marg. Rows of cond at positive-mass
// (y,z) are the exact conditionals K(z)(x,y)/marg(z)(y); zero-mass rows get
// the fallback. kernel_product(cond, marg) reproduces K.
template <class T>
Disintegration<T> disintegrate(const Kernel<T>& k, Fallback fb = Fallback::uniform) {
    const Space& cod = *k.codomain;
    if (!cod.is_product() || cod.factors().size() != 2)
        throw DomainError("disintegrate: codomain must be product(X, Y)");
    const SpacePtr& xs = cod.factors()[0];
    const SpacePtr& ys = cod.factors()[1];
    const std::size_t nx = xs->size();
    const std::size_t ny = ys->size();
    const std::size_t nz = k.domain->size();

    std::vector<T> marg_table(nz * ny, T(0));
    for (std::size_t z = 0; z < nz; ++z) {
        auto kz = k.row(z);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) marg_table[z * ny + y] += kz[x * ny + y];
    }
    Kernel<T> marg(k.domain, ys, std::move(marg_table));

    SpacePtr yz = Space::product({ys, k.domain});
    std::vector<T> cond_table(yz->size() * nx, T(0));
    for (std::size_t z = 0; z < nz; ++z) {
        auto kz = k.row(z);
        for (std::size_t y = 0; y < ny; ++y) {
            T* out = cond_table.data() + (y * nz + z) * nx;
            const T& m = marg.at(z, y);
            if (m > T(0)) {
                for (std::size_t x = 0; x < nx; ++x) out[x] = kz[x * ny + y] / m;
            } else if (fb == Fallback::uniform) {
                for (std::size_t x = 0; x < nx; ++x) out[x] = T(1) / T(static_cast<int>(nx));
            } else {
                out[0] = T(1);
            }
        }
    }
    return {Kernel<T>(yz, xs, std::move(cond_table)), std::move(marg)};
}

// True iff kernel_product(q, Y-marginal of k) reproduces k atomwise.
template <class T>
bool check_factorization(const Kernel<T>& k, const Kernel<T>& q, double tol = kWeightTol) {
    const Space& cod = *k.codomain;
    if (!cod.is_product() || cod.factors().size() != 2)
        throw DomainError("check_factorization: codomain must be product(X, Y)");
    Kernel<T> marg = kernel_project(k, std::array<std::size_t, 1>{1});
    Kernel<T> rebuilt = kernel_product(q, marg);
    return kernel_close(rebuilt, k, tol);
}

// Where two conditionals disagree, and how much marginal mass that carries.
template <class T>
struct NullReport {
    std::vector<std::pair<std::size_t, std::size_t>> cells;  // (y, z) with a difference
    T max_marg_mass;                                         // max over z of marg(z)(N_z)
};

template <class T>
NullReport<T> essential_uniqueness(const Kernel<T>& q1, const Kernel<T>& q2,
                                   const Kernel<T>& marg, double tol = kWeightTol) {
    if (!same_points(q1.domain, q2.domain) || !same_points(q1.codomain, q2.codomain))
        throw DomainError("essential_uniqueness: Q1/Q2 shape mismatch");
    const Space& dom = *q1.domain;
    if (!dom.is_product() || dom.factors().size() != 2)
        throw DomainError("essential_uniqueness: domain must be product(Y, Z)");
    const std::size_t ny = dom.factors()[0]->size();
    const std::size_t nz = dom.factors()[1]->size();
    if (!same_points(marg.domain, dom.factors()[1]) || !same_points(marg.codomain, dom.factors()[0]))
        throw DomainError("essential_uniqueness: marg shape mismatch");

    NullReport<T> rep{{}, T(0)};
    for (std::size_t z = 0; z < nz; ++z) {
        T mass(0);
        for (std::size_t y = 0; y < ny; ++y) {
            std::size_t row = y * nz + z;
            T d = num::vmax_abs_diff(q1.row(row).data(), q2.row(row).data(), q1.codomain->size());
            if (num::to_double(d) > tol) {
                rep.cells.emplace_back(y, z);
                mass += marg.at(z, y);
            }
        }
        if (mass > rep.max_marg_mass) rep.max_marg_mass = mass;
    }
    return rep;
}

template <class T>
bool is_zero_one_deterministic(const Kernel<T>& k, double tol = kWeightTol) {
    for (const T& x : k.p)
        if (!num::close(x, T(0), tol) && !num::close(x, T(1), tol)) return false;
    return true;
}

// K(z) (x) K(z) must put all mass on the diagonal, matching the push-forward
// of K(z) along y -> (y,y).
template <class T>
bool is_copy_deterministic(const Kernel<T>& k, double tol = kWeightTol) {
    const std::size_t ny = k.codomain->size();
    if (ny > cardinality_cap() / ny)
        throw CapError("is_copy_deterministic: |Y|^2 exceeds cap");
    for (std::size_t z = 0; z < k.domain->size(); ++z) {
        auto r = k.row(z);
        for (std::size_t y1 = 0; y1 < ny; ++y1)
            for (std::size_t y2 = 0; y2 < ny; ++y2) {
                T expect = (y1 == y2) ? r[y1] : T(0);
                if (!num::close(r[y1] * r[y2], expect, tol)) return false;
            }
    }
    return true;
}

// Recovers g with K(z) = dirac(g(z)); requires 0-1 determinism.
template <class T>
FnPoint extract_function(const Kernel<T>& k, double tol = kWeightTol) {
    std::vector<int> table(k.domain->size());
    for (std::size_t z = 0; z < k.domain->size(); ++z) {
        auto r = k.row(z);
        int hit = -1;
        for (std::size_t y = 0; y < r.size(); ++y) {
            if (num::close(r[y], T(1), tol)) {
                hit = static_cast<int>(y);
            } else if (!num::close(r[y], T(0), tol)) {
                throw DomainError("extract_function: kernel is not 0-1-deterministic");
            }
        }
        if (hit < 0) throw DomainError("extract_function: kernel is not 0-1-deterministic");
        table[z] = hit;
    }
    return {k.domain, k.codomain, std::move(table)};
}

} // namespace qus
