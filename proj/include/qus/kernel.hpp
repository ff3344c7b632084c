#pragma once

#include "qus/dist.hpp"

#include <functional>
#include <utility>

namespace qus {

// A Markov kernel on finite spaces: one distribution over the codomain per
// domain point, stored as a row-stochastic table in canonical point order.
template <class T>
struct Kernel {
    SpacePtr domain;
    SpacePtr codomain;
    std::vector<T> p;  // row-major, |domain| x |codomain|

    Kernel() = default;

    Kernel(SpacePtr dom, SpacePtr cod, std::vector<T> table)
        : domain(std::move(dom)), codomain(std::move(cod)), p(std::move(table)) {
        if (p.size() != domain->size() * codomain->size())
            throw DomainError("kernel " + domain->name() + "->" + codomain->name() +
                              ": table shape mismatch");
        for (std::size_t z = 0; z < domain->size(); ++z) (void)row_dist(z);
    }

    static Kernel from_rows(SpacePtr dom, const std::vector<Dist<T>>& rows) {
        if (rows.size() != dom->size()) throw DomainError("kernel: row count != domain size");
        const SpacePtr& cod = rows.front().space;
        std::vector<T> table;
        table.reserve(rows.size() * cod->size());
        for (const auto& r : rows) {
            if (!same_points(r.space, cod)) throw DomainError("kernel: rows on different spaces");
            table.insert(table.end(), r.w.begin(), r.w.end());
        }
        return {std::move(dom), cod, std::move(table)};
    }

    std::span<const T> row(std::size_t z) const {
        return {p.data() + z * codomain->size(), codomain->size()};
    }
    std::span<T> row(std::size_t z) {
        return {p.data() + z * codomain->size(), codomain->size()};
    }
    Dist<T> row_dist(std::size_t z) const {
        auto r = row(z);
        return {codomain, std::vector<T>(r.begin(), r.end())};
    }
    const T& at(std::size_t z, std::size_t x) const { return p[z * codomain->size() + x]; }
};

// The Dirac family of a function: K(z) = delta_{g(z)}.
template <class T>
Kernel<T> dirac_kernel(const FnPoint& g) {
    std::vector<T> table(g.domain->size() * g.codomain->size(), T(0));
    for (std::size_t z = 0; z < g.domain->size(); ++z)
        table[z * g.codomain->size() + static_cast<std::size_t>(g.table[z])] = T(1);
    return {g.domain, g.codomain, std::move(table)};
}

// A distribution as a kernel from the one-point space.
template <class T>
Kernel<T> as_kernel(const Dist<T>& mu) {
    return {Space::unit(), mu.space, mu.w};
}

// Constant kernel: every row is mu.
template <class T>
Kernel<T> constant_kernel(const SpacePtr& dom, const Dist<T>& mu) {
    std::vector<T> table;
    table.reserve(dom->size() * mu.size());
    for (std::size_t z = 0; z < dom->size(); ++z)
        table.insert(table.end(), mu.w.begin(), mu.w.end());
    return {dom, mu.space, std::move(table)};
}

// kappa_o(mu)(B) = integral of kappa(x)(B) d mu(x).
template <class T>
Dist<T> bind(const Dist<T>& mu, const Kernel<T>& k) {
    if (!same_points(k.domain, mu.space)) throw DomainError("bind: kernel domain != dist space");
    std::vector<T> out(k.codomain->size(), T(0));
    for (std::size_t x = 0; x < mu.size(); ++x) {
        if (mu.w[x] == T(0)) continue;
        num::vaxpy(mu.w[x], k.row(x).data(), out.data(), out.size());
    }
    return {k.codomain, std::move(out)};
}

// Row-wise bind: (kappa . mu)(z) = bind(mu(z), kappa).
template <class T>
Kernel<T> kernel_compose(const Kernel<T>& kappa, const Kernel<T>& mu) {
    if (!same_points(kappa.domain, mu.codomain))
        throw DomainError("kernel_compose: intermediate space mismatch");
    std::vector<T> table(mu.domain->size() * kappa.codomain->size(), T(0));
    const std::size_t ny = kappa.codomain->size();
    for (std::size_t z = 0; z < mu.domain->size(); ++z) {
        T* out = table.data() + z * ny;
        auto mz = mu.row(z);
        for (std::size_t x = 0; x < mz.size(); ++x) {
            if (mz[x] == T(0)) continue;
            num::vaxpy(mz[x], kappa.row(x).data(), out, ny);
        }
    }
    return {mu.domain, kappa.codomain, std::move(table)};
}

// The semidirect kernel product:
//   (mu (x) nu)(z)(x,y) = mu(y,z)(x) * nu(z)(y),
// for mu with domain product(Y, Z) and nu : Z -> Y. The codomain is the
// product (X, Y), X varying slowest.
template <class T>
Kernel<T> kernel_product(const Kernel<T>& mu, const Kernel<T>& nu) {
    const Space& md = *mu.domain;
    if (!md.is_product() || md.factors().size() != 2)
        throw DomainError("kernel_product: mu domain must be product(Y, Z)");
    if (!same_points(md.factors()[0], nu.codomain) || !same_points(md.factors()[1], nu.domain))
        throw DomainError("kernel_product: mu domain does not match nu");
    SpacePtr xy = Space::product({mu.codomain, nu.codomain});
    const std::size_t nx = mu.codomain->size();
    const std::size_t ny = nu.codomain->size();
    std::vector<T> table(nu.domain->size() * nx * ny, T(0));
    for (std::size_t z = 0; z < nu.domain->size(); ++z) {
        T* out = table.data() + z * nx * ny;
        auto nz = nu.row(z);
        for (std::size_t y = 0; y < ny; ++y) {
            if (nz[y] == T(0)) continue;
            int coords[2] = {static_cast<int>(y), static_cast<int>(z)};
            auto mrow = mu.row(md.tuple_index(coords));
            for (std::size_t x = 0; x < nx; ++x) out[x * ny + y] += mrow[x] * nz[y];
        }
    }
    return {nu.domain, xy, std::move(table)};
}

// Reindexes a kernel onto a bigger domain: row(i) = k.row(select(i)).
template <class T>
Kernel<T> reindex_domain(const Kernel<T>& k, const SpacePtr& big,
                         const std::function<std::size_t(std::size_t)>& select) {
    std::vector<T> table(big->size() * k.codomain->size());
    for (std::size_t i = 0; i < big->size(); ++i) {
        auto r = k.row(select(i));
        std::copy(r.begin(), r.end(), table.begin() + i * k.codomain->size());
    }
    return {big, k.codomain, std::move(table)};
}

// Marginal kernel: applies `project` row-wise.
template <class T>
Kernel<T> kernel_project(const Kernel<T>& k, std::span<const std::size_t> keep) {
    std::vector<Dist<T>> rows;
    rows.reserve(k.domain->size());
    for (std::size_t z = 0; z < k.domain->size(); ++z)
        rows.push_back(project(k.row_dist(z), keep));
    return Kernel<T>::from_rows(k.domain, rows);
}

template <class T>
T kernel_max_abs_diff(const Kernel<T>& a, const Kernel<T>& b) {
    if (!same_points(a.domain, b.domain) || !same_points(a.codomain, b.codomain))
        throw DomainError("kernel_max_abs_diff: shape mismatch");
    return num::vmax_abs_diff(a.p.data(), b.p.data(), a.p.size());
}

template <class T>
bool kernel_close(const Kernel<T>& a, const Kernel<T>& b, double tol = kWeightTol) {
    if (!same_points(a.domain, b.domain) || !same_points(a.codomain, b.codomain)) return false;
    if constexpr (num::is_exact<T>) {
        return a.p == b.p;
    } else {
        return num::to_double(kernel_max_abs_diff(a, b)) <= tol;
    }
}

} // namespace qus
