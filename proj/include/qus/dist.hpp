#pragma once

#include "qus/num.hpp"
#include "qus/space.hpp"

#include <functional>
#include <span>
#include <vector>

namespace qus {

// Weight-sum drift allowed on every constructed distribution (float mode).
inline constexpr double kWeightTol = 1e-12;

// An exact probability measure on a finite space: nonnegative weights in
// canonical point order summing to one. Every construction validates; no
// operation renormalizes silently.
template <class T>
struct Dist {
    SpacePtr space;
    std::vector<T> w;

    Dist() = default;

    Dist(SpacePtr s, std::vector<T> weights) : space(std::move(s)), w(std::move(weights)) {
        if (w.size() != space->size())
            throw DomainError("dist on '" + space->name() + "': weight count != point count");
        for (const T& x : w)
            if (x < T(0)) throw InternalError("dist on '" + space->name() + "': negative weight");
        T total = num::vsum(w.data(), w.size());
        if (!num::close(total, T(1), kWeightTol))
            throw InternalError("dist on '" + space->name() + "': weights sum to " +
                                std::to_string(num::to_double(total)));
    }

    const T& operator[](std::size_t i) const { return w[i]; }
    std::size_t size() const { return w.size(); }

    T mass(const FinEvent& a) const {
        if (!same_points(a.space, space)) throw DomainError("mass: event on a different space");
        T s(0);
        for (std::size_t i = 0; i < w.size(); ++i)
            if (a.members[i]) s += w[i];
        return s;
    }
};

template <class T>
Dist<T> dirac(const SpacePtr& space, int x) {
    if (x < 0 || x >= static_cast<int>(space->size()))
        throw DomainError("dirac: point not in '" + space->name() + "'");
    std::vector<T> w(space->size(), T(0));
    w[static_cast<std::size_t>(x)] = T(1);
    return {space, std::move(w)};
}

// A distribution over an explicit finite list of distributions; the outer
// object of flatten. (The full space of measures is not a finite object.)
template <class T>
struct Mixture {
    std::vector<T> weights;
    std::vector<Dist<T>> components;
};

template <class T>
Dist<T> flatten(const Mixture<T>& m) {
    if (m.weights.size() != m.components.size() || m.components.empty())
        throw DomainError("flatten: weight/component arity mismatch");
    const SpacePtr& space = m.components.front().space;
    std::vector<T> out(space->size(), T(0));
    for (std::size_t i = 0; i < m.components.size(); ++i) {
        if (!same_points(m.components[i].space, space))
            throw DomainError("flatten: inner spaces mismatch");
        num::vaxpy(m.weights[i], m.components[i].w.data(), out.data(), out.size());
    }
    return {space, std::move(out)};
}

template <class T>
T integrate(std::span<const T> f, const Dist<T>& mu) {
    if (f.size() != mu.size()) throw DomainError("integrate: f not total on the space");
    return num::vdot(f.data(), mu.w.data(), f.size());
}

template <class T, class Fn>
T integrate_fn(Fn&& f, const Dist<T>& mu) {
    T s(0);
    for (std::size_t i = 0; i < mu.size(); ++i) s += T(f(static_cast<int>(i))) * mu.w[i];
    return s;
}

template <class T>
Dist<T> pushforward(const FnPoint& f, const Dist<T>& mu) {
    if (!same_points(f.domain, mu.space)) throw DomainError("pushforward: f not total on space");
    std::vector<T> out(f.codomain->size(), T(0));
    for (std::size_t i = 0; i < mu.size(); ++i)
        out[static_cast<std::size_t>(f.table[i])] += mu.w[i];
    return {f.codomain, std::move(out)};
}

// delta_x (x) nu: all mass on the x-slice of X x Y.
template <class T>
Dist<T> strength(const SpacePtr& x_space, int x, const Dist<T>& nu) {
    SpacePtr prod = Space::product({x_space, nu.space});
    std::vector<T> out(prod->size(), T(0));
    const std::size_t ny = nu.size();
    for (std::size_t y = 0; y < ny; ++y) out[static_cast<std::size_t>(x) * ny + y] = nu.w[y];
    return {prod, std::move(out)};
}

// Sums out all coordinates except `keep` (indices into the product factors,
// strictly increasing). The result lives on the product of the kept factors,
// or on the single factor itself when one coordinate is kept.
template <class T>
Dist<T> project(const Dist<T>& joint, std::span<const std::size_t> keep) {
    const Space& sp = *joint.space;
    if (!sp.is_product()) throw DomainError("project: not a product space");
    const auto& factors = sp.factors();
    SpacePtr target;
    if (keep.size() == 1) {
        target = factors[keep[0]];
    } else {
        std::vector<SpacePtr> kept;
        for (std::size_t k : keep) kept.push_back(factors.at(k));
        target = Space::product(std::move(kept));
    }
    std::vector<T> out(target->size(), T(0));
    std::vector<int> coords(factors.size());
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
        sp.split_index(idx, coords);
        std::size_t t = 0;
        for (std::size_t k : keep) t = t * factors[k]->size() + static_cast<std::size_t>(coords[k]);
        out[t] += joint.w[idx];
    }
    return {target, std::move(out)};
}

// Marginal of a joint on a binary product; side 0 keeps X, side 1 keeps Y.
template <class T>
Dist<T> marginal(const Dist<T>& joint, std::size_t side) {
    const Space& sp = *joint.space;
    if (!sp.is_product() || sp.factors().size() != 2)
        throw DomainError("marginal: not a binary product space");
    if (side > 1) throw DomainError("marginal: side must be 0 or 1");
    const std::size_t nx = sp.factors()[0]->size();
    const std::size_t ny = sp.factors()[1]->size();
    if (side == 0) {
        std::vector<T> out(nx);
        for (std::size_t a = 0; a < nx; ++a) out[a] = num::vsum(joint.w.data() + a * ny, ny);
        return {sp.factors()[0], std::move(out)};
    }
    std::vector<T> out(ny, T(0));
    for (std::size_t a = 0; a < nx; ++a)
        num::vaxpy(T(1), joint.w.data() + a * ny, out.data(), ny);
    return {sp.factors()[1], std::move(out)};
}

template <class T>
T max_abs_diff(const Dist<T>& a, const Dist<T>& b) {
    if (!same_points(a.space, b.space)) throw DomainError("max_abs_diff: space mismatch");
    return num::vmax_abs_diff(a.w.data(), b.w.data(), a.size());
}

template <class T>
bool dist_close(const Dist<T>& a, const Dist<T>& b, double tol = kWeightTol) {
    if (!same_points(a.space, b.space)) return false;
    if constexpr (num::is_exact<T>) {
        return a.w == b.w;
    } else {
        return num::to_double(max_abs_diff(a, b)) <= tol;
    }
}

// Total variation distance: half the L1 distance between weight vectors.
template <class T>
double tv_distance(const Dist<T>& a, const Dist<T>& b) {
    if (!same_points(a.space, b.space)) throw DomainError("tv_distance: space mismatch");
    return 0.5 * num::to_double(num::vl1_diff(a.w.data(), b.w.data(), a.size()));
}

} // namespace qus
