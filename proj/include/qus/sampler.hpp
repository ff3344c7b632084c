#pragma once

#include "qus/kernel.hpp"
#include "qus/seed.hpp"

#include <functional>

namespace qus {

// Strict-exceed inverse CDF over canonical point order: the first index whose
// cumulative weight strictly exceeds u. Ties at atom boundaries are thereby
// fixed deterministically.
int quantile_index(std::span<const double> weights, double u);

// A push-forward representation of a measure on a finite space: a total
// deterministic map Seed -> point. Same seed, same output.
struct Sampler {
    SpacePtr codomain;
    std::function<int(const Seed&)> fn;

    int operator()(const Seed& s) const { return fn(s); }
};

Sampler constant_sampler(const SpacePtr& space, int x);

// Inverse-CDF sampler of an exact distribution; consumes the seed's own draw.
Sampler from_dist(const Dist<double>& d);

// (f o a): represents f_*(a_* nu).
Sampler pushforward(const FnPoint& f, const Sampler& a);

// Finite sampler patching: u from the seed's own draw picks the interval,
// the chosen sampler runs on a fresh split child. Intervals are half-open
// [lo,hi), must be disjoint and cover [0,1) exactly.
Sampler patch(std::vector<std::pair<double, double>> intervals, std::vector<Sampler> samplers);

// Frequency table over n independent split children of root.
Dist<double> empirical(const Sampler& a, std::size_t n, const Seed& root);

// Sampler realization of bind: draw x, then y from the kernel row at x.
Sampler bind_sampler(const Sampler& a, const Kernel<double>& k);

// Sampler realization of kernel_product at a fixed z: y from nu(z), then x
// from mu(y,z); yields indices of the product (X, Y).
Sampler kernel_product_sampler(const Kernel<double>& mu, const Kernel<double>& nu, int z);

// A Markov kernel in sampler form: one deterministic map per (z, seed).
struct SampledKernel {
    SpacePtr domain;
    SpacePtr codomain;
    std::function<int(int, const Seed&)> fn;

    int operator()(int z, const Seed& s) const { return fn(z, s); }

    static SampledKernel from_kernel(const Kernel<double>& k);
    Sampler at(int z) const;
};

} // namespace qus
