#include "qus/sampler.hpp"

#include <algorithm>

namespace qus {

int quantile_index(std::span<const double> weights, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (cum > u) return static_cast<int>(i);
    }
    // Float drift can leave the final cumulative a hair below u.
    return static_cast<int>(weights.size()) - 1;
}

Sampler constant_sampler(const SpacePtr& space, int x) {
    if (x < 0 || x >= static_cast<int>(space->size()))
        throw DomainError("constant_sampler: point not in space");
    return {space, [x](const Seed&) { return x; }};
}

Sampler from_dist(const Dist<double>& d) {
    return {d.space, [w = d.w](const Seed& s) {
                return quantile_index({w.data(), w.size()}, uniform(s));
            }};
}

Sampler pushforward(const FnPoint& f, const Sampler& a) {
    if (!same_points(f.domain, a.codomain))
        throw DomainError("pushforward: f not total on sampler codomain");
    return {f.codomain,
            [tab = f.table, inner = a.fn](const Seed& s) { return tab[static_cast<std::size_t>(inner(s))]; }};
}

Sampler patch(std::vector<std::pair<double, double>> intervals, std::vector<Sampler> samplers) {
    if (intervals.size() != samplers.size() || intervals.empty())
        throw DomainError("patch: intervals/samplers arity mismatch");
    const SpacePtr& cod = samplers.front().codomain;
    for (const auto& s : samplers)
        if (!same_points(s.codomain, cod)) throw DomainError("patch: samplers on different codomains");

    // Validate: disjoint half-open pieces covering [0,1) exactly.
    std::vector<std::size_t> order(intervals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return intervals[a].first < intervals[b].first; });
    double edge = 0.0;
    for (std::size_t i : order) {
        auto [lo, hi] = intervals[i];
        if (lo != edge) throw DomainError("patch: intervals overlap or leave a gap");
        if (hi <= lo) throw DomainError("patch: empty or inverted interval");
        edge = hi;
    }
    if (edge != 1.0) throw DomainError("patch: intervals do not cover [0,1)");

    return {cod, [intervals = std::move(intervals), samplers = std::move(samplers)](const Seed& s) {
                double u = uniform(s);
                Seed sub = seed_child(s, 0);
                for (std::size_t i = 0; i < intervals.size(); ++i)
                    if (u >= intervals[i].first && u < intervals[i].second)
                        return samplers[i](sub);
                return samplers.back()(sub);  // unreachable: intervals cover [0,1)
            }};
}

Dist<double> empirical(const Sampler& a, std::size_t n, const Seed& root) {
    if (n == 0) throw DomainError("empirical: need n >= 1");
    std::vector<std::size_t> counts(a.codomain->size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        int x = a(seed_child(root, k));
        counts.at(static_cast<std::size_t>(x))++;
    }
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return {a.codomain, std::move(w)};
}

Sampler bind_sampler(const Sampler& a, const Kernel<double>& k) {
    if (!same_points(k.domain, a.codomain)) throw DomainError("bind_sampler: shape mismatch");
    return {k.codomain, [inner = a.fn, k](const Seed& s) {
                int x = inner(seed_child(s, 0));
                auto row = k.row(static_cast<std::size_t>(x));
                return quantile_index(row, uniform(seed_child(s, 1)));
            }};
}

Sampler kernel_product_sampler(const Kernel<double>& mu, const Kernel<double>& nu, int z) {
    SpacePtr xy = Space::product({mu.codomain, nu.codomain});
    const std::size_t ny = nu.codomain->size();
    if (z < 0 || z >= static_cast<int>(nu.domain->size()))
        throw DomainError("kernel_product_sampler: z not in domain");
    return {xy, [mu, nu, z, ny](const Seed& s) {
                int y = quantile_index(nu.row(static_cast<std::size_t>(z)), uniform(seed_child(s, 0)));
                int coords[2] = {y, z};
                auto mrow = mu.row(mu.domain->tuple_index(coords));
                int x = quantile_index(mrow, uniform(seed_child(s, 1)));
                return static_cast<int>(static_cast<std::size_t>(x) * ny + static_cast<std::size_t>(y));
            }};
}

SampledKernel SampledKernel::from_kernel(const Kernel<double>& k) {
    return {k.domain, k.codomain, [k](int z, const Seed& s) {
                if (z < 0 || z >= static_cast<int>(k.domain->size()))
                    throw DomainError("sampled kernel: z not in domain");
                return quantile_index(k.row(static_cast<std::size_t>(z)), uniform(s));
            }};
}

Sampler SampledKernel::at(int z) const {
    return {codomain, [fn = fn, z](const Seed& s) { return fn(z, s); }};
}

} // namespace qus
