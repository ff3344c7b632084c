#include "qus/extension.hpp"

#include "qus/nnls.hpp"

#include <algorithm>
#include <cmath>

namespace qus {

SpacePtr power_space(const SpacePtr& x, std::size_t len) {
    if (len == 0) throw DomainError("power_space: need len >= 1");
    if (len == 1) return x;
    return Space::product(std::vector<SpacePtr>(len, x));
}

SequenceModel iid_family(const Kernel<double>& base) {
    SequenceModel m;
    m.z_space = base.domain;
    m.x_space = base.codomain;
    m.base = base;
    m.cond = [base](std::span<const int>, int z) { return base.row_dist(static_cast<std::size_t>(z)); };
    return m;
}

SequenceModel markov_family(const Kernel<double>& base, const Kernel<double>& step) {
    SequenceModel m;
    m.z_space = base.domain;
    m.x_space = base.codomain;
    m.base = base;
    if (!same_points(step.codomain, base.codomain))
        throw DomainError("markov_family: step codomain must be X");
    if (same_points(step.domain, base.codomain)) {
        m.cond = [step](std::span<const int> prefix, int) {
            return step.row_dist(static_cast<std::size_t>(prefix.back()));
        };
    } else if (step.domain->is_product() && step.domain->factors().size() == 2 &&
               same_points(step.domain->factors()[0], base.codomain) &&
               same_points(step.domain->factors()[1], base.domain)) {
        m.cond = [step](std::span<const int> prefix, int z) {
            int coords[2] = {prefix.back(), z};
            return step.row_dist(step.domain->tuple_index(coords));
        };
    } else {
        throw DomainError("markov_family: step domain must be X or product(X, Z)");
    }
    return m;
}

std::vector<int> SequenceSampler::prefix(int z, const Seed& root, std::size_t len) const {
    if (z < 0 || z >= static_cast<int>(model_.z_space->size()))
        throw DomainError("sequence prefix: z not in Z");
    std::vector<int> out;
    out.reserve(len);
    for (std::size_t n = 0; n < len; ++n) {
        Dist<double> d = n == 0 ? model_.base.row_dist(static_cast<std::size_t>(z))
                                : model_.cond(out, z);
        out.push_back(quantile_index({d.w.data(), d.w.size()}, uniform(seed_child(root, n))));
    }
    return out;
}

Dist<double> exact_prefix_law(const SequenceModel& m, int z, std::size_t len) {
    SpacePtr space = power_space(m.x_space, len);
    const std::size_t nx = m.x_space->size();
    std::vector<double> w(space->size(), 0.0);
    std::vector<int> prefix;
    // depth-first chain product over all prefixes
    std::function<void(std::size_t, double)> rec = [&](std::size_t depth, double p) {
        if (p == 0.0) return;
        if (depth == len) {
            std::size_t idx = 0;
            for (int c : prefix) idx = idx * nx + static_cast<std::size_t>(c);
            w[idx] += p;
            return;
        }
        Dist<double> d = depth == 0 ? m.base.row_dist(static_cast<std::size_t>(z))
                                    : m.cond(prefix, z);
        for (std::size_t c = 0; c < nx; ++c) {
            prefix.push_back(static_cast<int>(c));
            rec(depth + 1, p * d.w[c]);
            prefix.pop_back();
        }
    };
    rec(0, 1.0);
    return {space, std::move(w)};
}

Kernel<double> prefix_law_kernel(const SequenceModel& m, std::size_t len) {
    std::vector<Dist<double>> rows;
    for (std::size_t z = 0; z < m.z_space->size(); ++z)
        rows.push_back(exact_prefix_law(m, static_cast<int>(z), len));
    return Kernel<double>::from_rows(m.z_space, rows);
}

Dist<double> prefix_marginal(const SequenceSampler& ext, std::size_t n, int z,
                             std::size_t samples, const Seed& root) {
    if (samples == 0) throw DomainError("prefix_marginal: need samples >= 1");
    const SequenceModel& m = ext.model();
    SpacePtr space = power_space(m.x_space, n + 1);
    const std::size_t nx = m.x_space->size();
    std::vector<double> w(space->size(), 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<int> pre = ext.prefix(z, seed_child(root, s), n + 1);
        std::size_t idx = 0;
        for (int c : pre) idx = idx * nx + static_cast<std::size_t>(c);
        w[idx] += 1.0;
    }
    for (auto& v : w) v /= static_cast<double>(samples);
    return {space, std::move(w)};
}

bool check_consistency(const std::vector<Kernel<double>>& family, double tol) {
    if (family.size() <= 1) return true;
    const SpacePtr& z = family.front().domain;
    for (std::size_t n = 1; n < family.size(); ++n) {
        const Kernel<double>& hi = family[n];
        const Kernel<double>& lo = family[n - 1];
        if (!same_points(hi.domain, z) || !same_points(lo.domain, z))
            throw DomainError("check_consistency: family domains differ");
        if (hi.codomain->size() % lo.codomain->size() != 0)
            throw DomainError("check_consistency: level shapes incompatible");
        const std::size_t block = hi.codomain->size() / lo.codomain->size();
        for (std::size_t zz = 0; zz < z->size(); ++zz) {
            auto hrow = hi.row(zz);
            auto lrow = lo.row(zz);
            for (std::size_t i = 0; i < lrow.size(); ++i) {
                double s = num::vsum(hrow.data() + i * block, block);
                if (std::fabs(s - lrow[i]) > tol) return false;
            }
        }
    }
    return true;
}

bool is_exchangeable(const Kernel<double>& k, double tol) {
    const Space& cod = *k.codomain;
    std::size_t n = 1;
    if (cod.is_product()) {
        n = cod.factors().size();
        for (const auto& f : cod.factors())
            if (!same_points(f, cod.factors().front()))
                throw DomainError("is_exchangeable: coordinates on different spaces");
    }
    if (n > 6) throw DomainError("is_exchangeable: n > 6 (factorial enumeration)");
    if (n == 1) return true;

    const std::size_t nx = cod.factors().front()->size();
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    std::vector<int> coords(n), pcoords(n);

    while (std::next_permutation(perm.begin(), perm.end())) {
        for (std::size_t z = 0; z < k.domain->size(); ++z) {
            auto row = k.row(z);
            for (std::size_t w = 0; w < row.size(); ++w) {
                cod.split_index(w, coords);
                for (std::size_t i = 0; i < n; ++i)
                    pcoords[static_cast<std::size_t>(perm[i])] = coords[i];
                std::size_t pw = 0;
                for (std::size_t i = 0; i < n; ++i)
                    pw = pw * nx + static_cast<std::size_t>(pcoords[i]);
                if (std::fabs(row[w] - row[pw]) > tol) return false;
            }
        }
    }
    return true;
}

std::vector<double> bernoulli_power(double p, std::size_t n) {
    if (p < 0.0 || p > 1.0) throw DomainError("bernoulli_power: p outside [0,1]");
    std::vector<double> w(static_cast<std::size_t>(1) << n);
    for (std::size_t atom = 0; atom < w.size(); ++atom) {
        double v = 1.0;
        for (std::size_t bit = 0; bit < n; ++bit)
            v *= (atom >> (n - 1 - bit)) & 1 ? p : 1.0 - p;
        w[atom] = v;
    }
    return w;
}

std::vector<DefinettiFit> definetti_mixture(const Kernel<double>& k,
                                            const std::vector<double>& grid) {
    const Space& cod = *k.codomain;
    std::size_t n = 1;
    SpacePtr x = k.codomain;
    if (cod.is_product()) {
        n = cod.factors().size();
        x = cod.factors().front();
        for (const auto& f : cod.factors())
            if (!same_points(f, x)) throw DomainError("definetti_mixture: mixed coordinate spaces");
    }
    if (x->size() != 2) throw DomainError("definetti_mixture: X must be binary");
    if (grid.empty()) throw DomainError("definetti_mixture: empty grid");

    std::vector<double> ps = grid;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

    const std::size_t rows = static_cast<std::size_t>(1) << n;
    const std::size_t cols = ps.size();
    std::vector<double> a(rows * cols);
    for (std::size_t j = 0; j < cols; ++j) {
        auto col = bernoulli_power(ps[j], n);
        for (std::size_t r = 0; r < rows; ++r) a[r * cols + j] = col[r];
    }

    std::vector<DefinettiFit> fits;
    fits.reserve(k.domain->size());
    for (std::size_t z = 0; z < k.domain->size(); ++z) {
        auto row = k.row(z);
        NnlsResult res = nnls(a, rows, cols, {row.begin(), row.end()});
        DefinettiFit fit;
        fit.grid = ps;
        fit.weights = std::move(res.x);
        fit.max_residual = res.max_residual;
        fit.l2_residual = res.l2_residual;
        fits.push_back(std::move(fit));
    }
    return fits;
}

} // namespace qus
