#pragma once

#include "qus/kernel.hpp"
#include "qus/sampler.hpp"

#include <functional>

namespace qus {

// X^len as a space; the single factor itself for len == 1.
SpacePtr power_space(const SpacePtr& x, std::size_t len);

// A consistent conditional family given intensionally: the law of X_0 given
// z, and the law of coordinate n given the realized prefix x_{0:n-1} and z.
struct SequenceModel {
    SpacePtr z_space;
    SpacePtr x_space;
    Kernel<double> base;                                              // Z -> X
    std::function<Dist<double>(std::span<const int>, int)> cond;      // (prefix, z) -> law of next
};

// iid coordinates: every conditional is base(z).
SequenceModel iid_family(const Kernel<double>& base);
// Order-1 chain: coordinate n+1 drawn from step at the last coordinate.
// `step` may have domain X (homogeneous) or product(X, Z).
SequenceModel markov_family(const Kernel<double>& base, const Kernel<double>& step);

// The lazy extension: coordinate n of the sequence is drawn via the
// conditional quantile at the realized prefix, each on a fresh split child,
// so finite prefixes replay bit-identically and follow the chain-product law.
class SequenceSampler {
public:
    explicit SequenceSampler(SequenceModel m) : model_(std::move(m)) {}

    const SequenceModel& model() const { return model_; }

    // First `len` coordinates at Z = z under the given root seed.
    std::vector<int> prefix(int z, const Seed& root, std::size_t len) const;

private:
    SequenceModel model_;
};

inline SequenceSampler extend(SequenceModel m) { return SequenceSampler(std::move(m)); }

// Exact chain product of the conditionals on X^len.
Dist<double> exact_prefix_law(const SequenceModel& m, int z, std::size_t len);

// Exact law as a kernel Z -> X^len (one family level).
Kernel<double> prefix_law_kernel(const SequenceModel& m, std::size_t len);

// Empirical law of the first n+1 coordinates over `samples` split children.
Dist<double> prefix_marginal(const SequenceSampler& ext, std::size_t n, int z,
                             std::size_t samples, const Seed& root);

// True iff every prefix push-forward of level n+1 equals level n atomwise.
// family[n] is a kernel Z -> X^(n+1); a singleton family is vacuously
// consistent.
bool check_consistency(const std::vector<Kernel<double>>& family, double tol = kWeightTol);

// Invariance of K : Z -> X^n under all n! coordinate permutations.
// Factorial enumeration; n is capped at 6.
bool is_exchangeable(const Kernel<double>& k, double tol = kWeightTol);

struct DefinettiFit {
    std::vector<double> grid;      // deduplicated success probabilities
    std::vector<double> weights;   // nonnegative, per grid point
    double max_residual = 0.0;     // atomwise |fit - row|
    double l2_residual = 0.0;
};

// Nonnegative least-squares fit of each row of K : Z -> X^n (X binary) as a
// grid mixture of iid Bernoulli products. Diagnostic: exact recovery is
// guaranteed only when the row is a grid-supported mixture; otherwise the
// residual quantifies the finite-n gap.
std::vector<DefinettiFit> definetti_mixture(const Kernel<double>& k,
                                            const std::vector<double>& grid);

// Atom vector of Bern(p)^n in canonical product order (index 1 = success).
std::vector<double> bernoulli_power(double p, std::size_t n);

} // namespace qus
