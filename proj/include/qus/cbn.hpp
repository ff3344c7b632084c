#pragma once

#include "qus/conditioning.hpp"
#include "qus/graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace qus {

// A causal Bayesian network: a CDAG, a finite space per node, and one Markov
// kernel per output node whose domain is the product of its parents' spaces
// in canonical parent order (topological position, ties impossible).
// Parent-free nodes use the one-point space as domain.
class CbnModel {
public:
    static CbnModel make(Cdag graph, std::map<std::string, SpacePtr> spaces,
                         std::map<std::string, Kernel<double>> kernels);

    const Cdag& graph() const { return graph_; }
    const SpacePtr& space(int v) const { return spaces_.at(static_cast<std::size_t>(v)); }
    const SpacePtr& space(const std::string& name) const;
    const Kernel<double>& kernel(int v) const;

    std::vector<int> canonical_parents(int v) const;
    // Product of the parents' spaces in canonical order; unit if parent-free.
    SpacePtr parent_space(int v) const;
    // Product of the input spaces in declaration order; unit if J is empty.
    const SpacePtr& input_space() const { return input_space_; }
    // Product of the output spaces in declaration order.
    const SpacePtr& output_space() const { return output_space_; }

private:
    Cdag graph_;
    std::vector<SpacePtr> spaces_;
    std::vector<std::optional<Kernel<double>>> kernels_;
    SpacePtr input_space_, output_space_;
};

// The joint Markov kernel X_J -> X_V: the kernel product of the node kernels
// taken against the canonical topological order, coordinates reindexed to
// output declaration order. Fubini makes the order choice immaterial up to
// that permutation.
Kernel<double> joint_kernel(const CbnModel& m);

struct TciCell {
    std::size_t t, x, y, z;
};

struct TciWitness {
    bool holds = false;
    std::optional<Kernel<double>> q;           // witness Q(X|Z) when holds
    std::optional<TciCell> counterexample;     // first failing cell otherwise
    double max_dev = 0.0;                      // largest deviation encountered
};

// Decision procedure for K(X,Y,Z|T) = Q(X|Z) (x) K(Y,Z|T) on finite spaces:
// for every z carrying mass under some t, the conditional of X given
// (Y=y, Z=z, T=t) must agree across all positive-mass (y,t); the candidate Q
// is that conditional (fallback rows elsewhere), and the factorization is
// then verified atomwise. Sound and complete at this scale.
TciWitness tci_check(const Kernel<double>& k, double tol = kWeightTol,
                     Fallback fb = Fallback::uniform);

// A group of coordinates of a joint kernel: output-tuple coordinates plus
// input factors entering as dirac coordinates.
struct GroupSpec {
    std::vector<std::size_t> out_coords;
    std::vector<std::size_t> in_factors;
};

// Regroups (and partially marginalizes) a joint kernel T -> prod(...) into
// K(X_A, X_B, X_C | T) with the grouped product codomain.
Kernel<double> group_kernel(const Kernel<double>& joint, const GroupSpec& a, const GroupSpec& b,
                            const GroupSpec& c);

// Builds K(X_A, X_B, X_C | X_J) from the model's joint kernel (input nodes
// enter as dirac coordinates) and runs tci_check.
TciWitness tci_on_model(const CbnModel& m, const std::vector<std::string>& a,
                        const std::vector<std::string>& b, const std::vector<std::string>& c,
                        double tol = kWeightTol);

struct GmpViolation {
    std::vector<std::string> a, b, c;
    TciWitness witness;
};

struct GmpReport {
    std::size_t triples = 0;
    std::size_t dsep_count = 0;
    std::size_t tci_holds_without_dsep = 0;  // informational; not a failure
    bool converse_checked = false;
    std::vector<GmpViolation> violations;    // d-separated but TCI failed
};

// Sweeps all (A,B,C) with 1 <= |A|,|B| <= k and |C| <= k. Every d-separated
// triple must satisfy TCI; converse holds are only counted when requested
// (no faithfulness claim).
GmpReport gmp_sweep(const CbnModel& m, std::size_t max_set_size, bool check_converse = false,
                    double tol = kWeightTol);

// Replaces the mechanisms at W by generic dispatchers over finite candidate
// lists: the extended graph gains an input I_w whose space indexes the
// candidates, and the kernel at w routes on that coordinate.
CbnModel make_partially_generic(const CbnModel& m, const std::vector<std::string>& w_nodes,
                                const std::map<std::string, std::vector<Kernel<double>>>& candidates);

struct SeparoidRuleReport {
    std::string rule;
    std::size_t trials = 0;
    std::size_t hypothesis_failures = 0;  // construction self-check
    std::size_t conclusion_failures = 0;
};

struct SeparoidReport {
    std::vector<SeparoidRuleReport> rules;
    bool all_passed() const;
};

// Randomized check of the separoid rules: joints satisfying each rule's
// hypothesis are built by the witness recipes, then the conclusion is
// decided by tci_check.
SeparoidReport separoid_suite(std::size_t trials, std::uint64_t seed, double tol = kWeightTol);

// Four-node CBN Z -> X, Z -> E, X -> Y, E -> Y where E ranges over the
// function space Y^X and Y is the deterministic evaluation E(X).
CbnModel strong_ignorability_model(const SpacePtr& zs, const SpacePtr& xs, const SpacePtr& ys,
                                   const Dist<double>& p_z, const Kernel<double>& p_x_given_z,
                                   const Kernel<double>& p_e_given_z);

// Law of E(x) under a distribution on the function space Y^X.
Dist<double> potential_outcome(const Dist<double>& e_dist, int x);

} // namespace qus
