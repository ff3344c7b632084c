#pragma once

#include "qus/error.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace qus {

class Space;
using SpacePtr = std::shared_ptr<const Space>;

// Cardinality cap for product/exponential construction (default 100000).
// The environment variable QUS_CAP overrides the default at startup.
std::size_t cardinality_cap();
void set_cardinality_cap(std::size_t cap);

// A named finite set of atoms carrying the full power-set sigma-algebra.
// Point order is fixed at construction and canonical for every table,
// weight vector and serialization downstream.
//
// Products, coproducts and exponentials remember their structure so that
// indices can be split/combined without string parsing:
//   product   - points are tuples "(a,b)", last factor varying fastest
//   coproduct - points are tagged "in0:a", "in1:b", ...
//   exponential(Z,X) - one point per total map Z -> X, enumerated
//                      lexicographically over Z's point order
class Space {
public:
    enum class Kind { atoms, product, coproduct, exponential };

    static SpacePtr make(std::string name, std::vector<std::string> points);
    static SpacePtr product(std::vector<SpacePtr> factors, std::string name = "");
    static SpacePtr coproduct(std::vector<SpacePtr> parts, std::string name = "");
    static SpacePtr exponential(const SpacePtr& domain, const SpacePtr& codomain,
                                std::string name = "");

    // Canonical one-point space (the terminal object at this scale).
    static const SpacePtr& unit();
    // Canonical two-point space {0,1}; codomain of event indicators.
    static const SpacePtr& bools();

    const std::string& name() const { return name_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<std::string>& points() const { return points_; }
    const std::string& point(std::size_t i) const { return points_[i]; }
    // Index of a point label; -1 if absent.
    int index_of(const std::string& label) const;

    Kind kind() const { return kind_; }
    bool is_product() const { return kind_ == Kind::product; }
    const std::vector<SpacePtr>& factors() const { return factors_; }

    // Mixed-radix helpers for product spaces.
    std::size_t tuple_index(std::span<const int> coords) const;
    void split_index(std::size_t idx, std::span<int> coords_out) const;
    int coord_of(std::size_t idx, std::size_t factor) const;

    // Coproduct helpers: which part a point came from and its index there.
    std::pair<int, int> untag(std::size_t idx) const;
    std::size_t inject(std::size_t part, std::size_t idx_in_part) const;

    // Exponential helpers. A function point with index f maps domain point z
    // to codomain point apply(f, z).
    const SpacePtr& exp_domain() const { return exp_domain_; }
    const SpacePtr& exp_codomain() const { return exp_codomain_; }
    int apply(std::size_t f, std::size_t z) const;

private:
    Space() = default;

    std::string name_;
    std::vector<std::string> points_;
    std::unordered_map<std::string, int> index_;
    Kind kind_ = Kind::atoms;
    std::vector<SpacePtr> factors_;           // product
    std::vector<std::size_t> part_offsets_;   // coproduct: start index per part
    SpacePtr exp_domain_, exp_codomain_;      // exponential

    void build_index();
};

// Structural equality: same point list (names may differ).
bool same_points(const Space& a, const Space& b);
inline bool same_points(const SpacePtr& a, const SpacePtr& b) {
    return a == b || same_points(*a, *b);
}

// A total map between finite spaces, stored as a table over the domain's
// canonical point order.
struct FnPoint {
    SpacePtr domain;
    SpacePtr codomain;
    std::vector<int> table;

    FnPoint() = default;
    FnPoint(SpacePtr dom, SpacePtr cod, std::vector<int> tab);

    int eval(int z) const;
    int eval(const std::string& z_label) const;

    static FnPoint identity(const SpacePtr& s);
    static FnPoint constant(const SpacePtr& dom, const SpacePtr& cod, int value);
    // Decodes a point of exponential(Z,X) into its table.
    static FnPoint from_exponential_point(const SpacePtr& exp_space, std::size_t f);
    // Index of this function inside exponential(domain, codomain).
    std::size_t exponential_index() const;
};

FnPoint compose(const FnPoint& g, const FnPoint& f);  // z -> g(f(z))

// An event (measurable subset) of a finite space, bitset semantics.
struct FinEvent {
    SpacePtr space;
    std::vector<bool> members;

    FinEvent() = default;
    FinEvent(SpacePtr s, std::vector<bool> m);
    static FinEvent of(const SpacePtr& s, std::initializer_list<int> idxs);
    static FinEvent empty(const SpacePtr& s);
    static FinEvent full(const SpacePtr& s);

    bool contains(int i) const { return members[static_cast<std::size_t>(i)]; }
    std::size_t count() const;
};

bool operator==(const FinEvent& a, const FinEvent& b);

// The sigma-algebra/indicator isomorphism at finite scale: an event of X
// corresponds to its indicator map X -> {0,1}.
FnPoint event_to_indicator(const FinEvent& a);
FinEvent indicator_to_event(const FnPoint& ind);

// Curry/uncurry across the exponential adjunction: maps Z x W -> X
// correspond to maps Z -> X^W.
FnPoint curry(const FnPoint& g);    // g : product(Z,W) -> X   to   Z -> X^W
FnPoint uncurry(const FnPoint& h);  // h : Z -> X^W            to   product(Z,W) -> X

} // namespace qus
