#include "qus/space.hpp"

#include <atomic>
#include <cstdlib>

namespace qus {

namespace {

std::atomic<std::size_t>& cap_slot() {
    static std::atomic<std::size_t> cap = [] {
        if (const char* env = std::getenv("QUS_CAP")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        }
        return static_cast<std::size_t>(100000);
    }();
    return cap;
}

void check_cap(std::size_t n, const char* what) {
    if (n > cardinality_cap())
        throw CapError(std::string(what) + ": cardinality " + std::to_string(n) +
                       " exceeds cap " + std::to_string(cardinality_cap()));
}

std::string join_names(const std::vector<SpacePtr>& ss, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (i) out += sep;
        out += ss[i]->name();
    }
    return out;
}

} // namespace

std::size_t cardinality_cap() { return cap_slot().load(); }
void set_cardinality_cap(std::size_t cap) { cap_slot().store(cap); }

void Space::build_index() {
    index_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        auto [it, fresh] = index_.emplace(points_[i], static_cast<int>(i));
        if (!fresh)
            throw DomainError("space '" + name_ + "': duplicate point '" + points_[i] + "'");
    }
}

SpacePtr Space::make(std::string name, std::vector<std::string> points) {
    if (points.empty()) throw DomainError("space '" + name + "': needs at least one point");
    auto s = std::shared_ptr<Space>(new Space());
    s->name_ = std::move(name);
    s->points_ = std::move(points);
    s->build_index();
    return s;
}

SpacePtr Space::product(std::vector<SpacePtr> factors, std::string name) {
    if (factors.empty()) throw DomainError("product: needs at least one factor");
    std::size_t n = 1;
    for (const auto& f : factors) {
        if (n > cardinality_cap() / f->size() + 1) check_cap(cardinality_cap() + 1, "product");
        n *= f->size();
    }
    check_cap(n, "product");

    auto s = std::shared_ptr<Space>(new Space());
    s->kind_ = Kind::product;
    s->name_ = name.empty() ? join_names(factors, "*") : std::move(name);
    s->factors_ = std::move(factors);
    s->points_.reserve(n);
    std::vector<int> coords(s->factors_.size(), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::string label = "(";
        for (std::size_t k = 0; k < coords.size(); ++k) {
            if (k) label += ",";
            label += s->factors_[k]->point(static_cast<std::size_t>(coords[k]));
        }
        label += ")";
        s->points_.push_back(std::move(label));
        // odometer, last factor fastest
        for (std::size_t k = coords.size(); k-- > 0;) {
            if (++coords[k] < static_cast<int>(s->factors_[k]->size())) break;
            coords[k] = 0;
        }
    }
    s->build_index();
    return s;
}

SpacePtr Space::coproduct(std::vector<SpacePtr> parts, std::string name) {
    if (parts.empty()) throw DomainError("coproduct: needs at least one part");
    auto s = std::shared_ptr<Space>(new Space());
    s->kind_ = Kind::coproduct;
    s->name_ = name.empty() ? join_names(parts, "+") : std::move(name);
    s->factors_ = std::move(parts);
    for (std::size_t p = 0; p < s->factors_.size(); ++p) {
        s->part_offsets_.push_back(s->points_.size());
        for (const auto& pt : s->factors_[p]->points())
            s->points_.push_back("in" + std::to_string(p) + ":" + pt);
    }
    s->build_index();
    return s;
}

SpacePtr Space::exponential(const SpacePtr& domain, const SpacePtr& codomain, std::string name) {
    const std::size_t nz = domain->size();
    const std::size_t nx = codomain->size();
    std::size_t n = 1;
    for (std::size_t k = 0; k < nz; ++k) {
        if (nx != 0 && n > cardinality_cap() / nx + 1) check_cap(cardinality_cap() + 1, "exponential");
        n *= nx;
    }
    check_cap(n, "exponential");

    auto s = std::shared_ptr<Space>(new Space());
    s->kind_ = Kind::exponential;
    s->name_ = name.empty() ? codomain->name() + "^" + domain->name() : std::move(name);
    s->exp_domain_ = domain;
    s->exp_codomain_ = codomain;
    s->points_.reserve(n);
    std::vector<int> table(nz, 0);
    for (std::size_t f = 0; f < n; ++f) {
        std::string label = "(";
        for (std::size_t k = 0; k < nz; ++k) {
            if (k) label += ",";
            label += codomain->point(static_cast<std::size_t>(table[k]));
        }
        label += ")";
        s->points_.push_back(std::move(label));
        for (std::size_t k = nz; k-- > 0;) {
            if (++table[k] < static_cast<int>(nx)) break;
            table[k] = 0;
        }
    }
    s->build_index();
    return s;
}

const SpacePtr& Space::unit() {
    static SpacePtr s = Space::make("unit", {"*"});
    return s;
}

const SpacePtr& Space::bools() {
    static SpacePtr s = Space::make("bool", {"0", "1"});
    return s;
}

int Space::index_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
}

std::size_t Space::tuple_index(std::span<const int> coords) const {
    if (!is_product() || coords.size() != factors_.size())
        throw DomainError("tuple_index: not a product of matching arity");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        if (coords[k] < 0 || coords[k] >= static_cast<int>(factors_[k]->size()))
            throw DomainError("tuple_index: coordinate out of range");
        idx = idx * factors_[k]->size() + static_cast<std::size_t>(coords[k]);
    }
    return idx;
}

void Space::split_index(std::size_t idx, std::span<int> coords_out) const {
    if (!is_product() || coords_out.size() != factors_.size())
        throw DomainError("split_index: not a product of matching arity");
    for (std::size_t k = factors_.size(); k-- > 0;) {
        coords_out[k] = static_cast<int>(idx % factors_[k]->size());
        idx /= factors_[k]->size();
    }
}

int Space::coord_of(std::size_t idx, std::size_t factor) const {
    if (!is_product() || factor >= factors_.size())
        throw DomainError("coord_of: not a product / bad factor");
    std::size_t div = 1;
    for (std::size_t k = factors_.size(); k-- > factor + 1;) div *= factors_[k]->size();
    return static_cast<int>((idx / div) % factors_[factor]->size());
}

std::pair<int, int> Space::untag(std::size_t idx) const {
    if (kind_ != Kind::coproduct) throw DomainError("untag: not a coproduct");
    for (std::size_t p = part_offsets_.size(); p-- > 0;) {
        if (idx >= part_offsets_[p])
            return {static_cast<int>(p), static_cast<int>(idx - part_offsets_[p])};
    }
    throw InternalError("untag: bad index");
}

std::size_t Space::inject(std::size_t part, std::size_t idx_in_part) const {
    if (kind_ != Kind::coproduct || part >= part_offsets_.size())
        throw DomainError("inject: not a coproduct / bad part");
    if (idx_in_part >= factors_[part]->size()) throw DomainError("inject: bad index");
    return part_offsets_[part] + idx_in_part;
}

int Space::apply(std::size_t f, std::size_t z) const {
    if (kind_ != Kind::exponential) throw DomainError("apply: not an exponential");
    const std::size_t nz = exp_domain_->size();
    const std::size_t nx = exp_codomain_->size();
    if (f >= size() || z >= nz) throw DomainError("apply: index out of range");
    std::size_t div = 1;
    for (std::size_t k = nz; k-- > z + 1;) div *= nx;
    return static_cast<int>((f / div) % nx);
}

bool same_points(const Space& a, const Space& b) {
    return &a == &b || a.points() == b.points();
}

FnPoint::FnPoint(SpacePtr dom, SpacePtr cod, std::vector<int> tab)
    : domain(std::move(dom)), codomain(std::move(cod)), table(std::move(tab)) {
    if (table.size() != domain->size())
        throw DomainError("function point: table size != domain size");
    for (int v : table)
        if (v < 0 || v >= static_cast<int>(codomain->size()))
            throw DomainError("function point: value outside codomain");
}

int FnPoint::eval(int z) const {
    if (z < 0 || z >= static_cast<int>(domain->size()))
        throw DomainError("eval: point not in domain");
    return table[static_cast<std::size_t>(z)];
}

int FnPoint::eval(const std::string& z_label) const {
    int z = domain->index_of(z_label);
    if (z < 0) throw DomainError("eval: unknown domain point '" + z_label + "'");
    return table[static_cast<std::size_t>(z)];
}

FnPoint FnPoint::identity(const SpacePtr& s) {
    std::vector<int> tab(s->size());
    for (std::size_t i = 0; i < tab.size(); ++i) tab[i] = static_cast<int>(i);
    return {s, s, std::move(tab)};
}

FnPoint FnPoint::constant(const SpacePtr& dom, const SpacePtr& cod, int value) {
    if (value < 0 || value >= static_cast<int>(cod->size()))
        throw DomainError("constant: value outside codomain");
    return {dom, cod, std::vector<int>(dom->size(), value)};
}

FnPoint FnPoint::from_exponential_point(const SpacePtr& exp_space, std::size_t f) {
    if (exp_space->kind() != Space::Kind::exponential)
        throw DomainError("from_exponential_point: not an exponential space");
    std::vector<int> tab(exp_space->exp_domain()->size());
    for (std::size_t z = 0; z < tab.size(); ++z) tab[z] = exp_space->apply(f, z);
    return {exp_space->exp_domain(), exp_space->exp_codomain(), std::move(tab)};
}

std::size_t FnPoint::exponential_index() const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < table.size(); ++k)
        idx = idx * codomain->size() + static_cast<std::size_t>(table[k]);
    return idx;
}

FnPoint compose(const FnPoint& g, const FnPoint& f) {
    if (!same_points(g.domain, f.codomain)) throw DomainError("compose: domain/codomain mismatch");
    std::vector<int> tab(f.table.size());
    for (std::size_t z = 0; z < tab.size(); ++z)
        tab[z] = g.table[static_cast<std::size_t>(f.table[z])];
    return {f.domain, g.codomain, std::move(tab)};
}

FinEvent::FinEvent(SpacePtr s, std::vector<bool> m) : space(std::move(s)), members(std::move(m)) {
    if (members.size() != space->size()) throw DomainError("event: mask size != space size");
}

FinEvent FinEvent::of(const SpacePtr& s, std::initializer_list<int> idxs) {
    std::vector<bool> m(s->size(), false);
    for (int i : idxs) m.at(static_cast<std::size_t>(i)) = true;
    return {s, std::move(m)};
}

FinEvent FinEvent::empty(const SpacePtr& s) { return {s, std::vector<bool>(s->size(), false)}; }
FinEvent FinEvent::full(const SpacePtr& s) { return {s, std::vector<bool>(s->size(), true)}; }

std::size_t FinEvent::count() const {
    std::size_t c = 0;
    for (bool b : members) c += b;
    return c;
}

bool operator==(const FinEvent& a, const FinEvent& b) {
    return same_points(a.space, b.space) && a.members == b.members;
}

FnPoint event_to_indicator(const FinEvent& a) {
    std::vector<int> tab(a.members.size());
    for (std::size_t i = 0; i < tab.size(); ++i) tab[i] = a.members[i] ? 1 : 0;
    return {a.space, Space::bools(), std::move(tab)};
}

FinEvent indicator_to_event(const FnPoint& ind) {
    if (!same_points(ind.codomain, Space::bools()))
        throw DomainError("indicator_to_event: codomain is not the canonical two-point space");
    std::vector<bool> m(ind.table.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = ind.table[i] == 1;
    return {ind.domain, std::move(m)};
}

FnPoint curry(const FnPoint& g) {
    if (!g.domain->is_product() || g.domain->factors().size() != 2)
        throw DomainError("curry: domain must be a binary product");
    const SpacePtr& z_space = g.domain->factors()[0];
    const SpacePtr& w_space = g.domain->factors()[1];
    SpacePtr exp = Space::exponential(w_space, g.codomain);
    std::vector<int> tab(z_space->size());
    const std::size_t nw = w_space->size();
    for (std::size_t z = 0; z < tab.size(); ++z) {
        std::size_t fidx = 0;
        for (std::size_t w = 0; w < nw; ++w) {
            int coords[2] = {static_cast<int>(z), static_cast<int>(w)};
            fidx = fidx * g.codomain->size() +
                   static_cast<std::size_t>(g.table[g.domain->tuple_index(coords)]);
        }
        tab[z] = static_cast<int>(fidx);
    }
    return {z_space, exp, std::move(tab)};
}

FnPoint uncurry(const FnPoint& h) {
    if (h.codomain->kind() != Space::Kind::exponential)
        throw DomainError("uncurry: codomain must be an exponential");
    const SpacePtr& z_space = h.domain;
    const SpacePtr& w_space = h.codomain->exp_domain();
    SpacePtr prod = Space::product({z_space, w_space});
    std::vector<int> tab(prod->size());
    for (std::size_t z = 0; z < z_space->size(); ++z)
        for (std::size_t w = 0; w < w_space->size(); ++w) {
            int coords[2] = {static_cast<int>(z), static_cast<int>(w)};
            tab[prod->tuple_index(coords)] =
                h.codomain->apply(static_cast<std::size_t>(h.table[z]), w);
        }
    return {prod, h.codomain->exp_codomain(), std::move(tab)};
}

} // namespace qus
