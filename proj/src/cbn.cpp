#include "qus/cbn.hpp"

#include <algorithm>
#include <random>

namespace qus {

namespace {

// Empty lists collapse to the one-point space and singletons to the factor
// itself, so node kernels bind against their parent's actual space.
SpacePtr product_or_unit(std::vector<SpacePtr> factors) {
    if (factors.empty()) return Space::unit();
    if (factors.size() == 1) return factors.front();
    return Space::product(std::move(factors));
}

} // namespace

CbnModel CbnModel::make(Cdag graph, std::map<std::string, SpacePtr> spaces,
                        std::map<std::string, Kernel<double>> kernels) {
    CbnModel m;
    m.graph_ = std::move(graph);
    const std::size_t n = m.graph_.node_count();
    m.spaces_.resize(n);
    m.kernels_.resize(n);

    for (std::size_t v = 0; v < n; ++v) {
        auto it = spaces.find(m.graph_.node_name(static_cast<int>(v)));
        if (it == spaces.end())
            throw DomainError("cbn: no space bound to node '" +
                              m.graph_.node_name(static_cast<int>(v)) + "'");
        m.spaces_[v] = it->second;
    }
    for (const auto& [name, _] : spaces)
        if (m.graph_.node_index(name) < 0) throw DomainError("cbn: space for unknown node '" + name + "'");

    std::vector<SpacePtr> in_spaces, out_spaces;
    for (std::size_t v = 0; v < m.graph_.input_count(); ++v) in_spaces.push_back(m.spaces_[v]);
    for (std::size_t v = m.graph_.input_count(); v < n; ++v) out_spaces.push_back(m.spaces_[v]);
    m.input_space_ = product_or_unit(std::move(in_spaces));
    m.output_space_ = product_or_unit(std::move(out_spaces));

    for (std::size_t v = m.graph_.input_count(); v < n; ++v) {
        const std::string& name = m.graph_.node_name(static_cast<int>(v));
        auto it = kernels.find(name);
        if (it == kernels.end()) throw DomainError("cbn: no kernel bound to output node '" + name + "'");
        SpacePtr want = m.parent_space(static_cast<int>(v));
        if (!same_points(it->second.domain, want))
            throw DomainError("cbn: kernel for '" + name +
                              "' has wrong domain (expect parent product '" + want->name() + "')");
        if (!same_points(it->second.codomain, m.spaces_[v]))
            throw DomainError("cbn: kernel for '" + name + "' has wrong codomain");
        m.kernels_[v] = it->second;
    }
    for (const auto& [name, _] : kernels) {
        int v = m.graph_.node_index(name);
        if (v < 0 || m.graph_.is_input(v))
            throw DomainError("cbn: kernel bound to non-output '" + name + "'");
    }
    return m;
}

const SpacePtr& CbnModel::space(const std::string& name) const {
    return spaces_.at(static_cast<std::size_t>(graph_.require_node(name)));
}

const Kernel<double>& CbnModel::kernel(int v) const {
    const auto& k = kernels_.at(static_cast<std::size_t>(v));
    if (!k) throw DomainError("cbn: node has no kernel (input node?)");
    return *k;
}

std::vector<int> CbnModel::canonical_parents(int v) const {
    std::vector<int> ps = graph_.parents(v);
    const auto& topo = graph_.topological_order();
    std::vector<int> pos(graph_.node_count());
    for (std::size_t i = 0; i < topo.size(); ++i) pos[static_cast<std::size_t>(topo[i])] = static_cast<int>(i);
    std::sort(ps.begin(), ps.end(),
              [&](int a, int b) { return pos[static_cast<std::size_t>(a)] < pos[static_cast<std::size_t>(b)]; });
    return ps;
}

SpacePtr CbnModel::parent_space(int v) const {
    std::vector<SpacePtr> fs;
    for (int p : canonical_parents(v)) fs.push_back(space(p));
    return product_or_unit(std::move(fs));
}

Kernel<double> joint_kernel(const CbnModel& m) {
    const Cdag& g = m.graph();
    const SpacePtr& js = m.input_space();
    const std::size_t nj = js->size();

    // Fold of kernel products in canonical topological order. The running
    // codomain is a nested binary product; `added` lists its coordinates
    // newest-first (the unit core at the end contributes radix 1).
    Kernel<double> acc(js, Space::unit(), std::vector<double>(nj, 1.0));
    std::vector<int> added;  // node indices, newest first

    auto input_factor = [&](int j) {
        // position of input node j among the input-space factors
        return static_cast<std::size_t>(j);
    };

    for (int v : g.topological_order()) {
        if (g.is_input(v)) continue;
        const Kernel<double>& pv = m.kernel(v);

        // coordinate decoding radices for the accumulated codomain
        std::vector<std::size_t> suffix(added.size() + 1, 1);
        for (std::size_t i = added.size(); i-- > 0;)
            suffix[i] = suffix[i + 1] * m.space(added[i])->size();

        std::vector<int> cps = m.canonical_parents(v);
        SpacePtr big = Space::product({acc.codomain, js});
        Kernel<double> lifted = reindex_domain(
            pv, big, [&, cps = std::move(cps)](std::size_t i) {
                std::size_t s = i / nj, t = i % nj;
                std::size_t pidx = 0;
                for (int p : cps) {
                    std::size_t coord;
                    if (g.is_input(p)) {
                        coord = static_cast<std::size_t>(
                            js->is_product() ? js->coord_of(t, input_factor(p)) : static_cast<int>(t));
                    } else {
                        std::size_t at = static_cast<std::size_t>(
                            std::find(added.begin(), added.end(), p) - added.begin());
                        coord = (s / suffix[at + 1]) % m.space(p)->size();
                    }
                    pidx = pidx * m.space(p)->size() + coord;
                }
                return pidx;
            });
        acc = kernel_product(lifted, acc);
        added.insert(added.begin(), v);
    }

    // Reindex nested coordinates (newest-first) to output declaration order.
    const SpacePtr& vs = m.output_space();
    std::vector<std::size_t> suffix(added.size() + 1, 1);
    for (std::size_t i = added.size(); i-- > 0;)
        suffix[i] = suffix[i + 1] * m.space(added[i])->size();

    std::vector<std::size_t> decl;  // output nodes in declaration order
    for (std::size_t v = g.input_count(); v < g.node_count(); ++v) decl.push_back(v);

    std::vector<double> table(nj * vs->size(), 0.0);
    for (std::size_t t = 0; t < nj; ++t) {
        auto row = acc.row(t);
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (row[s] == 0.0) continue;
            std::size_t out = 0;
            for (std::size_t dv : decl) {
                std::size_t at = static_cast<std::size_t>(
                    std::find(added.begin(), added.end(), static_cast<int>(dv)) - added.begin());
                std::size_t coord = (s / suffix[at + 1]) % m.space(static_cast<int>(dv))->size();
                out = out * m.space(static_cast<int>(dv))->size() + coord;
            }
            table[t * vs->size() + out] += row[s];
        }
    }
    return {js, vs, std::move(table)};
}

TciWitness tci_check(const Kernel<double>& k, double tol, Fallback fb) {
    const Space& cod = *k.codomain;
    if (!cod.is_product() || cod.factors().size() != 3)
        throw DomainError("tci_check: codomain must be product(X, Y, Z)");
    const std::size_t nx = cod.factors()[0]->size();
    const std::size_t ny = cod.factors()[1]->size();
    const std::size_t nz = cod.factors()[2]->size();
    const std::size_t nt = k.domain->size();

    TciWitness wit;
    std::vector<double> q(nz * nx, 0.0);
    std::vector<bool> q_set(nz, false);
    std::vector<double> cond(nx);

    for (std::size_t z = 0; z < nz; ++z) {
        for (std::size_t t = 0; t < nt; ++t) {
            auto row = k.row(t);
            for (std::size_t y = 0; y < ny; ++y) {
                double mass = 0.0;
                for (std::size_t x = 0; x < nx; ++x) mass += row[(x * ny + y) * nz + z];
                if (mass <= 0.0) continue;
                for (std::size_t x = 0; x < nx; ++x) cond[x] = row[(x * ny + y) * nz + z] / mass;
                if (!q_set[z]) {
                    std::copy(cond.begin(), cond.end(), q.begin() + static_cast<long>(z * nx));
                    q_set[z] = true;
                    continue;
                }
                double dev = num::vmax_abs_diff(cond.data(), q.data() + z * nx, nx);
                if (dev > tol) {
                    std::size_t worst = 0;
                    for (std::size_t x = 0; x < nx; ++x)
                        if (std::fabs(cond[x] - q[z * nx + x]) >=
                            std::fabs(cond[worst] - q[z * nx + worst]))
                            worst = x;
                    wit.holds = false;
                    wit.counterexample = TciCell{t, worst, y, z};
                    wit.max_dev = dev;
                    return wit;
                }
                wit.max_dev = std::max(wit.max_dev, dev);
            }
        }
    }
    for (std::size_t z = 0; z < nz; ++z) {
        if (q_set[z]) continue;
        if (fb == Fallback::uniform) {
            for (std::size_t x = 0; x < nx; ++x) q[z * nx + x] = 1.0 / static_cast<double>(nx);
        } else {
            q[z * nx + 0] = 1.0;
        }
    }

    Kernel<double> qk(cod.factors()[2], cod.factors()[0], std::move(q));

    // Verify the factorization K = Q (x) K(Y,Z|T) atomwise.
    for (std::size_t t = 0; t < nt; ++t) {
        auto row = k.row(t);
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t z = 0; z < nz; ++z) {
                double mass = 0.0;
                for (std::size_t x = 0; x < nx; ++x) mass += row[(x * ny + y) * nz + z];
                for (std::size_t x = 0; x < nx; ++x) {
                    double dev = std::fabs(row[(x * ny + y) * nz + z] - qk.at(z, x) * mass);
                    if (dev > tol) {
                        wit.holds = false;
                        wit.counterexample = TciCell{t, x, y, z};
                        wit.max_dev = dev;
                        return wit;
                    }
                    wit.max_dev = std::max(wit.max_dev, dev);
                }
            }
    }
    wit.holds = true;
    wit.q = std::move(qk);
    return wit;
}

namespace {

// A non-product space is treated as a single coordinate.
std::vector<SpacePtr> coordinate_factors(const SpacePtr& s) {
    if (s->is_product()) return s->factors();
    return {s};
}

SpacePtr group_space(const Kernel<double>& joint, const GroupSpec& g) {
    std::vector<SpacePtr> fs;
    for (std::size_t c : g.out_coords) fs.push_back(coordinate_factors(joint.codomain).at(c));
    for (std::size_t f : g.in_factors) fs.push_back(coordinate_factors(joint.domain).at(f));
    return product_or_unit(std::move(fs));
}

} // namespace

Kernel<double> group_kernel(const Kernel<double>& joint, const GroupSpec& a, const GroupSpec& b,
                            const GroupSpec& c) {
    const Space& cod = *joint.codomain;
    auto factors = coordinate_factors(joint.codomain);
    auto infs = coordinate_factors(joint.domain);

    SpacePtr xa = group_space(joint, a), xb = group_space(joint, b), xc = group_space(joint, c);
    SpacePtr xyz = Space::product({xa, xb, xc});

    std::vector<int> out_coords(factors.size());
    std::vector<int> in_coords(infs.size());

    auto group_index = [&](const GroupSpec& g) {
        std::size_t idx = 0;
        for (std::size_t k : g.out_coords)
            idx = idx * factors[k]->size() + static_cast<std::size_t>(out_coords[k]);
        for (std::size_t f : g.in_factors)
            idx = idx * infs[f]->size() + static_cast<std::size_t>(in_coords[f]);
        return idx;
    };

    std::vector<double> table(joint.domain->size() * xyz->size(), 0.0);
    for (std::size_t t = 0; t < joint.domain->size(); ++t) {
        if (joint.domain->is_product()) {
            joint.domain->split_index(t, in_coords);
        } else if (!in_coords.empty()) {
            in_coords[0] = static_cast<int>(t);
        }
        auto row = joint.row(t);
        for (std::size_t w = 0; w < row.size(); ++w) {
            if (row[w] == 0.0) continue;
            if (cod.is_product()) {
                cod.split_index(w, out_coords);
            } else if (!out_coords.empty()) {
                out_coords[0] = static_cast<int>(w);
            }
            std::size_t idx =
                (group_index(a) * xb->size() + group_index(b)) * xc->size() + group_index(c);
            table[t * xyz->size() + idx] += row[w];
        }
    }
    return {joint.domain, xyz, std::move(table)};
}

namespace {

GroupSpec spec_for_nodes(const CbnModel& m, const std::vector<std::string>& names) {
    const Cdag& g = m.graph();
    std::vector<int> idx;
    for (const auto& nm : names) idx.push_back(g.require_node(nm));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    GroupSpec spec;
    for (int v : idx) {
        if (g.is_input(v))
            spec.in_factors.push_back(static_cast<std::size_t>(v));
        else
            spec.out_coords.push_back(static_cast<std::size_t>(v) - g.input_count());
    }
    return spec;
}

TciWitness tci_with_joint(const CbnModel& m, const Kernel<double>& joint,
                          const std::vector<std::string>& a, const std::vector<std::string>& b,
                          const std::vector<std::string>& c, double tol) {
    Kernel<double> grouped =
        group_kernel(joint, spec_for_nodes(m, a), spec_for_nodes(m, b), spec_for_nodes(m, c));
    return tci_check(grouped, tol);
}

} // namespace

TciWitness tci_on_model(const CbnModel& m, const std::vector<std::string>& a,
                        const std::vector<std::string>& b, const std::vector<std::string>& c,
                        double tol) {
    Kernel<double> joint = joint_kernel(m);
    return tci_with_joint(m, joint, a, b, c, tol);
}

namespace {

void subsets_up_to(std::size_t n, std::size_t max_size, bool allow_empty,
                   std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    // iterative lexicographic enumeration of all subsets with |S| <= max_size
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (!cur.empty() || allow_empty) out.push_back(cur);
        if (cur.size() == max_size) return;
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(static_cast<int>(i));
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

} // namespace

GmpReport gmp_sweep(const CbnModel& m, std::size_t max_set_size, bool check_converse, double tol) {
    const Cdag& g = m.graph();
    const std::size_t n = g.node_count();
    Kernel<double> joint = joint_kernel(m);

    std::vector<std::vector<int>> nonempty, with_empty;
    subsets_up_to(n, max_set_size, false, nonempty);
    subsets_up_to(n, max_set_size, true, with_empty);

    auto names_of = [&](const std::vector<int>& s) {
        std::vector<std::string> out;
        for (int v : s) out.push_back(g.node_name(v));
        return out;
    };
    auto mask_of = [&](const std::vector<int>& s) {
        std::vector<bool> mask(n, false);
        for (int v : s) mask[static_cast<std::size_t>(v)] = true;
        return mask;
    };

    GmpReport rep;
    rep.converse_checked = check_converse;
    for (const auto& a : nonempty) {
        auto am = mask_of(a);
        for (const auto& b : nonempty) {
            auto bm = mask_of(b);
            for (const auto& c : with_empty) {
                auto cm = mask_of(c);
                ++rep.triples;
                bool sep = d_separated_masks(g, am, bm, cm);
                if (!sep && !check_converse) continue;
                TciWitness wit = tci_with_joint(m, joint, names_of(a), names_of(b), names_of(c), tol);
                if (sep) {
                    ++rep.dsep_count;
                    if (!wit.holds)
                        rep.violations.push_back({names_of(a), names_of(b), names_of(c), wit});
                } else if (wit.holds) {
                    ++rep.tci_holds_without_dsep;
                }
            }
        }
    }
    return rep;
}

CbnModel make_partially_generic(const CbnModel& m, const std::vector<std::string>& w_nodes,
                                const std::map<std::string, std::vector<Kernel<double>>>& candidates) {
    const Cdag& g = m.graph();
    Cdag ext = extend_graph(g, w_nodes);

    std::map<std::string, SpacePtr> spaces;
    for (std::size_t v = 0; v < g.node_count(); ++v)
        spaces[g.node_name(static_cast<int>(v))] = m.space(static_cast<int>(v));

    std::map<std::string, Kernel<double>> kernels;
    for (std::size_t v = g.input_count(); v < g.node_count(); ++v) {
        const std::string& name = g.node_name(static_cast<int>(v));
        if (std::find(w_nodes.begin(), w_nodes.end(), name) == w_nodes.end())
            kernels[name] = m.kernel(static_cast<int>(v));
    }

    for (const auto& wname : w_nodes) {
        int w = g.require_node(wname);
        auto it = candidates.find(wname);
        if (it == candidates.end() || it->second.empty())
            throw DomainError("make_partially_generic: no candidates for '" + wname + "'");
        SpacePtr orig_dom = m.parent_space(w);
        for (const auto& cand : it->second) {
            if (!same_points(cand.domain, orig_dom))
                throw DomainError("make_partially_generic: candidate domain mismatch at '" + wname + "'");
            if (!same_points(cand.codomain, m.space(w)))
                throw DomainError("make_partially_generic: candidate codomain mismatch at '" + wname + "'");
        }
        std::vector<std::string> pts;
        for (std::size_t i = 0; i < it->second.size(); ++i) pts.push_back("k" + std::to_string(i));
        spaces["I_" + wname] = Space::make("I_" + wname, std::move(pts));
    }

    // Generic dispatcher kernels need the extended model's canonical parent
    // order, so bind spaces first with placeholder-free two-phase assembly.
    std::vector<int> topo_pos(ext.node_count());
    for (std::size_t i = 0; i < ext.topological_order().size(); ++i)
        topo_pos[static_cast<std::size_t>(ext.topological_order()[i])] = static_cast<int>(i);

    for (const auto& wname : w_nodes) {
        const auto& cands = candidates.at(wname);
        int w_ext = ext.require_node(wname);
        std::vector<int> parents = ext.parents(w_ext);
        std::sort(parents.begin(), parents.end(), [&](int a, int b) {
            return topo_pos[static_cast<std::size_t>(a)] < topo_pos[static_cast<std::size_t>(b)];
        });

        std::vector<SpacePtr> pfs;
        for (int p : parents) pfs.push_back(spaces.at(ext.node_name(p)));
        SpacePtr dom = product_or_unit(std::move(pfs));

        // original-parent order in the base graph
        std::vector<int> orig_parents;
        {
            int w_orig = g.require_node(wname);
            orig_parents = m.canonical_parents(w_orig);
        }

        const SpacePtr& cod = m.space(g.require_node(wname));
        std::vector<double> table(dom->size() * cod->size());
        std::vector<int> coords(parents.size());
        for (std::size_t row = 0; row < dom->size(); ++row) {
            if (dom->is_product())
                dom->split_index(row, coords);
            else
                coords[0] = static_cast<int>(row);
            std::size_t cand_idx = 0;
            std::size_t orig_idx = 0;
            for (int op : orig_parents) {
                std::string opname = g.node_name(op);
                for (std::size_t k = 0; k < parents.size(); ++k)
                    if (ext.node_name(parents[k]) == opname) {
                        orig_idx = orig_idx * spaces.at(opname)->size() +
                                   static_cast<std::size_t>(coords[k]);
                        break;
                    }
            }
            for (std::size_t k = 0; k < parents.size(); ++k)
                if (ext.node_name(parents[k]) == "I_" + wname)
                    cand_idx = static_cast<std::size_t>(coords[k]);
            auto crow = cands.at(cand_idx).row(orig_idx);
            std::copy(crow.begin(), crow.end(), table.begin() + static_cast<long>(row * cod->size()));
        }
        kernels[wname] = Kernel<double>(dom, cod, std::move(table));
    }

    return CbnModel::make(std::move(ext), std::move(spaces), std::move(kernels));
}

bool SeparoidReport::all_passed() const {
    for (const auto& r : rules)
        if (r.hypothesis_failures || r.conclusion_failures) return false;
    return true;
}

namespace {

using Rng = std::mt19937_64;

Dist<double> random_dist(Rng& rng, const SpacePtr& s, bool allow_zeros) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(s->size());
    for (auto& x : w) x = u(rng);
    if (allow_zeros && s->size() > 1) {
        std::uniform_int_distribution<std::size_t> pick(0, s->size() - 1);
        if (rng() % 3 == 0) w[pick(rng)] = 0.0;
    }
    double total = 0.0;
    for (double x : w) total += x;
    if (total == 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    } else {
        for (auto& x : w) x /= total;
    }
    return {s, std::move(w)};
}

Kernel<double> random_kernel(Rng& rng, const SpacePtr& dom, const SpacePtr& cod,
                             bool allow_zeros = true) {
    std::vector<Dist<double>> rows;
    rows.reserve(dom->size());
    for (std::size_t z = 0; z < dom->size(); ++z) rows.push_back(random_dist(rng, cod, allow_zeros));
    return Kernel<double>::from_rows(dom, rows);
}

SpacePtr small_space(Rng& rng, const std::string& name, std::size_t lo = 2, std::size_t hi = 3) {
    std::uniform_int_distribution<std::size_t> pick(lo, hi);
    std::size_t n = pick(rng);
    std::vector<std::string> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back(std::to_string(i));
    return Space::make(name, pts);
}

struct RuleCheck {
    GroupSpec a, b, c;
};

struct RuleInstance {
    Kernel<double> joint;
    std::vector<RuleCheck> hypotheses;
    RuleCheck conclusion;
};

// Joint table over product(vars...), row t, atom weight from `w(t, coords)`.
Kernel<double> assemble_joint(const SpacePtr& t_space, std::vector<SpacePtr> vars,
                              const std::function<double(std::size_t, std::span<const int>)>& w) {
    SpacePtr cod = Space::product(std::move(vars));
    std::vector<double> table(t_space->size() * cod->size());
    std::vector<int> coords(cod->factors().size());
    for (std::size_t t = 0; t < t_space->size(); ++t)
        for (std::size_t i = 0; i < cod->size(); ++i) {
            cod->split_index(i, coords);
            table[t * cod->size() + i] = w(t, coords);
        }
    return {t_space, cod, std::move(table)};
}

} // namespace

SeparoidReport separoid_suite(std::size_t trials, std::uint64_t seed, double tol) {
    Rng rng(seed);

    auto make_spaces = [&] {
        struct Sp {
            SpacePtr t, x, y, z, u;
        } sp;
        sp.t = small_space(rng, "T", 1, 2);
        sp.x = small_space(rng, "X");
        sp.y = small_space(rng, "Y");
        sp.z = small_space(rng, "Z");
        sp.u = small_space(rng, "U");
        return sp;
    };

    using Builder = std::function<RuleInstance()>;
    std::vector<std::pair<std::string, Builder>> rules;

    // a) Extended Left Redundancy: X a function of Z implies X indep Y | Z.
    rules.emplace_back("Extended Left Redundancy", [&]() -> RuleInstance {
        auto sp = make_spaces();
        std::uniform_int_distribution<int> pick(0, static_cast<int>(sp.x->size()) - 1);
        std::vector<int> tab(sp.z->size());
        for (auto& v : tab) v = pick(rng);
        FnPoint f(sp.z, sp.x, tab);
        auto kyz = random_kernel(rng, sp.t, Space::product({sp.y, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int yz[2] = {c[1], c[2]};
            double base = kyz.at(t, kyz.codomain->tuple_index(yz));
            return c[0] == f.table[static_cast<std::size_t>(c[2])] ? base : 0.0;
        });
        return {std::move(joint), {}, {{{0}, {}}, {{1}, {}}, {{2}, {}}}};
    });

    // b) T-Restricted Right Redundancy: X indep delta0 | Z (x) T, for any joint.
    rules.emplace_back("T-Restricted Right Redundancy", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto k = random_kernel(rng, sp.t, Space::product({sp.x, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int xz[2] = {c[0], c[1]};
            return k.at(t, k.codomain->tuple_index(xz));
        });
        return {std::move(joint), {}, {{{0}, {}}, {{}, {}}, {{1}, {0}}}};
    });

    // c) Left Decomposition.
    rules.emplace_back("Left Decomposition", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q = random_kernel(rng, sp.z, Space::product({sp.x, sp.u}));
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.u, sp.y, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int xu[2] = {c[0], c[1]};
            int yz[2] = {c[2], c[3]};
            return q.at(static_cast<std::size_t>(c[3]), q.codomain->tuple_index(xu)) *
                   k.at(t, k.codomain->tuple_index(yz));
        });
        RuleCheck hyp{{{0, 1}, {}}, {{2}, {}}, {{3}, {}}};
        RuleCheck concl{{{1}, {}}, {{2}, {}}, {{3}, {}}};
        return {std::move(joint), {hyp}, concl};
    });

    // d) Right Decomposition.
    rules.emplace_back("Right Decomposition", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q = random_kernel(rng, sp.z, sp.x);
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.u, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.u, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int yuz[3] = {c[1], c[2], c[3]};
            return q.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[0])) *
                   k.at(t, k.codomain->tuple_index(yuz));
        });
        RuleCheck hyp{{{0}, {}}, {{1, 2}, {}}, {{3}, {}}};
        RuleCheck concl{{{0}, {}}, {{2}, {}}, {{3}, {}}};
        return {std::move(joint), {hyp}, concl};
    });

    // e) T-Inverted Right Decomposition.
    rules.emplace_back("T-Inverted Right Decomposition", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q = random_kernel(rng, sp.z, sp.x);
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int yz[2] = {c[1], c[2]};
            return q.at(static_cast<std::size_t>(c[2]), static_cast<std::size_t>(c[0])) *
                   k.at(t, k.codomain->tuple_index(yz));
        });
        RuleCheck hyp{{{0}, {}}, {{1}, {}}, {{2}, {}}};
        RuleCheck concl{{{0}, {}}, {{1}, {0}}, {{2}, {}}};
        return {std::move(joint), {hyp}, concl};
    });

    // f) Left Weak Union.
    rules.emplace_back("Left Weak Union", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q = random_kernel(rng, sp.z, Space::product({sp.x, sp.u}));
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.u, sp.y, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int xu[2] = {c[0], c[1]};
            int yz[2] = {c[2], c[3]};
            return q.at(static_cast<std::size_t>(c[3]), q.codomain->tuple_index(xu)) *
                   k.at(t, k.codomain->tuple_index(yz));
        });
        RuleCheck hyp{{{0, 1}, {}}, {{2}, {}}, {{3}, {}}};
        RuleCheck concl{{{0}, {}}, {{2}, {}}, {{1, 3}, {}}};
        return {std::move(joint), {hyp}, concl};
    });

    // g) Right Weak Union.
    rules.emplace_back("Right Weak Union", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q = random_kernel(rng, sp.z, sp.x);
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.u, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.u, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int yuz[3] = {c[1], c[2], c[3]};
            return q.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[0])) *
                   k.at(t, k.codomain->tuple_index(yuz));
        });
        RuleCheck hyp{{{0}, {}}, {{1, 2}, {}}, {{3}, {}}};
        RuleCheck concl{{{0}, {}}, {{1}, {}}, {{2, 3}, {}}};
        return {std::move(joint), {hyp}, concl};
    });

    // h) Left Contraction.
    rules.emplace_back("Left Contraction", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q1 = random_kernel(rng, Space::product({sp.u, sp.z}), sp.x);
        auto q2 = random_kernel(rng, sp.z, sp.u);
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.u, sp.y, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int uz[2] = {c[1], c[3]};
            int yz[2] = {c[2], c[3]};
            return q1.at(q1.domain->tuple_index(uz), static_cast<std::size_t>(c[0])) *
                   q2.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[1])) *
                   k.at(t, k.codomain->tuple_index(yz));
        });
        RuleCheck hyp1{{{0}, {}}, {{2}, {}}, {{1, 3}, {}}};
        RuleCheck hyp2{{{1}, {}}, {{2}, {}}, {{3}, {}}};
        RuleCheck concl{{{0, 1}, {}}, {{2}, {}}, {{3}, {}}};
        return {std::move(joint), {hyp1, hyp2}, concl};
    });

    // i) Right Contraction.
    rules.emplace_back("Right Contraction", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q2 = random_kernel(rng, sp.z, sp.x);
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.u, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.u, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int yuz[3] = {c[1], c[2], c[3]};
            return q2.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[0])) *
                   k.at(t, k.codomain->tuple_index(yuz));
        });
        RuleCheck hyp1{{{0}, {}}, {{1}, {}}, {{2, 3}, {}}};
        RuleCheck hyp2{{{0}, {}}, {{2}, {}}, {{3}, {}}};
        RuleCheck concl{{{0}, {}}, {{1, 2}, {}}, {{3}, {}}};
        return {std::move(joint), {hyp1, hyp2}, concl};
    });

    // j) Right Cross Contraction.
    rules.emplace_back("Right Cross Contraction", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto r = random_kernel(rng, sp.z, sp.x);
        auto q2 = random_kernel(rng, sp.z, sp.u);
        auto k = random_kernel(rng, sp.t, Space::product({sp.y, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.u, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int yz[2] = {c[1], c[3]};
            return r.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[0])) *
                   q2.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[2])) *
                   k.at(t, k.codomain->tuple_index(yz));
        });
        RuleCheck hyp1{{{0}, {}}, {{1}, {}}, {{2, 3}, {}}};
        RuleCheck hyp2{{{2}, {}}, {{0}, {}}, {{3}, {}}};
        RuleCheck concl{{{0}, {}}, {{1, 2}, {}}, {{3}, {}}};
        return {std::move(joint), {hyp1, hyp2}, concl};
    });

    // k) Flipped Left Cross Contraction.
    rules.emplace_back("Flipped Left Cross Contraction", [&]() -> RuleInstance {
        auto sp = make_spaces();
        auto q1 = random_kernel(rng, Space::product({sp.u, sp.z}), sp.x);
        auto q2 = random_kernel(rng, sp.z, sp.y);
        auto k = random_kernel(rng, sp.t, Space::product({sp.u, sp.z}));
        auto joint = assemble_joint(sp.t, {sp.x, sp.y, sp.u, sp.z}, [&](std::size_t t, std::span<const int> c) {
            int uz[2] = {c[2], c[3]};
            return q1.at(q1.domain->tuple_index(uz), static_cast<std::size_t>(c[0])) *
                   q2.at(static_cast<std::size_t>(c[3]), static_cast<std::size_t>(c[1])) *
                   k.at(t, k.codomain->tuple_index(uz));
        });
        RuleCheck hyp1{{{0}, {}}, {{1}, {}}, {{2, 3}, {}}};
        RuleCheck hyp2{{{1}, {}}, {{2}, {}}, {{3}, {}}};
        RuleCheck concl{{{1}, {}}, {{0, 2}, {}}, {{3}, {}}};
        return {std::move(joint), {hyp1, hyp2}, concl};
    });

    SeparoidReport report;
    for (auto& [name, builder] : rules) {
        SeparoidRuleReport rr;
        rr.rule = name;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            RuleInstance inst = builder();
            ++rr.trials;
            bool hyp_ok = true;
            for (const auto& h : inst.hypotheses) {
                auto wit = tci_check(group_kernel(inst.joint, h.a, h.b, h.c), tol);
                if (!wit.holds) {
                    hyp_ok = false;
                    break;
                }
            }
            if (!hyp_ok) {
                ++rr.hypothesis_failures;
                continue;
            }
            auto wit = tci_check(
                group_kernel(inst.joint, inst.conclusion.a, inst.conclusion.b, inst.conclusion.c), tol);
            if (!wit.holds) ++rr.conclusion_failures;
        }
        report.rules.push_back(std::move(rr));
    }
    return report;
}

CbnModel strong_ignorability_model(const SpacePtr& zs, const SpacePtr& xs, const SpacePtr& ys,
                                   const Dist<double>& p_z, const Kernel<double>& p_x_given_z,
                                   const Kernel<double>& p_e_given_z) {
    SpacePtr es = Space::exponential(xs, ys);
    if (!same_points(p_e_given_z.codomain, es))
        throw DomainError("strong_ignorability_model: P(E|Z) codomain must be the function space Y^X");
    if (!same_points(p_z.space, zs) || !same_points(p_x_given_z.domain, zs) ||
        !same_points(p_x_given_z.codomain, xs) || !same_points(p_e_given_z.domain, zs))
        throw DomainError("strong_ignorability_model: space mismatch");

    Cdag g = Cdag::make({}, {"Z", "X", "E", "Y"},
                        {{"Z", "X"}, {"Z", "E"}, {"X", "Y"}, {"E", "Y"}});

    // Y's parents in canonical order are (X, E); the mechanism is the
    // deterministic evaluation dispatcher dirac(eval(e, x)).
    SpacePtr xe = Space::product({xs, es});
    std::vector<double> ytab(xe->size() * ys->size(), 0.0);
    for (std::size_t x = 0; x < xs->size(); ++x)
        for (std::size_t e = 0; e < es->size(); ++e) {
            int coords[2] = {static_cast<int>(x), static_cast<int>(e)};
            std::size_t row = xe->tuple_index(coords);
            ytab[row * ys->size() + static_cast<std::size_t>(es->apply(e, x))] = 1.0;
        }

    std::map<std::string, SpacePtr> spaces{{"Z", zs}, {"X", xs}, {"E", es}, {"Y", ys}};
    // domains of root/unary kernels must match parent products exactly
    std::map<std::string, Kernel<double>> kernels{
        {"Z", as_kernel(p_z)},
        {"X", p_x_given_z},
        {"E", p_e_given_z},
        {"Y", Kernel<double>(xe, ys, std::move(ytab))}};
    return CbnModel::make(std::move(g), std::move(spaces), std::move(kernels));
}

Dist<double> potential_outcome(const Dist<double>& e_dist, int x) {
    const Space& es = *e_dist.space;
    if (es.kind() != Space::Kind::exponential)
        throw DomainError("potential_outcome: distribution must live on a function space");
    if (x < 0 || x >= static_cast<int>(es.exp_domain()->size()))
        throw DomainError("potential_outcome: x not in the treatment space");
    std::vector<double> w(es.exp_codomain()->size(), 0.0);
    for (std::size_t e = 0; e < es.size(); ++e)
        w[static_cast<std::size_t>(es.apply(e, static_cast<std::size_t>(x)))] += e_dist.w[e];
    return {es.exp_codomain(), std::move(w)};
}

} // namespace qus
