#include "qus/cbn.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <array>

using namespace qus;
using namespace qus::test;

namespace {

// Independent oracle: the joint by direct enumeration of the product
// formula, no kernel-product machinery involved.
Kernel<double> joint_oracle(const CbnModel& m) {
    const Cdag& g = m.graph();
    const SpacePtr& js = m.input_space();
    const SpacePtr& vs = m.output_space();
    const std::size_t nj = js->size();
    const std::size_t n_in = g.input_count();
    const std::size_t n_out = g.node_count() - n_in;

    std::vector<std::size_t> out_size(n_out);
    for (std::size_t i = 0; i < n_out; ++i)
        out_size[i] = m.space(static_cast<int>(n_in + i))->size();

    std::vector<double> table(nj * vs->size(), 0.0);
    std::vector<int> vals(g.node_count());
    for (std::size_t t = 0; t < nj; ++t) {
        // input coordinates
        std::size_t rest = t;
        for (std::size_t i = n_in; i-- > 0;) {
            vals[i] = static_cast<int>(rest % m.space(static_cast<int>(i))->size());
            rest /= m.space(static_cast<int>(i))->size();
        }
        for (std::size_t w = 0; w < vs->size(); ++w) {
            std::size_t r = w;
            for (std::size_t i = n_out; i-- > 0;) {
                vals[n_in + i] = static_cast<int>(r % out_size[i]);
                r /= out_size[i];
            }
            double p = 1.0;
            for (std::size_t i = 0; i < n_out; ++i) {
                int v = static_cast<int>(n_in + i);
                std::size_t pidx = 0;
                for (int par : m.canonical_parents(v))
                    pidx = pidx * m.space(par)->size() +
                           static_cast<std::size_t>(vals[static_cast<std::size_t>(par)]);
                p *= m.kernel(v).at(pidx, static_cast<std::size_t>(vals[static_cast<std::size_t>(v)]));
            }
            table[t * vs->size() + w] = p;
        }
    }
    return {js, vs, std::move(table)};
}

SpacePtr binary() {
    static SpacePtr b = mk_space("B", 2);
    return b;
}

// The motivating chain: P(X) fair, P(Y|X) flips with 0.2, P(Z|Y) with 0.1.
CbnModel chain_model() {
    Cdag g = Cdag::make({}, {"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}});
    std::map<std::string, SpacePtr> spaces{{"X", binary()}, {"Y", binary()}, {"Z", binary()}};
    std::map<std::string, Kernel<double>> kernels{
        {"X", as_kernel(Dist<double>(binary(), {0.5, 0.5}))},
        {"Y", Kernel<double>(binary(), binary(), {0.8, 0.2, 0.2, 0.8})},
        {"Z", Kernel<double>(binary(), binary(), {0.9, 0.1, 0.1, 0.9})}};
    return CbnModel::make(g, spaces, kernels);
}

} // namespace

TEST_CASE("cbn validation catches missing and misshapen bindings") {
    Cdag g = Cdag::make({}, {"X", "Y"}, {{"X", "Y"}});
    std::map<std::string, SpacePtr> spaces{{"X", binary()}, {"Y", binary()}};
    std::map<std::string, Kernel<double>> kernels{
        {"X", as_kernel(Dist<double>(binary(), {0.5, 0.5}))},
        {"Y", Kernel<double>(binary(), binary(), {1.0, 0.0, 0.0, 1.0})}};
    CHECK_NOTHROW(CbnModel::make(g, spaces, kernels));

    auto missing_kernel = kernels;
    missing_kernel.erase("Y");
    CHECK_THROWS_AS(CbnModel::make(g, spaces, missing_kernel), DomainError);

    auto wrong_domain = kernels;
    wrong_domain["Y"] = as_kernel(Dist<double>(binary(), {0.5, 0.5}));
    CHECK_THROWS_AS(CbnModel::make(g, spaces, wrong_domain), DomainError);

    auto missing_space = spaces;
    missing_space.erase("X");
    CHECK_THROWS_AS(CbnModel::make(g, missing_space, kernels), DomainError);
}

TEST_CASE("the chain joint matches hand products and the oracle") {
    CbnModel m = chain_model();
    Kernel<double> joint = joint_kernel(m);
    REQUIRE(joint.domain->size() == 1);
    REQUIRE(joint.codomain->size() == 8);
    // atom (0,0,0): 0.5 * 0.8 * 0.9
    CHECK(joint.at(0, 0) == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(kernel_close(joint, joint_oracle(m)));
}

TEST_CASE("all-dirac nodes give a point-mass joint") {
    Cdag g = Cdag::make({}, {"X", "Y"}, {{"X", "Y"}});
    std::map<std::string, SpacePtr> spaces{{"X", binary()}, {"Y", binary()}};
    std::map<std::string, Kernel<double>> kernels{
        {"X", as_kernel(dirac<double>(binary(), 1))},
        {"Y", Kernel<double>(binary(), binary(), {0.0, 1.0, 1.0, 0.0})}};  // swap
    CbnModel m = CbnModel::make(g, spaces, kernels);
    Kernel<double> joint = joint_kernel(m);
    // all mass at (x=1, y=0)
    CHECK(joint.at(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("joint kernel equals the oracle on random models, with and without inputs") {
    Rng rng(141);
    for (int trial = 0; trial < 120; ++trial) {
        Cdag g = random_dag(rng, rng() % 3, 1 + rng() % 4, 0.45);
        CbnModel m = random_binary_cbn(rng, g);
        CHECK(kernel_close(joint_kernel(m), joint_oracle(m)));
    }
}

TEST_CASE("a diamond joint is order-independent up to coordinates") {
    // X -> Y, X -> W, Y -> Z, W -> Z built twice with outputs declared in
    // different orders; atoms must match after matching coordinates.
    Rng rng(151);
    auto mk = [&](std::vector<std::string> decl_order, bool z_keyed_by_wy) {
        std::vector<std::pair<std::string, std::string>> edges{
            {"X", "Y"}, {"X", "W"}, {"Y", "Z"}, {"W", "Z"}};
        Cdag g = Cdag::make({}, decl_order, edges);
        std::map<std::string, SpacePtr> spaces;
        for (const auto& nm : decl_order) spaces[nm] = binary();
        // P(Z | Y=y, W=w) with rows keyed in the model's canonical parent
        // order: (Y, W) when Y is declared first, (W, Y) otherwise
        Kernel<double> pz =
            z_keyed_by_wy ? Kernel<double>(Space::product({binary(), binary()}), binary(),
                                           {0.9, 0.1, 0.6, 0.4, 0.3, 0.7, 0.2, 0.8})
                          : Kernel<double>(Space::product({binary(), binary()}), binary(),
                                           {0.9, 0.1, 0.3, 0.7, 0.6, 0.4, 0.2, 0.8});
        std::map<std::string, Kernel<double>> kernels{
            {"X", as_kernel(Dist<double>(binary(), {0.4, 0.6}))},
            {"Y", Kernel<double>(binary(), binary(), {0.7, 0.3, 0.1, 0.9})},
            {"W", Kernel<double>(binary(), binary(), {0.2, 0.8, 0.5, 0.5})},
            {"Z", pz}};
        return CbnModel::make(g, spaces, kernels);
    };
    CbnModel m1 = mk({"X", "Y", "W", "Z"}, false);
    CbnModel m2 = mk({"X", "W", "Y", "Z"}, true);
    Kernel<double> j1 = joint_kernel(m1);
    Kernel<double> j2 = joint_kernel(m2);
    // both checked against their own oracle
    CHECK(kernel_close(j1, joint_oracle(m1)));
    CHECK(kernel_close(j2, joint_oracle(m2)));
    // and against each other after permuting (X,Y,W,Z) <-> (X,W,Y,Z)
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y)
            for (std::size_t w = 0; w < 2; ++w)
                for (std::size_t z = 0; z < 2; ++z) {
                    std::size_t i1 = ((x * 2 + y) * 2 + w) * 2 + z;
                    std::size_t i2 = ((x * 2 + w) * 2 + y) * 2 + z;
                    CHECK(j1.at(0, i1) == doctest::Approx(j2.at(0, i2)).epsilon(1e-12));
                }

    // canonical parent order: Z's parents sorted by topological position
    auto cp = m2.canonical_parents(m2.graph().require_node("Z"));
    REQUIRE(cp.size() == 2);
    CHECK(m2.graph().node_name(cp[0]) == "W");  // W declared before Y in m2
}

TEST_CASE("tci_check decides the worked examples") {
    CbnModel m = chain_model();

    // chain: Z independent of X given Y, witness Q = P(Z|Y)
    TciWitness wit = tci_on_model(m, {"Z"}, {"X"}, {"Y"});
    REQUIRE(wit.holds);
    REQUIRE(wit.q.has_value());
    CHECK(wit.q->at(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(wit.q->at(1, 1) == doctest::Approx(0.9).epsilon(1e-12));

    // no conditioning: fails for these parameters
    TciWitness wit2 = tci_on_model(m, {"Z"}, {"X"}, {});
    CHECK_FALSE(wit2.holds);
    CHECK(wit2.counterexample.has_value());

    // also fails for Z vs Y unconditioned
    CHECK_FALSE(tci_on_model(m, {"Z"}, {"Y"}, {}).holds);

    // left redundancy shape: A = B = C
    CHECK(tci_on_model(m, {"X"}, {"X"}, {"X"}).holds);

    // trivial right side always holds
    CHECK(tci_on_model(m, {"Z"}, {}, {"Y"}).holds);
}

TEST_CASE("tci_check on a hand-built perfectly correlated pair") {
    // X = Y fair coin, trivial Z, unit T: dependence must be detected
    auto b = binary();
    SpacePtr xyz = Space::product({b, b, Space::unit()});
    std::vector<double> w(xyz->size(), 0.0);
    // atoms ordered (x,y,z): x fastest last... (x slow, y mid, z=unit fast)
    w[xyz->tuple_index(std::array<int, 3>{0, 0, 0})] = 0.5;
    w[xyz->tuple_index(std::array<int, 3>{1, 1, 0})] = 0.5;
    Kernel<double> k(Space::unit(), xyz, std::move(w));
    TciWitness wit = tci_check(k);
    CHECK_FALSE(wit.holds);
    REQUIRE(wit.counterexample.has_value());

    // trivial one-point Y: holds with Q the conditional on Z
    SpacePtr xz = Space::product({b, Space::unit(), b});
    std::vector<double> w2(xz->size(), 0.0);
    w2[xz->tuple_index(std::array<int, 3>{0, 0, 0})] = 0.4;
    w2[xz->tuple_index(std::array<int, 3>{1, 0, 0})] = 0.1;
    w2[xz->tuple_index(std::array<int, 3>{0, 0, 1})] = 0.2;
    w2[xz->tuple_index(std::array<int, 3>{1, 0, 1})] = 0.3;
    Kernel<double> k2(Space::unit(), xz, std::move(w2));
    TciWitness wit2 = tci_check(k2);
    REQUIRE(wit2.holds);
    CHECK(wit2.q->at(0, 0) == doctest::Approx(0.8));
    CHECK(wit2.q->at(1, 1) == doctest::Approx(0.6));
}

TEST_CASE("tci_check agrees with a conditional-closure search on binary joints") {
    // completeness oracle: tci holds iff the candidate built from ANY
    // positive-mass conditional factorizes; search all of them
    Rng rng(161);
    auto b = binary();
    SpacePtr cod = Space::product({b, b, b});
    for (int trial = 0; trial < 300; ++trial) {
        auto t = mk_space("T", 1 + rng() % 2);
        // coarse grid weights to hit degenerate and dependent cases often
        std::vector<double> w(t->size() * cod->size());
        double total = 0.0;
        for (auto& v : w) {
            v = static_cast<double>(rng() % 4);
            total += v;
        }
        if (total == 0.0) w[0] = total = 1.0;
        // normalize per row
        for (std::size_t row = 0; row < t->size(); ++row) {
            double s = 0.0;
            for (std::size_t i = 0; i < cod->size(); ++i) s += w[row * cod->size() + i];
            if (s == 0.0) {
                w[row * cod->size()] = 1.0;
                s = 1.0;
            }
            for (std::size_t i = 0; i < cod->size(); ++i) w[row * cod->size() + i] /= s;
        }
        Kernel<double> k(t, cod, std::move(w));
        TciWitness wit = tci_check(k);

        // exhaustive search: per z, every positive-mass conditional (plus
        // the uniform filler) is a candidate row; try every combination
        std::vector<std::vector<std::array<double, 2>>> rows(2);
        for (std::size_t zz = 0; zz < 2; ++zz) {
            for (std::size_t tt = 0; tt < t->size(); ++tt)
                for (std::size_t yy = 0; yy < 2; ++yy) {
                    double mass = k.at(tt, (0 * 2 + yy) * 2 + zz) +
                                  k.at(tt, (1 * 2 + yy) * 2 + zz);
                    if (mass <= 0.0) continue;
                    rows[zz].push_back({k.at(tt, (0 * 2 + yy) * 2 + zz) / mass,
                                        k.at(tt, (1 * 2 + yy) * 2 + zz) / mass});
                }
            rows[zz].push_back({0.5, 0.5});
        }
        bool any = false;
        for (const auto& r0 : rows[0])
            for (const auto& r1 : rows[1]) {
                std::array<std::array<double, 2>, 2> q{r0, r1};
                bool works = true;
                for (std::size_t tt = 0; tt < t->size() && works; ++tt)
                    for (std::size_t xx = 0; xx < 2 && works; ++xx)
                        for (std::size_t yy = 0; yy < 2 && works; ++yy)
                            for (std::size_t zz = 0; zz < 2 && works; ++zz) {
                                double mass = k.at(tt, (0 * 2 + yy) * 2 + zz) +
                                              k.at(tt, (1 * 2 + yy) * 2 + zz);
                                if (std::fabs(k.at(tt, (xx * 2 + yy) * 2 + zz) -
                                              q[zz][xx] * mass) > 1e-12)
                                    works = false;
                            }
                if (works) any = true;
            }
        CHECK(wit.holds == any);
    }
}

TEST_CASE("tci_check matches the closure search on every 0/1 support pattern") {
    // exhaustive over all 255 nonzero supports of a binary (X,Y,Z) joint
    // with trivial T and uniform mass on the support: covers every
    // degenerate zero-mass landscape
    auto b = binary();
    SpacePtr cod = Space::product({b, b, b});
    for (std::size_t mask = 1; mask < 256; ++mask) {
        std::vector<double> w(8, 0.0);
        double total = static_cast<double>(__builtin_popcountll(mask));
        for (std::size_t i = 0; i < 8; ++i)
            if (mask & (1u << i)) w[i] = 1.0 / total;
        Kernel<double> k(Space::unit(), cod, std::move(w));
        TciWitness wit = tci_check(k);

        std::vector<std::vector<std::array<double, 2>>> rows(2);
        for (std::size_t zz = 0; zz < 2; ++zz) {
            for (std::size_t yy = 0; yy < 2; ++yy) {
                double mass = k.at(0, (0 * 2 + yy) * 2 + zz) + k.at(0, (1 * 2 + yy) * 2 + zz);
                if (mass <= 0.0) continue;
                rows[zz].push_back({k.at(0, (0 * 2 + yy) * 2 + zz) / mass,
                                    k.at(0, (1 * 2 + yy) * 2 + zz) / mass});
            }
            rows[zz].push_back({0.5, 0.5});
        }
        bool any = false;
        for (const auto& r0 : rows[0])
            for (const auto& r1 : rows[1]) {
                std::array<std::array<double, 2>, 2> q{r0, r1};
                bool works = true;
                for (std::size_t xx = 0; xx < 2 && works; ++xx)
                    for (std::size_t yy = 0; yy < 2 && works; ++yy)
                        for (std::size_t zz = 0; zz < 2 && works; ++zz) {
                            double mass =
                                k.at(0, (0 * 2 + yy) * 2 + zz) + k.at(0, (1 * 2 + yy) * 2 + zz);
                            if (std::fabs(k.at(0, (xx * 2 + yy) * 2 + zz) - q[zz][xx] * mass) >
                                1e-12)
                                works = false;
                        }
                if (works) any = true;
            }
        INFO("support mask ", mask);
        CHECK(wit.holds == any);
    }
}

TEST_CASE("gmp sweep finds no violations on the chain") {
    CbnModel m = chain_model();
    GmpReport rep = gmp_sweep(m, 1, true);
    CHECK(rep.violations.empty());
    CHECK(rep.dsep_count > 0);
    // faithfulness is NOT asserted; converse holds are merely counted
    CHECK(rep.converse_checked);
}

TEST_CASE("gmp sweep is clean on random binary models") {
    Rng rng(171);
    for (int trial = 0; trial < 12; ++trial) {
        Cdag g = random_dag(rng, rng() % 2, 1 + rng() % 3, 0.5);
        CbnModel m = random_binary_cbn(rng, g);
        GmpReport rep = gmp_sweep(m, 2);
        CHECK(rep.violations.empty());
    }
}

TEST_CASE("edgeless graphs separate everything and factor as products") {
    Rng rng(181);
    Cdag g = Cdag::make({}, {"A", "B", "C"}, {});
    CbnModel m = random_binary_cbn(rng, g);
    GmpReport rep = gmp_sweep(m, 2, true);
    CHECK(rep.violations.empty());
    // every disjoint pair is d-separated here
    CHECK(d_separated(g, {"A"}, {"B"}, {}));
    CHECK(tci_on_model(m, {"A"}, {"B"}, {}).holds);
}

TEST_CASE("partially generic chain reproduces the mechanism independence") {
    CbnModel m = chain_model();
    auto b = binary();
    std::map<std::string, std::vector<Kernel<double>>> candidates;
    candidates["X"] = {as_kernel(Dist<double>(b, {0.5, 0.5})),
                       as_kernel(Dist<double>(b, {0.3, 0.7}))};
    candidates["Y"] = {Kernel<double>(b, b, {0.8, 0.2, 0.2, 0.8}),
                       Kernel<double>(b, b, {0.6, 0.4, 0.1, 0.9})};
    CbnModel gm = make_partially_generic(m, {"X", "Y"}, candidates);

    CHECK(gm.graph().input_count() == 2);
    CHECK(gm.graph().node_index("I_X") >= 0);
    CHECK(gm.space("I_X")->size() == 2);

    // the d-separation of the extended graph
    CHECK(d_separated(gm.graph(), {"Z"}, {"X", "I_X", "I_Y"}, {"Y"}));
    // and the matching transitional conditional independence
    TciWitness wit = tci_on_model(gm, {"Z"}, {"X", "I_X", "I_Y"}, {"Y"});
    CHECK(wit.holds);

    GmpReport rep = gmp_sweep(gm, 1);
    CHECK(rep.violations.empty());

    // a singleton candidate list is plain substitution
    std::map<std::string, std::vector<Kernel<double>>> single;
    single["Y"] = {Kernel<double>(b, b, {0.6, 0.4, 0.1, 0.9})};
    CbnModel sub = make_partially_generic(m, {"Y"}, single);
    Kernel<double> directly = [&] {
        Cdag g = Cdag::make({}, {"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}});
        std::map<std::string, SpacePtr> spaces{{"X", b}, {"Y", b}, {"Z", b}};
        std::map<std::string, Kernel<double>> kernels{
            {"X", as_kernel(Dist<double>(b, {0.5, 0.5}))},
            {"Y", Kernel<double>(b, b, {0.6, 0.4, 0.1, 0.9})},
            {"Z", Kernel<double>(b, b, {0.9, 0.1, 0.1, 0.9})}};
        return joint_kernel(CbnModel::make(g, spaces, kernels));
    }();
    Kernel<double> via_generic = joint_kernel(sub);
    // substituted joint has a single input coordinate with one value
    REQUIRE(via_generic.domain->size() == 1);
    CHECK(via_generic.p == std::vector<double>(directly.p));
}

TEST_CASE("separoid suite: all rules pass on randomized constructions") {
    SeparoidReport rep = separoid_suite(40, 20250810);
    REQUIRE(rep.rules.size() == 11);
    for (const auto& r : rep.rules) {
        INFO(r.rule);
        CHECK(r.trials == 40);
        CHECK(r.hypothesis_failures == 0);
        CHECK(r.conclusion_failures == 0);
    }
    CHECK(rep.all_passed());
}

TEST_CASE("strong ignorability model") {
    auto b = binary();
    auto z3 = mk_space("Zs", 3);
    Rng rng(191);
    Dist<double> pz = random_dist(rng, z3);
    Kernel<double> pxz = random_kernel(rng, z3, b);
    SpacePtr es = Space::exponential(b, b);
    REQUIRE(es->size() == 4);  // |Y^X| = 2^2
    Kernel<double> pez = random_kernel(rng, z3, es);

    CbnModel m = strong_ignorability_model(z3, b, b, pz, pxz, pez);

    // the graph encodes X indep E given Z
    CHECK(d_separated(m.graph(), {"X"}, {"E"}, {"Z"}));
    TciWitness wit = tci_on_model(m, {"X"}, {"E"}, {"Z"});
    CHECK(wit.holds);

    // potential outcome under the uniform function distribution is fair
    Dist<double> uniform_e(es, std::vector<double>(4, 0.25));
    for (int x = 0; x < 2; ++x) {
        Dist<double> po = potential_outcome(uniform_e, x);
        CHECK(po.w[0] == doctest::Approx(0.5));
        CHECK(po.w[1] == doctest::Approx(0.5));
    }

    // Y is the deterministic evaluation dispatcher
    const Kernel<double>& py = m.kernel(m.graph().require_node("Y"));
    CHECK(is_zero_one_deterministic(py));
    FnPoint ev = extract_function(py);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t e = 0; e < 4; ++e) {
            int coords[2] = {static_cast<int>(x), static_cast<int>(e)};
            CHECK(ev.table[py.domain->tuple_index(coords)] ==
                  es->apply(e, x));
        }

    // full sweep stays clean
    GmpReport rep = gmp_sweep(m, 1);
    CHECK(rep.violations.empty());
}
