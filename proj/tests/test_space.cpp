#include "qus/space.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace qus;
using qus::test::mk_space;

TEST_CASE("product points are tuples in declaration order, last factor fastest") {
    auto x = Space::make("X", {"0", "1"});
    auto y = Space::make("Y", {"a", "b", "c"});
    auto p = Space::product({x, y});
    REQUIRE(p->size() == 6);
    CHECK(p->point(0) == "(0,a)");
    CHECK(p->point(1) == "(0,b)");
    CHECK(p->point(2) == "(0,c)");
    CHECK(p->point(3) == "(1,a)");
    CHECK(p->point(5) == "(1,c)");

    int coords[2] = {1, 2};
    CHECK(p->tuple_index(coords) == 5);
    int back[2];
    p->split_index(4, back);
    CHECK(back[0] == 1);
    CHECK(back[1] == 1);
    CHECK(p->coord_of(4, 0) == 1);
    CHECK(p->coord_of(4, 1) == 1);
}

TEST_CASE("unary product wraps points in tuples") {
    auto x = Space::make("X", {"0", "1"});
    auto p = Space::product({x});
    REQUIRE(p->size() == 2);
    CHECK(p->point(0) == "(0)");
    CHECK(p->point(1) == "(1)");
}

TEST_CASE("cardinalities multiply, add, exponentiate") {
    test::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t a = 1 + rng() % 4, b = 1 + rng() % 4, c = 1 + rng() % 3;
        auto xa = mk_space("A", a);
        auto xb = mk_space("B", b);
        auto xc = mk_space("C", c);
        CHECK(Space::product({xa, xb, xc})->size() == a * b * c);
        CHECK(Space::coproduct({xa, xb, xc})->size() == a + b + c);
        std::size_t want = 1;
        for (std::size_t i = 0; i < c; ++i) want *= a;
        CHECK(Space::exponential(xc, xa)->size() == want);
    }
}

TEST_CASE("coproduct tags keep copies apart") {
    auto x = Space::make("X", {"0", "1"});
    auto s = Space::coproduct({x, x});
    REQUIRE(s->size() == 4);
    CHECK(s->point(0) == "in0:0");
    CHECK(s->point(3) == "in1:1");
    auto [part, idx] = s->untag(2);
    CHECK(part == 1);
    CHECK(idx == 0);
    CHECK(s->inject(1, 0) == 2);

    auto single = Space::coproduct({Space::make("W", {"x"})});
    CHECK(single->size() == 1);
}

TEST_CASE("exponential enumerates all maps lexicographically") {
    auto z = mk_space("Z", 3);
    auto x = mk_space("X", 2);
    auto e = Space::exponential(z, x);
    REQUIRE(e->size() == 8);
    // first point maps everything to x0, last everything to x1
    CHECK(e->apply(0, 0) == 0);
    CHECK(e->apply(0, 2) == 0);
    CHECK(e->apply(7, 1) == 1);
    // index 3 = binary 011 over (z0,z1,z2)
    CHECK(e->apply(3, 0) == 0);
    CHECK(e->apply(3, 1) == 1);
    CHECK(e->apply(3, 2) == 1);

    FnPoint f = FnPoint::from_exponential_point(e, 5);
    CHECK(f.exponential_index() == 5);

    auto one = Space::exponential(Space::unit(), x);
    CHECK(one->size() == x->size());  // X^1 ~ X
}

TEST_CASE("eval on identity, constant, swap") {
    auto x = Space::make("X", {"0", "1"});
    FnPoint id = FnPoint::identity(x);
    CHECK(id.eval(1) == 1);
    FnPoint c = FnPoint::constant(x, x, 0);
    CHECK(c.eval(1) == 0);
    FnPoint swap(x, x, {1, 0});
    CHECK(swap.eval(0) == 1);
    CHECK(swap.eval("0") == 1);
    CHECK_THROWS_AS(swap.eval(5), DomainError);
    CHECK_THROWS_AS(swap.eval("nope"), DomainError);
}

TEST_CASE("indicator round trip over every event of a 10-point space") {
    auto x = mk_space("X", 10);
    for (std::size_t bits = 0; bits < (1u << 10); ++bits) {
        std::vector<bool> mask(10);
        for (std::size_t i = 0; i < 10; ++i) mask[i] = bits & (1u << i);
        FinEvent a(x, mask);
        FnPoint ind = event_to_indicator(a);
        CHECK(indicator_to_event(ind) == a);
    }
    // empty and full events are the constant maps
    CHECK(event_to_indicator(FinEvent::empty(x)).table == std::vector<int>(10, 0));
    CHECK(event_to_indicator(FinEvent::full(x)).table == std::vector<int>(10, 1));
    // inverse direction rejects a non-canonical codomain
    FnPoint bad(x, mk_space("three", 3), std::vector<int>(10, 0));
    CHECK_THROWS_AS(indicator_to_event(bad), DomainError);
}

TEST_CASE("products distribute over coproducts on points") {
    // X x (A + B) vs (X x A) + (X x B) for sizes <= 4
    for (std::size_t nx = 1; nx <= 4; ++nx)
        for (std::size_t na = 1; na <= 4; ++na)
            for (std::size_t nb = 1; nb <= 4; ++nb) {
                auto x = mk_space("X", nx);
                auto a = mk_space("A", na);
                auto b = mk_space("B", nb);
                auto lhs = Space::product({x, Space::coproduct({a, b})});
                auto rhs = Space::coproduct({Space::product({x, a}), Space::product({x, b})});
                REQUIRE(lhs->size() == rhs->size());
                // the canonical map: (x, in_i(y)) -> in_i(x, y) is a bijection
                std::vector<bool> hit(rhs->size(), false);
                for (std::size_t i = 0; i < lhs->size(); ++i) {
                    int coords[2];
                    lhs->split_index(i, coords);
                    auto [part, inner] = lhs->factors()[1]->untag(static_cast<std::size_t>(coords[1]));
                    const auto& target = rhs->factors()[static_cast<std::size_t>(part)];
                    int pc[2] = {coords[0], inner};
                    std::size_t j = rhs->inject(static_cast<std::size_t>(part), target->tuple_index(pc));
                    CHECK(!hit[j]);
                    hit[j] = true;
                }
            }
}

TEST_CASE("curry and uncurry realize the exponential adjunction") {
    test::Rng rng(5);
    for (std::size_t nz = 1; nz <= 3; ++nz)
        for (std::size_t nw = 1; nw <= 3; ++nw)
            for (std::size_t nx = 1; nx <= 3; ++nx) {
                auto z = mk_space("Z", nz);
                auto w = mk_space("W", nw);
                auto x = mk_space("X", nx);
                auto prod = Space::product({z, w});
                for (int trial = 0; trial < 5; ++trial) {
                    std::vector<int> tab(prod->size());
                    for (auto& v : tab) v = static_cast<int>(rng() % nx);
                    FnPoint g(prod, x, tab);
                    FnPoint h = curry(g);
                    // evaluating the curried map reproduces g pointwise
                    for (std::size_t zi = 0; zi < nz; ++zi)
                        for (std::size_t wi = 0; wi < nw; ++wi) {
                            int coords[2] = {static_cast<int>(zi), static_cast<int>(wi)};
                            CHECK(h.codomain->apply(static_cast<std::size_t>(h.table[zi]), wi) ==
                                  g.table[prod->tuple_index(coords)]);
                        }
                    FnPoint back = uncurry(h);
                    CHECK(back.table == g.table);
                }
            }
}

TEST_CASE("cardinality cap rejects oversized constructions") {
    std::size_t before = cardinality_cap();
    set_cardinality_cap(100);
    auto big = mk_space("big", 11);
    CHECK_THROWS_AS(Space::product({big, big}), CapError);
    CHECK_THROWS_AS(Space::exponential(big, big), CapError);
    CHECK_NOTHROW(Space::product({big, mk_space("small", 9)}));
    set_cardinality_cap(before);
}

TEST_CASE("coord_of agrees with split_index on random products") {
    test::Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t arity = 1 + rng() % 4;
        std::vector<SpacePtr> fs;
        for (std::size_t k = 0; k < arity; ++k)
            fs.push_back(mk_space("F" + std::to_string(k), 1 + rng() % 4));
        auto p = Space::product(fs);
        std::vector<int> coords(arity);
        for (std::size_t i = 0; i < p->size(); ++i) {
            p->split_index(i, coords);
            for (std::size_t k = 0; k < arity; ++k) CHECK(p->coord_of(i, k) == coords[k]);
            CHECK(p->tuple_index(coords) == i);
        }
    }
}

TEST_CASE("spaces reject duplicates and empty point lists") {
    CHECK_THROWS_AS(Space::make("X", {"a", "a"}), DomainError);
    CHECK_THROWS_AS(Space::make("X", {}), DomainError);
    CHECK(mk_space("X", 3)->index_of("7") == -1);
}
