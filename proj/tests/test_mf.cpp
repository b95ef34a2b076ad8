#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfcas/mf.hpp"

using namespace mfcas;

static RingPtr xy_ring(FieldPtr F, Rat w) {
    return std::make_shared<WeightedRing>(
        F, std::vector<Variable>{{"x", w, VarRole::Left}, {"y", w, VarRole::Right}});
}

TEST_CASE("mf_make validates square identities") {
    auto R = xy_ring(NumberField::rationals(), Rat(1));
    auto Rx = std::make_shared<WeightedRing>(NumberField::rationals(),
                                             std::vector<Variable>{{"x", Rat(1), VarRole::Left}});
    MultiPoly x = MultiPoly::var(Rx, "x");
    SUBCASE("d1=d0=(x), W=x^2 is valid") {
        auto m = mf_make(Rx, parse_poly(Rx, "x^2"), MultiPoly(Rx), {{x}}, {{x}});
        CHECK(m->rank0() == 1);
    }
    SUBCASE("M_m for W=x^d") {
        for (int d = 2; d <= 6; ++d)
            for (int mm = 0; mm <= d; ++mm) {
                auto mf = mf_make(Rx, MultiPoly::var(Rx, "x", d), MultiPoly(Rx),
                                  {{MultiPoly::var(Rx, "x", mm)}},
                                  {{MultiPoly::var(Rx, "x", d - mm)}});
                CHECK(mf->rank1() == 1);
            }
    }
    SUBCASE("mismatch is reported with the entry") {
        CHECK_THROWS_AS(mf_make(Rx, parse_poly(Rx, "x^3"), MultiPoly(Rx), {{x}}, {{x}}),
                        SquareMismatchError);
    }
}

TEST_CASE("permutation factorizations") {
    SUBCASE("d=3, S={0}") {
        auto p = permutation_mf(3, {0});
        CHECK(p->d1()[0][0] == parse_poly(p->ring(), "x-y"));
        CHECK(p->d1()[0][0] * p->d0()[0][0] == parse_poly(p->ring(), "x^3-y^3"));
        CHECK(p->d0()[0][0] == parse_poly(p->ring(), "x^2+x*y+y^2"));
    }
    SUBCASE("product over all roots gives x^d - y^d, d <= 12") {
        for (int d = 2; d <= 12; ++d) {
            std::vector<int> S;
            for (int j = 0; j < d; j += 2) S.push_back(j);
            auto p = permutation_mf(d, S, true);
            CHECK(p->d1()[0][0] * p->d0()[0][0] ==
                  MultiPoly::var(p->ring(), "x", d) - MultiPoly::var(p->ring(), "y", d));
        }
    }
    SUBCASE("zero objects are flagged") {
        CHECK(permutation_mf(4, {})->zero_flagged());
        CHECK(permutation_mf(4, {0, 1, 2, 3})->zero_flagged());
        CHECK(!permutation_mf(4, {0, 2})->zero_flagged());
    }
    SUBCASE("hat grading has alpha=(1-|S|)/d and passes the degree-1 audit") {
        auto p = permutation_mf(5, {1, 2, 3});
        CHECK(p->grading().even[0] == Rat(-2, 5));
        p->check_grading();
        CHECK(permutation_mf(5, {0})->grading().even[0] == Rat(0));  // unit convention
    }
}

TEST_CASE("unit factorization") {
    SUBCASE("one variable x^d") {
        auto Rx = std::make_shared<WeightedRing>(
            NumberField::rationals(), std::vector<Variable>{{"x", Rat(2, 5), VarRole::Left}});
        auto I = unit_mf(MultiPoly::var(Rx, "x", 5));
        CHECK(I->rank0() == 1);
        CHECK(I->d1()[0][0] == parse_poly(I->ring(), "x-x'"));
        CHECK(I->d1()[0][0] * I->d0()[0][0] == parse_poly(I->ring(), "x^5-x'^5"));
    }
    SUBCASE("difference quotient for x^2 is x+x'") {
        auto Rx = std::make_shared<WeightedRing>(
            NumberField::rationals(), std::vector<Variable>{{"x", Rat(1), VarRole::Left}});
        auto I = unit_mf(MultiPoly::var(Rx, "x", 2));
        CHECK(I->d0()[0][0] == parse_poly(I->ring(), "x+x'"));
    }
    SUBCASE("two variables: rank 4, square checked on construction") {
        auto R2 = std::make_shared<WeightedRing>(
            NumberField::rationals(),
            std::vector<Variable>{{"x", Rat(2, 3), VarRole::Left}, {"y", Rat(1, 2), VarRole::Left}});
        auto I = unit_mf(parse_poly(R2, "x^3+y^4"));
        CHECK(I->rank0() == 2);
        CHECK(I->rank1() == 2);
        I->check_grading();
    }
}

TEST_CASE("tensor product") {
    SUBCASE("P_{0} (x) P_{0} for d=2 squares to x^2 - z^2") {
        auto a = permutation_mf(2, {0}, true, "x", "y");
        auto b = permutation_mf(2, {0}, true, "y", "z");
        auto t = mf_tensor(a, b);  // construction validates the square
        CHECK(t->rank0() == 2);
        CHECK(t->potential_left() == MultiPoly::var(t->ring(), "x", 2));
        CHECK(t->potential_right() == MultiPoly::var(t->ring(), "z", 2));
        CHECK(t->internal_vars() == std::vector<std::string>{"y"});
    }
    SUBCASE("I_W (x) M squares for catalog factorization") {
        auto m = permutation_mf(4, {0, 2});
        auto ui = unit_morphisms(m);
        CHECK(ui.i_tensor_m->rank0() == 2);
        ui.i_tensor_m->check_square();
        ui.m_tensor_i->check_square();
    }
    SUBCASE("Koszul sign: odd (x) d block carries the minus") {
        auto a = permutation_mf(3, {0}, true, "x", "y");
        auto b = permutation_mf(3, {1}, true, "y", "z");
        auto t = mf_tensor(a, b);
        // d1 block row (A1 (x) B0), col (A0 (x) B0): -id (x) d0^B
        MultiPoly expect = -b->d0()[0][0].map_ring(t->ring());
        CHECK(t->d1()[1][0] == expect);
    }
    SUBCASE("interface mismatch raises") {
        auto a = permutation_mf(3, {0}, true, "x", "y");
        auto b = permutation_mf(3, {0}, true, "z", "w");
        CHECK_THROWS_AS(mf_tensor(a, b), InterfaceMismatchError);
        auto c = permutation_mf(4, {0}, true, "y", "z");
        CHECK_THROWS(mf_tensor(a, c));
    }
}

TEST_CASE("duals") {
    SUBCASE("I+ = I for x^d") {
        for (int d : {2, 3, 5}) {
            auto I = permutation_mf(d, {0});  // I = P_{0}{0}
            auto Id = mf_dual(I);
            CHECK(Id->d1()[0][0] == I->d1()[0][0]);
            CHECK(Id->d0()[0][0] == I->d0()[0][0]);
            CHECK(Id->grading().even[0] == I->grading().even[0]);
            CHECK(Id->grading().odd[0] == I->grading().odd[0]);
        }
    }
    SUBCASE("(P_S)+ iso P_{-S} via the explicit scalar pair") {
        for (int d : {4, 5}) {
            std::vector<int> S = {1, 2};
            auto dual = mf_dual(permutation_mf(d, S));
            auto minus = permutation_mf(d, {-1, -2});
            // iso t : P_{-S} -> (P_S)^+, even block 1, odd block
            // (-1)^{|S|+1} prod zeta^{-j}
            auto F = dual->ring()->field();
            FieldElement odd = cyclo_root_power(F, -3);
            if (S.size() % 2 == 0) odd = -odd;  // (-1)^{|S|+1}
            MFMorphism t{minus, dual, 0,
                         PolyMat{{MultiPoly::constant(minus->ring(), F->one())}},
                         PolyMat{{MultiPoly::constant(minus->ring(), odd)}}};
            CHECK(t.is_closed());
            CHECK(t.c_degree().has_value());
            CHECK(*t.c_degree() == Rat(0));  // hat grading is preserved
        }
    }
    SUBCASE("rank > 1 unsupported") {
        auto m = permutation_mf(3, {0});
        auto t = mf_tensor(m, permutation_mf(3, {0}, true, "y", "z"));
        CHECK_THROWS_AS(mf_dual(t), UnsupportedRankError);
    }
}

TEST_CASE("twists") {
    SUBCASE("_aI iso P_{-a}") {
        int d = 5;
        for (int a = 0; a < d; ++a) {
            // _a(P_{0})_0 should be isomorphic to P_{{-a}}: s_{a,0} maps
            // P_{0-a-0} = P_{-a} -> _a(P_{0})_0
            auto s = perm_twist_iso(d, {0}, a, 0);
            CHECK(s.is_closed());
            s.source->check_square();
            s.target->check_square();
        }
    }
    SUBCASE("s_{a,b} conjugates exactly for bigger sets") {
        int d = 6;
        for (int a = 0; a < d; a += 2)
            for (int b = 0; b < d; b += 3) {
                auto s = perm_twist_iso(d, {0, 1, 3}, a, b);
                CHECK(s.is_closed());
            }
    }
    SUBCASE("tau composition law") {
        int d = 5;
        std::vector<int> S = {1, 2};
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                MFMorphism ta = perm_equivariance(d, S, a);
                MFMorphism tb = perm_equivariance(d, S, b);
                MFMorphism tab = perm_equivariance(d, S, (a + b) % d);
                // _a(tau_{S;b})_{-a}: substitute x -> z^a x, y -> z^a y in
                // tau_b's blocks; scalars are unchanged, so the composite's
                // scalar is the product; compare against tau_{a+b}
                FieldElement lhs_e = ta.e[0][0].constant_value() * tb.e[0][0].constant_value();
                FieldElement lhs_o = ta.o[0][0].constant_value() * tb.o[0][0].constant_value();
                CHECK(lhs_e == tab.e[0][0].constant_value());
                CHECK(lhs_o == tab.o[0][0].constant_value());
            }
    }
}

TEST_CASE("shift") {
    auto m = permutation_mf(4, {0, 1});
    auto s = m->shift();
    auto ss = s.shift();
    CHECK(ss.d1() == m->d1());
    CHECK(ss.d0() == m->d0());
    auto p2 = permutation_mf(2, {0});
    CHECK(p2->shift().d1()[0][0] == -parse_poly(p2->ring(), "x+y"));
}

TEST_CASE("unit morphisms are closed contraction morphisms") {
    SUBCASE("lambda and rho close for P_{0,1} at d=4") {
        auto m = permutation_mf(4, {0, 1});
        auto ui = unit_morphisms(m);
        CHECK(contraction_closed(ui.lambda, {ui.lambda_subst}));
        CHECK(contraction_closed(ui.rho, {ui.rho_subst}));
    }
    SUBCASE("negative control: flipped sign breaks closedness") {
        auto m = permutation_mf(3, {0});
        auto ui = unit_morphisms(m);
        MFMorphism bad = ui.lambda;
        bad.o = mat_neg(bad.o);
        CHECK(!contraction_closed(bad, {ui.lambda_subst}));
    }
}

TEST_CASE("direct sum and galois") {
    auto a = permutation_mf(5, {0});
    auto b = permutation_mf(5, {1, 2});
    auto s = mf_direct_sum(a, b);
    CHECK(s->rank0() == 2);
    s->check_grading();
    auto g = mf_galois(b, 2);
    g->check_square();
    // galois moves P_S to P_{2S}
    auto expect = permutation_mf(5, {2, 4});
    CHECK(g->d1()[0][0] == expect->d1()[0][0]);
}
