#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfcas/adjunction.hpp"

using namespace mfcas;

static RingPtr xyz_ring(FieldPtr F, Rat w) {
    return std::make_shared<WeightedRing>(
        F, std::vector<Variable>{{"x", w, VarRole::Left},
                                 {"y", w, VarRole::Internal},
                                 {"z", w, VarRole::Right}});
}

TEST_CASE("gm_eval properties") {
    SUBCASE("G_M(d1(y,z) y^k) = (x-z) delta_{k,0}") {
        for (int d : {3, 5}) {
            for (auto S : std::vector<std::vector<int>>{{0}, {1, 2}}) {
                auto m = permutation_mf(d, S);
                auto R = xyz_ring(m->ring()->field(), fraction(2, d));
                // d1(y, z): m's blocks with left -> y, right -> z
                auto p = permutation_mf(d, S, true, "y", "z");
                MultiPoly d1yz = p->d1()[0][0].map_ring(R);
                for (int k = 0; k <= 2 * d; ++k) {
                    MultiPoly f = d1yz * MultiPoly::var(R, "y", k);
                    MultiPoly g = gm_eval(m, f, "x", "y", "z");
                    if (k == 0)
                        CHECK(g == parse_poly(R, "x-z"));
                    else
                        CHECK(g.is_zero());
                }
            }
        }
    }
    SUBCASE("G_I(1) = -1 for I of x^d") {
        for (int d : {2, 3, 6}) {
            auto I = permutation_mf(d, {0});  // I = P_{0}
            auto R = xyz_ring(I->ring()->field(), fraction(2, d));
            MultiPoly g = gm_eval(I, MultiPoly::constant(R, Rat(1)), "x", "y", "z");
            CHECK(g == MultiPoly::constant(R, Rat(-1)));
        }
    }
    SUBCASE("G_M(d1(y,x) f) is divisible by (x-z)") {
        auto m = permutation_mf(5, {0, 1});
        auto R = xyz_ring(m->ring()->field(), fraction(2, 5));
        auto p = permutation_mf(5, {0, 1}, true, "y", "x");
        MultiPoly d1yx = p->d1()[0][0].map_ring(R);
        for (int k = 0; k <= 6; ++k) {
            MultiPoly g = gm_eval(m, d1yx * MultiPoly::var(R, "y", k), "x", "y", "z");
            if (g.is_zero()) continue;
            CHECK_NOTHROW(g.exact_div(parse_poly(R, "x-z")));
        }
    }
}

TEST_CASE("coev is closed and degree 0") {
    for (int d : {3, 4}) {
        for (auto S : std::vector<std::vector<int>>{{0}, {0, 1}}) {
            auto dd = ev_coev(permutation_mf(d, S));
            CHECK(dd.coev.is_closed());
            auto deg = dd.coev.c_degree();
            REQUIRE(deg.has_value());
            CHECK(*deg == Rat(0));
        }
    }
}

TEST_CASE("B_I(1) = 2") {
    // partial fractions oracle value from the unit of x^d
    for (int d : {2, 3, 5}) {
        auto I = permutation_mf(d, {0});
        auto R = xyz_ring(I->ring()->field(), fraction(2, d));
        // B(f) = G(d1(y,x) f)/(x-z) with d1(y,x) = y - x
        MultiPoly d1yx = parse_poly(R, "y-x");
        MultiPoly g = gm_eval(I, d1yx, "x", "y", "z");
        MultiPoly b = g.exact_div(parse_poly(R, "x-z"));
        CHECK(b == MultiPoly::constant(R, Rat(2)));
    }
}

TEST_CASE("quantum dimensions of permutation factorizations") {
    for (int d : {3, 4, 5}) {
        auto F = NumberField::cyclotomic(d);
        for (auto J : std::vector<std::vector<int>>{{0}, {1}, {0, 2}, {1, 2}}) {
            if (*std::max_element(J.begin(), J.end()) >= d) continue;
            auto qd = qdim(permutation_mf(d, J));
            FieldElement el = F->zero(), er = F->zero();
            for (int l : J) {
                el += cyclo_root_power(F, l);
                er += cyclo_root_power(F, -l);
            }
            CHECK(qd.left == el);
            CHECK(qd.right == er);
        }
    }
}

TEST_CASE("qdim of the Knoerrer factor u^2 + v^2") {
    auto F = NumberField::cyclotomic(4);
    auto R = std::make_shared<WeightedRing>(
        F, std::vector<Variable>{{"u", Rat(1), VarRole::Left}, {"v", Rat(1), VarRole::Left}});
    FieldElement i = F->generator();
    MultiPoly u = MultiPoly::var(R, "u"), v = MultiPoly::var(R, "v");
    MultiPoly d1 = u + v.scale(i), d0 = u - v.scale(i);
    auto K = mf_make(R, parse_poly(R, "u^2+v^2"), MultiPoly(R), {{d1}}, {{d0}},
                     Grading{{Rat(0)}, {Rat(0)}});
    auto qd = qdim(K);
    CHECK(!qd.left.is_zero());
    CHECK(!qd.right.is_zero());
    CHECK(qd.left == Rat(-1, 2) * i);
    CHECK(qd.right == Rat(2) * i);
}

TEST_CASE("unit inverses") {
    auto m = permutation_mf(4, {0, 1});
    auto ui = unit_inverses(m);
    SUBCASE("closed and degree 0") {
        CHECK(ui.lambda_inv.is_closed());
        CHECK(ui.rho_inv.is_closed());
        auto dl = ui.lambda_inv.c_degree();
        auto dr = ui.rho_inv.c_degree();
        REQUIRE(dl.has_value());
        REQUIRE(dr.has_value());
        CHECK(*dl == Rat(0));
        CHECK(*dr == Rat(0));
    }
    SUBCASE("lambda lambda^{-1} = id exactly, and lambda^{-1} is an H-iso") {
        // the unit evaluation picks the I0 components where lambda^{-1} is 1
        CHECK(ui.lambda_inv.e[0][0] == MultiPoly::constant(ui.isos.i_tensor_m->ring(), Rat(1)));
        CHECK(is_iso_H(ui.lambda_inv));
        CHECK(is_iso_H(ui.rho_inv));
    }
    SUBCASE("same checks for P_{0,1} at d=3 and P_{0} at d=5") {
        for (auto mm : {permutation_mf(3, {0, 1}), permutation_mf(5, {0})}) {
            auto u2 = unit_inverses(mm);
            CHECK(u2.lambda_inv.is_closed());
            CHECK(u2.rho_inv.is_closed());
            CHECK(is_iso_H(u2.lambda_inv));
            CHECK(is_iso_H(u2.rho_inv));
        }
    }
}

TEST_CASE("zig-zag identities") {
    SUBCASE("P_{0} at d=3 passes both snakes") {
        auto rep = check_zigzag(permutation_mf(3, {0}));
        CHECK(rep.snake1);
        CHECK(rep.snake2);
    }
    SUBCASE("I passes") {
        auto rep = check_zigzag(permutation_mf(4, {0}));
        CHECK(rep.pass());
    }
    SUBCASE("a two-element set") {
        auto rep = check_zigzag(permutation_mf(4, {1, 2}));
        CHECK(rep.pass());
    }
    SUBCASE("sign-flipped negative control fails") {
        auto rep = check_zigzag(permutation_mf(3, {0}), true);
        CHECK(!rep.pass());
    }
}

TEST_CASE("u/n self-duality pair") {
    SUBCASE("d=3: kappa = 1") {
        auto rep = un_pair(3);
        CHECK(rep.pass());
        CHECK(rep.kappa_zd.is_rational());
        CHECK(rep.kappa_zd.rational_value() == 1);
        REQUIRE(rep.kappa_min_poly.size() == 2);
        CHECK(rep.kappa_min_poly[0] == Rat(-1));
    }
    SUBCASE("d=5: kappa^2 - kappa - 1 = 0") {
        auto rep = un_pair(5);
        CHECK(rep.pass());
        REQUIRE(rep.kappa_min_poly.size() == 3);
        CHECK(rep.kappa_min_poly[0] == Rat(-1));
        CHECK(rep.kappa_min_poly[1] == Rat(-1));
        CHECK(rep.kappa_min_poly[2] == Rat(1));
        // kappa = 2cos(pi/5) = -(zeta_{2d}^{d-1} + zeta_{2d}^{d+1})
        auto F2 = NumberField::cyclotomic(10);
        CHECK(rep.kappa == -(cyclo_root_power(F2, 4) + cyclo_root_power(F2, 6)));
    }
    SUBCASE("even d rejected") { CHECK_THROWS(un_pair(4)); }
}
