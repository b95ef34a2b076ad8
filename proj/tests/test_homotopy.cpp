#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfcas/homotopy.hpp"

using namespace mfcas;

TEST_CASE("bar homology of permutation factorizations") {
    SUBCASE("proper nonempty S gives (1,1)") {
        for (int d : {3, 4, 7}) {
            CHECK(bar_homology(permutation_mf(d, {0})) == HomologyReport{1, 1});
            CHECK(bar_homology(permutation_mf(d, {0, 1})) == HomologyReport{1, 1});
        }
    }
    SUBCASE("P_empty and P_full vanish") {
        CHECK(bar_homology(permutation_mf(4, {})) == HomologyReport{0, 0});
        CHECK(bar_homology(permutation_mf(4, {0, 1, 2, 3})) == HomologyReport{0, 0});
    }
    SUBCASE("unit of x^d for d >= 2") {
        auto Rx = std::make_shared<WeightedRing>(
            NumberField::rationals(), std::vector<Variable>{{"x", fraction(2, 5), VarRole::Left}});
        CHECK(bar_homology(unit_mf(MultiPoly::var(Rx, "x", 5))) == HomologyReport{1, 1});
    }
    SUBCASE("shift swaps the dimensions") {
        auto t = mf_tensor(permutation_mf(3, {0, 1}, true, "x", "y"),
                           permutation_mf(3, {1}, true, "y", "z"));
        auto r = finite_rank_reduce(t);
        HomologyReport a = bar_homology(r);
        auto sh = std::make_shared<MatrixFactorization>(r->shift());
        HomologyReport b = bar_homology(sh);
        CHECK(a.h0 == b.h1);
        CHECK(a.h1 == b.h0);
    }
}

TEST_CASE("smith normal form and internal homology") {
    auto ring = std::make_shared<WeightedRing>(
        NumberField::rationals(), std::vector<Variable>{{"y", Rat(1), VarRole::Internal}});
    SUBCASE("diag(y, y^2) cokernel") {
        PolyMat A{{parse_poly(ring, "y"), MultiPoly(ring)},
                  {MultiPoly(ring), parse_poly(ring, "y^2")}};
        auto s = smith_normal_form(A, ring);
        REQUIRE(s.rank == 2);
        CHECK(s.S[0][0] == parse_poly(ring, "y"));
        CHECK(s.S[1][1] == parse_poly(ring, "y^2"));
    }
    SUBCASE("chain condition is enforced") {
        // [[y^2, 0],[0, y]] must normalize to (y, y^2)
        PolyMat A{{parse_poly(ring, "y^2"), MultiPoly(ring)},
                  {MultiPoly(ring), parse_poly(ring, "y")}};
        auto s = smith_normal_form(A, ring);
        REQUIRE(s.rank == 2);
        CHECK(s.S[0][0] == parse_poly(ring, "y"));
        CHECK(s.S[1][1] == parse_poly(ring, "y^2"));
        // transforms are consistent: U A V = S
        PolyMat uav = mat_mul(mat_mul(s.U, A), s.V);
        CHECK(mat_is_zero(mat_sub(uav, s.S)));
    }
    SUBCASE("gcd of offdiagonal mixing") {
        PolyMat A{{parse_poly(ring, "y^2+y"), parse_poly(ring, "y^3")},
                  {parse_poly(ring, "y"), parse_poly(ring, "y^2-y")}};
        auto s = smith_normal_form(A, ring);
        PolyMat uav = mat_mul(mat_mul(s.U, A), s.V);
        CHECK(mat_is_zero(mat_sub(uav, s.S)));
        for (size_t i = 0; i + 1 < s.rank; ++i) {
            CHECK(s.S[i + 1][i + 1].exact_div(s.S[i][i]) * s.S[i][i] == s.S[i + 1][i + 1]);
        }
    }
    SUBCASE("zero differential gives free module") {
        // rank-2 free with zero maps
        PolyMat Z(2, std::vector<MultiPoly>(2, MultiPoly(ring)));
        HomologySpace h(Z, Z, ring, 2);
        CHECK(h.presentation().free_rank == 2);
        CHECK(!h.finite_dimensional());
    }
}

TEST_CASE("internal homology of a graded tensor product") {
    // P^_{a:1} (x) P^_{b:mu} with mu < d-2: H0 and H1 are 2-dimensional
    int d = 5;
    for (int mu : {1, 2}) {
        std::vector<int> sa = {0, 1}, sb;
        for (int k = 0; k <= mu; ++k) sb.push_back(k);
        auto t = mf_tensor(permutation_mf(d, sa, true, "x", "y"),
                           permutation_mf(d, sb, true, "y", "z"));
        auto [h0, h1] = internal_homology(t);
        if (mu < d - 2) {
            CHECK(h0.free_rank == 0);
            CHECK(h0.torsion_dim() == 2);
            CHECK(h1.torsion_dim() == 2);
        }
    }
    // mu = d-2: the q_plus summand dies, homology is 1+1 dimensional
    {
        auto t = mf_tensor(permutation_mf(5, {0, 1}, true, "x", "y"),
                           permutation_mf(5, {0, 1, 2, 3}, true, "y", "z"));
        auto [h0, h1] = internal_homology(t);
        CHECK(h0.torsion_dim() == 1);
        CHECK(h1.torsion_dim() == 1);
    }
}

TEST_CASE("is_iso_H basics") {
    auto p = permutation_mf(5, {1, 2});
    SUBCASE("identity is an H-isomorphism") { CHECK(is_iso_H(identity_morphism(p))); }
    SUBCASE("closed maps between different P_R, P_S cannot be isos") {
        auto q = permutation_mf(5, {1, 3});
        // the zero morphism is closed and not an iso
        MFMorphism z{p, q, 0, PolyMat{{MultiPoly(p->ring())}}, PolyMat{{MultiPoly(p->ring())}}};
        CHECK(!is_iso_H(z));
    }
    SUBCASE("non-closed morphisms are rejected") {
        MFMorphism f = identity_morphism(p);
        f.e[0][0] = parse_poly(p->ring(), "x");
        CHECK_THROWS_AS(is_iso_H(f), NotClosedError);
    }
}

TEST_CASE("graded morphism spaces") {
    SUBCASE("ZMF^gr(P_R, P_S) = C id iff R = S, d = 5") {
        std::vector<std::vector<int>> sets = {{0}, {2}, {0, 1}, {1, 2}, {0, 1, 2}, {2, 3, 4}};
        for (auto& r : sets)
            for (auto& s : sets) {
                auto mr = permutation_mf(5, r);
                auto ms = permutation_mf(5, s);
                auto mb = hom_graded(mr, ms, Rat(0));
                CHECK(mb.closed_dim == (r == s ? 1 : 0));
                CHECK(mb.quotient_dim == (r == s ? 1 : 0));
            }
    }
    SUBCASE("simplicity: one class at charge 0 for all P^_{a:lam}") {
        for (int d : {3, 5, 7}) {
            for (int lam = 0; lam <= d - 2; ++lam) {
                std::vector<int> s;
                for (int k = 0; k <= lam; ++k) s.push_back(k);
                auto p = permutation_mf(d, s);
                auto mb = hom_graded(p, p, Rat(0));
                CHECK(mb.quotient_dim == 1);
            }
        }
    }
}

TEST_CASE("ungraded morphism dimension formula for M_m") {
    // dim HMF(M_m, M_l) = min{l, m, d-l, d-m}
    for (int d : {3, 5, 8}) {
        auto Rx = std::make_shared<WeightedRing>(
            NumberField::rationals(), std::vector<Variable>{{"x", fraction(2, d), VarRole::Left}});
        MultiPoly W = MultiPoly::var(Rx, "x", d);
        auto Mk = [&](int k) {
            return mf_make(Rx, W, MultiPoly(Rx), {{MultiPoly::var(Rx, "x", k)}},
                           {{MultiPoly::var(Rx, "x", d - k)}});
        };
        for (int mm = 1; mm < d; ++mm)
            for (int l = 1; l < d; ++l) {
                long expect = std::min(std::min(l, mm), std::min(d - l, d - mm));
                CHECK(hom_ungraded_dim(Mk(mm), Mk(l), Rat(2)) == expect);
            }
    }
}

TEST_CASE("homotopic") {
    auto p = permutation_mf(3, {0});
    SUBCASE("reflexive") {
        MFMorphism id = identity_morphism(p);
        CHECK(homotopic(id, id, Rat(2)));
    }
    SUBCASE("id of P_empty is null-homotopic") {
        auto z = permutation_mf(3, {});
        CHECK(null_homotopic(identity_morphism(z), Rat(2)));
    }
    SUBCASE("id of P_{0} is not null-homotopic") {
        CHECK(!null_homotopic(identity_morphism(p), Rat(2)));
    }
    SUBCASE("x*id is null-homotopic on M_1 of x^2 where x = delta(h)") {
        // M_1 = (x, x): delta of odd h=(1,0): d h + h d acts as x on both
        auto Rx = std::make_shared<WeightedRing>(
            NumberField::rationals(), std::vector<Variable>{{"x", Rat(1), VarRole::Left}});
        auto m = mf_make(Rx, parse_poly(Rx, "x^2"), MultiPoly(Rx),
                         {{MultiPoly::var(Rx, "x")}}, {{MultiPoly::var(Rx, "x")}});
        MFMorphism f = identity_morphism(m);
        f.e[0][0] = parse_poly(Rx, "x");
        f.o[0][0] = parse_poly(Rx, "x");
        CHECK(f.is_closed());
        CHECK(null_homotopic(f, Rat(2)));
    }
}

TEST_CASE("finite rank reduction") {
    SUBCASE("I (x) P_{0} at d=3 reduces to P_{0}") {
        auto m = permutation_mf(3, {0});
        auto ui = unit_morphisms(m);
        auto r = finite_rank_reduce(ui.i_tensor_m);
        CHECK(r->rank0() == 1);
        CHECK(r->rank1() == 1);
        CHECK(bar_homology(r) == HomologyReport{1, 1});
        // the reduced object is P_{0} itself up to iso: compare graded End
        auto mb = hom_graded(r, m, Rat(0));
        CHECK(mb.quotient_dim == 1);
    }
    SUBCASE("P_{0:1} (x) P_{0:1} at d=3 reduces to P_{1:0}") {
        auto t = mf_tensor(permutation_mf(3, {0, 1}, true, "x", "y"),
                           permutation_mf(3, {0, 1}, true, "y", "z"));
        auto r = finite_rank_reduce(t);
        CHECK(r->rank0() == 1);
        CHECK(r->rank1() == 1);
        CHECK(bar_homology(r) == HomologyReport{1, 1});
        auto p1 = permutation_mf(3, {1}, true, "x", "z");
        auto p2 = permutation_mf(3, {2}, true, "x", "z");
        // identify the summand by graded morphism spaces
        CHECK(hom_graded(r, p1, Rat(0)).quotient_dim == 1);
        CHECK(hom_graded(r, p2, Rat(0)).quotient_dim == 0);
    }
    SUBCASE("full fusion by reduction at d=5: {0,1} (x) {0,1,2}") {
        auto t = mf_tensor(permutation_mf(5, {0, 1}, true, "x", "y"),
                           permutation_mf(5, {0, 1, 2}, true, "y", "z"));
        auto r = finite_rank_reduce(t);
        CHECK(r->rank0() == 2);
        CHECK(bar_homology(r) == HomologyReport{2, 2});
        // expected P_{1:1} + P_{0:3}
        CHECK(hom_graded(r, permutation_mf(5, {1, 2}, true, "x", "z"), Rat(0)).quotient_dim == 1);
        CHECK(hom_graded(r, permutation_mf(5, {0, 1, 2, 3}, true, "x", "z"), Rat(0)).quotient_dim ==
              1);
        CHECK(hom_graded(r, permutation_mf(5, {2, 3}, true, "x", "z"), Rat(0)).quotient_dim == 0);
    }
}

TEST_CASE("fusion witness") {
    SUBCASE("d=5, a=b=0, mu=1 matches the worked example") {
        auto rep = fusion_witness(5, 0, 0, 1);
        CHECK(rep.closed);
        CHECK(rep.degree0);
        CHECK(rep.h_iso);
        // g-_01 = 1 normalization
        CHECK(rep.g_minus.o[1][0] == MultiPoly::constant(rep.tensor->ring(), Rat(1)));
    }
    SUBCASE("full sweep d=3") {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int mu = 1; mu <= 1; ++mu) CHECK(fusion_witness(3, a, b, mu).pass());
    }
    SUBCASE("fusion rule formula") {
        auto r = fusion_rule(5, 0, 1, 0, 1);
        REQUIRE(r.size() == 2);
        CHECK(r[0] == std::pair<int, int>{1, 0});
        CHECK(r[1] == std::pair<int, int>{0, 2});
        auto r2 = fusion_rule(3, 0, 1, 0, 1);  // truncation kills nu=2
        REQUIRE(r2.size() == 1);
        CHECK(r2[0] == std::pair<int, int>{1, 0});
    }
}
