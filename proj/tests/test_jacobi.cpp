#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mfcas/jacobi.hpp"
#include "mfcas/linalg.hpp"

using namespace mfcas;

static RingPtr make_ring(FieldPtr F, std::vector<Variable> vars) {
    return std::make_shared<WeightedRing>(F, std::move(vars));
}

TEST_CASE("groebner basics") {
    auto R = make_ring(NumberField::rationals(), {{"x", Rat(1)}, {"y", Rat(1)}});
    SUBCASE("monomial ideal is its own basis") {
        GroebnerBasis gb({parse_poly(R, "x^2"), parse_poly(R, "y^3")});
        REQUIRE(gb.generators().size() == 2);
        CHECK(gb.normal_form(parse_poly(R, "x^2*y")).is_zero());
        CHECK(gb.normal_form(parse_poly(R, "x+y")) == parse_poly(R, "x+y"));
    }
    SUBCASE("{x-y, y} reduces to {x, y}") {
        GroebnerBasis gb({parse_poly(R, "x-y"), parse_poly(R, "y")});
        REQUIRE(gb.generators().size() == 2);
        CHECK(gb.generators()[0] == parse_poly(R, "x"));
        CHECK(gb.generators()[1] == parse_poly(R, "y"));
    }
    SUBCASE("jacobian of x^3+y^4 normalizes to {x^2, y^3}") {
        MultiPoly W = parse_poly(R, "x^3+y^4");
        GroebnerBasis gb({W.derivative("x"), W.derivative("y")});
        REQUIRE(gb.generators().size() == 2);
        CHECK(gb.generators()[0] == parse_poly(R, "x^2"));
        CHECK(gb.generators()[1] == parse_poly(R, "y^3"));
    }
    SUBCASE("NF(x^3, {x^2-y, y^2}) = x*y") {
        // x^3 = x(x^2-y) + x*y, and x*y is not in the ideal (checked by the
        // degree-bounded membership oracle below)
        GroebnerBasis gb({parse_poly(R, "x^2-y"), parse_poly(R, "y^2")});
        CHECK(gb.normal_form(parse_poly(R, "x^3")) == parse_poly(R, "x*y"));
        CHECK(gb.normal_form(parse_poly(R, "x^3*y")).is_zero());
    }
}

TEST_CASE("normal form agrees with brute-force membership") {
    // random ideals in <= 3 variables, degree <= 5: NF(p)=0 iff p is a
    // k-linear combination of monomial multiples m*g_i within the degree
    // bound (degree-bounded multiplication matrix).
    auto R = make_ring(NumberField::rationals(),
                       {{"x", Rat(1)}, {"y", Rat(1)}, {"z", Rat(1)}});
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> dc(-3, 3), de(0, 2);
    auto rand_poly = [&](int terms) {
        MultiPoly p(R);
        for (int t = 0; t < terms; ++t) {
            Exponents e = {de(rng), de(rng), de(rng)};
            p += MultiPoly::monomial(R, e, R->field()->from_rat(Rat(dc(rng))));
        }
        return p;
    };
    auto monomials_up_to = [&](int d) {
        std::vector<Exponents> ms;
        for (int a = 0; a <= d; ++a)
            for (int b = 0; a + b <= d; ++b)
                for (int c = 0; a + b + c <= d; ++c) ms.push_back({a, b, c});
        return ms;
    };
    int done = 0;
    while (done < 20) {
        MultiPoly g1 = rand_poly(2), g2 = rand_poly(2);
        if (g1.is_zero() || g2.is_zero()) continue;
        GroebnerBasis gb({g1, g2});
        MultiPoly p = rand_poly(2) * g1 + rand_poly(2) * g2;  // in the ideal
        MultiPoly q = rand_poly(3);                           // arbitrary
        // brute force: span of m*g_i for deg(m*g_i) <= 5 (sufficient for
        // membership of polynomials built above with total degree <= 5)
        std::map<Exponents, size_t, GrlexGreater> colidx;
        std::vector<MultiPoly> gens_mult;
        for (const MultiPoly* g : {&g1, &g2}) {
            for (auto& m : monomials_up_to(5 - static_cast<int>(g->total_degree()))) {
                MultiPoly mg = MultiPoly::monomial(R, m, R->field()->one()) * (*g);
                gens_mult.push_back(mg);
                for (auto& [e, c] : mg.terms()) {
                    if (!colidx.count(e)) colidx.emplace(e, colidx.size());
                }
            }
        }
        auto in_span = [&](const MultiPoly& t) {
            if (t.total_degree() > 5) return false;  // outside the bounded test
            size_t cols = colidx.size();
            for (auto& [e, c] : t.terms())
                if (!colidx.count(e)) return false;
            FMat A(cols, FRow(gens_mult.size(), R->field()->zero()));
            for (size_t j = 0; j < gens_mult.size(); ++j)
                for (auto& [e, c] : gens_mult[j].terms()) A[colidx.at(e)][j] = c;
            FRow b(cols, R->field()->zero());
            for (auto& [e, c] : t.terms()) b[colidx.at(e)] = c;
            return solve_linear(A, b).has_value();
        };
        // p is an explicit combination, so NF(p) must vanish
        CHECK(gb.normal_form(p).is_zero());
        // span is contained in the ideal: anything in the span has NF zero,
        // and anything with nonzero NF must be outside the span
        if (!q.is_zero() && q.total_degree() <= 5) {
            if (in_span(q)) {
                CHECK(gb.normal_form(q).is_zero());
            } else if (!gb.normal_form(q).is_zero()) {
                CHECK(!in_span(q));
            }
        }
        ++done;
    }
}

TEST_CASE("jacobi ring dimensions") {
    SUBCASE("one variable x^d") {
        for (int d = 2; d <= 9; ++d) {
            auto R = make_ring(NumberField::rationals(), {{"x", fraction(2, d)}});
            MultiPoly W = MultiPoly::var(R, "x", d);
            auto jd = jacobi_ring(W);
            CHECK(jd.milnor == d - 1);
        }
    }
    SUBCASE("x^3 + y^4 has mu = 6") {
        auto R = make_ring(NumberField::rationals(), {{"x", Rat(2, 3)}, {"y", Rat(1, 2)}});
        auto jd = jacobi_ring(parse_poly(R, "x^3+y^4"));
        CHECK(jd.milnor == 6);
        CHECK(jd.socle == Exponents{1, 2});  // x*y^2
        CHECK(jd.socle_degree == Rat(2, 3) + Rat(1));
    }
    SUBCASE("non-isolated singularity is detected") {
        auto R = make_ring(NumberField::rationals(),
                           {{"x", Rat(1)}, {"y", Rat(1, 2)}, {"z", Rat(1, 2)}});
        CHECK_THROWS_AS(jacobi_ring(parse_poly(R, "x^2+y^2*x+z^2*x")),
                        InfiniteDimensionalError);
    }
}

TEST_CASE("residue engine") {
    auto R = make_ring(NumberField::rationals(), {{"x", Rat(2, 3)}, {"y", Rat(1, 2)}});
    MultiPoly W = parse_poly(R, "x^3+y^4");
    SUBCASE("f = x*y^2 -> 1/12") {
        CHECK(residue(parse_poly(R, "x*y^2"), W).rational_value() == Rat(1, 12));
        CHECK(residue_transform(parse_poly(R, "x*y^2"), W).rational_value() == Rat(1, 12));
    }
    SUBCASE("Hessian normalizes to mu") {
        MultiPoly h = hessian(W);
        CHECK(h == parse_poly(R, "72*x*y^2"));
        CHECK(residue(h, W).rational_value() == 6);
        CHECK(residue_transform(h, W).rational_value() == 6);
    }
    SUBCASE("below-socle degree vanishes") {
        CHECK(residue(MultiPoly::constant(R, Rat(1)), W).is_zero());
        CHECK(residue(parse_poly(R, "x"), W).is_zero());
    }
    SUBCASE("linearity in f") {
        MultiPoly f1 = parse_poly(R, "x*y^2+3*x");
        MultiPoly f2 = parse_poly(R, "2*x*y^2-y");
        CHECK(residue(f1 + f2, W) == residue(f1, W) + residue(f2, W));
    }
    SUBCASE("degree selection: off-socle homogeneous degrees vanish") {
        auto jd = jacobi_ring(W);
        for (auto& e : jd.basis) {
            if (e == jd.socle) continue;
            MultiPoly m = MultiPoly::monomial(R, e, R->field()->one());
            CHECK(residue(m, jd, W).is_zero());
        }
    }
}

TEST_CASE("two residue routes agree on ADE potentials") {
    struct Case {
        std::string w;
        std::vector<Variable> vars;
    };
    std::vector<Case> cases = {
        {"x^6+y^2", {{"x", Rat(1, 3)}, {"y", Rat(1)}}},
        {"x^4+x*y^2", {{"x", Rat(1, 2)}, {"y", Rat(3, 4)}}},
        {"x^3+y^4", {{"x", Rat(2, 3)}, {"y", Rat(1, 2)}}},
        {"x^3+x*y^3", {{"x", Rat(2, 3)}, {"y", Rat(4, 9)}}},
        {"x^3+y^5", {{"x", Rat(2, 3)}, {"y", Rat(2, 5)}}},
    };
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dc(-3, 3), de(0, 3);
    for (auto& cs : cases) {
        auto R = make_ring(NumberField::rationals(), cs.vars);
        MultiPoly W = parse_poly(R, cs.w);
        auto jd = jacobi_ring(W);
        CHECK(residue(hessian(W), jd, W).rational_value() == jd.milnor);
        CHECK(residue_transform(hessian(W), W).rational_value() == jd.milnor);
        for (int t = 0; t < 4; ++t) {
            MultiPoly f(R);
            for (int k = 0; k < 3; ++k)
                f += MultiPoly::monomial(R, {de(rng), de(rng)},
                                         R->field()->from_rat(Rat(dc(rng))));
            CHECK(residue(f, jd, W) == residue_transform(f, W));
        }
    }
}

TEST_CASE("central charge") {
    auto R1 = make_ring(NumberField::rationals(), {{"x", Rat(2, 3)}, {"y", Rat(1, 2)}});
    CHECK(central_charge(parse_poly(R1, "x^3+y^4")) == Rat(5, 6));
    auto R2 = make_ring(NumberField::rationals(), {{"x", Rat(1, 6)}, {"y", Rat(1)}});
    CHECK(central_charge(parse_poly(R2, "x^12+y^2")) == Rat(5, 6));
    auto R3 = make_ring(NumberField::rationals(), {{"x", Rat(1)}});
    CHECK(central_charge(parse_poly(R3, "x^2")) == 0);
    CHECK_THROWS_AS(central_charge(parse_poly(R1, "x^3+y^2")), NotHomogeneousError);
    // Knoerrer: adding u^2+v^2 with unit weights keeps the charge
    auto R4 = make_ring(NumberField::rationals(),
                        {{"x", Rat(2, 3)}, {"y", Rat(1, 2)}, {"u", Rat(1)}, {"v", Rat(1)}});
    CHECK(central_charge(parse_poly(R4, "x^3+y^4+u^2+v^2")) == Rat(5, 6));
}
