#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfcas/templieb.hpp"

using namespace mfcas;

using TLQ = TLMorphism<RationalFunction>;

static RationalFunction rf_one() { return RationalFunction(Rat(1)); }
static RationalFunction rf_kappa() {
    return RationalFunction::variable() + rf_one() / RationalFunction::variable();
}

TEST_CASE("quantum integers") {
    CHECK(quantum_int(1) == rf_one());
    CHECK(quantum_int(2) == rf_kappa());
    // [3] - [2]^2 + 1 = 0
    CHECK(quantum_int(3) - quantum_int(2) * quantum_int(2) + rf_one() ==
          RationalFunction(Rat(0)));
    CHECK(quantum_int(0).is_zero());
    // [l](q - q^{-1}) = q^l - q^{-l} on a specialization
    auto F = NumberField::cyclotomic(7);
    FieldElement qv = F->generator();
    for (long l = 1; l <= 5; ++l) {
        FieldElement lhs = quantum_int(l).evaluate(qv) * (qv - qv.inverse());
        CHECK(lhs == qv.pow(l) - qv.pow(-l));
    }
}

TEST_CASE("diagram counting: dim TL(n,n) = Catalan(n)") {
    long catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
    for (int n = 1; n <= 8; ++n)
        CHECK(static_cast<long>(enumerate_pairings(n, n).size()) == catalan[n]);
}

TEST_CASE("TL relations by exhaustive composition, n <= 8") {
    auto one = rf_one();
    auto kap = rf_kappa();
    for (int n = 2; n <= 8; ++n) {
        for (int i = 0; i + 1 < n; ++i) {
            TLQ ei = TLQ::generator(n, i, one);
            CHECK(tl_compose(ei, ei, kap) == ei.scale(kap));
            if (i + 2 < n) {
                TLQ ej = TLQ::generator(n, i + 1, one);
                CHECK(tl_compose(ei, tl_compose(ej, ei, kap), kap) == ei);
                CHECK(tl_compose(ej, tl_compose(ei, ej, kap), kap) == ej);
            }
            for (int j = i + 2; j + 1 < n; ++j) {
                TLQ ej = TLQ::generator(n, j, one);
                CHECK(tl_compose(ei, ej, kap) == tl_compose(ej, ei, kap));
            }
        }
        TLQ id = TLQ::identity(n, one);
        TLQ e0 = TLQ::generator(n, 0, one);
        CHECK(tl_compose(id, e0, kap) == e0);
        CHECK(tl_compose(e0, id, kap) == e0);
    }
}

TEST_CASE("tensor and interchange") {
    auto one = rf_one();
    auto kap = rf_kappa();
    CHECK(tl_tensor(TLQ::identity(1, one), TLQ::identity(1, one)) == TLQ::identity(2, one));
    // e1 in TL3 = e1 (x) id1
    CHECK(tl_tensor(TLQ::generator(2, 0, one), TLQ::identity(1, one)) ==
          TLQ::generator(3, 0, one));
    // interchange on small diagrams
    for (auto& f : enumerate_pairings(2, 2))
        for (auto& g : enumerate_pairings(2, 2)) {
            TLQ mf(2, 2), mg(2, 2);
            mf.add(f, one);
            mg.add(g, one);
            for (auto& f2 : enumerate_pairings(2, 2)) {
                TLQ mf2(2, 2);
                mf2.add(f2, one);
                // (f (x) g) . (f2 (x) g) = (f.f2) (x) (g.g)
                TLQ lhs = tl_compose(tl_tensor(mf, mg), tl_tensor(mf2, mg), kap);
                TLQ rhs = tl_tensor(tl_compose(mf, mf2, kap), tl_compose(mg, mg, kap));
                CHECK(lhs == rhs);
            }
        }
}

TEST_CASE("markov traces") {
    auto one = rf_one();
    auto kap = rf_kappa();
    for (int n = 1; n <= 4; ++n) {
        RationalFunction expect = one;
        for (int i = 0; i < n; ++i) expect = expect * kap;
        CHECK(markov_trace(TLQ::identity(n, one), kap, one) == expect);
    }
    CHECK(markov_trace(TLQ::generator(2, 0, one), kap, one) == kap);
    TLQ empty(0, 0);
    empty.add(PlanarPairing::identity(0), one);
    CHECK(markov_trace(empty, kap, one) == one);
}

TEST_CASE("wenzl projectors") {
    SUBCASE("p2 = id - (1/[2]) e1") {
        auto p2 = wenzl(2);
        auto expect = TLQ::identity(2, rf_one()) -
                      TLQ::generator(2, 0, rf_one()).scale(rf_one() / quantum_int(2));
        CHECK(p2 == expect);
    }
    SUBCASE("p3 matches the worked example") {
        auto one = rf_one();
        auto kap = rf_kappa();
        auto p3 = wenzl(3);
        TLQ e1 = TLQ::generator(3, 0, one), e2 = TLQ::generator(3, 1, one);
        auto expect = TLQ::identity(3, one) -
                      (e1 + e2).scale(quantum_int(2) / quantum_int(3)) +
                      (tl_compose(e2, e1, kap) + tl_compose(e1, e2, kap))
                          .scale(one / quantum_int(3));
        CHECK(p3 == expect);
    }
    SUBCASE("wenzl_verify passes for n <= 6") {
        for (int n = 1; n <= 6; ++n) {
            auto rep = wenzl_verify(n);
            CHECK(rep.nonzero);
            CHECK(rep.idempotent);
            CHECK(rep.annihilates);
            CHECK(rep.trace_ok);
        }
    }
}

TEST_CASE("specialization at roots of unity") {
    SUBCASE("q = zeta_{2d}, d odd: kappa specializes to 2cos(pi/d)") {
        for (int d : {3, 5}) {
            auto F = NumberField::cyclotomic(2 * d);
            FieldElement q = F->generator();
            FieldElement kappa = q + q.inverse();
            // 2cos(pi/d) = zeta_{2d} + zeta_{2d}^{-1}
            CHECK(kappa == cyclo_root_power(F, 1) + cyclo_root_power(F, -1));
            // [d] vanishes exactly; projectors up to p_{d-1} are defined
            CHECK_NOTHROW(wenzl_at(d - 1, q));
            CHECK_THROWS_AS(wenzl_at(d, q), UndefinedProjectorError);
        }
    }
    SUBCASE("generic specialization matches the generic projector") {
        auto F = NumberField::cyclotomic(16);  // q of order 16: [k] != 0 for k <= 4
        FieldElement q = F->generator();
        auto p3q = wenzl_at(3, q);
        auto p3 = wenzl(3);
        TLMorphism<FieldElement> expect(3, 3);
        for (auto& [pp, c] : p3.terms()) expect.add(pp, c.evaluate(q));
        CHECK(p3q == expect);
    }
}

TEST_CASE("wenzl_str prints e-words deterministically") {
    std::string s2 = wenzl_str(2);
    CHECK(s2.find("id") != std::string::npos);
    CHECK(s2.find("e1") != std::string::npos);
    CHECK(wenzl_str(3).find("e1*e2") != std::string::npos);
}
