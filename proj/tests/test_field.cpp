#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfcas/field.hpp"

using namespace mfcas;

static std::string upoly_str(const std::vector<Rat>& p) {
    std::string s;
    for (size_t i = 0; i < p.size(); ++i) {
        if (!s.empty()) s += ",";
        s += p[i].get_str();
    }
    return s;
}

TEST_CASE("cyclotomic polynomials by exact division") {
    CHECK(upoly_str(cyclotomic_polynomial(1)) == "-1,1");
    CHECK(upoly_str(cyclotomic_polynomial(2)) == "1,1");
    CHECK(upoly_str(cyclotomic_polynomial(4)) == "1,0,1");
    CHECK(upoly_str(cyclotomic_polynomial(12)) == "1,0,-1,0,1");
    CHECK(upoly_str(cyclotomic_polynomial(30)) == "1,1,0,-1,-1,-1,0,1,1");
}

TEST_CASE("Phi_n(zeta_n) = 0 for n <= 30") {
    for (int n = 1; n <= 30; ++n) {
        auto F = NumberField::cyclotomic(n);
        auto phi = cyclotomic_polynomial(n);
        FieldElement z = F->generator();
        FieldElement acc = F->zero();
        FieldElement p = F->one();
        for (auto& c : phi) {
            acc += c * p;
            p = p * z;
        }
        CHECK(acc.is_zero());
        CHECK(z.pow(n) == F->one());
    }
}

TEST_CASE("field arithmetic and inversion in Q(zeta_12)") {
    auto F = NumberField::cyclotomic(12);
    FieldElement z = F->generator();
    FieldElement a = z.pow(5) - Rat(2) * F->one();
    FieldElement ai = a.inverse();
    CHECK(a * ai == F->one());
    CHECK((z.pow(7) * z.pow(5)) == F->one());
    CHECK(z.pow(-1) == z.pow(11));
    CHECK_THROWS_AS(F->zero().inverse(), ZeroDivisorError);
}

TEST_CASE("galois action is a field automorphism") {
    auto F = NumberField::cyclotomic(12);
    FieldElement z = F->generator();
    FieldElement a = z + Rat(3) * z.pow(2);
    FieldElement b = z.pow(5) - F->one();
    for (long nu : {1L, 5L, 7L, 11L}) {
        CHECK(a.galois(nu) * b.galois(nu) == (a * b).galois(nu));
        CHECK(a.galois(nu) + b.galois(nu) == (a + b).galois(nu));
    }
    CHECK(a.galois(5).galois(5) == a.galois(25 % 12));
    CHECK(a.galois(1) == a);
    CHECK_THROWS(a.galois(4));
}

TEST_CASE("sigma_5 on t_cft for E6") {
    // t_cft = -(z + z^-1)/3 in Q(zeta_12); sigma_5(t_cft) = -(z^5+z^-5)/3 = -t_cft
    auto F = NumberField::cyclotomic(12);
    FieldElement z = F->generator();
    FieldElement t = Rat(-1, 3) * (z + z.pow(-1));
    FieldElement s5 = t.galois(5);
    CHECK(s5 == Rat(-1, 3) * (z.pow(5) + z.pow(-5)));
    CHECK(s5 == -t);
    CHECK(t * t == F->from_rat(Rat(1, 3)));  // t^2 = 1/3
}

TEST_CASE("tower extension with radical relation and inversion") {
    // Q(i)(a) with a^3 = -2i  (the d=3 transpose witness field)
    auto Qi = NumberField::cyclotomic(4);
    FieldElement i = Qi->generator();
    auto F = Qi->extend("a", 3, Rat(-2) * i);
    FieldElement a = F->generator();
    CHECK(a.pow(3) == (Rat(-2) * i).lift_to(F));
    FieldElement inv = a.inverse();
    CHECK(a * inv == F->one());
    FieldElement b = a * a - i.lift_to(F) * a + F->one();
    CHECK(b * b.inverse() == F->one());
}

TEST_CASE("etale top level: s^4 = 1 has zero divisors but units invert") {
    auto F = NumberField::rationals()->extend_min_poly(
        "s", {Rat(-1), Rat(0), Rat(0), Rat(0), Rat(1)});  // s^4 - 1
    FieldElement s = F->generator();
    CHECK(s * s.inverse() == F->one());
    CHECK(s.pow(4) == F->one());
    FieldElement zd = s * s - F->one();  // (s^2-1) is a zero divisor
    CHECK_THROWS_AS(zd.inverse(), ZeroDivisorError);
    FieldElement u = s + Rat(2) * F->one();  // unit
    CHECK(u * u.inverse() == F->one());
}

TEST_CASE("minimal polynomial via Krylov") {
    auto F = NumberField::cyclotomic(5);
    FieldElement z = F->generator();
    FieldElement kappa = z + z.pow(-1);  // 2cos(2pi/5), satisfies x^2+x-1
    auto m = kappa.min_poly_over_Q();
    REQUIRE(m.size() == 3);
    CHECK(m[0] == Rat(-1));
    CHECK(m[1] == Rat(1));
    CHECK(m[2] == Rat(1));

    // 2cos(pi/5) in Q(zeta_10): x^2 - x - 1
    auto F10 = NumberField::cyclotomic(10);
    FieldElement w = F10->generator();
    auto m2 = (w + w.pow(-1)).min_poly_over_Q();
    REQUIRE(m2.size() == 3);
    CHECK(m2[0] == Rat(-1));
    CHECK(m2[1] == Rat(-1));
    CHECK(m2[2] == Rat(1));
}

TEST_CASE("lift through towers") {
    auto Qt = NumberField::rationals()->extend_min_poly("t", {Rat(-1, 3), Rat(0), Rat(1)});
    FieldElement t = Qt->generator();
    auto Qts = Qt->extend("s", 12, Rat(-576) * (Rat(26) * t - Rat(15) * Qt->one()));
    FieldElement tl = t.lift_to(Qts);
    FieldElement s = Qts->generator();
    CHECK(s.pow(12) == Rat(-576) * (Rat(26) * tl - Rat(15) * Qts->one()));
    CHECK(tl * tl == Qts->from_rat(Rat(1, 3)));
    // s^-1 * s == 1 through the radical relation
    CHECK(s.inverse() * s == Qts->one());
}
