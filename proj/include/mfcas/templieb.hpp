#pragma once

#include "mfcas/field.hpp"

#include <map>
#include <string>
#include <vector>

namespace mfcas {

struct UndefinedProjectorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rational function over Q in one variable q (numerator/denominator,
/// normalized monic denominator, gcd reduced).
class RationalFunction {
  public:
    RationalFunction() : num_{}, den_{Rat(1)} {}
    explicit RationalFunction(const Rat& c) : num_{}, den_{Rat(1)} {
        if (c != 0) num_ = {c};
    }
    static RationalFunction variable();  // q
    static RationalFunction from_poly(std::vector<Rat> coeffs);

    bool is_zero() const { return num_.empty(); }
    const std::vector<Rat>& num() const { return num_; }
    const std::vector<Rat>& den() const { return den_; }

    RationalFunction operator-() const;
    RationalFunction operator+(const RationalFunction& o) const;
    RationalFunction operator-(const RationalFunction& o) const;
    RationalFunction operator*(const RationalFunction& o) const;
    RationalFunction operator/(const RationalFunction& o) const;
    bool operator==(const RationalFunction& o) const;

    /// Evaluate at q = value; throws UndefinedProjectorError on a vanishing
    /// denominator.
    FieldElement evaluate(const FieldElement& value) const;

    std::string str() const;

  private:
    std::vector<Rat> num_, den_;  // dense, low to high
    void reduce();
};

/// Quantum integer [l] = (q^l - q^{-l})/(q - q^{-1}) as a rational function.
RationalFunction quantum_int(long l);

/// Non-crossing perfect matching of n bottom + m top points. Bottom points
/// are 0..n-1 left to right, top points n..n+m-1 left to right.
struct PlanarPairing {
    int n = 0, m = 0;
    std::vector<int> partner;  // involution on 0..n+m-1

    static PlanarPairing identity(int n);
    /// cup-cap generator e_i in TL(n): bottom i,i+1 joined, top i,i+1 joined.
    static PlanarPairing e_gen(int n, int i);
    bool planar() const;
    bool operator<(const PlanarPairing& o) const {
        return std::tie(n, m, partner) < std::tie(o.n, o.m, o.partner);
    }
    bool operator==(const PlanarPairing& o) const = default;
    std::string str() const;
};

/// All planar pairings in TL(n, m).
std::vector<PlanarPairing> enumerate_pairings(int n, int m);

/// Formal linear combination of planar (n, m)-pairings.
template <class K>
class TLMorphism {
  public:
    TLMorphism() = default;
    TLMorphism(int n, int m) : n_(n), m_(m) {}

    int n() const { return n_; }
    int m() const { return m_; }
    const std::map<PlanarPairing, K>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const PlanarPairing& p, const K& c);
    TLMorphism operator+(const TLMorphism& o) const;
    TLMorphism operator-(const TLMorphism& o) const;
    TLMorphism scale(const K& c) const;
    bool operator==(const TLMorphism& o) const { return terms_ == o.terms_; }

    static TLMorphism identity(int n, const K& one);
    static TLMorphism generator(int n, int i, const K& one);

  private:
    int n_ = 0, m_ = 0;
    std::map<PlanarPairing, K> terms_;
};

/// Vertical stacking g after f, closed loops become factors of
/// kappa = q + 1/q.
template <class K>
TLMorphism<K> tl_compose(const TLMorphism<K>& g, const TLMorphism<K>& f, const K& kappa);

/// Horizontal concatenation.
template <class K>
TLMorphism<K> tl_tensor(const TLMorphism<K>& f, const TLMorphism<K>& g);

/// Markov trace: close the diagram around the right; value
/// sum coeff * kappa^{#loops}.
template <class K>
K markov_trace(const TLMorphism<K>& f, const K& kappa, const K& one);

/// Wenzl-Jones projector p_n over Q(q), by the recursion
/// p_{n+1} = p_n - ([n]/[n+1]) p_n e_n p_n.
TLMorphism<RationalFunction> wenzl(int n);

/// The same recursion run at q = a field element; throws
/// UndefinedProjectorError at the first stage whose [k] vanishes.
TLMorphism<FieldElement> wenzl_at(int n, const FieldElement& q);

struct WenzlReport {
    bool nonzero = false;
    bool idempotent = false;
    bool annihilates = false;  // p_n e_i = e_i p_n = 0 for all i
    bool trace_ok = false;     // markov trace = [n+1]
    bool pass() const { return nonzero && idempotent && annihilates && trace_ok; }
};
WenzlReport wenzl_verify(int n);

/// Deterministic e-word printout of p_n (identity + e-word combinations).
std::string wenzl_str(int n);

extern template class TLMorphism<RationalFunction>;
extern template class TLMorphism<FieldElement>;

}  // namespace mfcas
