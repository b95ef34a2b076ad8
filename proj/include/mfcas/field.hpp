#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfcas {

using Rat = mpq_class;

/// Canonicalized rational a/b (mpq_class(a, b) alone does not reduce).
inline Rat fraction(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

struct ZeroDivisorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class FieldElement;

/// A number field presented as a triangular tower over Q.
///
/// Level k adjoins a generator g_k with a monic relation
///   g_k^{deg_k} = r_k(g_1, ..., g_k)
/// where r_k only involves exponents < deg_k in g_k. A single level with
/// r = -(cyclotomic tail) gives Q(zeta_n); stacking a level s^N = f(t) on
/// top of Q(t) gives the parameter rings of the orbifold witnesses. The
/// tower may be etale rather than a field (e.g. s^(2b) = 1); inversion
/// then throws ZeroDivisorError on non-units.
class NumberField : public std::enable_shared_from_this<NumberField> {
  public:
    struct Level {
        std::string symbol;
        int degree = 1;
        // power_rule[j] = coefficient element (in the subtower up to and
        // including this level, with exponent < degree at this level) of
        // the expansion of g^degree. Stored as raw coordinate map.
        std::map<std::vector<int>, Rat> power_rule;
    };

    static std::shared_ptr<const NumberField> rationals();
    /// Q(zeta_n), minimal polynomial the n-th cyclotomic polynomial.
    static std::shared_ptr<const NumberField> cyclotomic(int n);
    /// Adjoin a generator with relation g^deg = rhs (rhs over this field).
    std::shared_ptr<const NumberField> extend(const std::string& symbol, int deg,
                                              const FieldElement& rhs) const;
    /// Adjoin a generator with monic minimal polynomial
    /// m(g) = g^deg + c_{deg-1} g^{deg-1} + ... + c_0, coefficients rational.
    std::shared_ptr<const NumberField> extend_min_poly(const std::string& symbol,
                                                       const std::vector<Rat>& monic_coeffs) const;

    int levels() const { return static_cast<int>(levels_.size()); }
    const Level& level(int k) const { return levels_[k]; }
    /// The tower truncated to its first k levels.
    std::shared_ptr<const NumberField> subtower(int k) const;
    int cyclotomic_order() const { return cyclo_order_; }
    /// Total degree over Q (product of level degrees).
    long total_degree() const;
    bool same(const NumberField& other) const;

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement from_rat(const Rat& r) const;
    FieldElement generator(int k = -1) const;  // default: top generator

    std::string describe() const;

  private:
    friend class FieldElement;
    std::vector<Level> levels_;
    int cyclo_order_ = 0;  // n when level 0 is Q(zeta_n), else 0
};

using FieldPtr = std::shared_ptr<const NumberField>;

/// Element of a NumberField: sparse rational coordinates on the reduced
/// power basis g_1^{e_1}...g_k^{e_k}, 0 <= e_i < deg_i.
class FieldElement {
  public:
    FieldElement() : field_(NumberField::rationals()) {}
    explicit FieldElement(const Rat& r) : field_(NumberField::rationals()) {
        if (r != 0) coords_[{}] = r;
    }
    FieldElement(FieldPtr f, std::map<std::vector<int>, Rat> coords)
        : field_(std::move(f)), coords_(std::move(coords)) {}

    const FieldPtr& field() const { return field_; }
    const std::map<std::vector<int>, Rat>& coords() const { return coords_; }

    bool is_zero() const { return coords_.empty(); }
    bool is_rational() const;
    Rat rational_value() const;  // throws if not rational

    FieldElement operator-() const;
    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    FieldElement inverse() const;  // throws ZeroDivisorError on non-units
    FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }
    FieldElement pow(long e) const;  // negative e inverts

    /// Map into a larger tower whose lower levels literally contain this
    /// field's levels (by symbol and degree).
    FieldElement lift_to(const FieldPtr& bigger) const;

    /// Galois action zeta_n -> zeta_n^nu on a level-0 cyclotomic tower.
    FieldElement galois(long nu) const;

    /// Monic minimal polynomial over Q (Krylov linear algebra).
    std::vector<Rat> min_poly_over_Q() const;

    std::string str() const;

  private:
    friend class NumberField;
    FieldPtr field_;
    std::map<std::vector<int>, Rat> coords_;  // exponent vector (len =
                                              // levels, trailing zeros
                                              // trimmed) -> coefficient

    void reduce();
    static FieldElement mul_impl(const FieldElement& a, const FieldElement& b);
};

FieldElement operator*(const Rat& r, const FieldElement& e);

/// n-th cyclotomic polynomial, dense rational coefficients (low to high).
std::vector<Rat> cyclotomic_polynomial(int n);

/// zeta_n^k as an element of Q(zeta_n).
FieldElement cyclo_root_power(const FieldPtr& field, long k);

}  // namespace mfcas
