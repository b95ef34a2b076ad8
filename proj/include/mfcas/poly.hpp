#pragma once

#include <functional>
#include <optional>

#include "mfcas/field.hpp"

namespace mfcas {

enum class VarRole { Left, Right, Internal };

struct Variable {
    std::string name;
    Rat weight;  // >= 0, exact
    VarRole role = VarRole::Left;
};

struct RingMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotDivisibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotHomogeneousError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Ordered variable list with rational weights over a coefficient field.
class WeightedRing {
  public:
    WeightedRing(FieldPtr field, std::vector<Variable> vars);

    const FieldPtr& field() const { return field_; }
    const std::vector<Variable>& vars() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    int index_of(const std::string& name) const;  // -1 if absent
    std::vector<int> indices_with_role(VarRole r) const;

    bool same(const WeightedRing& o) const;

  private:
    FieldPtr field_;
    std::vector<Variable> vars_;
};

using RingPtr = std::shared_ptr<const WeightedRing>;

using Exponents = std::vector<int>;

/// Graded-lex over the declared variable order: higher total degree first,
/// ties broken lexicographically (earlier variable bigger).
struct GrlexGreater {
    bool operator()(const Exponents& a, const Exponents& b) const {
        long da = 0, db = 0;
        for (int x : a) da += x;
        for (int x : b) db += x;
        if (da != db) return da > db;
        return a > b;
    }
};

/// Sparse multivariate polynomial; terms kept in descending graded-lex.
class MultiPoly {
  public:
    MultiPoly() = default;
    explicit MultiPoly(RingPtr ring) : ring_(std::move(ring)) {}
    MultiPoly(RingPtr ring, std::map<Exponents, FieldElement, GrlexGreater> terms)
        : ring_(std::move(ring)), terms_(std::move(terms)) {}

    static MultiPoly constant(const RingPtr& ring, const FieldElement& c);
    static MultiPoly constant(const RingPtr& ring, const Rat& c);
    static MultiPoly var(const RingPtr& ring, const std::string& name, int power = 1);
    static MultiPoly monomial(const RingPtr& ring, Exponents e, const FieldElement& c);

    const RingPtr& ring() const { return ring_; }
    const std::map<Exponents, FieldElement, GrlexGreater>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }
    bool is_constant() const;
    FieldElement constant_value() const;

    const Exponents& leading_exponents() const;
    const FieldElement& leading_coeff() const;

    MultiPoly operator-() const;
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
    MultiPoly& operator-=(const MultiPoly& o) { return *this = *this - o; }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
    bool operator==(const MultiPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    MultiPoly scale(const FieldElement& c) const;
    MultiPoly scale(const Rat& c) const;

    /// Exact quotient; throws NotDivisibleError when none exists.
    MultiPoly exact_div(const MultiPoly& q) const;
    MultiPoly derivative(const std::string& var) const;
    /// Common weighted degree of all terms; NotHomogeneousError otherwise.
    Rat weighted_degree() const;
    Rat weighted_degree_of(const Exponents& e) const;
    bool is_homogeneous() const;
    long total_degree() const;
    int degree_in(int var_index) const;

    /// Substitute variable -> polynomial (in the same or another ring).
    MultiPoly substitute(const std::string& var, const MultiPoly& value) const;
    /// Simultaneous scalar rescale x_i -> c_i * x_i.
    MultiPoly rescale_vars(const std::vector<FieldElement>& factors) const;
    /// Move to another ring mapping variables by name (coefficients lifted
    /// with `coeff_map` when given, identity otherwise).
    MultiPoly map_ring(const RingPtr& target,
                       const std::function<FieldElement(const FieldElement&)>& coeff_map = {}) const;
    /// Set the named variables to zero.
    MultiPoly set_zero(const std::vector<std::string>& vars) const;
    /// Rename a variable in place (same weight slot).
    MultiPoly rename_var(const std::string& from, const std::string& to,
                         const RingPtr& target) const;
    /// Apply a coefficientwise map (e.g. a Galois action).
    MultiPoly map_coeffs(const std::function<FieldElement(const FieldElement&)>& f) const;
    FieldElement coeff_of(const Exponents& e) const;

    std::string str() const;

  private:
    RingPtr ring_;
    std::map<Exponents, FieldElement, GrlexGreater> terms_;
    void insert_term(const Exponents& e, const FieldElement& c);
    friend MultiPoly parse_poly(const RingPtr&, const std::string&);
};

/// Whitespace-insensitive parser for the canonical text syntax:
/// terms joined by +/-, rational coefficients a/b, powers x^3, parentheses
/// and * products; field generators by their declared symbol.
MultiPoly parse_poly(const RingPtr& ring, const std::string& text);

MultiPoly gcd_univariate(const MultiPoly& a, const MultiPoly& b);

}  // namespace mfcas
