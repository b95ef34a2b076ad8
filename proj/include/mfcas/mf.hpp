#pragma once

#include <optional>

#include "mfcas/poly.hpp"

namespace mfcas {

struct SquareMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GradingViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InterfaceMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedRankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using PolyMat = std::vector<std::vector<MultiPoly>>;

PolyMat mat_mul(const PolyMat& a, const PolyMat& b);
PolyMat mat_add(const PolyMat& a, const PolyMat& b);
PolyMat mat_sub(const PolyMat& a, const PolyMat& b);
PolyMat mat_neg(const PolyMat& a);
PolyMat mat_transpose(const PolyMat& a);
PolyMat mat_identity(const RingPtr& ring, size_t n);
PolyMat mat_scale_poly(const PolyMat& a, const MultiPoly& p);
bool mat_is_zero(const PolyMat& a);

struct Grading {
    std::vector<Rat> even;  // charge per M0 basis element
    std::vector<Rat> odd;   // charge per M1 basis element
};

/// Z2-graded free module with twisted differential blocks d1 : M1 -> M0 and
/// d0 : M0 -> M1 satisfying d1 d0 = d0 d1 = (W - V) id. Variables are
/// partitioned by role; internal variables arise from tensor contraction.
class MatrixFactorization {
  public:
    MatrixFactorization(RingPtr ring, MultiPoly W, MultiPoly V, PolyMat d1, PolyMat d0,
                        std::optional<Grading> grading = std::nullopt, bool check = true);

    const RingPtr& ring() const { return ring_; }
    const MultiPoly& potential_left() const { return W_; }
    const MultiPoly& potential_right() const { return V_; }
    const PolyMat& d1() const { return d1_; }
    const PolyMat& d0() const { return d0_; }
    size_t rank0() const { return d1_.size(); }
    size_t rank1() const { return d1_.empty() ? 0 : d1_[0].size(); }
    bool graded() const { return grading_.has_value(); }
    const Grading& grading() const { return *grading_; }
    bool zero_flagged() const { return zero_flagged_; }
    void flag_zero() { zero_flagged_ = true; }

    void check_square() const;
    void check_grading() const;

    std::vector<std::string> left_vars() const;
    std::vector<std::string> right_vars() const;
    std::vector<std::string> internal_vars() const;
    std::vector<std::string> outer_vars() const;

    /// Shifted factorization M[1]: blocks exchanged, both negated.
    MatrixFactorization shift() const;

    std::string describe() const;

  private:
    RingPtr ring_;
    MultiPoly W_, V_;
    PolyMat d1_, d0_;
    std::optional<Grading> grading_;
    bool zero_flagged_ = false;
};

using MFPtr = std::shared_ptr<const MatrixFactorization>;

/// Morphism of matrix factorizations. Even: blocks e (M0->N0) and o
/// (M1->N1). Odd: blocks e (M0->N1) and o (M1->N0).
struct MFMorphism {
    MFPtr source;
    MFPtr target;
    int z2 = 0;  // 0 even, 1 odd
    PolyMat e, o;

    /// delta f = d^N f - (-1)^{|f|} f d^M, components as a pair of blocks.
    std::pair<PolyMat, PolyMat> delta() const;
    bool is_closed() const;
    /// C-degree if every nonzero entry satisfies the graded constraint.
    std::optional<Rat> c_degree() const;
    MFMorphism compose(const MFMorphism& inner) const;  // this after inner
    MFMorphism scale(const FieldElement& c) const;
    MFMorphism operator+(const MFMorphism& other) const;
    MFMorphism operator-(const MFMorphism& other) const;
};

MFMorphism identity_morphism(const MFPtr& m);

/// Validated construction (spec mf_make).
MFPtr mf_make(RingPtr ring, const MultiPoly& W, const MultiPoly& V, PolyMat d1, PolyMat d0,
              std::optional<Grading> grading = std::nullopt);

/// Unit factorization I_W of W(x) - W(x') as the exterior algebra with the
/// difference-quotient Koszul differential; primed right variables get the
/// given suffix. Graded with the unit convention (theta_empty at charge 0).
MFPtr unit_mf(const MultiPoly& W, const std::string& prime_suffix = "'");

/// Tensor product over the matched middle variables (right vars of bp ==
/// left vars of b, matched by name; they become internal in the result).
MFPtr mf_tensor(const MFPtr& bp, const MFPtr& b);

/// External product over disjoint variable sets (no contraction).
MFPtr mf_external(const MFPtr& a, const MFPtr& b);

/// Right dual of a rank-1 bifactorization in one variable on each side:
/// d1+(x,y) = -d1(y,x), d0+(x,y) = d0(y,x), with the graded shift rule.
MFPtr mf_dual(const MFPtr& m);

/// Right adjoint presentation of a finite-rank X of W(x)-V(u): variables u
/// renamed with the suffix, blocks transposed, factorizing V(u')-W(x).
MFPtr mf_adjoint(const MFPtr& m, const std::string& prime_suffix = "'");

/// Permutation-type bifactorization P_S of x^d - y^d over Q(zeta_d);
/// graded flag puts alpha = (1-|S|)/d (the hat convention). P_empty and
/// P_{Z_d} come back zero-flagged.
MFPtr permutation_mf(int d, const std::vector<int>& S, bool graded = true,
                     const std::string& xname = "x", const std::string& yname = "y");

/// Twisted bifactorization _aM_b of x^d - y^d presented over the plain
/// ring: entries substituted x -> zeta^a x, y -> zeta^{-b} y.
MFPtr twist(const MFPtr& m, int a, int b);

/// Explicit iso s_{a,b} : P_{S-a-b} -> twist(P_S, a, b): even block 1, odd
/// block zeta^{-a|S|}.
MFMorphism perm_twist_iso(int d, const std::vector<int>& S, int a, int b);

/// Z_d-equivariant structure tau_{S;a} = zeta^{((d+1)/2) a (|S|-1)} s_{a,-a}.
MFMorphism perm_equivariance(int d, const std::vector<int>& S, int a);

/// Left/right unit isomorphisms lambda_M : I (x) M -> M, rho_M : M (x) I -> M
/// as explicit morphisms out of the tensor factorization. The returned
/// morphisms have polynomial blocks over the tensor ring; applying them
/// means "multiply, then evaluate the internal variable to the outer one",
/// which `contract_*` in homotopy.hpp performs.
struct UnitIsos {
    MFPtr i_tensor_m;  // I (x) M
    MFMorphism lambda;
    std::pair<std::string, std::string> lambda_subst;  // internal -> outer
    MFPtr m_tensor_i;  // M (x) I
    MFMorphism rho;
    std::pair<std::string, std::string> rho_subst;
};
UnitIsos unit_morphisms(const MFPtr& m);

/// Closedness of an evaluation-type morphism out of a tensor object,
/// checked after substituting the listed internal variables.
bool contraction_closed(const MFMorphism& f,
                        const std::vector<std::pair<std::string, std::string>>& subs);

/// One-variable unit factorization over a fresh (left, right) variable pair.
MFPtr unit_mf_1var(const MultiPoly& W, const std::string& leftname, const std::string& rightname);

/// Rename one variable of a factorization (role reassigned as given).
MFPtr rename_mf_var(const MFPtr& m, const std::string& from, const std::string& to, VarRole role);

/// Present a factorization over a larger ring containing its variables.
MFPtr mf_lift(const MFPtr& m, const RingPtr& ring);

/// Direct sum.
MFPtr mf_direct_sum(const MFPtr& a, const MFPtr& b);

/// Entry-wise Galois action (cyclotomic coefficient field).
MFPtr mf_galois(const MFPtr& m, long nu);

/// Helper: product prod_{j in S} (x - zeta^j y) over Q(zeta_d).
MultiPoly root_product(const RingPtr& ring, int d, const std::vector<int>& S,
                       const std::string& xname, const std::string& yname);

}  // namespace mfcas
