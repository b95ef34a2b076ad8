#pragma once

#include "mfcas/homotopy.hpp"
#include "mfcas/jacobi.hpp"

namespace mfcas {

/// The residue-style functional G_M(f) of a rank-1 bifactorization M of
/// x^d - y^d: the y^{-1} Laurent coefficient of
/// (x - z - y) d0(y,z) f / (y (y^d - z^d)), a polynomial in x, z. Variables
/// are passed by name: f lives in vars (xo, yi, zo) with yi integrated out.
MultiPoly gm_eval(const MFPtr& m, const MultiPoly& f, const std::string& xo,
                  const std::string& yi, const std::string& zo);

/// ev_M : M+ (x) M -> I and coev_M : I -> M (x) M+ for rank-1 M, plus the
/// self-duality pair through the explicit iso t : P_{-S} -> (P_S)+.
struct DualityData {
    MFPtr m;        // the input factorization over (x, y)
    MFPtr dual;     // M+ over (x, y)
    MFPtr mp_m;     // M+(x,ym) (x) M(ym,z), internal ym
    MFPtr m_mp;     // M(x,ym) (x) M+(ym,z)
    MFPtr unit_xz;  // I of the shared potential over (x, z)
    MFMorphism ev;    // mp_m -> unit_xz
    MFMorphism coev;  // unit_xz -> m_mp
};
DualityData ev_coev(const MFPtr& m);

/// Left/right quantum dimensions via the supertrace residue formula; exact
/// scalars for graded factorizations.
struct QuantumDimensions {
    FieldElement left, right;
};
QuantumDimensions qdim(const MFPtr& x);

/// Unit isomorphism inverses for rank-1 X: lambda^{-1} : X -> I (x) X and
/// rho^{-1} : X -> X (x) I, closed, with lambda lambda^{-1} = id exactly.
struct UnitInverses {
    UnitIsos isos;
    MFMorphism lambda_inv;
    MFMorphism rho_inv;
};
UnitInverses unit_inverses(const MFPtr& m);

/// Zig-zag (snake) identities for ev/coev up to homotopy.
struct ZigzagReport {
    bool snake1 = false;  // (id (x) ev)(coev (x) id) ~ id on M
    bool snake2 = false;  // (ev (x) id)(id (x) coev) ~ id on M+
    bool pass() const { return snake1 && snake2; }
};
ZigzagReport check_zigzag(const MFPtr& m, bool flip_sign_control = false);

/// Self-duality pair u = ev_T (t (x) id), n = (id (x) t^{-1}) coev_T for
/// T = P_{(d-1)/2 : 1}, d odd; kappa = u0 n0 in Q(zeta_d), reported in
/// Q(zeta_{2d}) with its minimal polynomial over Q.
struct UnPairReport {
    FieldElement kappa;       // in Q(zeta_{2d})
    FieldElement kappa_zd;    // the same scalar inside Q(zeta_d)
    std::vector<Rat> kappa_min_poly;
    bool closed = false;
    bool degree0 = false;
    bool equivariant = false;  // Z_d-equivariance of ev, coev, u, n squares
    bool pass() const { return closed && degree0 && equivariant; }
};
UnPairReport un_pair(int d);

}  // namespace mfcas
