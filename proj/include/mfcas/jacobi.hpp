#pragma once

#include "mfcas/groebner.hpp"

namespace mfcas {

struct InfiniteDimensionalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateHessianError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monomial basis data of S/Jac(W) for an isolated singularity.
struct JacobiRingData {
    GroebnerBasis gb;
    std::vector<Exponents> basis;  // monomials under the staircase
    long milnor = 0;
    Exponents socle;      // unique top weighted-degree basis monomial
    Rat socle_degree{0};  // its weighted degree
};

/// Basis and Milnor number; throws InfiniteDimensionalError (message names
/// a witness variable) when Jac(W) is not zero-dimensional.
JacobiRingData jacobi_ring(const MultiPoly& W);

/// Hessian determinant det(d^2 W / dx_i dx_j).
MultiPoly hessian(const MultiPoly& W);

/// Grothendieck residue Res[f dx / (dW/dx_1, ..., dW/dx_n)] by Hessian
/// normalization: Res[Hess W] = mu.
FieldElement residue(const MultiPoly& f, const MultiPoly& W);
FieldElement residue(const MultiPoly& f, const JacobiRingData& jd, const MultiPoly& W);

/// Independent evaluation via the transformation law: express pure powers
/// x_i^{a_i} over the partials by degree-bounded linear algebra, then read
/// the residue off as a single coefficient of f*det(h).
FieldElement residue_transform(const MultiPoly& f, const MultiPoly& W);

/// Central charge c_W = sum_i (1 - w_i) for a weighted-homogeneous
/// potential of degree 2 in its declared weights.
Rat central_charge(const MultiPoly& W);

}  // namespace mfcas
