#pragma once

#include "mfcas/linalg.hpp"
#include "mfcas/mf.hpp"

namespace mfcas {

/// Smith normal form over k[y] (single-variable ring): S = U * A * V with
/// U, V unimodular and S diagonal with a divisibility chain.
struct SmithResult {
    PolyMat U, S, V;
    size_t rank = 0;  // number of nonzero diagonal entries
};

SmithResult smith_normal_form(const PolyMat& A, const RingPtr& ring);

/// Free rank and torsion divisors of a finitely presented k[y]-module.
struct PIDModulePresentation {
    long free_rank = 0;
    std::vector<MultiPoly> divisors;  // monic, nonunit, divisibility chain
    long torsion_dim() const {
        long d = 0;
        for (auto& p : divisors) d += p.total_degree();
        return d;
    }
};

/// ker(Dout)/im(Din) for module maps over k[y] (or over k when the ring has
/// no variables), with explicit k-linear coordinates on the torsion part.
class HomologySpace {
  public:
    /// Dout: r -> r'; Din: r'' -> r (matrices over a <=1-variable ring).
    HomologySpace(const PolyMat& Dout, const PolyMat& Din, const RingPtr& ring, size_t rank_in);

    const PIDModulePresentation& presentation() const { return pres_; }
    long dim() const { return static_cast<long>(torsion_basis_.size()); }
    bool finite_dimensional() const { return pres_.free_rank == 0; }

    /// Coordinates of a kernel vector's class in the torsion k-basis.
    /// Throws if the vector is not in the kernel or the space is infinite
    /// dimensional.
    FRow coords(const std::vector<MultiPoly>& v) const;

    /// Representative vectors for the k-basis classes.
    std::vector<std::vector<MultiPoly>> basis_reps() const;

  private:
    RingPtr ring_;
    size_t ambient_ = 0;
    PIDModulePresentation pres_;
    PolyMat kernel_;                   // ambient x k, columns a kernel basis
    SmithResult ksmith_;               // cached Smith data of kernel_
    SmithResult rel_;                  // Smith of the relation matrix in kernel coords
    std::vector<std::pair<size_t, long>> torsion_basis_;  // (smith position, y-power)
    std::vector<MultiPoly> smith_divisor_;                // divisor per smith position (zero poly = free)
};

}  // namespace mfcas
