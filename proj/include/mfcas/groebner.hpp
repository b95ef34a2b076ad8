#pragma once

#include "mfcas/poly.hpp"

namespace mfcas {

/// Reduced Groebner basis in graded-lex order, Buchberger with sugar
/// pair selection and monic normalization.
class GroebnerBasis {
  public:
    explicit GroebnerBasis(std::vector<MultiPoly> generators);

    const std::vector<MultiPoly>& generators() const { return gens_; }
    const RingPtr& ring() const { return ring_; }

    /// Remainder of multivariate division by the basis; zero iff p lies in
    /// the ideal.
    MultiPoly normal_form(const MultiPoly& p) const;
    bool contains(const MultiPoly& p) const { return normal_form(p).is_zero(); }

  private:
    RingPtr ring_;
    std::vector<MultiPoly> gens_;
};

}  // namespace mfcas
