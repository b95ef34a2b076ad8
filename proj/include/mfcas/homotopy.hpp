#pragma once

#include "mfcas/pidmod.hpp"

namespace mfcas {

struct NotClosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BoundTooSmallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoProgressError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HomologyReport {
    long h0 = 0;
    long h1 = 0;
    bool operator==(const HomologyReport&) const = default;
};

/// Homology of the constant complex M / <all variables> M.
HomologyReport bar_homology(const MFPtr& m);

/// Kills the outer variables and computes homology over k[internal]
/// (exactly one internal variable) via Smith normal form.
std::pair<PIDModulePresentation, PIDModulePresentation> internal_homology(const MFPtr& m);

/// True iff H(f) is an isomorphism (Z2-even closed f required). Sources and
/// targets may carry at most one internal variable.
bool is_iso_H(const MFMorphism& f);

/// Basis of closed degree-w morphisms modulo exact ones, graded case.
struct MorphismBasis {
    Rat charge{0};
    long closed_dim = 0;
    long quotient_dim = 0;
    std::vector<MFMorphism> reps;  // representatives of the quotient basis
};
MorphismBasis hom_graded(const MFPtr& m, const MFPtr& n, const Rat& charge);

/// Charge spectrum: quotient dimensions for charges w in
/// {0, step, 2*step, ..., max}; zero entries are omitted.
std::vector<std::pair<Rat, long>> hom_graded_spectrum(const MFPtr& m, const MFPtr& n,
                                                      const Rat& step, const Rat& max);

/// dim of ZMF/boundaries with all entries of weighted degree <= bound
/// (ungraded morphism spaces, degree-bounded; stabilizes once the bound
/// clears the interesting degrees).
long hom_ungraded_dim(const MFPtr& m, const MFPtr& n, const Rat& bound);

/// Solvability of delta h = f - g with h entries bounded in weighted
/// degree (exact degrees are used instead when both ends are graded and
/// f - g has a well-defined C-degree).
bool homotopic(const MFMorphism& f, const MFMorphism& g, const Rat& bound);
bool null_homotopic(const MFMorphism& f, const Rat& bound);

/// Expand internal-variable powers up to the bound and split off
/// contractible pairs until no unit entries remain. The result satisfies
/// the square identity exactly or BoundTooSmallError / NoProgressError is
/// thrown. Graded inputs derive a default bound from the grading window.
MFPtr finite_rank_reduce(const MFPtr& m, std::optional<Rat> bound = std::nullopt);

/// The explicit graded embeddings g-, g+ of the two summands of
/// P^_{a:1} (x) P^_{b:mu} with closedness, degree-0 and H-isomorphism
/// verification.
struct FusionReport {
    MFPtr tensor;       // P^_{a:1} (x) P^_{b:mu}
    MFPtr q_minus;      // P^_{a+b+1:mu-1}
    MFPtr q_plus;       // P^_{a+b:mu+1} (zero-flagged when mu = d-2)
    MFMorphism g_minus;
    MFMorphism g_plus;
    bool closed = false;
    bool degree0 = false;
    bool h_iso = false;
    bool pass() const { return closed && degree0 && h_iso; }
};
FusionReport fusion_witness(int d, int a, int b, int mu);

/// Decomposition of P^_{a:lam} (x) P^_{b:mu} per the su(2)-type fusion rule
/// (zero summands dropped): list of (start index, lambda).
std::vector<std::pair<int, int>> fusion_rule(int d, int a, int lam, int b, int mu);

}  // namespace mfcas
