#include "mfcas/homotopy.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "mfcas/linalg.hpp"

namespace mfcas {

namespace {

// ---------------------------------------------------------------------------
// Sparse linear algebra over the coefficient field

using SpRow = std::vector<std::pair<size_t, FieldElement>>;  // sorted by column

void sprow_axpy(SpRow& r, const FieldElement& c, const SpRow& p) {
    // r += c * p, keeping sorted order
    SpRow out;
    out.reserve(r.size() + p.size());
    size_t i = 0, j = 0;
    while (i < r.size() || j < p.size()) {
        if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
            out.push_back(r[i++]);
        } else if (i == r.size() || p[j].first < r[i].first) {
            FieldElement v = c * p[j].second;
            if (!v.is_zero()) out.emplace_back(p[j].first, std::move(v));
            ++j;
        } else {
            FieldElement v = r[i].second + c * p[j].second;
            if (!v.is_zero()) out.emplace_back(r[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    r = std::move(out);
}

struct SparseElim {
    std::map<size_t, SpRow> pivots;  // column -> normalized pivot row
    long rank = 0;

    // Reduce a row against current pivots; if nonzero remains, install a new
    // pivot and return true.
    bool add_row(SpRow row) {
        while (!row.empty()) {
            size_t lead = row.front().first;
            auto it = pivots.find(lead);
            if (it == pivots.end()) {
                FieldElement inv = row.front().second.inverse();
                for (auto& [c, v] : row) v = v * inv;
                pivots.emplace(lead, std::move(row));
                ++rank;
                return true;
            }
            FieldElement c = -row.front().second;
            sprow_axpy(row, c, it->second);
        }
        return false;
    }

    // Fully reduce without installing.
    SpRow reduce(SpRow row) const {
        bool progress = true;
        while (progress && !row.empty()) {
            progress = false;
            auto it = pivots.find(row.front().first);
            if (it != pivots.end()) {
                FieldElement c = -row.front().second;
                sprow_axpy(row, c, it->second);
                progress = true;
            }
        }
        return row;
    }
};

// ---------------------------------------------------------------------------
// Monomial enumeration

void monomials_rec(const RingPtr& ring, const Rat& delta, bool exact, size_t i, Exponents& cur,
                   std::vector<Exponents>& out) {
    if (i == cur.size()) {
        if (!exact || delta == 0) out.push_back(cur);
        return;
    }
    const Rat& w = ring->vars()[i].weight;
    if (w == 0) throw std::invalid_argument("zero-weight variable in degree enumeration");
    for (int e = 0;; ++e) {
        Rat rest = delta - Rat(e) * w;
        if (rest < 0) break;
        cur[i] = e;
        monomials_rec(ring, rest, exact, i + 1, cur, out);
    }
    cur[i] = 0;
}

std::vector<Exponents> monomials_exact(const RingPtr& ring, const Rat& delta) {
    std::vector<Exponents> out;
    if (delta < 0) return out;
    Exponents cur(static_cast<size_t>(ring->nvars()), 0);
    monomials_rec(ring, delta, true, 0, cur, out);
    return out;
}

std::vector<Exponents> monomials_up_to(const RingPtr& ring, const Rat& delta) {
    std::vector<Exponents> out;
    if (delta < 0) return out;
    Exponents cur(static_cast<size_t>(ring->nvars()), 0);
    monomials_rec(ring, delta, false, 0, cur, out);
    return out;
}

// ---------------------------------------------------------------------------
// Generic morphism-space solver
//
// Unknowns: coefficients of block entries on enumerated monomials.
// Block layout for parity p between M and N:
//   p=0:  E: N0 x M0, O: N1 x M1      p=1:  E: N1 x M0, O: N0 x M1

struct BlockShape {
    size_t rows = 0, cols = 0;
    // per (i,j): list of allowed monomials
    std::vector<std::vector<std::vector<Exponents>>> monos;
};

struct HomProblem {
    MFPtr m, n;
    int parity = 0;
    BlockShape E, O;
    std::vector<std::tuple<int, size_t, size_t, size_t>> unknowns;  // (block 0/1, i, j, mono idx)
    std::map<std::tuple<int, size_t, size_t, Exponents>, size_t> unknown_index;

    size_t count() const { return unknowns.size(); }

    void enumerate(const std::function<std::optional<Rat>(int, size_t, size_t)>& exact_degree,
                   std::optional<Rat> bound) {
        auto ring = m->ring();
        auto fill = [&](int blk, BlockShape& bs, size_t rows, size_t cols) {
            bs.rows = rows;
            bs.cols = cols;
            bs.monos.assign(rows, std::vector<std::vector<Exponents>>(cols));
            for (size_t i = 0; i < rows; ++i)
                for (size_t j = 0; j < cols; ++j) {
                    std::vector<Exponents> ms;
                    if (exact_degree) {
                        auto d = exact_degree(blk, i, j);
                        if (d) ms = monomials_exact(ring, *d);
                    } else {
                        ms = monomials_up_to(ring, *bound);
                    }
                    for (size_t t = 0; t < ms.size(); ++t) {
                        unknown_index[{blk, i, j, ms[t]}] = unknowns.size();
                        unknowns.emplace_back(blk, i, j, t);
                    }
                    bs.monos[i][j] = std::move(ms);
                }
        };
        size_t n0 = n->rank0(), n1 = n->rank1(), m0 = m->rank0(), m1 = m->rank1();
        if (parity == 0) {
            fill(0, E, n0, m0);
            fill(1, O, n1, m1);
        } else {
            fill(0, E, n1, m0);
            fill(1, O, n0, m1);
        }
    }
};

// Equation keys: (which identity 0/1, row, col, monomial)
using EqKey = std::tuple<int, size_t, size_t, Exponents>;

// Build the closedness equations for parity-p morphisms f with unknowns in
// `hp` and stuff them into columns: closed(f) means
//   p=0: E d1M - d1N O = 0 (N0 x M1),  O d0M - d0N E = 0 (N1 x M0)
//   p=1: E d1M + O d0M = 0 ... (delta of odd f)
std::vector<SpRow> closedness_columns(const HomProblem& hp,
                                      std::map<EqKey, size_t>& eqidx) {
    const auto& M = *hp.m;
    const auto& N = *hp.n;
    auto eq_of = [&](int which, size_t r, size_t c, const Exponents& e) {
        auto it = eqidx.find({which, r, c, e});
        if (it == eqidx.end()) it = eqidx.emplace(EqKey{which, r, c, e}, eqidx.size()).first;
        return it->second;
    };
    std::vector<SpRow> cols(hp.count());
    std::map<size_t, std::map<size_t, FieldElement>> colmap;  // unknown -> eq -> coeff

    auto add = [&](size_t unk, size_t eq, const FieldElement& c) {
        auto& m2 = colmap[unk];
        auto it = m2.find(eq);
        if (it == m2.end())
            m2.emplace(eq, c);
        else {
            it->second += c;
            if (it->second.is_zero()) m2.erase(it);
        }
    };

    auto scatter = [&](int which, size_t r, size_t c, const MultiPoly& coefpoly,
                       const Exponents& mono, size_t unk, bool negate) {
        for (auto& [e, cc] : coefpoly.terms()) {
            Exponents tot(e.size());
            for (size_t k = 0; k < e.size(); ++k)
                tot[k] = e[k] + mono[k];
            FieldElement v = negate ? -cc : cc;
            add(unk, eq_of(which, r, c, tot), v);
        }
    };

    for (size_t u = 0; u < hp.unknowns.size(); ++u) {
        auto [blk, i, j, mi] = hp.unknowns[u];
        const Exponents& mono =
            (blk == 0 ? hp.E.monos[i][j][mi] : hp.O.monos[i][j][mi]);
        if (hp.parity == 0) {
            if (blk == 0) {
                // E[i][j]: contributes to identity A at (i, j') with d1M[j][j']
                for (size_t jp = 0; jp < M.rank1(); ++jp)
                    if (!M.d1()[j][jp].is_zero()) scatter(0, i, jp, M.d1()[j][jp], mono, u, false);
                // identity B at (i', j): -d0N[i'][i]
                for (size_t ip = 0; ip < N.rank1(); ++ip)
                    if (!N.d0()[ip][i].is_zero()) scatter(1, ip, j, N.d0()[ip][i], mono, u, true);
            } else {
                // O[i][j]: identity A at (i', j): -d1N[i'][i]
                for (size_t ip = 0; ip < N.rank0(); ++ip)
                    if (!N.d1()[ip][i].is_zero()) scatter(0, ip, j, N.d1()[ip][i], mono, u, true);
                // identity B at (i, j'): +d0M[j][j']
                for (size_t jp = 0; jp < M.rank0(); ++jp)
                    if (!M.d0()[j][jp].is_zero()) scatter(1, i, jp, M.d0()[j][jp], mono, u, false);
            }
        } else {
            // odd f: delta f = d^N f + f d^M = 0:
            //   A (N0 x M0): d1N E + O d0M ; B (N1 x M1): d0N O + E d1M
            if (blk == 0) {
                // E: M0 -> N1
                for (size_t ip = 0; ip < N.rank0(); ++ip)
                    if (!N.d1()[ip][i].is_zero()) scatter(0, ip, j, N.d1()[ip][i], mono, u, false);
                for (size_t jp = 0; jp < M.rank1(); ++jp)
                    if (!M.d1()[j][jp].is_zero()) scatter(1, i, jp, M.d1()[j][jp], mono, u, false);
            } else {
                // O: M1 -> N0
                for (size_t jp = 0; jp < M.rank0(); ++jp)
                    if (!M.d0()[j][jp].is_zero()) scatter(0, i, jp, M.d0()[j][jp], mono, u, false);
                for (size_t ip = 0; ip < N.rank1(); ++ip)
                    if (!N.d0()[ip][i].is_zero()) scatter(1, ip, j, N.d0()[ip][i], mono, u, false);
            }
        }
    }
    for (auto& [unk, eqs] : colmap) {
        SpRow r;
        for (auto& [eq, c] : eqs) r.emplace_back(eq, c);
        cols[unk] = std::move(r);
    }
    return cols;
}

// Transpose columns into equation rows.
std::vector<SpRow> transpose_to_rows(const std::vector<SpRow>& cols, size_t neq) {
    std::vector<SpRow> rows(neq);
    for (size_t u = 0; u < cols.size(); ++u)
        for (auto& [eq, c] : cols[u]) rows[eq].emplace_back(u, c);
    for (auto& r : rows)
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    return rows;
}

long rank_of_rows(std::vector<SpRow> rows) {
    SparseElim el;
    // process shorter rows first; keeps fill-in down
    std::sort(rows.begin(), rows.end(),
              [](const SpRow& a, const SpRow& b) { return a.size() < b.size(); });
    for (auto& r : rows) el.add_row(std::move(r));
    return el.rank;
}

// Columns of the boundary map delta: (parity p+1 morphisms g of degree w-1)
// expressed in the f-unknown coordinate space of `hp`.
std::vector<SpRow> boundary_columns(const HomProblem& hp, const HomProblem& hg,
                                    std::vector<SpRow>* overflow_rows_out) {
    const auto& M = *hp.m;
    const auto& N = *hp.n;
    std::map<EqKey, size_t> overflow;  // coefficients outside the f space
    std::vector<SpRow> cols(hg.count());
    std::map<size_t, std::map<size_t, FieldElement>> colmap;     // g-unk -> f-unk -> c
    std::map<size_t, std::map<size_t, FieldElement>> overmap;    // g-unk -> ov -> c

    auto add = [&](size_t unk, int blk, size_t r, size_t c, const Exponents& e,
                   const FieldElement& v) {
        auto it = hp.unknown_index.find({blk, r, c, e});
        if (it != hp.unknown_index.end()) {
            auto& m2 = colmap[unk];
            auto jt = m2.find(it->second);
            if (jt == m2.end())
                m2.emplace(it->second, v);
            else {
                jt->second += v;
                if (jt->second.is_zero()) m2.erase(jt);
            }
        } else {
            auto key = EqKey{blk, r, c, e};
            auto kt = overflow.find(key);
            if (kt == overflow.end()) kt = overflow.emplace(key, overflow.size()).first;
            auto& m2 = overmap[unk];
            auto jt = m2.find(kt->second);
            if (jt == m2.end())
                m2.emplace(kt->second, v);
            else {
                jt->second += v;
                if (jt->second.is_zero()) m2.erase(jt);
            }
        }
    };
    auto scatter = [&](size_t unk, int blk, size_t r, size_t c, const MultiPoly& coefpoly,
                       const Exponents& mono, bool negate) {
        for (auto& [e, cc] : coefpoly.terms()) {
            Exponents tot(e.size());
            for (size_t k = 0; k < e.size(); ++k) tot[k] = e[k] + mono[k];
            add(unk, blk, r, c, tot, negate ? -cc : cc);
        }
    };

    // g odd: gE: N1 x M0, gO: N0 x M1 (for parity-0 f)
    // delta g: E-part (N0 x M0): d1N gE + gO d0M ; O-part (N1 x M1): d0N gO + gE d1M
    for (size_t u = 0; u < hg.unknowns.size(); ++u) {
        auto [blk, i, j, mi] = hg.unknowns[u];
        const Exponents& mono = (blk == 0 ? hg.E.monos[i][j][mi] : hg.O.monos[i][j][mi]);
        if (blk == 0) {
            // gE[i][j], i over N1, j over M0
            for (size_t ip = 0; ip < N.rank0(); ++ip)
                if (!N.d1()[ip][i].is_zero()) scatter(u, 0, ip, j, N.d1()[ip][i], mono, false);
            for (size_t jp = 0; jp < M.rank1(); ++jp)
                if (!M.d1()[j][jp].is_zero()) scatter(u, 1, i, jp, M.d1()[j][jp], mono, false);
        } else {
            // gO[i][j], i over N0, j over M1
            for (size_t jp = 0; jp < M.rank0(); ++jp)
                if (!M.d0()[j][jp].is_zero()) scatter(u, 0, i, jp, M.d0()[j][jp], mono, false);
            for (size_t ip = 0; ip < N.rank1(); ++ip)
                if (!N.d0()[ip][i].is_zero()) scatter(u, 1, ip, j, N.d0()[ip][i], mono, false);
        }
    }
    for (auto& [unk, fs] : colmap) {
        SpRow r;
        for (auto& [f, c] : fs) r.emplace_back(f, c);
        cols[unk] = std::move(r);
    }
    if (overflow_rows_out) {
        *overflow_rows_out = std::vector<SpRow>(overflow.size());
        for (auto& [unk, ovs] : overmap)
            for (auto& [ov, c] : ovs) (*overflow_rows_out)[ov].emplace_back(unk, c);
        for (auto& r : *overflow_rows_out)
            std::sort(r.begin(), r.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    return cols;
}

std::optional<Rat> entry_degree_graded(const MFPtr& m, const MFPtr& n, int parity, const Rat& w,
                                       int blk, size_t i, size_t j) {
    const auto& gm = m->grading();
    const auto& gn = n->grading();
    Rat src, tgt;
    if (parity == 0) {
        src = blk == 0 ? gm.even[j] : gm.odd[j];
        tgt = blk == 0 ? gn.even[i] : gn.odd[i];
    } else {
        src = blk == 0 ? gm.even[j] : gm.odd[j];
        tgt = blk == 0 ? gn.odd[i] : gn.even[i];
    }
    Rat deg = w + src - tgt;
    if (deg < 0) return std::nullopt;
    return deg;
}

}  // namespace

// ---------------------------------------------------------------------------

HomologyReport bar_homology(const MFPtr& m) {
    auto all = m->ring()->vars();
    std::vector<std::string> names;
    for (auto& v : all) names.push_back(v.name);
    auto constify = [&](const PolyMat& a) {
        FMat r(a.size(), FRow(a.empty() ? 0 : a[0].size()));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a[i].size(); ++j) {
                MultiPoly p = a[i][j].set_zero(names);
                r[i][j] = p.is_zero() ? m->ring()->field()->zero() : p.constant_value();
            }
        return r;
    };
    FMat d1 = constify(m->d1());
    FMat d0 = constify(m->d0());
    long r1 = rank(d1), r0 = rank(d0);
    HomologyReport rep;
    rep.h0 = static_cast<long>(m->rank0()) - r0 - r1;
    rep.h1 = static_cast<long>(m->rank1()) - r1 - r0;
    return rep;
}

namespace {

struct BarView {
    RingPtr ring;  // 0 or 1 variable
    PolyMat d1, d0;
};

BarView bar_view(const MFPtr& m) {
    // internal variables that actually occur in the blocks; declared-internal
    // variables a finite-rank object never touches contribute nothing
    auto occurs = [&](const std::string& name) {
        int idx = m->ring()->index_of(name);
        auto scan = [&](const PolyMat& a) {
            for (auto& row : a)
                for (auto& p : row)
                    for (auto& [e, c] : p.terms())
                        if (e[static_cast<size_t>(idx)] > 0) return true;
            return false;
        };
        return scan(m->d1()) || scan(m->d0());
    };
    std::vector<std::string> outer = m->outer_vars();
    std::vector<Variable> vars;
    for (auto& v : m->ring()->vars()) {
        if (v.role != VarRole::Internal) continue;
        if (occurs(v.name))
            vars.push_back(v);
        else
            outer.push_back(v.name);
    }
    if (vars.size() > 1)
        throw std::invalid_argument("bar view supports at most one occurring internal variable");
    BarView bv;
    bv.ring = std::make_shared<WeightedRing>(m->ring()->field(), vars);
    auto red = [&](const PolyMat& a) {
        PolyMat r(a.size(), std::vector<MultiPoly>(a.empty() ? 0 : a[0].size(), MultiPoly(bv.ring)));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a[i].size(); ++j) {
                MultiPoly p = a[i][j].set_zero(outer);
                if (!p.is_zero()) r[i][j] = p.map_ring(bv.ring);
            }
        return r;
    };
    bv.d1 = red(m->d1());
    bv.d0 = red(m->d0());
    return bv;
}

}  // namespace

std::pair<PIDModulePresentation, PIDModulePresentation> internal_homology(const MFPtr& m) {
    if (m->internal_vars().size() != 1)
        throw std::invalid_argument("internal_homology needs exactly one internal variable");
    BarView bv = bar_view(m);
    HomologySpace h0(bv.d0, bv.d1, bv.ring, m->rank1());
    HomologySpace h1(bv.d1, bv.d0, bv.ring, m->rank0());
    return {h0.presentation(), h1.presentation()};
}

bool is_iso_H(const MFMorphism& f) {
    if (f.z2 != 0) throw NotClosedError("is_iso_H expects a Z2-even morphism");
    if (!f.is_closed()) throw NotClosedError("morphism is not closed");
    BarView src = bar_view(f.source);
    BarView tgt = bar_view(f.target);
    // the source bar ring must embed into the target's
    for (auto& v : src.ring->vars())
        if (tgt.ring->index_of(v.name) < 0)
            throw std::invalid_argument("source internal variable absent in target");
    HomologySpace sh0(src.d0, src.d1, src.ring, f.source->rank1());
    HomologySpace sh1(src.d1, src.d0, src.ring, f.source->rank0());
    HomologySpace th0(tgt.d0, tgt.d1, tgt.ring, f.target->rank1());
    HomologySpace th1(tgt.d1, tgt.d0, tgt.ring, f.target->rank0());
    if (!sh0.finite_dimensional() || !th0.finite_dimensional() || !sh1.finite_dimensional() ||
        !th1.finite_dimensional())
        throw std::invalid_argument("bar homology has positive free rank");
    if (sh0.dim() != th0.dim() || sh1.dim() != th1.dim()) return false;

    std::vector<std::string> outer = f.source->outer_vars();
    for (auto& v : f.target->outer_vars()) outer.push_back(v);
    auto red = [&](const PolyMat& a) {
        PolyMat r(a.size(),
                  std::vector<MultiPoly>(a.empty() ? 0 : a[0].size(), MultiPoly(tgt.ring)));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a[i].size(); ++j) {
                MultiPoly p = a[i][j].set_zero(outer);
                if (!p.is_zero()) r[i][j] = p.map_ring(tgt.ring);
            }
        return r;
    };
    PolyMat fe = red(f.e), fo = red(f.o);

    auto induced_invertible = [&](const HomologySpace& sh, const HomologySpace& th,
                                  const PolyMat& blk) {
        auto reps = sh.basis_reps();
        if (reps.empty()) return th.dim() == 0;
        FMat mat(static_cast<size_t>(th.dim()), FRow(reps.size()));
        for (size_t c = 0; c < reps.size(); ++c) {
            // lift rep into target bar ring and apply the block
            std::vector<MultiPoly> img(blk.size(), MultiPoly(tgt.ring));
            for (size_t r = 0; r < blk.size(); ++r) {
                MultiPoly acc(tgt.ring);
                for (size_t j = 0; j < reps[c].size(); ++j) {
                    if (blk[r][j].is_zero() || reps[c][j].is_zero()) continue;
                    acc += blk[r][j] * reps[c][j].map_ring(tgt.ring);
                }
                img[r] = acc;
            }
            FRow co = th.coords(img);
            for (size_t r = 0; r < co.size(); ++r) mat[r][c] = co[r];
        }
        return invertible(std::move(mat));
    };
    return induced_invertible(sh0, th0, fe) && induced_invertible(sh1, th1, fo);
}

// ---------------------------------------------------------------------------

MorphismBasis hom_graded(const MFPtr& m, const MFPtr& n, const Rat& charge) {
    if (!m->graded() || !n->graded())
        throw std::invalid_argument("hom_graded needs graded factorizations");
    HomProblem hp;
    hp.m = m;
    hp.n = n;
    hp.parity = 0;
    hp.enumerate(
        [&](int blk, size_t i, size_t j) {
            return entry_degree_graded(m, n, 0, charge, blk, i, j);
        },
        std::nullopt);

    std::map<EqKey, size_t> eqidx;
    auto cols = closedness_columns(hp, eqidx);
    long r = rank_of_rows(transpose_to_rows(cols, eqidx.size()));
    long closed_dim = static_cast<long>(hp.count()) - r;

    HomProblem hg;
    hg.m = m;
    hg.n = n;
    hg.parity = 1;
    Rat wg = charge - 1;
    hg.enumerate(
        [&](int blk, size_t i, size_t j) {
            return entry_degree_graded(m, n, 1, wg, blk, i, j);
        },
        std::nullopt);
    auto bcols = boundary_columns(hp, hg, nullptr);
    long brank = rank_of_rows([&] {
        std::vector<SpRow> rows(hp.count());
        for (size_t u = 0; u < bcols.size(); ++u)
            for (auto& [fidx, c] : bcols[u]) rows[fidx].emplace_back(u, c);
        for (auto& rr : rows)
            std::sort(rr.begin(), rr.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        return rows;
    }());

    MorphismBasis mb;
    mb.charge = charge;
    mb.closed_dim = closed_dim;
    mb.quotient_dim = closed_dim - brank;

    // representatives via dense kernel when the system is small
    if (hp.count() > 0 && hp.count() <= 600 && mb.quotient_dim > 0) {
        FMat dense(eqidx.size(), FRow(hp.count(), m->ring()->field()->zero()));
        for (size_t u = 0; u < cols.size(); ++u)
            for (auto& [eq, c] : cols[u]) dense[eq][u] = c;
        auto kern = kernel_basis(std::move(dense), hp.count());
        // quotient representatives: greedily extend the boundary image to a
        // basis of the kernel space
        SparseElim el;
        for (size_t u = 0; u < bcols.size(); ++u) {
            SpRow row = bcols[u];
            el.add_row(std::move(row));
        }
        for (auto& v : kern) {
            SpRow row;
            for (size_t u = 0; u < v.size(); ++u)
                if (!v[u].is_zero()) row.emplace_back(u, v[u]);
            if (!el.add_row(row)) continue;
            // new class: build the morphism
            MFMorphism f;
            f.source = m;
            f.target = n;
            f.z2 = 0;
            f.e = PolyMat(hp.E.rows, std::vector<MultiPoly>(hp.E.cols, MultiPoly(m->ring())));
            f.o = PolyMat(hp.O.rows, std::vector<MultiPoly>(hp.O.cols, MultiPoly(m->ring())));
            for (size_t u = 0; u < hp.unknowns.size(); ++u) {
                if (v[u].is_zero()) continue;
                auto [blk, i, j, mi] = hp.unknowns[u];
                const Exponents& mono = blk == 0 ? hp.E.monos[i][j][mi] : hp.O.monos[i][j][mi];
                MultiPoly term = MultiPoly::monomial(m->ring(), mono, v[u]);
                if (blk == 0)
                    f.e[i][j] += term;
                else
                    f.o[i][j] += term;
            }
            mb.reps.push_back(std::move(f));
            if (static_cast<long>(mb.reps.size()) == mb.quotient_dim) break;
        }
    }
    return mb;
}

std::vector<std::pair<Rat, long>> hom_graded_spectrum(const MFPtr& m, const MFPtr& n,
                                                      const Rat& step, const Rat& max) {
    std::vector<std::pair<Rat, long>> out;
    for (Rat w(0); w <= max; w += step) {
        MorphismBasis mb = hom_graded(m, n, w);
        if (mb.quotient_dim > 0) out.emplace_back(w, mb.quotient_dim);
    }
    return out;
}

long hom_ungraded_dim(const MFPtr& m, const MFPtr& n, const Rat& bound) {
    HomProblem hp;
    hp.m = m;
    hp.n = n;
    hp.parity = 0;
    hp.enumerate(nullptr, bound);
    std::map<EqKey, size_t> eqidx;
    auto cols = closedness_columns(hp, eqidx);
    long r = rank_of_rows(transpose_to_rows(cols, eqidx.size()));
    long closed_dim = static_cast<long>(hp.count()) - r;

    HomProblem hg;
    hg.m = m;
    hg.n = n;
    hg.parity = 1;
    hg.enumerate(nullptr, bound);
    std::vector<SpRow> overflow;
    auto bcols = boundary_columns(hp, hg, &overflow);
    // image within the bounded space: rank(full) - rank(overflow part)
    std::vector<SpRow> full_rows(hp.count());
    for (size_t u = 0; u < bcols.size(); ++u)
        for (auto& [fidx, c] : bcols[u]) full_rows[fidx].emplace_back(u, c);
    for (auto& rr : full_rows)
        std::sort(rr.begin(), rr.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<SpRow> all_rows = full_rows;
    for (auto& rr : overflow) all_rows.push_back(rr);
    long rank_all = rank_of_rows(std::move(all_rows));
    long rank_over = rank_of_rows(overflow);
    return closed_dim - (rank_all - rank_over);
}

bool homotopic(const MFMorphism& f, const MFMorphism& g, const Rat& bound) {
    MFMorphism diff = f - g;
    return null_homotopic(diff, bound);
}

bool null_homotopic(const MFMorphism& f, const Rat& bound) {
    if (f.z2 != 0) throw std::invalid_argument("null_homotopic expects even morphisms");
    const MFPtr& m = f.source;
    const MFPtr& n = f.target;
    // unknown odd h with delta h = f
    HomProblem hh;
    hh.m = m;
    hh.n = n;
    hh.parity = 1;
    bool use_graded = m->graded() && n->graded();
    std::optional<Rat> w;
    if (use_graded) w = f.c_degree();
    if (use_graded && w) {
        Rat wg = *w - 1;
        hh.enumerate(
            [&](int blk, size_t i, size_t j) {
                return entry_degree_graded(m, n, 1, wg, blk, i, j);
            },
            std::nullopt);
    } else {
        hh.enumerate(nullptr, bound);
    }
    // build equations directly: for each coefficient key of delta h and f,
    // the equation sum(delta h coeff) = f coeff
    std::map<EqKey, size_t> keyidx;
    auto key_of = [&](int blk, size_t r, size_t c, const Exponents& e) {
        auto it = keyidx.find({blk, r, c, e});
        if (it == keyidx.end()) it = keyidx.emplace(EqKey{blk, r, c, e}, keyidx.size()).first;
        return it->second;
    };
    std::map<size_t, std::map<size_t, FieldElement>> colmap;
    auto scatter = [&](size_t unk, int blk, size_t r, size_t c, const MultiPoly& coefpoly,
                       const Exponents& mono) {
        for (auto& [e, cc] : coefpoly.terms()) {
            Exponents tot(e.size());
            for (size_t k = 0; k < e.size(); ++k) tot[k] = e[k] + mono[k];
            size_t eq = key_of(blk, r, c, tot);
            auto& m2 = colmap[unk];
            auto jt = m2.find(eq);
            if (jt == m2.end())
                m2.emplace(eq, cc);
            else {
                jt->second += cc;
                if (jt->second.is_zero()) m2.erase(jt);
            }
        }
    };
    const auto& M = *m;
    const auto& N = *n;
    for (size_t u = 0; u < hh.unknowns.size(); ++u) {
        auto [blk, i, j, mi] = hh.unknowns[u];
        const Exponents& mono = blk == 0 ? hh.E.monos[i][j][mi] : hh.O.monos[i][j][mi];
        if (blk == 0) {
            for (size_t ip = 0; ip < N.rank0(); ++ip)
                if (!N.d1()[ip][i].is_zero()) scatter(u, 0, ip, j, N.d1()[ip][i], mono);
            for (size_t jp = 0; jp < M.rank1(); ++jp)
                if (!M.d1()[j][jp].is_zero()) scatter(u, 1, i, jp, M.d1()[j][jp], mono);
        } else {
            for (size_t jp = 0; jp < M.rank0(); ++jp)
                if (!M.d0()[j][jp].is_zero()) scatter(u, 0, i, jp, M.d0()[j][jp], mono);
            for (size_t ip = 0; ip < N.rank1(); ++ip)
                if (!N.d0()[ip][i].is_zero()) scatter(u, 1, ip, j, N.d0()[ip][i], mono);
        }
    }
    // RHS from f blocks
    std::map<size_t, FieldElement> rhs;
    for (size_t i = 0; i < f.e.size(); ++i)
        for (size_t j = 0; j < f.e[i].size(); ++j)
            for (auto& [e, c] : f.e[i][j].terms()) rhs[key_of(0, i, j, e)] = c;
    for (size_t i = 0; i < f.o.size(); ++i)
        for (size_t j = 0; j < f.o[i].size(); ++j)
            for (auto& [e, c] : f.o[i][j].terms()) rhs[key_of(1, i, j, e)] = c;

    // solve: rows = equations over unknowns + sentinel RHS column
    size_t nu = hh.count();
    std::vector<SpRow> rows(keyidx.size());
    for (auto& [unk, eqs] : colmap)
        for (auto& [eq, c] : eqs) rows[eq].emplace_back(unk, c);
    for (auto& [eq, c] : rhs)
        if (!c.is_zero()) rows[eq].emplace_back(nu, c);
    for (auto& r : rows)
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseElim el;
    std::sort(rows.begin(), rows.end(),
              [](const SpRow& a, const SpRow& b) { return a.size() < b.size(); });
    for (auto& r : rows) el.add_row(std::move(r));
    // inconsistent iff some pivot sits on the sentinel column
    return el.pivots.find(nu) == el.pivots.end();
}

// ---------------------------------------------------------------------------
// Fusion

std::vector<std::pair<int, int>> fusion_rule(int d, int a, int lam, int b, int mu) {
    std::vector<std::pair<int, int>> out;
    int lo = std::abs(lam - mu);
    int hi = std::min(lam + mu, 2 * d - 4 - lam - mu);
    for (int nu = lo; nu <= hi; nu += 2) {
        int c = a + b + (lam + mu - nu) / 2;
        out.emplace_back(((c % d) + d) % d, nu);
    }
    return out;
}

FusionReport fusion_witness(int d, int a, int b, int mu) {
    if (d < 3 || mu < 1 || mu > d - 2)
        throw std::invalid_argument("fusion_witness needs d >= 3 and 1 <= mu <= d-2");
    auto range = [&](int from, int count) {
        std::vector<int> s;
        for (int k = 0; k < count; ++k) s.push_back(from + k);
        return s;
    };
    MFPtr A = permutation_mf(d, range(a, 2), true, "x", "y");
    MFPtr B = permutation_mf(d, range(b, mu + 1), true, "y", "z");
    MFPtr AB = mf_tensor(A, B);
    const RingPtr& R = AB->ring();
    auto F = R->field();

    FusionReport rep;
    rep.tensor = AB;
    rep.q_minus = mf_lift(permutation_mf(d, range(a + b + 1, mu), true, "x", "z"), R);
    rep.q_plus = mf_lift(permutation_mf(d, range(a + b, mu + 2), true, "x", "z"), R);

    MultiPoly x = MultiPoly::var(R, "x"), y = MultiPoly::var(R, "y"), z = MultiPoly::var(R, "z");
    MultiPoly p1 = A->d1()[0][0].map_ring(R);
    MultiPoly pmu = B->d1()[0][0].map_ring(R);
    MultiPoly qm = rep.q_minus->d1()[0][0];
    MultiPoly qp = rep.q_plus->d1()[0][0];
    MultiPoly xd_zd = MultiPoly::var(R, "x", d) - MultiPoly::var(R, "z", d);
    MultiPoly yd_zd = MultiPoly::var(R, "y", d) - MultiPoly::var(R, "z", d);
    MultiPoly xd_yd = MultiPoly::var(R, "x", d) - MultiPoly::var(R, "y", d);

    auto eta = [&](long k) { return cyclo_root_power(F, k); };
    FieldElement one = F->one();

    // g-: g01 = 1, g00 the explicit linear form, the rest by exact division
    MultiPoly gm01 = MultiPoly::constant(R, one);
    FieldElement denom_inv = (one - eta(-1)).inverse();
    MultiPoly gm00 =
        (x.scale(-(eta(-a - 1) * (one - eta(-mu)) * denom_inv)) +
         y.scale((one - eta(-mu - 1)) * denom_inv) - z.scale(eta(b)))
            .scale(eta(-a * static_cast<long>(mu)));
    MultiPoly gm10 = (qm * gm00 - pmu).exact_div(p1);
    MultiPoly gm11 = (xd_zd.exact_div(qm) - yd_zd.exact_div(pmu) * gm00).exact_div(p1);

    // g+: g00 = 1
    MultiPoly gp00 = MultiPoly::constant(R, one);
    FieldElement denp_inv = (one - eta(1)).inverse();
    MultiPoly gp01 =
        (x.scale((one - eta(mu + 2)) * denp_inv) - y.scale(eta(a + 1) * (one - eta(mu + 1)) * denp_inv) -
         z.scale(eta(a + b + mu + 1)))
            .scale(eta(a * static_cast<long>(mu + 1)));
    MultiPoly gp10 = (qp - pmu * gp01).exact_div(p1);
    MultiPoly gp11 = (xd_zd.exact_div(qp) * gp01 - yd_zd.exact_div(pmu)).exact_div(p1);

    rep.g_minus = MFMorphism{rep.q_minus, AB, 0, PolyMat{{gm00}, {gm11}}, PolyMat{{gm10}, {gm01}}};
    rep.g_plus = MFMorphism{rep.q_plus, AB, 0, PolyMat{{gp00}, {gp11}}, PolyMat{{gp10}, {gp01}}};

    rep.closed = rep.g_minus.is_closed() && rep.g_plus.is_closed();
    auto dm = rep.g_minus.c_degree();
    auto dp = rep.g_plus.c_degree();
    rep.degree0 = dm && *dm == Rat(0) && dp && *dp == Rat(0);

    // combined H-isomorphism
    MFPtr src = mf_direct_sum(rep.q_minus, rep.q_plus);
    MFMorphism combined;
    combined.source = src;
    combined.target = AB;
    combined.z2 = 0;
    combined.e = PolyMat(2, std::vector<MultiPoly>(2, MultiPoly(R)));
    combined.o = PolyMat(2, std::vector<MultiPoly>(2, MultiPoly(R)));
    combined.e[0][0] = gm00;
    combined.e[1][0] = gm11;
    combined.e[0][1] = gp00;
    combined.e[1][1] = gp11;
    combined.o[0][0] = gm10;
    combined.o[1][0] = gm01;
    combined.o[0][1] = gp10;
    combined.o[1][1] = gp01;
    rep.h_iso = is_iso_H(combined);
    return rep;
}

}  // namespace mfcas
