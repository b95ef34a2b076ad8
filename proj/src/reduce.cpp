#include <algorithm>
#include <map>

#include "mfcas/homotopy.hpp"
#include "mfcas/linalg.hpp"

// Exact finite-rank models. For each internal variable t the algorithm
// finds a monic homogeneous relation g(t) whose action on M is null
// homotopic, with an explicit witness delta(lambda) = g.id. The quotient
// N = M/gM is then a finite free model of M + M[1]; the M-summand is cut
// out by the closed idempotent e = id + pi lambda h (h the connecting
// contraction), strictified by Newton iteration and split through a
// charge-triangular change of basis.

namespace mfcas {

namespace {

// divide p by g, both viewed as polynomials in variable `vi` with
// polynomial coefficients; g must be monic in vi of degree n
std::pair<MultiPoly, MultiPoly> divmod_in_var(const MultiPoly& p, const MultiPoly& g, int vi,
                                              int n) {
    MultiPoly q(p.ring()), r = p;
    while (!r.is_zero()) {
        // find a term of r with vi-exponent >= n
        const Exponents* top = nullptr;
        for (auto& [e, c] : r.terms())
            if (e[static_cast<size_t>(vi)] >= n) {
                top = &e;
                break;
            }
        if (!top) break;
        Exponents shift = *top;
        shift[static_cast<size_t>(vi)] -= n;
        MultiPoly m = MultiPoly::monomial(r.ring(), shift, r.coeff_of(*top));
        q += m;
        r -= m * g;
    }
    return {q, r};
}

struct Relation {
    int n = 0;          // monic degree in the internal variable
    MultiPoly g;        // the full relation polynomial
    PolyMat lam_e;      // odd lambda: M0 -> M1
    PolyMat lam_o;      // M1 -> M0
};

std::vector<Exponents> monos_exact(const RingPtr& ring, const Rat& delta,
                                   const std::vector<int>& allowed) {
    // monomials of exact weighted degree using only `allowed` variables
    std::vector<Exponents> out;
    if (delta < 0) return out;
    Exponents cur(static_cast<size_t>(ring->nvars()), 0);
    std::function<void(size_t, Rat)> rec = [&](size_t ai, Rat rest) {
        if (ai == allowed.size()) {
            if (rest == 0) out.push_back(cur);
            return;
        }
        int v = allowed[ai];
        const Rat& w = ring->vars()[static_cast<size_t>(v)].weight;
        for (int e = 0;; ++e) {
            Rat nr = rest - Rat(e) * w;
            if (nr < 0) break;
            cur[static_cast<size_t>(v)] = e;
            rec(ai + 1, nr);
        }
        cur[static_cast<size_t>(v)] = 0;
        return;
    };
    rec(0, delta);
    return out;
}

/// Solve delta(lambda) = g . id with g = t^n + sum_{j<n} a_j t^j monic in
/// the internal variable t, a_j over the other variables; homogeneous when
/// the object is graded. Returns nullopt if no solution at this n.
std::optional<Relation> solve_relation(const MFPtr& m, int vi, int n) {
    const RingPtr& R = m->ring();
    Rat wt = R->vars()[static_cast<size_t>(vi)].weight;
    Rat degg = Rat(n) * wt;
    if (!m->graded()) throw std::invalid_argument("relation search needs a graded object");
    const auto& gr = m->grading();
    size_t r0 = m->rank0(), r1 = m->rank1();

    std::vector<int> others;
    for (int i = 0; i < R->nvars(); ++i)
        if (i != vi) others.push_back(i);
    std::vector<int> all;
    for (int i = 0; i < R->nvars(); ++i) all.push_back(i);

    // unknown layout
    struct Unk {
        int kind;  // 0 lam_e (M0->M1), 1 lam_o (M1->M0), 2 coefficient a_j
        size_t i, j;
        Exponents mono;
    };
    std::vector<Unk> unknowns;
    std::map<std::tuple<int, size_t, size_t, Exponents>, size_t> uidx;
    auto add_unknowns = [&](int kind, size_t rows, size_t cols,
                            const std::function<Rat(size_t, size_t)>& deg,
                            const std::vector<int>& vars) {
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) {
                for (auto& e : monos_exact(R, deg(i, j), vars)) {
                    uidx[{kind, i, j, e}] = unknowns.size();
                    unknowns.push_back({kind, i, j, e});
                }
            }
    };
    // lambda has C-degree degg - 1
    add_unknowns(
        0, r1, r0, [&](size_t i, size_t j) -> Rat { return degg - 1 + gr.even[j] - gr.odd[i]; }, all);
    add_unknowns(
        1, r0, r1, [&](size_t i, size_t j) -> Rat { return degg - 1 + gr.odd[j] - gr.even[i]; }, all);
    // a_j, j = 0..n-1, over the other variables, degree (n-j) wt
    for (int j = 0; j < n; ++j) {
        for (auto& e : monos_exact(R, Rat(n - j) * wt, others)) {
            Exponents key = e;
            key[static_cast<size_t>(vi)] = j;  // remember j in the slot
            uidx[{2, 0, static_cast<size_t>(j), key}] = unknowns.size();
            unknowns.push_back({2, 0, static_cast<size_t>(j), key});
        }
    }

    // equations: coefficients of
    //   d1 lam_e + lam_o d0 - g I = 0   on M0 -> M0   (part 0)
    //   d0 lam_o + lam_e d1 - g I = 0   on M1 -> M1   (part 1)
    std::map<std::tuple<int, size_t, size_t, Exponents>, size_t> eqidx;
    auto eq_of = [&](int part, size_t r, size_t c, const Exponents& e) {
        auto it = eqidx.find({part, r, c, e});
        if (it == eqidx.end()) it = eqidx.emplace(std::make_tuple(part, r, c, e), eqidx.size()).first;
        return it->second;
    };
    std::map<size_t, std::map<size_t, FieldElement>> cols;
    auto add = [&](size_t unk, size_t eq, const FieldElement& v) {
        auto& mm = cols[unk];
        auto it = mm.find(eq);
        if (it == mm.end())
            mm.emplace(eq, v);
        else {
            it->second += v;
            if (it->second.is_zero()) mm.erase(it);
        }
    };
    auto scatter = [&](size_t unk, int part, size_t r, size_t c, const MultiPoly& poly,
                       const Exponents& mono, bool neg) {
        for (auto& [e, cc] : poly.terms()) {
            Exponents tot(e.size());
            for (size_t k = 0; k < e.size(); ++k) tot[k] = e[k] + mono[k];
            add(unk, eq_of(part, r, c, tot), neg ? -cc : cc);
        }
    };
    for (size_t u = 0; u < unknowns.size(); ++u) {
        const Unk& un = unknowns[u];
        if (un.kind == 0) {
            // lam_e[i][j]: d1 lam_e at (i', j): d1[i'][i]; lam_e d1 at (i, j'): d1[j][j']
            for (size_t ip = 0; ip < r0; ++ip)
                if (!m->d1()[ip][un.i].is_zero())
                    scatter(u, 0, ip, un.j, m->d1()[ip][un.i], un.mono, false);
            for (size_t jp = 0; jp < r1; ++jp)
                if (!m->d1()[un.j][jp].is_zero())
                    scatter(u, 1, un.i, jp, m->d1()[un.j][jp], un.mono, false);
        } else if (un.kind == 1) {
            // lam_o[i][j]: lam_o d0 at (i, j'): d0[j][j']; d0 lam_o at (i', j): d0[i'][i]
            for (size_t jp = 0; jp < r0; ++jp)
                if (!m->d0()[un.j][jp].is_zero())
                    scatter(u, 0, un.i, jp, m->d0()[un.j][jp], un.mono, false);
            for (size_t ip = 0; ip < r1; ++ip)
                if (!m->d0()[ip][un.i].is_zero())
                    scatter(u, 1, ip, un.j, m->d0()[ip][un.i], un.mono, false);
        } else {
            // coefficient a_j with outer monomial: -a_j t^j on both diagonals
            int jpow = static_cast<int>(un.j);
            Exponents e = un.mono;
            e[static_cast<size_t>(vi)] = jpow;
            for (size_t i = 0; i < r0; ++i) add(u, eq_of(0, i, i, e), -R->field()->one());
            for (size_t i = 0; i < r1; ++i) add(u, eq_of(1, i, i, e), -R->field()->one());
        }
    }
    // RHS: + t^n on both diagonals
    std::map<size_t, FieldElement> rhs;
    {
        Exponents e(static_cast<size_t>(R->nvars()), 0);
        e[static_cast<size_t>(vi)] = n;
        for (size_t i = 0; i < r0; ++i) rhs[eq_of(0, i, i, e)] = R->field()->one();
        for (size_t i = 0; i < r1; ++i) rhs[eq_of(1, i, i, e)] = R->field()->one();
    }

    // sparse solve with recorded pivot rows for back substitution
    size_t nu = unknowns.size();
    std::vector<std::vector<std::pair<size_t, FieldElement>>> rows(eqidx.size());
    for (auto& [unk, eqs] : cols)
        for (auto& [eq, c] : eqs) rows[eq].emplace_back(unk, c);
    for (auto& [eq, c] : rhs) rows[eq].emplace_back(nu, c);
    for (auto& r : rows)
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

    std::map<size_t, std::vector<std::pair<size_t, FieldElement>>> pivots;
    auto axpy = [](std::vector<std::pair<size_t, FieldElement>>& r, const FieldElement& c,
                   const std::vector<std::pair<size_t, FieldElement>>& p) {
        std::vector<std::pair<size_t, FieldElement>> out;
        out.reserve(r.size() + p.size());
        size_t i = 0, j = 0;
        while (i < r.size() || j < p.size()) {
            if (j == p.size() || (i < r.size() && r[i].first < p[j].first))
                out.push_back(r[i++]);
            else if (i == r.size() || p[j].first < r[i].first) {
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
    };
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (auto row : rows) {
        while (!row.empty()) {
            auto it = pivots.find(row.front().first);
            if (it == pivots.end()) break;
            FieldElement c = -row.front().second;
            axpy(row, c, it->second);
        }
        if (row.empty()) continue;
        if (row.front().first == nu) return std::nullopt;  // inconsistent
        FieldElement inv = row.front().second.inverse();
        for (auto& [cc, v] : row) v = v * inv;
        pivots.emplace(row.front().first, std::move(row));
    }
    // back-substitute: free unknowns 0
    FRow sol(nu, R->field()->zero());
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        const auto& row = it->second;
        FieldElement v = R->field()->zero();
        for (size_t k = 1; k < row.size(); ++k) {
            if (row[k].first == nu)
                v += row[k].second;
            else
                v -= row[k].second * sol[row[k].first];
        }
        sol[it->first] = v;
    }
    // note: RHS appears with + sign in rows, so pivot value = rhs - rest;
    // rows store lhs coefficients and rhs together as lhs*x - (-rhs)...
    // Recompute carefully: rows encode sum(coeff * x) + rhscoeff * 1 = 0 is
    // wrong -- we appended the rhs as a plain column, so the equation reads
    // sum(coeff*x) = rhs-part. The elimination treated column nu like any
    // unknown, hence a pivot row r: x_p + sum c_k x_k + c_rhs * X_nu = 0
    // with the virtual X_nu = -1. So x_p = -sum c_k x_k + c_rhs.
    // The loop above implements exactly this.

    Relation rel;
    rel.n = n;
    MultiPoly g = MultiPoly::var(R, R->vars()[static_cast<size_t>(vi)].name, n);
    PolyMat lam_e(r1, std::vector<MultiPoly>(r0, MultiPoly(R)));
    PolyMat lam_o(r0, std::vector<MultiPoly>(r1, MultiPoly(R)));
    for (size_t u = 0; u < nu; ++u) {
        if (sol[u].is_zero()) continue;
        const Unk& un = unknowns[u];
        if (un.kind == 0)
            lam_e[un.i][un.j] += MultiPoly::monomial(R, un.mono, sol[u]);
        else if (un.kind == 1)
            lam_o[un.i][un.j] += MultiPoly::monomial(R, un.mono, sol[u]);
        else
            g += MultiPoly::monomial(R, un.mono, sol[u]);
    }
    rel.g = g;
    rel.lam_e = std::move(lam_e);
    rel.lam_o = std::move(lam_o);

    // verify the certificate exactly
    PolyMat A = mat_add(mat_mul(m->d1(), rel.lam_e), mat_mul(rel.lam_o, m->d0()));
    PolyMat B = mat_add(mat_mul(m->d0(), rel.lam_o), mat_mul(rel.lam_e, m->d1()));
    for (size_t i = 0; i < r0; ++i)
        for (size_t j = 0; j < r0; ++j)
            if (A[i][j] != (i == j ? rel.g : MultiPoly(R)))
                throw std::runtime_error("relation certificate failed");
    for (size_t i = 0; i < r1; ++i)
        for (size_t j = 0; j < r1; ++j)
            if (B[i][j] != (i == j ? rel.g : MultiPoly(R)))
                throw std::runtime_error("relation certificate failed");
    return rel;
}

struct QuotientModel {
    MFPtr n;             // the finite model M/gM (over the ring without t)
    RingPtr small_ring;  // ring without t
    int vi = -1;         // index of t in the big ring
    int deg = 0;         // monic degree
    // bookkeeping to express big-ring polynomials on the power basis
};

// map a big-ring polynomial (t-degree < n after reduction) to a matrix
// column over the small ring: slot (s * n + k) for base slot s, power k
void scatter_reduced(const MultiPoly& p, int vi, int n, const RingPtr& small,
                     std::vector<MultiPoly>& out, size_t base) {
    for (auto& [e, c] : p.terms()) {
        int k = e[static_cast<size_t>(vi)];
        if (k >= n) throw std::logic_error("scatter_reduced: unreduced power");
        Exponents se;
        se.reserve(e.size() - 1);
        for (size_t t = 0; t < e.size(); ++t)
            if (static_cast<int>(t) != vi) se.push_back(e[t]);
        out[base + static_cast<size_t>(k)] +=
            MultiPoly::monomial(small, se, c);
    }
}

MFPtr quotient_model(const MFPtr& m, int vi, const Relation& rel, RingPtr& small_ring) {
    const RingPtr& R = m->ring();
    int n = rel.n;
    std::vector<Variable> svars;
    for (int i = 0; i < R->nvars(); ++i)
        if (i != vi) svars.push_back(R->vars()[static_cast<size_t>(i)]);
    small_ring = std::make_shared<WeightedRing>(R->field(), svars);
    Rat wt = R->vars()[static_cast<size_t>(vi)].weight;

    size_t r0 = m->rank0(), r1 = m->rank1();
    size_t N0 = r0 * static_cast<size_t>(n), N1 = r1 * static_cast<size_t>(n);
    PolyMat D1(N0, std::vector<MultiPoly>(N1, MultiPoly(small_ring)));
    PolyMat D0(N1, std::vector<MultiPoly>(N0, MultiPoly(small_ring)));
    MultiPoly tpow = MultiPoly::var(R, R->vars()[static_cast<size_t>(vi)].name);

    auto fill = [&](const PolyMat& src, PolyMat& dst, size_t rows, size_t cols) {
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) {
                if (src[i][j].is_zero()) continue;
                MultiPoly cur = src[i][j];
                for (int k = 0; k < n; ++k) {
                    MultiPoly red = divmod_in_var(cur, rel.g, vi, n).second;
                    std::vector<MultiPoly> tmp(static_cast<size_t>(n), MultiPoly(small_ring));
                    scatter_reduced(red, vi, n, small_ring, tmp, 0);
                    for (int kk = 0; kk < n; ++kk)
                        dst[i * static_cast<size_t>(n) + static_cast<size_t>(kk)]
                           [j * static_cast<size_t>(n) + static_cast<size_t>(k)] +=
                            tmp[static_cast<size_t>(kk)];
                    cur = cur * tpow;
                }
            }
    };
    fill(m->d1(), D1, r0, r1);
    fill(m->d0(), D0, r1, r0);

    std::optional<Grading> g;
    if (m->graded()) {
        Grading gg;
        for (size_t i = 0; i < r0; ++i)
            for (int k = 0; k < n; ++k) gg.even.push_back(m->grading().even[i] + Rat(k) * wt);
        for (size_t i = 0; i < r1; ++i)
            for (int k = 0; k < n; ++k) gg.odd.push_back(m->grading().odd[i] + Rat(k) * wt);
        g = std::move(gg);
    }
    MultiPoly W = m->potential_left().map_ring(small_ring);
    MultiPoly V = m->potential_right().map_ring(small_ring);
    return mf_make(small_ring, W, V, std::move(D1), std::move(D0), std::move(g));
}

// e = id + pi lambda h on the quotient model; returns (e_even, e_odd)
std::pair<PolyMat, PolyMat> connecting_idempotent(const MFPtr& m, int vi, const Relation& rel,
                                                  const MFPtr& N, const RingPtr& small_ring) {
    const RingPtr& R = m->ring();
    int n = rel.n;
    size_t r0 = m->rank0(), r1 = m->rank1();
    MultiPoly tv = MultiPoly::var(R, R->vars()[static_cast<size_t>(vi)].name);

    // section lift of N-basis (slot s, power k): t^k e_s; h(v) =
    // (s(dbar v) - d(s v)) / g computed per column; then lambda h, reduce,
    // add identity.
    auto build = [&](bool even_part) {
        // even part: e_E on N0 (source N0 columns); odd: e_O on N1
        size_t big_r = even_part ? r0 : r1;
        size_t big_other = even_part ? r1 : r0;
        size_t Nr = big_r * static_cast<size_t>(n);
        const PolyMat& dM = even_part ? m->d0() : m->d1();  // d out of this part
        const PolyMat& dN_small = even_part ? N->d0() : N->d1();
        // lambda out of the *other* parity back into this parity:
        // for v in M0: h(v) in M1, lambda_o: M1 -> M0; for v in M1 use lam_e
        const PolyMat& lam = even_part ? rel.lam_o : rel.lam_e;
        PolyMat e(Nr, std::vector<MultiPoly>(Nr, MultiPoly(small_ring)));
        for (size_t s = 0; s < big_r; ++s)
            for (int k = 0; k < n; ++k) {
                size_t col = s * static_cast<size_t>(n) + static_cast<size_t>(k);
                // s(v) = t^k e_s; d(s v) column in M coords
                std::vector<MultiPoly> dsv(big_other, MultiPoly(R));
                for (size_t i = 0; i < big_other; ++i) {
                    MultiPoly p = dM[i][s];
                    for (int t = 0; t < k; ++t) p = p * tv;
                    dsv[i] = p;
                }
                // s(dbar v): lift of the reduced column (dN column)
                std::vector<MultiPoly> sdbar(big_other, MultiPoly(R));
                for (size_t i = 0; i < big_other; ++i) {
                    for (int kk = 0; kk < n; ++kk) {
                        const MultiPoly& c =
                            dN_small[i * static_cast<size_t>(n) + static_cast<size_t>(kk)][col];
                        if (c.is_zero()) continue;
                        // lift to big ring and multiply by t^kk
                        MultiPoly cl = c.map_ring(R);
                        for (int t = 0; t < kk; ++t) cl = cl * tv;
                        sdbar[i] += cl;
                    }
                }
                // h column = (sdbar - dsv) / g
                std::vector<MultiPoly> hcol(big_other, MultiPoly(R));
                for (size_t i = 0; i < big_other; ++i) {
                    MultiPoly diff = sdbar[i] - dsv[i];
                    if (diff.is_zero()) continue;
                    auto [q, rem] = divmod_in_var(diff, rel.g, vi, n);
                    if (!rem.is_zero())
                        throw std::runtime_error("connecting contraction: division failed");
                    hcol[i] = q;
                }
                // lambda h column in M (this parity), reduce mod g, scatter
                for (size_t i = 0; i < big_r; ++i) {
                    MultiPoly acc(R);
                    for (size_t t = 0; t < big_other; ++t) {
                        if (lam[i][t].is_zero() || hcol[t].is_zero()) continue;
                        acc += lam[i][t] * hcol[t];
                    }
                    if (acc.is_zero()) continue;
                    MultiPoly red = divmod_in_var(acc, rel.g, vi, n).second;
                    std::vector<MultiPoly> tmp(static_cast<size_t>(n), MultiPoly(small_ring));
                    scatter_reduced(red, vi, n, small_ring, tmp, 0);
                    for (int kk = 0; kk < n; ++kk)
                        e[i * static_cast<size_t>(n) + static_cast<size_t>(kk)][col] +=
                            tmp[static_cast<size_t>(kk)];
                }
                // identity part
                e[col][col] += MultiPoly::constant(small_ring, Rat(1));
            }
        return e;
    };
    return {build(true), build(false)};
}

// tracked unit elimination: returns the minimal object plus strict maps
// psi: N -> N_min and xi: N_min -> N (closed, psi xi = id)
struct Tracked {
    MFPtr min;
    PolyMat psi_e, psi_o, xi_e, xi_o;
};

Tracked eliminate_units_tracked(const MFPtr& n0) {
    const RingPtr& R = n0->ring();
    PolyMat D1 = n0->d1(), D0 = n0->d0();
    std::vector<Rat> ch0, ch1;
    bool graded = n0->graded();
    if (graded) {
        ch0 = n0->grading().even;
        ch1 = n0->grading().odd;
    }
    PolyMat psi_e = mat_identity(R, D1.size());
    PolyMat psi_o = mat_identity(R, D0.size());
    PolyMat xi_e = mat_identity(R, D1.size());
    PolyMat xi_o = mat_identity(R, D0.size());

    auto drop_row = [](PolyMat& A, size_t i) { A.erase(A.begin() + static_cast<long>(i)); };
    auto drop_col = [](PolyMat& A, size_t j) {
        for (auto& row : A) row.erase(row.begin() + static_cast<long>(j));
    };

    auto find_unit = [&](const PolyMat& A) -> std::optional<std::pair<size_t, size_t>> {
        for (size_t i = 0; i < A.size(); ++i)
            for (size_t j = 0; j < A[i].size(); ++j)
                if (!A[i][j].is_zero() && A[i][j].is_constant()) return {{i, j}};
        return std::nullopt;
    };

    while (true) {
        bool in_d1 = true;
        auto u = find_unit(D1);
        if (!u) {
            u = find_unit(D0);
            in_d1 = false;
        }
        if (!u) break;
        auto [i, j] = *u;
        PolyMat& A = in_d1 ? D1 : D0;
        PolyMat& B = in_d1 ? D0 : D1;
        // basis change: A <- P A Q with P = I + L clearing column j,
        // Q = I + S clearing row i; B <- Q^{-1} B P^{-1}
        FieldElement cinv = A[i][j].constant_value().inverse();
        MultiPoly cinv_p = MultiPoly::constant(R, cinv);
        size_t nr = A.size(), nc = A[0].size();
        std::vector<MultiPoly> L(nr, MultiPoly(R)), S(nc, MultiPoly(R));
        for (size_t k = 0; k < nr; ++k)
            if (k != i && !A[k][j].is_zero()) L[k] = -(A[k][j] * cinv_p);
        for (size_t l = 0; l < nc; ++l)
            if (l != j && !A[i][l].is_zero()) S[l] = -(A[i][l] * cinv_p);
        // A = P A
        for (size_t k = 0; k < nr; ++k) {
            if (L[k].is_zero()) continue;
            for (size_t l = 0; l < nc; ++l)
                if (!A[i][l].is_zero()) A[k][l] += L[k] * A[i][l];
        }
        // A = A Q
        for (size_t l = 0; l < nc; ++l) {
            if (S[l].is_zero()) continue;
            for (size_t k = 0; k < nr; ++k)
                if (!A[k][j].is_zero()) A[k][l] += A[k][j] * S[l];
        }
        // B = Q^{-1} B P^{-1}: row j -= S_l row_l ; col i -= col_k L_k
        for (size_t l = 0; l < nc; ++l) {
            if (S[l].is_zero()) continue;
            for (size_t c2 = 0; c2 < B[0].size(); ++c2)
                if (!B[l][c2].is_zero()) B[j][c2] -= S[l] * B[l][c2];
        }
        for (size_t k = 0; k < nr; ++k) {
            if (L[k].is_zero()) continue;
            for (size_t r2 = 0; r2 < B.size(); ++r2)
                if (!B[r2][k].is_zero()) B[r2][i] -= B[r2][k] * L[k];
        }
        // transport the tracked maps. New coordinates: rows of A live in the
        // "target" part, transformed by P (i.e. coords' = P coords), columns
        // by Q^{-1}. For d1-elimination: M0 coords' = P m0, M1 coords' =
        // Q^{-1} m1. psi gets the forward map composed with projection;
        // xi gets the inverse (P^{-1} = I - L, Q) composed with inclusion.
        auto apply_P = [&](PolyMat& v_rows) {
            // v_rows: matrix whose ROW space is the transformed side: left
            // multiply by P
            for (size_t k = 0; k < nr; ++k) {
                if (L[k].is_zero()) continue;
                for (size_t c2 = 0; c2 < v_rows[0].size(); ++c2)
                    if (!v_rows[i][c2].is_zero()) v_rows[k][c2] += L[k] * v_rows[i][c2];
            }
        };
        auto apply_Pinv_cols = [&](PolyMat& v_cols) {
            // right multiply by P^{-1} = I - L: col_i -= col_k L[k]
            for (size_t k = 0; k < nr; ++k) {
                if (L[k].is_zero()) continue;
                for (size_t r2 = 0; r2 < v_cols.size(); ++r2)
                    if (!v_cols[r2][k].is_zero()) v_cols[r2][i] -= v_cols[r2][k] * L[k];
            }
        };
        auto apply_Qinv = [&](PolyMat& v_rows) {
            // left multiply by Q^{-1} = I - S acting on row j
            for (size_t l = 0; l < nc; ++l) {
                if (S[l].is_zero()) continue;
                for (size_t c2 = 0; c2 < v_rows[0].size(); ++c2)
                    if (!v_rows[l][c2].is_zero()) v_rows[j][c2] -= S[l] * v_rows[l][c2];
            }
        };
        auto apply_Q_cols = [&](PolyMat& v_cols) {
            // right multiply by Q: col_l += col_j S[l]
            for (size_t l = 0; l < nc; ++l) {
                if (S[l].is_zero()) continue;
                for (size_t r2 = 0; r2 < v_cols.size(); ++r2)
                    if (!v_cols[r2][j].is_zero()) v_cols[r2][l] += v_cols[r2][j] * S[l];
            }
        };
        if (in_d1) {
            apply_P(psi_e);
            apply_Qinv(psi_o);
            apply_Pinv_cols(xi_e);
            apply_Q_cols(xi_o);
            drop_row(psi_e, i);
            drop_row(psi_o, j);
            drop_col(xi_e, i);
            drop_col(xi_o, j);
            drop_row(D1, i);
            drop_col(D1, j);
            drop_row(D0, j);
            drop_col(D0, i);
            if (graded) {
                ch0.erase(ch0.begin() + static_cast<long>(i));
                ch1.erase(ch1.begin() + static_cast<long>(j));
            }
        } else {
            apply_P(psi_o);
            apply_Qinv(psi_e);
            apply_Pinv_cols(xi_o);
            apply_Q_cols(xi_e);
            drop_row(psi_o, i);
            drop_row(psi_e, j);
            drop_col(xi_o, i);
            drop_col(xi_e, j);
            drop_row(D0, i);
            drop_col(D0, j);
            drop_row(D1, j);
            drop_col(D1, i);
            if (graded) {
                ch1.erase(ch1.begin() + static_cast<long>(i));
                ch0.erase(ch0.begin() + static_cast<long>(j));
            }
        }
    }
    Tracked t;
    std::optional<Grading> g;
    if (graded) g = Grading{ch0, ch1};
    t.min = mf_make(R, n0->potential_left(), n0->potential_right(), D1, D0, std::move(g));
    t.psi_e = std::move(psi_e);
    t.psi_o = std::move(psi_o);
    t.xi_e = std::move(xi_e);
    t.xi_o = std::move(xi_o);
    return t;
}

// strict splitting of a strict closed idempotent on a graded minimal object
MFPtr split_strict_idempotent(const MFPtr& n, PolyMat eE, PolyMat eO) {
    const RingPtr& R = n->ring();
    auto field = R->field();
    size_t r0 = n->rank0(), r1 = n->rank1();
    // constant parts
    auto const_part = [&](const PolyMat& a) {
        FMat c(a.size(), FRow(a.empty() ? 0 : a[0].size(), field->zero()));
        std::vector<std::string> names;
        for (auto& v : R->vars()) names.push_back(v.name);
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a[i].size(); ++j) {
                MultiPoly p = a[i][j].set_zero(names);
                if (!p.is_zero()) c[i][j] = p.constant_value();
            }
        return c;
    };
    // basis of im(e0) extended by ker(e0): U columns
    auto diagonalize = [&](const FMat& e0, size_t nsl) {
        // image basis: columns of e0 reduced; kernel: (I - e0) columns
        std::vector<FRow> cols;
        auto add_cols = [&](const FMat& msrc) {
            for (size_t j = 0; j < nsl; ++j) {
                FRow v(nsl, field->zero());
                for (size_t i = 0; i < nsl; ++i) v[i] = msrc[i][j];
                cols.push_back(std::move(v));
            }
        };
        add_cols(e0);
        FMat comp(nsl, FRow(nsl, field->zero()));
        for (size_t i = 0; i < nsl; ++i)
            for (size_t j = 0; j < nsl; ++j)
                comp[i][j] = (i == j ? field->one() : field->zero()) - e0[i][j];
        add_cols(comp);
        // greedy basis selection, image columns first
        size_t rank_im = 0;
        FMat work;
        std::vector<FRow> chosen;
        for (size_t c = 0; c < cols.size(); ++c) {
            FMat test = work;
            test.push_back(cols[c]);
            if (rank(test) > static_cast<long>(work.size())) {
                work.push_back(cols[c]);
                chosen.push_back(cols[c]);
                if (c < nsl) ++rank_im;
            }
            if (work.size() == nsl) break;
        }
        // U: columns = chosen vectors
        FMat U(nsl, FRow(nsl, field->zero()));
        for (size_t j = 0; j < chosen.size(); ++j)
            for (size_t i = 0; i < nsl; ++i) U[i][j] = chosen[j][i];
        return std::make_pair(U, rank_im);
    };
    FMat e0E = const_part(eE), e0O = const_part(eO);
    auto [UE, rE] = diagonalize(e0E, r0);
    auto [UO, rO] = diagonalize(e0O, r1);

    // invert U over the field
    auto inv_field = [&](FMat U) {
        size_t nn = U.size();
        FMat aug = U;
        for (size_t i = 0; i < nn; ++i) {
            for (size_t j = 0; j < nn; ++j)
                aug[i].push_back(i == j ? field->one() : field->zero());
        }
        auto piv = row_echelon(aug);
        if (piv.size() != nn) throw std::runtime_error("singular change of basis");
        FMat inv(nn, FRow(nn, field->zero()));
        for (size_t i = 0; i < nn; ++i)
            for (size_t j = 0; j < nn; ++j) inv[i][j] = aug[i][nn + j];
        return inv;
    };
    FMat UEi = inv_field(UE), UOi = inv_field(UO);

    auto to_poly = [&](const FMat& a) {
        PolyMat p(a.size(), std::vector<MultiPoly>(a.empty() ? 0 : a[0].size(), MultiPoly(R)));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < a[i].size(); ++j)
                if (!a[i][j].is_zero()) p[i][j] = MultiPoly::constant(R, a[i][j]);
        return p;
    };
    PolyMat UEp = to_poly(UE), UEip = to_poly(UEi), UOp = to_poly(UO), UOip = to_poly(UOi);
    // conjugate everything: d1' = UE^{-1} d1 UO etc.; e' = U^{-1} e U
    PolyMat D1 = mat_mul(UEip, mat_mul(n->d1(), UOp));
    PolyMat D0 = mat_mul(UOip, mat_mul(n->d0(), UEp));
    eE = mat_mul(UEip, mat_mul(eE, UEp));
    eO = mat_mul(UOip, mat_mul(eO, UOp));

    // iota = e . incl_first_r ; pi = proj_first_r ; piiota = top-left block
    auto cut_cols = [&](const PolyMat& a, size_t r) {
        PolyMat out(a.size(), std::vector<MultiPoly>(r, MultiPoly(R)));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < r; ++j) out[i][j] = a[i][j];
        return out;
    };
    auto cut_rows = [&](const PolyMat& a, size_t r) {
        PolyMat out(r, std::vector<MultiPoly>(a.empty() ? 0 : a[0].size(), MultiPoly(R)));
        for (size_t i = 0; i < r; ++i) out[i] = a[i];
        return out;
    };
    PolyMat iotaE = cut_cols(eE, rE), iotaO = cut_cols(eO, rO);
    PolyMat piiE = cut_rows(iotaE, rE), piiO = cut_rows(iotaO, rO);  // pi iota

    // invert I + nilpotent over the polynomial ring by Neumann series
    auto inv_unitriangular = [&](const PolyMat& a) {
        size_t nn = a.size();
        PolyMat T = a;
        for (size_t i = 0; i < nn; ++i) T[i][i] -= MultiPoly::constant(R, Rat(1));
        PolyMat acc = mat_identity(R, nn);
        PolyMat term = mat_identity(R, nn);
        for (size_t k = 0; k < nn * 4 + 4; ++k) {
            term = mat_mul(term, T);
            if (mat_is_zero(term)) break;
            if (k % 2 == 0)
                acc = mat_sub(acc, term);
            else
                acc = mat_add(acc, term);
            if (k == nn * 4 + 3)
                throw std::runtime_error("pi iota is not unipotent; splitting failed");
        }
        return acc;
    };
    PolyMat piiEinv = inv_unitriangular(piiE);
    PolyMat piiOinv = inv_unitriangular(piiO);
    PolyMat itE = mat_mul(iotaE, piiEinv);  // iota-tilde
    PolyMat itO = mat_mul(iotaO, piiOinv);

    // d_P = pi d iota-tilde
    PolyMat dP1 = cut_rows(mat_mul(D1, itO), rE);
    PolyMat dP0 = cut_rows(mat_mul(D0, itE), rO);

    std::optional<Grading> g;
    if (n->graded()) {
        // charges permuted by the constant conjugation: slot charges of the
        // selected image basis; U's column j is supported on slots of a
        // single charge when e0 respects the grading
        Grading gg;
        for (size_t j = 0; j < rE; ++j) {
            Rat c(0);
            for (size_t i = 0; i < r0; ++i)
                if (!UE[i][j].is_zero()) c = n->grading().even[i];
            gg.even.push_back(c);
        }
        for (size_t j = 0; j < rO; ++j) {
            Rat c(0);
            for (size_t i = 0; i < r1; ++i)
                if (!UO[i][j].is_zero()) c = n->grading().odd[i];
            gg.odd.push_back(c);
        }
        g = std::move(gg);
    }
    return mf_make(R, n->potential_left(), n->potential_right(), dP1, dP0, std::move(g));
}

}  // namespace

MFPtr finite_rank_reduce(const MFPtr& m, std::optional<Rat> bound) {
    (void)bound;
    MFPtr cur = m;
    while (true) {
        auto internals = cur->internal_vars();
        // drop internal variables that never occur
        std::string target;
        for (auto& v : internals) {
            int idx = cur->ring()->index_of(v);
            bool occ = false;
            auto scan = [&](const PolyMat& a) {
                for (auto& row : a)
                    for (auto& p : row)
                        for (auto& [e, c] : p.terms())
                            if (e[static_cast<size_t>(idx)] > 0) return true;
                return false;
            };
            occ = scan(cur->d1()) || scan(cur->d0());
            if (occ) {
                target = v;
                break;
            }
        }
        if (target.empty()) {
            // no occurring internal variable: strip the inert ones and
            // finish with a plain unit elimination
            std::vector<Variable> svars;
            for (auto& v : cur->ring()->vars()) {
                if (v.role == VarRole::Internal) {
                    int idx = cur->ring()->index_of(v.name);
                    bool occ = false;
                    for (auto* mat : {&cur->d1(), &cur->d0()})
                        for (auto& row : *mat)
                            for (auto& p : row)
                                for (auto& [e, c] : p.terms())
                                    if (e[static_cast<size_t>(idx)] > 0) occ = true;
                    if (occ) svars.push_back(v);
                } else {
                    svars.push_back(v);
                }
            }
            auto sring = std::make_shared<WeightedRing>(cur->ring()->field(), svars);
            PolyMat d1 = cur->d1(), d0 = cur->d0();
            for (auto& row : d1)
                for (auto& p : row) p = p.map_ring(sring);
            for (auto& row : d0)
                for (auto& p : row) p = p.map_ring(sring);
            std::optional<Grading> g;
            if (cur->graded()) g = cur->grading();
            auto stripped =
                mf_make(sring, cur->potential_left().map_ring(sring),
                        cur->potential_right().map_ring(sring), d1, d0, std::move(g));
            return eliminate_units_tracked(stripped).min;
        }
        int vi = cur->ring()->index_of(target);

        // find the null-homotopic monic relation, smallest degree first
        std::optional<Relation> rel;
        int cap = 2 * cur->ring()->nvars() + 12;
        for (int nn = 1; nn <= cap; ++nn) {
            rel = solve_relation(cur, vi, nn);
            if (rel) break;
        }
        if (!rel)
            throw BoundTooSmallError("no monic null-homotopic relation found for variable " +
                                     target);

        RingPtr small;
        MFPtr N = quotient_model(cur, vi, *rel, small);
        auto [eE, eO] = connecting_idempotent(cur, vi, *rel, N, small);

        Tracked tk = eliminate_units_tracked(N);
        // transport e: e_min = psi e xi
        PolyMat emE = mat_mul(tk.psi_e, mat_mul(eE, tk.xi_e));
        PolyMat emO = mat_mul(tk.psi_o, mat_mul(eO, tk.xi_o));

        // Newton strictification: e <- 3e^2 - 2e^3, converges exactly in the
        // graded setting
        auto newton = [&](PolyMat& e) {
            for (int it = 0; it < 64; ++it) {
                PolyMat e2 = mat_mul(e, e);
                if (mat_is_zero(mat_sub(e2, e))) return;
                PolyMat e3 = mat_mul(e2, e);
                e = mat_add(mat_scale_poly(e2, MultiPoly::constant(tk.min->ring(), Rat(3))),
                            mat_scale_poly(e3, MultiPoly::constant(tk.min->ring(), Rat(-2))));
            }
            throw NoProgressError("idempotent strictification did not converge");
        };
        newton(emE);
        newton(emO);

        cur = split_strict_idempotent(tk.min, emE, emO);
    }
}

}  // namespace mfcas
