#include "mfcas/pidmod.hpp"

namespace mfcas {

namespace {

int var_index(const RingPtr& ring) {
    if (ring->nvars() == 0) return -1;
    if (ring->nvars() == 1) return 0;
    throw std::invalid_argument("pidmod expects a ring with at most one variable");
}

long deg_of(const MultiPoly& p, int vi) {
    if (p.is_zero()) return -1;
    if (vi < 0) return 0;
    return p.degree_in(vi);
}

/// Division with remainder in k[y]: a = q*b + r, deg r < deg b.
void divmod(const MultiPoly& a, const MultiPoly& b, int vi, MultiPoly& q, MultiPoly& r) {
    q = MultiPoly(a.ring());
    r = a;
    if (b.is_zero()) throw std::invalid_argument("division by zero");
    long db = deg_of(b, vi);
    FieldElement lbinv = b.leading_coeff().inverse();
    while (!r.is_zero() && deg_of(r, vi) >= db) {
        long k = deg_of(r, vi) - db;
        Exponents e(static_cast<size_t>(a.ring()->nvars()), 0);
        if (vi >= 0) e[static_cast<size_t>(vi)] = static_cast<int>(k);
        MultiPoly m = MultiPoly::monomial(a.ring(), e, r.leading_coeff() * lbinv);
        q += m;
        r -= m * b;
    }
}

}  // namespace

SmithResult smith_normal_form(const PolyMat& A, const RingPtr& ring) {
    int vi = var_index(ring);
    size_t n = A.size();
    size_t m = n ? A[0].size() : 0;
    SmithResult res;
    res.S = A;
    res.U = mat_identity(ring, n);
    res.V = mat_identity(ring, m);
    auto& S = res.S;
    auto& U = res.U;
    auto& V = res.V;

    auto row_sub = [&](size_t r1, size_t r2, const MultiPoly& f) {
        // row r1 -= f * row r2 (in S and U)
        for (size_t c = 0; c < m; ++c) S[r1][c] -= f * S[r2][c];
        for (size_t c = 0; c < n; ++c) U[r1][c] -= f * U[r2][c];
    };
    auto col_sub = [&](size_t c1, size_t c2, const MultiPoly& f) {
        for (size_t r = 0; r < n; ++r) S[r][c1] -= f * S[r][c2];
        for (size_t r = 0; r < m; ++r) V[r][c1] -= f * V[r][c2];
    };
    auto row_swap = [&](size_t r1, size_t r2) {
        std::swap(S[r1], S[r2]);
        std::swap(U[r1], U[r2]);
    };
    auto col_swap = [&](size_t c1, size_t c2) {
        for (size_t r = 0; r < n; ++r) std::swap(S[r][c1], S[r][c2]);
        for (size_t r = 0; r < m; ++r) std::swap(V[r][c1], V[r][c2]);
    };

    size_t t = 0;
    while (true) {
        if (t < n && t < m) {
            // find a nonzero entry of minimal degree in the remaining block
            long best = -1;
            size_t bi = 0, bj = 0;
            for (size_t i = t; i < n; ++i)
                for (size_t j = t; j < m; ++j) {
                    if (S[i][j].is_zero()) continue;
                    long d = deg_of(S[i][j], vi);
                    if (best < 0 || d < best) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            if (best >= 0) {
                if (bi != t) row_swap(t, bi);
                if (bj != t) col_swap(t, bj);
                bool dirty = false;
                for (size_t i = t + 1; i < n; ++i) {
                    if (S[i][t].is_zero()) continue;
                    MultiPoly q, r;
                    divmod(S[i][t], S[t][t], vi, q, r);
                    row_sub(i, t, q);
                    if (!S[i][t].is_zero()) dirty = true;
                }
                for (size_t j = t + 1; j < m; ++j) {
                    if (S[t][j].is_zero()) continue;
                    MultiPoly q, r;
                    divmod(S[t][j], S[t][t], vi, q, r);
                    col_sub(j, t, q);
                    if (!S[t][j].is_zero()) dirty = true;
                }
                if (!dirty) ++t;
                continue;
            }
        }
        // diagonal complete; enforce the divisibility chain d_i | d_{i+1}
        bool folded = false;
        for (size_t i = 0; i + 1 < t; ++i) {
            if (S[i][i].is_zero() || S[i + 1][i + 1].is_zero()) continue;
            MultiPoly q, rem;
            divmod(S[i + 1][i + 1], S[i][i], vi, q, rem);
            if (rem.is_zero()) continue;
            // fold: col i += col i+1, then rediagonalize from position i
            for (size_t r2 = 0; r2 < n; ++r2) S[r2][i] += S[r2][i + 1];
            for (size_t r2 = 0; r2 < m; ++r2) V[r2][i] += V[r2][i + 1];
            t = i;
            folded = true;
            break;
        }
        if (!folded) break;
    }
    size_t r = t;
    // normalize to monic diagonal
    for (size_t i = 0; i < r; ++i) {
        if (S[i][i].is_zero()) continue;
        FieldElement c = S[i][i].leading_coeff();
        if (c == ring->field()->one()) continue;
        FieldElement inv = c.inverse();
        for (size_t j = 0; j < m; ++j)
            if (!S[i][j].is_zero())
                S[i][j] = S[i][j].scale(inv);
        for (size_t j = 0; j < n; ++j)
            if (!U[i][j].is_zero()) U[i][j] = U[i][j].scale(inv);
    }
    res.rank = r;
    return res;
}

HomologySpace::HomologySpace(const PolyMat& Dout, const PolyMat& Din, const RingPtr& ring,
                             size_t rank_in) : ring_(ring) {
    int vi = var_index(ring);
    (void)vi;
    ambient_ = Dout.empty() ? (Din.size()) : Dout[0].size();
    // kernel of Dout: Smith Dout = U S V; kernel basis = columns of V whose
    // S-column vanishes
    SmithResult so = smith_normal_form(Dout, ring);
    std::vector<size_t> kercols;
    size_t m = ambient_;
    for (size_t j = 0; j < m; ++j) {
        bool zero = j >= so.rank;
        if (!zero && so.S[j][j].is_zero()) zero = true;
        if (zero) kercols.push_back(j);
    }
    kernel_ = PolyMat(m, std::vector<MultiPoly>(kercols.size(), MultiPoly(ring)));
    for (size_t c = 0; c < kercols.size(); ++c)
        for (size_t r = 0; r < m; ++r) kernel_[r][c] = so.V[r][kercols[c]];

    // image of Din expressed in kernel coordinates: solve K X = Din
    ksmith_ = smith_normal_form(kernel_, ring);
    const SmithResult& sk = ksmith_;
    size_t k = kercols.size();
    PolyMat X(k, std::vector<MultiPoly>(rank_in, MultiPoly(ring)));
    for (size_t col = 0; col < rank_in; ++col) {
        // b = Din[:, col]; c = U b; y_j = c_j / s_j; x = V y
        std::vector<MultiPoly> b(m, MultiPoly(ring));
        for (size_t r = 0; r < m; ++r) b[r] = Din[r][col];
        std::vector<MultiPoly> c(m, MultiPoly(ring));
        for (size_t r = 0; r < m; ++r) {
            MultiPoly acc(ring);
            for (size_t j = 0; j < m; ++j)
                if (!sk.U[r][j].is_zero() && !b[j].is_zero()) acc += sk.U[r][j] * b[j];
            c[r] = acc;
        }
        std::vector<MultiPoly> y(k, MultiPoly(ring));
        for (size_t r = 0; r < m; ++r) {
            if (r < sk.rank && !sk.S[r][r].is_zero()) {
                if (!c[r].is_zero()) y[r] = c[r].exact_div(sk.S[r][r]);
            } else if (!c[r].is_zero()) {
                throw std::runtime_error("image is not contained in the kernel");
            }
        }
        for (size_t r = 0; r < k; ++r) {
            MultiPoly acc(ring);
            for (size_t j = 0; j < k; ++j)
                if (!sk.V[r][j].is_zero() && !y[j].is_zero()) acc += sk.V[r][j] * y[j];
            X[r][col] = acc;
        }
    }

    // presentation: k[y]^k / col-span(X); Smith X
    rel_ = smith_normal_form(X, ring);
    smith_divisor_.assign(k, MultiPoly(ring));
    for (size_t i = 0; i < k; ++i) {
        if (i < rel_.rank && !rel_.S[i][i].is_zero()) smith_divisor_[i] = rel_.S[i][i];
    }
    bool field_case = ring->nvars() == 0;  // k[] = k: free generators are 1-dim
    for (size_t i = 0; i < k; ++i) {
        const MultiPoly& d = smith_divisor_[i];
        if (d.is_zero()) {
            if (field_case)
                torsion_basis_.emplace_back(i, 0);
            else
                ++pres_.free_rank;
        } else if (d.total_degree() > 0) {
            pres_.divisors.push_back(d);
            for (long p = 0; p < d.total_degree(); ++p) torsion_basis_.emplace_back(i, p);
        }
    }
}

FRow HomologySpace::coords(const std::vector<MultiPoly>& v) const {
    if (!finite_dimensional())
        throw std::runtime_error("homology has positive free rank");
    int vi = var_index(ring_);
    size_t m = ambient_;
    // kernel coordinates: solve kernel_ x = v via its Smith data
    const SmithResult& sk = ksmith_;
    std::vector<MultiPoly> c(m, MultiPoly(ring_));
    for (size_t r = 0; r < m; ++r) {
        MultiPoly acc(ring_);
        for (size_t j = 0; j < m; ++j)
            if (!sk.U[r][j].is_zero() && !v[j].is_zero()) acc += sk.U[r][j] * v[j];
        c[r] = acc;
    }
    size_t k = kernel_.empty() ? 0 : kernel_[0].size();
    std::vector<MultiPoly> y(k, MultiPoly(ring_));
    for (size_t r = 0; r < m; ++r) {
        if (r < sk.rank && !sk.S[r][r].is_zero()) {
            if (!c[r].is_zero()) y[r] = c[r].exact_div(sk.S[r][r]);
        } else if (!c[r].is_zero()) {
            throw std::runtime_error("vector is not in the kernel");
        }
    }
    std::vector<MultiPoly> x(k, MultiPoly(ring_));
    for (size_t r = 0; r < k; ++r) {
        MultiPoly acc(ring_);
        for (size_t j = 0; j < k; ++j)
            if (!sk.V[r][j].is_zero() && !y[j].is_zero()) acc += sk.V[r][j] * y[j];
        x[r] = acc;
    }
    // smith coordinates of the class: x' = U_rel x, reduce mod divisors
    std::vector<MultiPoly> xp(k, MultiPoly(ring_));
    for (size_t r = 0; r < k; ++r) {
        MultiPoly acc(ring_);
        for (size_t j = 0; j < k; ++j)
            if (!rel_.U[r][j].is_zero() && !x[j].is_zero()) acc += rel_.U[r][j] * x[j];
        xp[r] = acc;
    }
    for (size_t r = 0; r < k; ++r) {
        const MultiPoly& d = smith_divisor_[r];
        if (d.is_zero()) continue;
        if (d.total_degree() == 0) {
            xp[r] = MultiPoly(ring_);
            continue;
        }
        MultiPoly q, rem;
        divmod(xp[r], d, vi, q, rem);
        xp[r] = rem;
    }
    FRow out(torsion_basis_.size(), ring_->field()->zero());
    for (size_t t = 0; t < torsion_basis_.size(); ++t) {
        auto [pos, pw] = torsion_basis_[t];
        Exponents e(static_cast<size_t>(ring_->nvars()), 0);
        if (vi >= 0) e[static_cast<size_t>(vi)] = static_cast<int>(pw);
        out[t] = xp[pos].coeff_of(e);
    }
    return out;
}

std::vector<std::vector<MultiPoly>> HomologySpace::basis_reps() const {
    // generator for smith position i: kernel_ * (V_rel column i), times y^p
    int vi = var_index(ring_);
    size_t k = kernel_.empty() ? 0 : kernel_[0].size();
    std::vector<std::vector<MultiPoly>> reps;
    for (auto& [pos, pw] : torsion_basis_) {
        // column vector in kernel coords: inverse of U_rel change of basis.
        // Classes in smith coords are e_pos; back in kernel coords we need
        // U_rel^{-1} e_pos; since we only need *a* representative we solve
        // U_rel z = e_pos by the same Smith trick on U_rel (unimodular).
        SmithResult su = smith_normal_form(rel_.U, ring_);
        std::vector<MultiPoly> b(k, MultiPoly(ring_));
        Exponents mono(static_cast<size_t>(ring_->nvars()), 0);
        if (vi >= 0) mono[static_cast<size_t>(vi)] = static_cast<int>(pw);
        b[pos] = MultiPoly::monomial(ring_, mono, ring_->field()->one());
        std::vector<MultiPoly> c(k, MultiPoly(ring_));
        for (size_t r = 0; r < k; ++r) {
            MultiPoly acc(ring_);
            for (size_t j = 0; j < k; ++j)
                if (!su.U[r][j].is_zero() && !b[j].is_zero()) acc += su.U[r][j] * b[j];
            c[r] = acc;
        }
        std::vector<MultiPoly> y(k, MultiPoly(ring_));
        for (size_t r = 0; r < k; ++r)
            if (!c[r].is_zero()) y[r] = c[r].exact_div(su.S[r][r]);
        std::vector<MultiPoly> z(k, MultiPoly(ring_));
        for (size_t r = 0; r < k; ++r) {
            MultiPoly acc(ring_);
            for (size_t j = 0; j < k; ++j)
                if (!su.V[r][j].is_zero() && !y[j].is_zero()) acc += su.V[r][j] * y[j];
            z[r] = acc;
        }
        std::vector<MultiPoly> rep(ambient_, MultiPoly(ring_));
        for (size_t r = 0; r < ambient_; ++r) {
            MultiPoly acc(ring_);
            for (size_t j = 0; j < k; ++j)
                if (!kernel_[r][j].is_zero() && !z[j].is_zero()) acc += kernel_[r][j] * z[j];
            rep[r] = acc;
        }
        reps.push_back(std::move(rep));
    }
    return reps;
}

}  // namespace mfcas
