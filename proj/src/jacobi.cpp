#include "mfcas/jacobi.hpp"

#include <algorithm>

#include "mfcas/linalg.hpp"

namespace mfcas {

namespace {

bool divides(const Exponents& a, const Exponents& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

/// All monomials of exact weighted degree delta (positive weights).
void monomials_of_degree(const RingPtr& ring, const Rat& delta, size_t i, Exponents& cur,
                         std::vector<Exponents>& out) {
    if (i == cur.size()) {
        if (delta == 0) out.push_back(cur);
        return;
    }
    const Rat& w = ring->vars()[i].weight;
    if (w == 0) throw std::invalid_argument("zero-weight variable in monomial enumeration");
    for (int e = 0;; ++e) {
        Rat rest = delta - Rat(e) * w;
        if (rest < 0) break;
        cur[i] = e;
        monomials_of_degree(ring, rest, i + 1, cur, out);
    }
    cur[i] = 0;
}

std::vector<Exponents> monomials_of_degree(const RingPtr& ring, const Rat& delta) {
    std::vector<Exponents> out;
    if (delta < 0) return out;
    Exponents cur(static_cast<size_t>(ring->nvars()), 0);
    monomials_of_degree(ring, delta, 0, cur, out);
    return out;
}

MultiPoly det_poly(const std::vector<std::vector<MultiPoly>>& m) {
    size_t n = m.size();
    if (n == 0) throw std::invalid_argument("empty matrix");
    if (n == 1) return m[0][0];
    MultiPoly acc(m[0][0].ring());
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<MultiPoly>> minor;
        for (size_t r = 1; r < n; ++r) {
            std::vector<MultiPoly> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        MultiPoly term = m[0][j] * det_poly(minor);
        if (j % 2) term = -term;
        acc += term;
    }
    return acc;
}

}  // namespace

JacobiRingData jacobi_ring(const MultiPoly& W) {
    if (W.is_zero() || W.is_constant())
        throw std::invalid_argument("jacobi_ring needs a nonconstant polynomial");
    const RingPtr& R = W.ring();
    std::vector<MultiPoly> partials;
    for (auto& v : R->vars()) partials.push_back(W.derivative(v.name));
    GroebnerBasis gb(partials);

    // Zero-dimensionality: each variable needs a pure-power leading term.
    int n = R->nvars();
    std::vector<int> cap(static_cast<size_t>(n), -1);
    for (const auto& g : gb.generators()) {
        const Exponents& le = g.leading_exponents();
        int var = -1;
        bool pure = true;
        for (int i = 0; i < n; ++i) {
            if (le[static_cast<size_t>(i)] > 0) {
                if (var >= 0) pure = false;
                var = i;
            }
        }
        if (pure && var >= 0) {
            int e = le[static_cast<size_t>(var)];
            if (cap[static_cast<size_t>(var)] < 0 || e < cap[static_cast<size_t>(var)])
                cap[static_cast<size_t>(var)] = e;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (cap[static_cast<size_t>(i)] < 0)
            throw InfiniteDimensionalError("Jacobi ring infinite dimensional: monomial family " +
                                           R->vars()[static_cast<size_t>(i)].name + "^k survives");
    }

    // enumerate the staircase
    std::vector<Exponents> leads;
    for (const auto& g : gb.generators()) leads.push_back(g.leading_exponents());
    std::vector<Exponents> basis;
    Exponents cur(static_cast<size_t>(n), 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            for (auto& l : leads)
                if (divides(l, cur)) return;
            basis.push_back(cur);
            return;
        }
        for (int e = 0; e < cap[static_cast<size_t>(i)]; ++e) {
            cur[static_cast<size_t>(i)] = e;
            rec(i + 1);
        }
        cur[static_cast<size_t>(i)] = 0;
    };
    rec(0);

    JacobiRingData jd{std::move(gb), std::move(basis), 0, Exponents(), Rat(0)};
    jd.milnor = static_cast<long>(jd.basis.size());

    // socle: unique top weighted-degree basis monomial
    MultiPoly probe(R);
    Rat top(-1);
    int count = 0;
    for (auto& e : jd.basis) {
        Rat d(0);
        for (int i = 0; i < n; ++i) d += Rat(e[static_cast<size_t>(i)]) * R->vars()[static_cast<size_t>(i)].weight;
        if (d > top) {
            top = d;
            jd.socle = e;
            count = 1;
        } else if (d == top) {
            ++count;
        }
    }
    if (count != 1)
        throw std::runtime_error("socle is not one-dimensional at top weighted degree");
    jd.socle_degree = top;
    return jd;
}

MultiPoly hessian(const MultiPoly& W) {
    const RingPtr& R = W.ring();
    int n = R->nvars();
    std::vector<std::vector<MultiPoly>> h(static_cast<size_t>(n),
                                          std::vector<MultiPoly>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                W.derivative(R->vars()[static_cast<size_t>(i)].name)
                    .derivative(R->vars()[static_cast<size_t>(j)].name);
    return det_poly(h);
}

FieldElement residue(const MultiPoly& f, const JacobiRingData& jd, const MultiPoly& W) {
    MultiPoly nf = jd.gb.normal_form(f);
    FieldElement soc_f = nf.coeff_of(jd.socle);
    MultiPoly nh = jd.gb.normal_form(hessian(W));
    FieldElement soc_h = nh.coeff_of(jd.socle);
    if (soc_h.is_zero())
        throw DegenerateHessianError("socle coefficient of the Hessian vanishes");
    return W.ring()->field()->from_rat(Rat(jd.milnor)) * soc_f * soc_h.inverse();
}

FieldElement residue(const MultiPoly& f, const MultiPoly& W) {
    return residue(f, jacobi_ring(W), W);
}

FieldElement residue_transform(const MultiPoly& f, const MultiPoly& W) {
    // x_i^{a_i} = sum_j h_ij dW/dx_j with homogeneous h_ij found by linear
    // algebra; then Res[f] is the coefficient of prod x_i^{a_i - 1} in
    // f det(h).
    const RingPtr& R = W.ring();
    int n = R->nvars();
    std::vector<MultiPoly> partials;
    for (auto& v : R->vars()) partials.push_back(W.derivative(v.name));
    GroebnerBasis gb(partials);
    Rat degW = W.weighted_degree();

    std::vector<std::vector<MultiPoly>> h(static_cast<size_t>(n),
                                          std::vector<MultiPoly>(static_cast<size_t>(n)));
    Exponents a(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const std::string& xi = R->vars()[static_cast<size_t>(i)].name;
        const Rat& wi = R->vars()[static_cast<size_t>(i)].weight;
        for (int ai = 1;; ++ai) {
            if (ai > 512) throw std::runtime_error("residue_transform: no power representation");
            MultiPoly target = MultiPoly::var(R, xi, ai);
            if (!gb.contains(target)) continue;
            // unknowns: coefficients of each h_ij on monomials of degree
            // ai*wi - (degW - w_j)
            std::vector<std::pair<int, Exponents>> unknowns;  // (j, monomial)
            for (int j = 0; j < n; ++j) {
                Rat dj = Rat(ai) * wi - degW + R->vars()[static_cast<size_t>(j)].weight;
                for (auto& m : monomials_of_degree(R, dj)) unknowns.emplace_back(j, m);
            }
            // equations: match coefficients of sum_j h_ij * partial_j
            std::map<Exponents, size_t, GrlexGreater> eqidx;
            auto eq_of = [&](const Exponents& e) {
                auto it = eqidx.find(e);
                if (it == eqidx.end()) it = eqidx.emplace(e, eqidx.size()).first;
                return it->second;
            };
            std::vector<std::vector<std::pair<size_t, FieldElement>>> cols;
            for (auto& [j, m] : unknowns) {
                std::vector<std::pair<size_t, FieldElement>> col;
                MultiPoly prod = MultiPoly::monomial(R, m, R->field()->one()) * partials[static_cast<size_t>(j)];
                for (auto& [e, c] : prod.terms()) col.emplace_back(eq_of(e), c);
                cols.push_back(std::move(col));
            }
            size_t neq = eqidx.size();
            FMat A(neq, FRow(unknowns.size(), R->field()->zero()));
            for (size_t u = 0; u < unknowns.size(); ++u)
                for (auto& [r, c] : cols[u]) A[r][u] = c;
            FRow b(neq, R->field()->zero());
            for (auto& [e, c] : target.terms()) b[eq_of(e)] = c;
            auto sol = solve_linear(A, b);
            if (!sol) continue;
            a[static_cast<size_t>(i)] = ai;
            for (int j = 0; j < n; ++j) h[static_cast<size_t>(i)][static_cast<size_t>(j)] = MultiPoly(R);
            for (size_t u = 0; u < unknowns.size(); ++u) {
                if ((*sol)[u].is_zero()) continue;
                auto& [j, m] = unknowns[u];
                h[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                    MultiPoly::monomial(R, m, (*sol)[u]);
            }
            break;
        }
    }
    MultiPoly g = f * det_poly(h);
    Exponents want(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) want[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] - 1;
    return g.coeff_of(want);
}

Rat central_charge(const MultiPoly& W) {
    Rat d = W.weighted_degree();
    if (d != 2)
        throw NotHomogeneousError("central_charge expects weighted degree 2, got " +
                                  Rat(d).get_str());
    Rat c(0);
    // only variables actually occurring in W count
    std::vector<bool> used(static_cast<size_t>(W.ring()->nvars()), false);
    for (auto& [e, coeff] : W.terms())
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) used[i] = true;
    for (size_t i = 0; i < used.size(); ++i)
        if (used[i]) c += Rat(1) - W.ring()->vars()[i].weight;
    return c;
}

}  // namespace mfcas
