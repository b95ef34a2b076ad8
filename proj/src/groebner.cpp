#include "mfcas/groebner.hpp"

#include <algorithm>
#include <set>

namespace mfcas {

namespace {

bool divides(const Exponents& a, const Exponents& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

Exponents lcm(const Exponents& a, const Exponents& b) {
    Exponents r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
    return r;
}

long deg_sum(const Exponents& e) {
    long d = 0;
    for (int x : e) d += x;
    return d;
}

MultiPoly reduce_full(MultiPoly p, const std::vector<MultiPoly>& gens) {
    MultiPoly rem(p.ring());
    while (!p.is_zero()) {
        bool reduced = false;
        for (const auto& g : gens) {
            if (g.is_zero()) continue;
            if (divides(g.leading_exponents(), p.leading_exponents())) {
                Exponents diff(p.leading_exponents().size());
                for (size_t i = 0; i < diff.size(); ++i)
                    diff[i] = p.leading_exponents()[i] - g.leading_exponents()[i];
                FieldElement c = p.leading_coeff() * g.leading_coeff().inverse();
                p -= MultiPoly::monomial(p.ring(), diff, c) * g;
                reduced = true;
                break;
            }
        }
        if (!reduced) {
            rem += MultiPoly::monomial(p.ring(), p.leading_exponents(), p.leading_coeff());
            p -= MultiPoly::monomial(p.ring(), p.leading_exponents(), p.leading_coeff());
        }
    }
    return rem;
}

}  // namespace

GroebnerBasis::GroebnerBasis(std::vector<MultiPoly> generators) {
    if (generators.empty()) throw std::invalid_argument("empty generator list");
    ring_ = generators.front().ring();
    for (auto& g : generators)
        if (!g.is_zero() && !g.ring()->same(*ring_))
            throw RingMismatchError("generators over different rings");

    std::vector<MultiPoly> basis;
    for (auto& g : generators)
        if (!g.is_zero()) basis.push_back(g.scale(g.leading_coeff().inverse()));

    // pair queue with sugar degrees
    struct Pair {
        size_t i, j;
        long sugar;
        Exponents l;
    };
    auto make_pair = [&](size_t i, size_t j) {
        Exponents l = lcm(basis[i].leading_exponents(), basis[j].leading_exponents());
        long sugar = deg_sum(l) +
                     std::max(basis[i].total_degree() - deg_sum(basis[i].leading_exponents()),
                              basis[j].total_degree() - deg_sum(basis[j].leading_exponents()));
        return Pair{i, j, sugar, l};
    };
    std::vector<Pair> pairs;
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j) pairs.push_back(make_pair(i, j));

    while (!pairs.empty()) {
        auto it = std::min_element(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.sugar != b.sugar) return a.sugar < b.sugar;
            return GrlexGreater{}(b.l, a.l);
        });
        Pair pr = *it;
        pairs.erase(it);

        const MultiPoly& f = basis[pr.i];
        const MultiPoly& g = basis[pr.j];
        // Buchberger's first criterion: coprime leading terms
        {
            bool coprime = true;
            for (size_t k = 0; k < pr.l.size(); ++k)
                if (f.leading_exponents()[k] > 0 && g.leading_exponents()[k] > 0) coprime = false;
            if (coprime) continue;
        }
        Exponents ef(pr.l.size()), eg(pr.l.size());
        for (size_t k = 0; k < pr.l.size(); ++k) {
            ef[k] = pr.l[k] - f.leading_exponents()[k];
            eg[k] = pr.l[k] - g.leading_exponents()[k];
        }
        MultiPoly s = MultiPoly::monomial(ring_, ef, ring_->field()->one()) * f -
                      MultiPoly::monomial(ring_, eg, ring_->field()->one()) * g;
        MultiPoly r = reduce_full(std::move(s), basis);
        if (r.is_zero()) continue;
        r = r.scale(r.leading_coeff().inverse());
        size_t n = basis.size();
        basis.push_back(std::move(r));
        for (size_t i = 0; i < n; ++i) pairs.push_back(make_pair(i, n));
    }

    // interreduce to the reduced basis
    std::vector<MultiPoly> reduced;
    for (size_t i = 0; i < basis.size(); ++i) {
        // discard if leading term divisible by another basis element's lead
        bool redundant = false;
        for (size_t j = 0; j < basis.size(); ++j) {
            if (i == j) continue;
            if (divides(basis[j].leading_exponents(), basis[i].leading_exponents())) {
                if (basis[j].leading_exponents() == basis[i].leading_exponents() && j > i) continue;
                redundant = true;
                break;
            }
        }
        if (!redundant) reduced.push_back(basis[i]);
    }
    for (size_t i = 0; i < reduced.size(); ++i) {
        std::vector<MultiPoly> others;
        for (size_t j = 0; j < reduced.size(); ++j)
            if (j != i) others.push_back(reduced[j]);
        reduced[i] = reduce_full(reduced[i], others);
        reduced[i] = reduced[i].scale(reduced[i].leading_coeff().inverse());
    }
    std::sort(reduced.begin(), reduced.end(), [](const MultiPoly& a, const MultiPoly& b) {
        return a.leading_exponents() > b.leading_exponents();
    });
    gens_ = std::move(reduced);
}

MultiPoly GroebnerBasis::normal_form(const MultiPoly& p) const {
    if (!p.is_zero() && !p.ring()->same(*ring_))
        throw RingMismatchError("normal_form: ring mismatch");
    return reduce_full(p, gens_);
}

}  // namespace mfcas
