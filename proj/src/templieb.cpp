#include "mfcas/templieb.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace mfcas {

// ---------------------------------------------------------------------------
// Rational functions in q

namespace {

using UP = std::vector<Rat>;

void trim(UP& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

UP mul(const UP& a, const UP& b) {
    if (a.empty() || b.empty()) return {};
    UP r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

UP add(const UP& a, const UP& b) {
    UP r = a;
    if (r.size() < b.size()) r.resize(b.size(), Rat(0));
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

UP neg(const UP& a) {
    UP r = a;
    for (auto& c : r) c = -c;
    return r;
}

UP divmod(UP a, const UP& b, UP& rem) {
    UP q(a.size() > b.size() - 1 ? a.size() - b.size() + 1 : 0, Rat(0));
    while (a.size() >= b.size() && !a.empty()) {
        Rat c = a.back() / b.back();
        size_t sh = a.size() - b.size();
        q[sh] = c;
        for (size_t i = 0; i < b.size(); ++i) a[sh + i] -= c * b[i];
        trim(a);
    }
    rem = a;
    trim(q);
    return q;
}

UP gcd(UP a, UP b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        UP r;
        divmod(a, b, r);
        a = b;
        b = r;
    }
    if (!a.empty()) {
        Rat lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

}  // namespace

RationalFunction RationalFunction::variable() {
    RationalFunction r;
    r.num_ = {Rat(0), Rat(1)};
    return r;
}

RationalFunction RationalFunction::from_poly(std::vector<Rat> coeffs) {
    RationalFunction r;
    r.num_ = std::move(coeffs);
    trim(r.num_);
    return r;
}

void RationalFunction::reduce() {
    trim(num_);
    trim(den_);
    if (num_.empty()) {
        den_ = {Rat(1)};
        return;
    }
    UP g = gcd(num_, den_);
    if (g.size() > 1) {
        UP r;
        num_ = divmod(num_, g, r);
        den_ = divmod(den_, g, r);
    }
    Rat lead = den_.back();
    if (lead != 1) {
        for (auto& c : den_) c /= lead;
        for (auto& c : num_) c /= lead;
    }
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction r = *this;
    r.num_ = neg(r.num_);
    return r;
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    RationalFunction r;
    r.num_ = add(mul(num_, o.den_), mul(o.num_, den_));
    r.den_ = mul(den_, o.den_);
    r.reduce();
    return r;
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return *this + (-o);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    RationalFunction r;
    r.num_ = mul(num_, o.num_);
    r.den_ = mul(den_, o.den_);
    r.reduce();
    return r;
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero rational function");
    RationalFunction r;
    r.num_ = mul(num_, o.den_);
    r.den_ = mul(den_, o.num_);
    r.reduce();
    return r;
}

bool RationalFunction::operator==(const RationalFunction& o) const {
    return num_ == o.num_ && den_ == o.den_;
}

FieldElement RationalFunction::evaluate(const FieldElement& value) const {
    auto eval_poly = [&](const UP& p) {
        FieldElement acc = value.field()->zero();
        for (size_t i = p.size(); i-- > 0;) acc = acc * value + value.field()->from_rat(p[i]);
        return acc;
    };
    FieldElement d = eval_poly(den_);
    if (d.is_zero())
        throw UndefinedProjectorError("denominator vanishes at the chosen quantum parameter");
    return eval_poly(num_) * d.inverse();
}

std::string RationalFunction::str() const {
    auto poly_str = [](const UP& p) {
        if (p.empty()) return std::string("0");
        std::ostringstream os;
        bool first = true;
        for (size_t i = p.size(); i-- > 0;) {
            if (p[i] == 0) continue;
            Rat a = p[i];
            if (!first)
                os << (a < 0 ? " - " : " + ");
            else if (a < 0)
                os << "-";
            first = false;
            Rat ab = a < 0 ? Rat(-a) : a;
            if (ab != 1 || i == 0) os << ab.get_str();
            if (i > 0) os << (ab != 1 ? "*q" : "q");
            if (i > 1) os << "^" << i;
        }
        return os.str();
    };
    if (den_.size() == 1 && den_[0] == 1) return poly_str(num_);
    return "(" + poly_str(num_) + ")/(" + poly_str(den_) + ")";
}

RationalFunction quantum_int(long l) {
    // (q^l - q^{-l})/(q - q^{-1}) = (q^{2l} - 1)/(q^{l+1} - q^{l-1}):
    // as a polynomial: q^{l-1} + q^{l-3} + ... + q^{1-l}; clear q powers:
    // [l] = (sum_{k=0}^{l-1} q^{2k}) / q^{l-1}
    if (l < 0) throw std::invalid_argument("quantum_int needs l >= 0");
    if (l == 0) return RationalFunction(Rat(0));
    RationalFunction num = RationalFunction::from_poly([&] {
        std::vector<Rat> c(static_cast<size_t>(2 * l - 1), Rat(0));
        for (long k = 0; k < l; ++k) c[static_cast<size_t>(2 * k)] = 1;
        return c;
    }());
    std::vector<Rat> d(static_cast<size_t>(l), Rat(0));
    d.back() = 1;  // q^{l-1}
    return num / RationalFunction::from_poly(d);
}

// ---------------------------------------------------------------------------
// Planar pairings

PlanarPairing PlanarPairing::identity(int n) {
    PlanarPairing p;
    p.n = n;
    p.m = n;
    p.partner.resize(static_cast<size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
        p.partner[static_cast<size_t>(i)] = n + i;
        p.partner[static_cast<size_t>(n + i)] = i;
    }
    return p;
}

PlanarPairing PlanarPairing::e_gen(int n, int i) {
    if (i < 0 || i + 1 >= n) throw std::invalid_argument("e_gen index out of range");
    PlanarPairing p = identity(n);
    auto join = [&](int a, int b) {
        p.partner[static_cast<size_t>(a)] = b;
        p.partner[static_cast<size_t>(b)] = a;
    };
    join(i, i + 1);
    join(n + i, n + i + 1);
    return p;
}

bool PlanarPairing::planar() const {
    // boundary order: bottom 0..n-1 left to right, then top right to left
    int total = n + m;
    std::vector<int> pos(static_cast<size_t>(total));
    for (int i = 0; i < n; ++i) pos[static_cast<size_t>(i)] = i;
    for (int j = 0; j < m; ++j) pos[static_cast<size_t>(n + j)] = n + (m - 1 - j);
    for (int a = 0; a < total; ++a) {
        int b = partner[static_cast<size_t>(a)];
        if (b == a) return false;
        for (int c = a + 1; c < total; ++c) {
            if (c == b) continue;
            int dd = partner[static_cast<size_t>(c)];
            if (dd == a || dd == c) continue;
            int pa = pos[static_cast<size_t>(a)], pb = pos[static_cast<size_t>(b)];
            int pc = pos[static_cast<size_t>(c)], pd = pos[static_cast<size_t>(dd)];
            int lo = std::min(pa, pb), hi = std::max(pa, pb);
            bool c_in = pc > lo && pc < hi;
            bool d_in = pd > lo && pd < hi;
            if (c_in != d_in) return false;
        }
    }
    return true;
}

std::string PlanarPairing::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (int a = 0; a < n + m; ++a) {
        int b = partner[static_cast<size_t>(a)];
        if (b < a) continue;
        if (!first) os << ",";
        first = false;
        auto name = [&](int k) {
            return k < n ? "b" + std::to_string(k) : "t" + std::to_string(k - n);
        };
        os << name(a) << "-" << name(b);
    }
    os << "}";
    return os.str();
}

std::vector<PlanarPairing> enumerate_pairings(int n, int m) {
    std::vector<PlanarPairing> out;
    if ((n + m) % 2 != 0) return out;
    int total = n + m;
    std::vector<int> partner(static_cast<size_t>(total), -1);
    std::function<void(int)> rec = [&](int a) {
        while (a < total && partner[static_cast<size_t>(a)] >= 0) ++a;
        if (a == total) {
            PlanarPairing p;
            p.n = n;
            p.m = m;
            p.partner = partner;
            if (p.planar()) out.push_back(p);
            return;
        }
        for (int b = a + 1; b < total; ++b) {
            if (partner[static_cast<size_t>(b)] >= 0) continue;
            partner[static_cast<size_t>(a)] = b;
            partner[static_cast<size_t>(b)] = a;
            rec(a + 1);
            partner[static_cast<size_t>(a)] = -1;
            partner[static_cast<size_t>(b)] = -1;
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------------------
// TL morphisms

template <class K>
void TLMorphism<K>::add(const PlanarPairing& p, const K& c) {
    auto it = terms_.find(p);
    if (it == terms_.end()) {
        if (!(c == K())) terms_.emplace(p, c);
    } else {
        it->second = it->second + c;
        if (it->second == K()) terms_.erase(it);
    }
}

template <class K>
TLMorphism<K> TLMorphism<K>::operator+(const TLMorphism& o) const {
    TLMorphism r = *this;
    for (auto& [p, c] : o.terms_) r.add(p, c);
    return r;
}

template <class K>
TLMorphism<K> TLMorphism<K>::operator-(const TLMorphism& o) const {
    TLMorphism r = *this;
    for (auto& [p, c] : o.terms_) {
        K n = K() - c;
        r.add(p, n);
    }
    return r;
}

template <class K>
TLMorphism<K> TLMorphism<K>::scale(const K& c) const {
    TLMorphism r(n_, m_);
    if (c == K()) return r;
    for (auto& [p, t] : terms_) r.add(p, t * c);
    return r;
}

template <class K>
TLMorphism<K> TLMorphism<K>::identity(int n, const K& one) {
    TLMorphism r(n, n);
    r.add(PlanarPairing::identity(n), one);
    return r;
}

template <class K>
TLMorphism<K> TLMorphism<K>::generator(int n, int i, const K& one) {
    TLMorphism r(n, n);
    r.add(PlanarPairing::e_gen(n, i), one);
    return r;
}

template <class K>
TLMorphism<K> tl_compose(const TLMorphism<K>& g, const TLMorphism<K>& f, const K& kappa) {
    if (f.m() != g.n()) throw std::invalid_argument("tl_compose arity mismatch");
    TLMorphism<K> out(f.n(), g.m());
    int n = f.n(), mid = f.m(), k = g.m();
    for (auto& [pf, cf] : f.terms()) {
        for (auto& [pg, cg] : g.terms()) {
            // nodes: bottom 0..n-1, mid n..n+mid-1, top n+mid..n+mid+k-1
            // union-find over chains
            int total = n + mid + k;
            std::vector<int> adj(static_cast<size_t>(total), -1);
            auto idf = [&](int a) { return a; };                       // f nodes
            auto idg = [&](int a) { return a < mid ? n + a : n + a; };  // g bottom = mid
            std::vector<std::vector<int>> nbr(static_cast<size_t>(total));
            for (int a = 0; a < n + mid; ++a) {
                int b = pf.partner[static_cast<size_t>(a)];
                if (b < a) continue;
                nbr[static_cast<size_t>(idf(a))].push_back(idf(b));
                nbr[static_cast<size_t>(idf(b))].push_back(idf(a));
            }
            for (int a = 0; a < mid + k; ++a) {
                int b = pg.partner[static_cast<size_t>(a)];
                if (b < a) continue;
                nbr[static_cast<size_t>(idg(a))].push_back(idg(b));
                nbr[static_cast<size_t>(idg(b))].push_back(idg(a));
            }
            (void)adj;
            // trace chains from outer nodes
            std::vector<bool> used(static_cast<size_t>(total), false);
            PlanarPairing res;
            res.n = n;
            res.m = k;
            res.partner.assign(static_cast<size_t>(n + k), -1);
            auto outer_index = [&](int node) {
                if (node < n) return node;             // bottom
                if (node >= n + mid) return node - mid;  // top, reindexed
                return -1;
            };
            for (int s = 0; s < total; ++s) {
                if (used[static_cast<size_t>(s)]) continue;
                if (outer_index(s) < 0) continue;
                // walk the chain
                int prev = -1, cur = s;
                used[static_cast<size_t>(cur)] = true;
                while (true) {
                    int next = -1;
                    for (int t : nbr[static_cast<size_t>(cur)])
                        if (t != prev) {
                            next = t;
                            break;
                        }
                    // at a mid node, degree 2: one edge from f, one from g;
                    // at outer nodes degree 1
                    if (next < 0) break;
                    prev = cur;
                    cur = next;
                    used[static_cast<size_t>(cur)] = true;
                    if (outer_index(cur) >= 0) break;
                }
                int a = outer_index(s), b = outer_index(cur);
                res.partner[static_cast<size_t>(a)] = b;
                res.partner[static_cast<size_t>(b)] = a;
            }
            // count closed loops among unused mid nodes
            int loops = 0;
            for (int s = n; s < n + mid; ++s) {
                if (used[static_cast<size_t>(s)]) continue;
                ++loops;
                int prev = -1, cur = s;
                used[static_cast<size_t>(cur)] = true;
                while (true) {
                    int next = -1;
                    for (int t : nbr[static_cast<size_t>(cur)])
                        if (t != prev) {
                            next = t;
                            break;
                        }
                    if (next == s || next < 0) break;
                    prev = cur;
                    cur = next;
                    used[static_cast<size_t>(cur)] = true;
                }
            }
            K c = cf * cg;
            for (int l = 0; l < loops; ++l) c = c * kappa;
            out.add(res, c);
        }
    }
    return out;
}

template <class K>
TLMorphism<K> tl_tensor(const TLMorphism<K>& f, const TLMorphism<K>& g) {
    TLMorphism<K> out(f.n() + g.n(), f.m() + g.m());
    for (auto& [pf, cf] : f.terms()) {
        for (auto& [pg, cg] : g.terms()) {
            PlanarPairing p;
            p.n = f.n() + g.n();
            p.m = f.m() + g.m();
            p.partner.assign(static_cast<size_t>(p.n + p.m), -1);
            auto fmap = [&](int a) { return a < f.n() ? a : a + g.n(); };
            auto gmap = [&](int a) { return a < g.n() ? f.n() + a : f.n() + f.m() + a; };
            for (int a = 0; a < f.n() + f.m(); ++a) {
                int b = pf.partner[static_cast<size_t>(a)];
                p.partner[static_cast<size_t>(fmap(a))] = fmap(b);
            }
            for (int a = 0; a < g.n() + g.m(); ++a) {
                int b = pg.partner[static_cast<size_t>(a)];
                p.partner[static_cast<size_t>(gmap(a))] = gmap(b);
            }
            out.add(p, cf * cg);
        }
    }
    return out;
}

template <class K>
K markov_trace(const TLMorphism<K>& f, const K& kappa, const K& one) {
    if (f.n() != f.m()) throw std::invalid_argument("markov_trace needs an endomorphism");
    int n = f.n();
    K acc{};
    for (auto& [p, c] : f.terms()) {
        // close bottom i with top i; count resulting loops
        std::vector<bool> used(static_cast<size_t>(2 * n), false);
        int loops = 0;
        for (int s = 0; s < 2 * n; ++s) {
            if (used[static_cast<size_t>(s)]) continue;
            ++loops;
            int cur = s;
            bool via_partner = true;
            while (!used[static_cast<size_t>(cur)]) {
                used[static_cast<size_t>(cur)] = true;
                if (via_partner)
                    cur = p.partner[static_cast<size_t>(cur)];
                else
                    cur = cur < n ? cur + n : cur - n;  // closure arc
                via_partner = !via_partner;
            }
        }
        K term = c;
        for (int l = 0; l < loops; ++l) term = term * kappa;
        acc = acc + term;
    }
    (void)one;
    return acc;
}

template class TLMorphism<RationalFunction>;
template class TLMorphism<FieldElement>;

template TLMorphism<RationalFunction> tl_compose(const TLMorphism<RationalFunction>&,
                                                 const TLMorphism<RationalFunction>&,
                                                 const RationalFunction&);
template TLMorphism<FieldElement> tl_compose(const TLMorphism<FieldElement>&,
                                             const TLMorphism<FieldElement>&,
                                             const FieldElement&);
template TLMorphism<RationalFunction> tl_tensor(const TLMorphism<RationalFunction>&,
                                                const TLMorphism<RationalFunction>&);
template TLMorphism<FieldElement> tl_tensor(const TLMorphism<FieldElement>&,
                                            const TLMorphism<FieldElement>&);
template RationalFunction markov_trace(const TLMorphism<RationalFunction>&,
                                       const RationalFunction&, const RationalFunction&);
template FieldElement markov_trace(const TLMorphism<FieldElement>&, const FieldElement&,
                                   const FieldElement&);

// ---------------------------------------------------------------------------
// Wenzl recursion

namespace {

template <class K>
TLMorphism<K> embed(const TLMorphism<K>& f, int n, const K& one) {
    // add vertical strands on the right to land in TL(n)
    TLMorphism<K> id1 = TLMorphism<K>::identity(n - f.n(), one);
    if (f.n() == n) return f;
    return tl_tensor(f, id1);
}

template <class K>
TLMorphism<K> wenzl_impl(int n, const K& one, const K& kappa,
                         const std::function<K(long)>& qint) {
    if (n < 1) throw std::invalid_argument("wenzl needs n >= 1");
    TLMorphism<K> p = TLMorphism<K>::identity(1, one);
    for (int k = 1; k < n; ++k) {
        // p_{k+1} = p_k - [k]/[k+1] p_k e_k p_k, all inside TL(k+1)
        TLMorphism<K> pk = embed(p, k + 1, one);
        K denom = qint(k + 1);
        if (denom == K())
            throw UndefinedProjectorError("quantum integer [" + std::to_string(k + 1) +
                                          "] vanishes; the last well-defined projector is p_" +
                                          std::to_string(k));
        K coeff = qint(k) / denom;
        TLMorphism<K> ek = TLMorphism<K>::generator(k + 1, k - 1, one);
        TLMorphism<K> corr = tl_compose(pk, tl_compose(ek, pk, kappa), kappa);
        p = pk - corr.scale(coeff);
    }
    return p;
}

}  // namespace

TLMorphism<RationalFunction> wenzl(int n) {
    RationalFunction one(Rat(1));
    RationalFunction q = RationalFunction::variable();
    RationalFunction kappa = q + one / q;
    return wenzl_impl<RationalFunction>(n, one, kappa,
                                        [](long l) { return quantum_int(l); });
}

TLMorphism<FieldElement> wenzl_at(int n, const FieldElement& q) {
    FieldElement one = q.field()->one();
    FieldElement kappa = q + q.inverse();
    return wenzl_impl<FieldElement>(n, one, kappa, [&](long l) {
        // [l] at q: (q^l - q^{-l})/(q - q^{-1})
        FieldElement num = q.pow(l) - q.pow(-l);
        FieldElement den = q - q.inverse();
        return num * den.inverse();
    });
}

WenzlReport wenzl_verify(int n) {
    WenzlReport rep;
    RationalFunction one(Rat(1));
    RationalFunction q = RationalFunction::variable();
    RationalFunction kappa = q + one / q;
    auto p = wenzl(n);
    rep.nonzero = !p.is_zero();
    rep.idempotent = tl_compose(p, p, kappa) == p;
    rep.annihilates = true;
    for (int i = 1; i < n; ++i) {
        auto ei = TLMorphism<RationalFunction>::generator(n, i - 1, one);
        if (!tl_compose(p, ei, kappa).is_zero() || !tl_compose(ei, p, kappa).is_zero())
            rep.annihilates = false;
    }
    rep.trace_ok = markov_trace(p, kappa, one) == quantum_int(n + 1);
    return rep;
}

namespace {

// Jones normal form e-words for TL(n): products of descending runs
// (e_{a1}..e_{b1})(e_{a2}..e_{b2})... with a_i, b_i strictly increasing and
// b_i <= a_i; generators are 1-based in the printout.
void enumerate_words(int n, int min_a, int min_b, std::vector<std::pair<int, int>>& cur,
                     std::vector<std::vector<std::pair<int, int>>>& out) {
    out.push_back(cur);
    for (int a = min_a; a < n; ++a)
        for (int b = min_b; b <= a; ++b) {
            cur.emplace_back(a, b);
            enumerate_words(n, a + 1, b + 1, cur, out);
            cur.pop_back();
        }
}

}  // namespace

std::string wenzl_str(int n) {
    RationalFunction one(Rat(1));
    RationalFunction q = RationalFunction::variable();
    RationalFunction kappa = q + one / q;
    auto p = wenzl(n);
    // map diagrams to canonical e-words
    std::vector<std::vector<std::pair<int, int>>> words;
    std::vector<std::pair<int, int>> cur;
    enumerate_words(n, 1, 1, cur, words);
    std::map<PlanarPairing, std::string> word_of;
    for (auto& w : words) {
        TLMorphism<RationalFunction> d = TLMorphism<RationalFunction>::identity(n, one);
        std::string name;
        for (auto& [a, b] : w) {
            for (int i = a; i >= b; --i) {
                d = tl_compose(d, TLMorphism<RationalFunction>::generator(n, i - 1, one), kappa);
                if (!name.empty()) name += "*";
                name += "e" + std::to_string(i);
            }
        }
        if (name.empty()) name = "id";
        if (d.terms().size() == 1) word_of[d.terms().begin()->first] = name;
    }
    std::ostringstream os;
    os << "p_" << n << " =";
    bool first = true;
    for (auto& [pp, c] : p.terms()) {
        os << (first ? " " : " + ");
        first = false;
        auto it = word_of.find(pp);
        std::string nm = it != word_of.end() ? it->second : pp.str();
        os << "(" << c.str() << ")*" << nm;
    }
    return os.str();
}

}  // namespace mfcas
