#include "mfcas/field.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mfcas {

namespace {

// Dense univariate arithmetic over Q, used for cyclotomic construction and
// the tower's Euclidean inversion. Coefficients low to high, no trailing
// zeros.
using UPoly = std::vector<Rat>;

void utrim(UPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

UPoly umul(const UPoly& a, const UPoly& b) {
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    utrim(r);
    return r;
}

// Exact division, throws if remainder is nonzero.
UPoly udiv_exact(UPoly num, const UPoly& den) {
    if (den.empty()) throw std::runtime_error("division by zero polynomial");
    UPoly q(num.size() > den.size() - 1 ? num.size() - den.size() + 1 : 0, Rat(0));
    while (num.size() >= den.size()) {
        Rat c = num.back() / den.back();
        size_t shift = num.size() - den.size();
        q[shift] = c;
        for (size_t i = 0; i < den.size(); ++i) num[shift + i] -= c * den[i];
        utrim(num);
        if (num.empty()) break;
    }
    if (!num.empty()) throw std::runtime_error("polynomial division not exact");
    utrim(q);
    return q;
}

}  // namespace

std::vector<Rat> cyclotomic_polynomial(int n) {
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, by iterated division.
    if (n < 1) throw std::invalid_argument("cyclotomic order must be >= 1");
    UPoly num(static_cast<size_t>(n) + 1, Rat(0));
    num[0] = -1;
    num[static_cast<size_t>(n)] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        UPoly phi_d_vec = cyclotomic_polynomial(d);
        num = udiv_exact(num, phi_d_vec);
    }
    return num;
}

std::shared_ptr<const NumberField> NumberField::rationals() {
    static std::shared_ptr<const NumberField> q = std::make_shared<NumberField>();
    return q;
}

std::shared_ptr<const NumberField> NumberField::cyclotomic(int n) {
    auto phi = cyclotomic_polynomial(n);
    auto f = std::make_shared<NumberField>();
    Level lv;
    lv.symbol = "z" + std::to_string(n);
    lv.degree = static_cast<int>(phi.size()) - 1;
    // g^deg = -(c_0 + c_1 g + ... + c_{deg-1} g^{deg-1})
    for (int j = 0; j < lv.degree; ++j) {
        if (phi[static_cast<size_t>(j)] == 0) continue;
        std::vector<int> e;
        if (j > 0) e = {j};
        lv.power_rule[e] = -phi[static_cast<size_t>(j)];
    }
    f->levels_.push_back(std::move(lv));
    f->cyclo_order_ = n;
    return f;
}

std::shared_ptr<const NumberField> NumberField::extend(const std::string& symbol, int deg,
                                                       const FieldElement& rhs) const {
    if (deg < 1) throw std::invalid_argument("extension degree must be >= 1");
    auto f = std::make_shared<NumberField>();
    f->levels_ = levels_;
    f->cyclo_order_ = cyclo_order_;
    Level lv;
    lv.symbol = symbol;
    lv.degree = deg;
    for (auto& [e, c] : rhs.coords()) {
        std::vector<int> ee = e;
        ee.resize(levels_.size() + 1, 0);
        while (!ee.empty() && ee.back() == 0) ee.pop_back();
        lv.power_rule[ee] = c;
    }
    f->levels_.push_back(std::move(lv));
    return f;
}

std::shared_ptr<const NumberField> NumberField::extend_min_poly(
    const std::string& symbol, const std::vector<Rat>& monic) const {
    // monic = [c_0, ..., c_{deg-1}, 1]
    if (monic.size() < 2 || monic.back() != 1)
        throw std::invalid_argument("minimal polynomial must be monic of degree >= 1");
    int deg = static_cast<int>(monic.size()) - 1;
    auto f = std::make_shared<NumberField>();
    f->levels_ = levels_;
    f->cyclo_order_ = cyclo_order_;
    Level lv;
    lv.symbol = symbol;
    lv.degree = deg;
    int k = static_cast<int>(levels_.size());
    for (int j = 0; j < deg; ++j) {
        if (monic[static_cast<size_t>(j)] == 0) continue;
        std::vector<int> e(static_cast<size_t>(k) + 1, 0);
        e[static_cast<size_t>(k)] = j;
        while (!e.empty() && e.back() == 0) e.pop_back();
        lv.power_rule[e] = -monic[static_cast<size_t>(j)];
    }
    f->levels_.push_back(std::move(lv));
    return f;
}

std::shared_ptr<const NumberField> NumberField::subtower(int k) const {
    if (k <= 0) return rationals();
    auto f = std::make_shared<NumberField>();
    f->levels_.assign(levels_.begin(), levels_.begin() + k);
    f->cyclo_order_ = cyclo_order_;
    return f;
}

long NumberField::total_degree() const {
    long d = 1;
    for (auto& lv : levels_) d *= lv.degree;
    return d;
}

bool NumberField::same(const NumberField& other) const {
    if (this == &other) return true;
    if (levels_.size() != other.levels_.size()) return false;
    for (size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i].symbol != other.levels_[i].symbol ||
            levels_[i].degree != other.levels_[i].degree ||
            levels_[i].power_rule != other.levels_[i].power_rule)
            return false;
    }
    return true;
}

FieldElement NumberField::zero() const {
    return FieldElement(shared_from_this(), {});
}

FieldElement NumberField::one() const { return from_rat(Rat(1)); }

FieldElement NumberField::from_rat(const Rat& r) const {
    std::map<std::vector<int>, Rat> c;
    if (r != 0) c[{}] = r;
    return FieldElement(shared_from_this(), std::move(c));
}

FieldElement NumberField::generator(int k) const {
    if (levels_.empty()) throw std::invalid_argument("Q has no generator");
    if (k < 0) k = static_cast<int>(levels_.size()) - 1;
    std::vector<int> e(static_cast<size_t>(k) + 1, 0);
    e[static_cast<size_t>(k)] = 1;
    std::map<std::vector<int>, Rat> c;
    c[e] = 1;
    FieldElement r(shared_from_this(), std::move(c));
    r.reduce();
    return r;
}

std::string NumberField::describe() const {
    if (levels_.empty()) return "Q";
    std::string s = "Q";
    for (auto& lv : levels_) s += "(" + lv.symbol + ")";
    return s;
}

bool FieldElement::is_rational() const {
    if (coords_.empty()) return true;
    return coords_.size() == 1 && coords_.begin()->first.empty();
}

Rat FieldElement::rational_value() const {
    if (coords_.empty()) return Rat(0);
    if (!is_rational()) throw std::runtime_error("element is not rational: " + str());
    return coords_.begin()->second;
}

FieldElement FieldElement::operator-() const {
    FieldElement r = *this;
    for (auto& [e, c] : r.coords_) c = -c;
    return r;
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
    FieldElement r = *this;
    for (auto& [e, c] : o.coords_) {
        auto it = r.coords_.find(e);
        if (it == r.coords_.end()) {
            r.coords_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) r.coords_.erase(it);
        }
    }
    if (r.field_->levels() == 0 && o.field_->levels() > 0) r.field_ = o.field_;
    return r;
}

FieldElement FieldElement::operator-(const FieldElement& o) const { return *this + (-o); }

bool FieldElement::operator==(const FieldElement& o) const {
    return coords_ == o.coords_;
}

void FieldElement::reduce() {
    // Reduce exponents that exceed their level degree, top level first.
    const auto& lvs = field_->levels_;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = coords_.begin(); it != coords_.end(); ++it) {
            const auto& e = it->first;
            int bad = -1;
            for (size_t k = 0; k < e.size(); ++k) {
                if (e[k] >= lvs[k].degree) {
                    bad = static_cast<int>(k);
                    break;
                }
            }
            if (bad < 0) continue;
            // term = c * g_bad^{e_bad} * rest; rewrite one power block.
            std::vector<int> rest = e;
            rest[static_cast<size_t>(bad)] -= lvs[static_cast<size_t>(bad)].degree;
            Rat c = it->second;
            coords_.erase(it);
            for (auto& [re, rc] : lvs[static_cast<size_t>(bad)].power_rule) {
                std::vector<int> ne = rest;
                if (ne.size() < re.size()) ne.resize(re.size(), 0);
                for (size_t k = 0; k < re.size(); ++k) ne[k] += re[k];
                while (!ne.empty() && ne.back() == 0) ne.pop_back();
                Rat nc = c * rc;
                auto jt = coords_.find(ne);
                if (jt == coords_.end()) {
                    if (nc != 0) coords_.emplace(std::move(ne), std::move(nc));
                } else {
                    jt->second += nc;
                    if (jt->second == 0) coords_.erase(jt);
                }
            }
            changed = true;
            break;
        }
    }
}

FieldElement FieldElement::mul_impl(const FieldElement& a, const FieldElement& b) {
    FieldPtr f = a.field_->levels() >= b.field_->levels() ? a.field_ : b.field_;
    std::map<std::vector<int>, Rat> out;
    for (auto& [ea, ca] : a.coords_) {
        for (auto& [eb, cb] : b.coords_) {
            std::vector<int> e = ea;
            if (e.size() < eb.size()) e.resize(eb.size(), 0);
            for (size_t k = 0; k < eb.size(); ++k) e[k] += eb[k];
            while (!e.empty() && e.back() == 0) e.pop_back();
            Rat c = ca * cb;
            auto it = out.find(e);
            if (it == out.end()) {
                out.emplace(std::move(e), std::move(c));
            } else {
                it->second += c;
                if (it->second == 0) out.erase(it);
            }
        }
    }
    FieldElement r(f, std::move(out));
    r.reduce();
    return r;
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
    return mul_impl(*this, o);
}

FieldElement FieldElement::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElement r = field_->one();
    FieldElement base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

namespace {

// View an element as a dense polynomial in the top generator with
// coefficients in the subtower.
std::vector<FieldElement> top_coeffs(const FieldElement& x, const FieldPtr& sub) {
    int k = static_cast<int>(sub->levels());
    int deg = x.field()->level(k).degree;
    std::vector<FieldElement> out(static_cast<size_t>(deg), sub->zero());
    for (auto& [e, c] : x.coords()) {
        int te = (static_cast<int>(e.size()) > k) ? e[static_cast<size_t>(k)] : 0;
        std::vector<int> le = e;
        if (le.size() > static_cast<size_t>(k)) {
            le[static_cast<size_t>(k)] = 0;
            while (!le.empty() && le.back() == 0) le.pop_back();
        }
        std::map<std::vector<int>, Rat> m;
        m[le] = c;
        out[static_cast<size_t>(te)] += FieldElement(sub, std::move(m));
    }
    return out;
}

FieldElement from_top_coeffs(const FieldPtr& field, int k,
                             const std::vector<FieldElement>& cs) {
    FieldElement g = field->generator(k);
    FieldElement r = field->zero();
    FieldElement gp = field->one();
    for (auto& c : cs) {
        FieldElement cl = c.lift_to(field);
        r += cl * gp;
        gp = gp * g;
    }
    return r;
}

using FPoly = std::vector<FieldElement>;  // dense in the top generator

void ftrim(FPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// Remainder and quotient of a by b over the subfield (b's leading
// coefficient must be invertible there).
void fdivmod(const FPoly& a, const FPoly& b, FPoly& q, FPoly& r) {
    r = a;
    ftrim(r);
    q.assign(r.size(), FieldElement());
    FieldElement lead_inv = b.back().inverse();
    while (r.size() >= b.size()) {
        FieldElement c = r.back() * lead_inv;
        size_t shift = r.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) r[shift + i] -= c * b[i];
        ftrim(r);
        if (r.empty()) break;
    }
    ftrim(q);
}

}  // namespace

FieldElement FieldElement::inverse() const {
    if (is_zero()) throw ZeroDivisorError("inverse of zero");
    if (is_rational()) {
        Rat v = rational_value();
        return field_->from_rat(Rat(1) / v);
    }
    int nl = field_->levels();
    FieldPtr subtower = field_->subtower(nl - 1);
    // Extended Euclid in subtower[g]/(g^d - rhs).
    const auto& top = field_->level(nl - 1);
    FPoly rel(static_cast<size_t>(top.degree) + 1, subtower->zero());
    rel[static_cast<size_t>(top.degree)] = subtower->one();
    for (auto& [e, c] : top.power_rule) {
        int te = (static_cast<int>(e.size()) == nl) ? e.back() : 0;
        std::vector<int> le = e;
        if (static_cast<int>(le.size()) == nl) {
            le.pop_back();
            while (!le.empty() && le.back() == 0) le.pop_back();
        }
        std::map<std::vector<int>, Rat> m;
        m[le] = -c;
        rel[static_cast<size_t>(te)] += FieldElement(subtower, std::move(m));
    }
    FPoly a = top_coeffs(*this, subtower);
    ftrim(a);
    // extended gcd(rel, a): find u with u*a == gcd mod rel
    FPoly r0 = rel, r1 = a;
    FPoly s0 = {}, s1 = {subtower->one()};
    while (!r1.empty()) {
        FPoly q, r2;
        fdivmod(r0, r1, q, r2);
        // s2 = s0 - q*s1
        FPoly s2 = s0;
        size_t need = q.size() + (s1.empty() ? 0 : s1.size() - 1);
        if (s2.size() < need + 1) s2.resize(need + 1, subtower->zero());
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = 0; j < s1.size(); ++j) s2[i + j] -= q[i] * s1[j];
        ftrim(s2);
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r0.size() != 1)
        throw ZeroDivisorError("non-unit element in etale algebra: " + str());
    FieldElement g_inv = r0[0].inverse();
    for (auto& c : s0) c = c * g_inv;
    FieldElement result = from_top_coeffs(field_, nl - 1, s0);
    return result;
}

FieldElement FieldElement::lift_to(const FieldPtr& bigger) const {
    if (field_->same(*bigger)) {
        FieldElement r = *this;
        r.field_ = bigger;
        return r;
    }
    if (bigger->levels() < field_->levels())
        throw std::invalid_argument("lift_to: target tower is smaller");
    for (int i = 0; i < field_->levels(); ++i) {
        if (bigger->level(i).symbol != field_->level(i).symbol ||
            bigger->level(i).degree != field_->level(i).degree)
            throw std::invalid_argument("lift_to: incompatible towers");
    }
    FieldElement r(bigger, coords_);
    return r;
}

FieldElement FieldElement::galois(long nu) const {
    int n = field_->cyclotomic_order();
    if (n == 0) {
        if (is_rational()) return *this;
        throw std::invalid_argument("galois: not a cyclotomic tower");
    }
    if (std::gcd(nu % n + n, static_cast<long>(n)) != 1)
        throw std::invalid_argument("galois: exponent not coprime to order");
    if (field_->levels() != 1)
        throw std::invalid_argument("galois: only single-level cyclotomic supported");
    FieldElement out = field_->zero();
    for (auto& [e, c] : coords_) {
        long k = e.empty() ? 0 : e[0];
        long nk = ((nu * k) % n + n) % n;
        out += field_->from_rat(c) * cyclo_root_power(field_, nk);
    }
    return out;
}

std::vector<Rat> FieldElement::min_poly_over_Q() const {
    // Krylov: powers of x as Q-vectors on the full tower basis; first
    // linear dependence gives the monic minimal polynomial.
    long dim = field_->total_degree();
    std::vector<std::vector<int>> basis_index;  // exponent -> index
    std::map<std::vector<int>, size_t> pos;
    {
        std::vector<int> e(static_cast<size_t>(field_->levels()), 0);
        // enumerate mixed-radix
        long total = dim;
        for (long i = 0; i < total; ++i) {
            std::vector<int> t = e;
            while (!t.empty() && t.back() == 0) t.pop_back();
            pos[t] = static_cast<size_t>(i);
            basis_index.push_back(t);
            for (int k = 0; k < field_->levels(); ++k) {
                if (++e[static_cast<size_t>(k)] < field_->level(k).degree) break;
                e[static_cast<size_t>(k)] = 0;
            }
        }
    }
    auto to_vec = [&](const FieldElement& x) {
        std::vector<Rat> v(static_cast<size_t>(dim), Rat(0));
        for (auto& [e, c] : x.coords()) v[pos.at(e)] = c;
        return v;
    };
    // rows: vectors of powers; run incremental Gaussian elimination.
    std::vector<std::vector<Rat>> rows;       // reduced rows
    std::vector<size_t> pivots;               // pivot column per row
    std::vector<std::vector<Rat>> combos;     // expression in power basis
    FieldElement p = field_->one();
    for (long k = 0;; ++k) {
        std::vector<Rat> v = to_vec(p);
        std::vector<Rat> combo(static_cast<size_t>(k) + 1, Rat(0));
        combo[static_cast<size_t>(k)] = 1;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (v[pivots[r]] == 0) continue;
            Rat f = v[pivots[r]];
            for (size_t j = 0; j < v.size(); ++j) v[j] -= f * rows[r][j];
            for (size_t j = 0; j < combos[r].size() && j < combo.size(); ++j)
                combo[j] -= f * combos[r][j];
        }
        size_t piv = v.size();
        for (size_t j = 0; j < v.size(); ++j)
            if (v[j] != 0) {
                piv = j;
                break;
            }
        if (piv == v.size()) {
            // dependence found: combo gives c_0 + c_1 x + ... + c_k x^k = 0
            Rat lead = combo.back();
            std::vector<Rat> m(combo.size());
            for (size_t j = 0; j < combo.size(); ++j) m[j] = combo[j] / lead;
            return m;
        }
        Rat l = v[piv];
        for (auto& x : v) x /= l;
        for (auto& x : combo) x /= l;
        rows.push_back(std::move(v));
        pivots.push_back(piv);
        combos.push_back(std::move(combo));
        p = p * (*this);
        if (k > dim) throw std::runtime_error("min_poly: no dependence found");
    }
}

std::string FieldElement::str() const {
    if (coords_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : coords_) {
        Rat a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_gen = false;
        for (size_t k = 0; k < e.size(); ++k)
            if (e[k] > 0) has_gen = true;
        if (!has_gen || a != 1) {
            os << a.get_str();
            if (has_gen) os << "*";
        }
        bool sep = false;
        for (size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            if (sep) os << "*";
            os << field_->level(static_cast<int>(k)).symbol;
            if (e[k] > 1) os << "^" << e[k];
            sep = true;
        }
    }
    return os.str();
}

FieldElement operator*(const Rat& r, const FieldElement& e) {
    if (r == 0) return e.field()->zero();
    FieldElement out = e;
    return e.field()->from_rat(r) * out;
}

FieldElement cyclo_root_power(const FieldPtr& field, long k) {
    int n = field->cyclotomic_order();
    if (n == 0) throw std::invalid_argument("not a cyclotomic field");
    long kk = (k % n + n) % n;
    FieldElement g = field->generator(0);
    return g.pow(kk);
}

}  // namespace mfcas
