#include "mfcas/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mfcas {

WeightedRing::WeightedRing(FieldPtr field, std::vector<Variable> vars)
    : field_(std::move(field)), vars_(std::move(vars)) {
    for (size_t i = 0; i < vars_.size(); ++i) {
        vars_[i].weight.canonicalize();
        if (vars_[i].weight < 0) throw std::invalid_argument("negative variable weight");
        for (size_t j = i + 1; j < vars_.size(); ++j)
            if (vars_[i].name == vars_[j].name)
                throw std::invalid_argument("duplicate variable name " + vars_[i].name);
    }
}

int WeightedRing::index_of(const std::string& name) const {
    for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> WeightedRing::indices_with_role(VarRole r) const {
    std::vector<int> out;
    for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].role == r) out.push_back(static_cast<int>(i));
    return out;
}

bool WeightedRing::same(const WeightedRing& o) const {
    if (this == &o) return true;
    if (!field_->same(*o.field_)) return false;
    if (vars_.size() != o.vars_.size()) return false;
    for (size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name != o.vars_[i].name || vars_[i].weight != o.vars_[i].weight)
            return false;
    return true;
}

MultiPoly MultiPoly::constant(const RingPtr& ring, const FieldElement& c) {
    MultiPoly p(ring);
    if (!c.is_zero()) p.terms_.emplace(Exponents(static_cast<size_t>(ring->nvars()), 0), c);
    return p;
}

MultiPoly MultiPoly::constant(const RingPtr& ring, const Rat& c) {
    return constant(ring, ring->field()->from_rat(c));
}

MultiPoly MultiPoly::var(const RingPtr& ring, const std::string& name, int power) {
    int i = ring->index_of(name);
    if (i < 0) throw std::invalid_argument("unknown variable " + name);
    Exponents e(static_cast<size_t>(ring->nvars()), 0);
    e[static_cast<size_t>(i)] = power;
    MultiPoly p(ring);
    p.terms_.emplace(std::move(e), ring->field()->one());
    return p;
}

MultiPoly MultiPoly::monomial(const RingPtr& ring, Exponents e, const FieldElement& c) {
    MultiPoly p(ring);
    if (!c.is_zero()) p.terms_.emplace(std::move(e), c);
    return p;
}

bool MultiPoly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    for (int x : terms_.begin()->first)
        if (x != 0) return false;
    return true;
}

FieldElement MultiPoly::constant_value() const {
    if (terms_.empty()) return ring_ ? ring_->field()->zero() : FieldElement();
    if (!is_constant()) throw std::runtime_error("polynomial is not constant: " + str());
    return terms_.begin()->second;
}

const Exponents& MultiPoly::leading_exponents() const {
    if (terms_.empty()) throw std::runtime_error("zero polynomial has no leading term");
    return terms_.begin()->first;
}

const FieldElement& MultiPoly::leading_coeff() const {
    if (terms_.empty()) throw std::runtime_error("zero polynomial has no leading term");
    return terms_.begin()->second;
}

void MultiPoly::insert_term(const Exponents& e, const FieldElement& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    if (ring_ && o.ring_ && !ring_->same(*o.ring_))
        throw RingMismatchError("polynomial ring mismatch in +");
    MultiPoly r = terms_.empty() ? o : *this;
    if (terms_.empty()) return r;
    for (auto& [e, c] : o.terms_) r.insert_term(e, c);
    return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const { return *this + (-o); }

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (ring_ && o.ring_ && !ring_->same(*o.ring_))
        throw RingMismatchError("polynomial ring mismatch in *");
    MultiPoly r(ring_ ? ring_ : o.ring_);
    for (auto& [ea, ca] : terms_) {
        for (auto& [eb, cb] : o.terms_) {
            Exponents e(ea.size());
            for (size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
            r.insert_term(e, ca * cb);
        }
    }
    return r;
}

MultiPoly MultiPoly::scale(const FieldElement& c) const {
    MultiPoly r(ring_);
    if (c.is_zero()) return r;
    for (auto& [e, t] : terms_) r.insert_term(e, t * c);
    return r;
}

MultiPoly MultiPoly::scale(const Rat& c) const {
    if (!ring_) return MultiPoly();
    return scale(ring_->field()->from_rat(c));
}

MultiPoly MultiPoly::exact_div(const MultiPoly& q) const {
    if (q.is_zero()) throw std::invalid_argument("division by zero polynomial");
    if (ring_ && !ring_->same(*q.ring_)) throw RingMismatchError("ring mismatch in exact_div");
    MultiPoly rem = *this;
    MultiPoly quo(ring_);
    FieldElement lc_inv = q.leading_coeff().inverse();
    const Exponents& lq = q.leading_exponents();
    while (!rem.is_zero()) {
        const Exponents& lr = rem.leading_exponents();
        Exponents diff(lr.size());
        bool divides = true;
        for (size_t i = 0; i < lr.size(); ++i) {
            diff[i] = lr[i] - lq[i];
            if (diff[i] < 0) {
                divides = false;
                break;
            }
        }
        if (!divides)
            throw NotDivisibleError("no polynomial quotient: " + str() + " by " + q.str());
        FieldElement c = rem.leading_coeff() * lc_inv;
        MultiPoly m = MultiPoly::monomial(ring_, diff, c);
        quo += m;
        rem -= m * q;
    }
    return quo;
}

MultiPoly MultiPoly::derivative(const std::string& var) const {
    int i = ring_->index_of(var);
    if (i < 0) throw std::invalid_argument("unknown variable " + var);
    MultiPoly r(ring_);
    for (auto& [e, c] : terms_) {
        int k = e[static_cast<size_t>(i)];
        if (k == 0) continue;
        Exponents ne = e;
        ne[static_cast<size_t>(i)] = k - 1;
        r.insert_term(ne, Rat(k) * c);
    }
    return r;
}

Rat MultiPoly::weighted_degree_of(const Exponents& e) const {
    Rat d(0);
    for (size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0) d += Rat(e[i]) * ring_->vars()[i].weight;
    return d;
}

Rat MultiPoly::weighted_degree() const {
    if (terms_.empty()) throw std::runtime_error("weighted_degree of zero polynomial");
    Rat d = weighted_degree_of(terms_.begin()->first);
    for (auto& [e, c] : terms_) {
        Rat d2 = weighted_degree_of(e);
        if (d2 != d) {
            MultiPoly t1 = MultiPoly::monomial(ring_, terms_.begin()->first, terms_.begin()->second);
            MultiPoly t2 = MultiPoly::monomial(ring_, e, c);
            throw NotHomogeneousError("not homogeneous, offending terms " + t1.str() + " and " +
                                      t2.str());
        }
    }
    return d;
}

bool MultiPoly::is_homogeneous() const {
    if (terms_.empty()) return true;
    Rat d = weighted_degree_of(terms_.begin()->first);
    for (auto& [e, c] : terms_)
        if (weighted_degree_of(e) != d) return false;
    return true;
}

long MultiPoly::total_degree() const {
    long d = 0;
    for (auto& [e, c] : terms_) {
        long t = 0;
        for (int x : e) t += x;
        d = std::max(d, t);
    }
    return d;
}

int MultiPoly::degree_in(int var_index) const {
    int d = 0;
    for (auto& [e, c] : terms_) d = std::max(d, e[static_cast<size_t>(var_index)]);
    return d;
}

MultiPoly MultiPoly::substitute(const std::string& var, const MultiPoly& value) const {
    int i = ring_->index_of(var);
    if (i < 0) throw std::invalid_argument("unknown variable " + var);
    MultiPoly r(value.ring_ ? value.ring_ : ring_);
    // group by power of var for repeated squaring-free evaluation
    int maxd = degree_in(i);
    std::vector<MultiPoly> by_pow(static_cast<size_t>(maxd) + 1, MultiPoly(r.ring()));
    for (auto& [e, c] : terms_) {
        Exponents ne = e;
        int k = ne[static_cast<size_t>(i)];
        ne[static_cast<size_t>(i)] = 0;
        by_pow[static_cast<size_t>(k)] += MultiPoly::monomial(ring_, ne, c).map_ring(r.ring());
    }
    MultiPoly acc(r.ring());
    for (int k = maxd; k >= 0; --k) {
        acc = acc * value;
        acc += by_pow[static_cast<size_t>(k)];
    }
    return acc;
}

MultiPoly MultiPoly::rescale_vars(const std::vector<FieldElement>& factors) const {
    MultiPoly r(ring_);
    for (auto& [e, c] : terms_) {
        FieldElement nc = c;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0 && !(factors[i] == ring_->field()->one())) nc *= factors[i].pow(e[i]);
        r.insert_term(e, nc);
    }
    return r;
}

MultiPoly MultiPoly::map_ring(const RingPtr& target,
                              const std::function<FieldElement(const FieldElement&)>& coeff_map) const {
    if (!ring_ || ring_->same(*target)) {
        if (!coeff_map) {
            MultiPoly r = *this;
            r.ring_ = target;
            return r;
        }
    }
    std::vector<int> remap(static_cast<size_t>(ring_->nvars()), -1);
    for (int i = 0; i < ring_->nvars(); ++i)
        remap[static_cast<size_t>(i)] = target->index_of(ring_->vars()[static_cast<size_t>(i)].name);
    MultiPoly r(target);
    for (auto& [e, c] : terms_) {
        Exponents ne(static_cast<size_t>(target->nvars()), 0);
        for (size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (remap[i] < 0)
                throw std::invalid_argument("map_ring: variable " + ring_->vars()[i].name +
                                            " absent in target ring");
            ne[static_cast<size_t>(remap[i])] = e[i];
        }
        FieldElement nc = coeff_map ? coeff_map(c) : c;
        r.insert_term(ne, nc);
    }
    return r;
}

MultiPoly MultiPoly::set_zero(const std::vector<std::string>& vars) const {
    std::vector<int> idx;
    for (auto& v : vars) {
        int i = ring_->index_of(v);
        if (i >= 0) idx.push_back(i);
    }
    MultiPoly r(ring_);
    for (auto& [e, c] : terms_) {
        bool kill = false;
        for (int i : idx)
            if (e[static_cast<size_t>(i)] != 0) kill = true;
        if (!kill) r.insert_term(e, c);
    }
    return r;
}

MultiPoly MultiPoly::rename_var(const std::string& from, const std::string& to,
                                const RingPtr& target) const {
    int i = ring_->index_of(from);
    if (i < 0) throw std::invalid_argument("unknown variable " + from);
    int j = target->index_of(to);
    if (j < 0) throw std::invalid_argument("unknown variable " + to);
    MultiPoly r(target);
    for (auto& [e, c] : terms_) {
        Exponents ne(static_cast<size_t>(target->nvars()), 0);
        for (size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0) continue;
            const std::string& nm =
                static_cast<int>(k) == i ? to : ring_->vars()[k].name;
            int tj = target->index_of(nm);
            if (tj < 0) throw std::invalid_argument("rename_var: missing " + nm);
            ne[static_cast<size_t>(tj)] += e[k];
        }
        r.insert_term(ne, c);
    }
    return r;
}

MultiPoly MultiPoly::map_coeffs(const std::function<FieldElement(const FieldElement&)>& f) const {
    MultiPoly r(ring_);
    for (auto& [e, c] : terms_) r.insert_term(e, f(c));
    return r;
}

FieldElement MultiPoly::coeff_of(const Exponents& e) const {
    auto it = terms_.find(e);
    if (it == terms_.end()) return ring_->field()->zero();
    return it->second;
}

std::string MultiPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : terms_) {
        // coefficient: rational with sign pulled out, or parenthesized field element
        bool is_rat = c.is_rational();
        Rat rv = is_rat ? c.rational_value() : Rat(0);
        std::string coeff_txt;
        bool neg = false;
        if (is_rat) {
            neg = rv < 0;
            Rat a = neg ? Rat(-rv) : rv;
            coeff_txt = a.get_str();
        } else {
            coeff_txt = "(" + c.str() + ")";
        }
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        bool has_var = false;
        for (int x : e)
            if (x > 0) has_var = true;
        if (!has_var) {
            os << coeff_txt;
        } else {
            bool coeff_shown = !(is_rat && !neg && rv == 1) && !(is_rat && neg && rv == -1);
            if (coeff_shown) os << coeff_txt << "*";
            bool sep = false;
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (sep) os << "*";
                os << ring_->vars()[i].name;
                if (e[i] > 1) os << "^" << e[i];
                sep = true;
            }
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
    const RingPtr& ring;
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    MultiPoly parse_expr() {
        MultiPoly r = parse_term_signed();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos;
                r += parse_term();
            } else if (c == '-') {
                ++pos;
                r -= parse_term();
            } else {
                break;
            }
        }
        return r;
    }

    MultiPoly parse_term_signed() {
        char c = peek();
        if (c == '-') {
            ++pos;
            return -parse_term();
        }
        if (c == '+') ++pos;
        return parse_term();
    }

    MultiPoly parse_term() {
        MultiPoly r = parse_factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos;
                r *= parse_factor();
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '(') {
                // implicit product
                r *= parse_factor();
            } else {
                break;
            }
        }
        return r;
    }

    MultiPoly parse_factor() {
        MultiPoly base = parse_atom();
        if (peek() == '^') {
            ++pos;
            skip_ws();
            bool neg = false;
            if (pos < s.size() && s[pos] == '-') {
                neg = true;
                ++pos;
            }
            long e = parse_integer();
            if (neg) throw ParseError("negative exponent in polynomial");
            MultiPoly r = MultiPoly::constant(ring, Rat(1));
            for (long i = 0; i < e; ++i) r *= base;
            return r;
        }
        return base;
    }

    long parse_integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer at position " + std::to_string(pos));
        return std::stol(s.substr(start, pos - start));
    }

    MultiPoly parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos;
            MultiPoly r = parse_expr();
            if (!eat(')')) throw ParseError("missing )");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long num = parse_integer();
            if (peek() == '/') {
                ++pos;
                long den = parse_integer();
                return MultiPoly::constant(ring, fraction(num, den));
            }
            return MultiPoly::constant(ring, Rat(num));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' ||
                    s[pos] == '\''))
                ++pos;
            std::string name = s.substr(start, pos - start);
            if (ring->index_of(name) >= 0) return MultiPoly::var(ring, name);
            // field generator by symbol?
            for (int k = 0; k < ring->field()->levels(); ++k) {
                if (ring->field()->level(k).symbol == name) {
                    return MultiPoly::constant(ring, ring->field()->generator(k));
                }
            }
            throw ParseError("unknown symbol '" + name + "'");
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'");
    }
};

}  // namespace

MultiPoly parse_poly(const RingPtr& ring, const std::string& text) {
    Parser p{ring, text};
    MultiPoly r = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing input at position " + std::to_string(p.pos));
    return r;
}

MultiPoly gcd_univariate(const MultiPoly& a, const MultiPoly& b) {
    // Euclid in a single shared variable; inputs must be univariate.
    auto var_of = [](const MultiPoly& p) {
        int v = -1;
        for (auto& [e, c] : p.terms())
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0) {
                    if (v >= 0 && v != static_cast<int>(i))
                        throw std::invalid_argument("gcd_univariate: not univariate");
                    v = static_cast<int>(i);
                }
        return v;
    };
    MultiPoly x = a, y = b;
    int va = var_of(a), vb = var_of(b);
    if (va >= 0 && vb >= 0 && va != vb) return MultiPoly::constant(a.ring(), Rat(1));
    while (!y.is_zero()) {
        // x mod y by leading-term elimination
        MultiPoly r = x;
        int v = var_of(y);
        while (!r.is_zero() &&
               (v < 0 || r.leading_exponents()[static_cast<size_t>(v)] >=
                             y.leading_exponents()[static_cast<size_t>(v)])) {
            Exponents diff(r.leading_exponents().size(), 0);
            bool ok = true;
            for (size_t i = 0; i < diff.size(); ++i) {
                diff[i] = r.leading_exponents()[i] - y.leading_exponents()[i];
                if (diff[i] < 0) ok = false;
            }
            if (!ok) break;
            FieldElement c = r.leading_coeff() / y.leading_coeff();
            r -= MultiPoly::monomial(r.ring(), diff, c) * y;
            if (v < 0) break;
        }
        x = y;
        y = r;
    }
    if (!x.is_zero()) x = x.scale(x.leading_coeff().inverse());
    return x;
}

}  // namespace mfcas
