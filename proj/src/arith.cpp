#include "u21/arith.hpp"

#include <algorithm>
#include <sstream>

namespace u21 {

namespace {

// dense polynomials over F_p, coefficient vectors with constant term first
using Poly = std::vector<int>;

Poly poly_mod(Poly a, const Poly& m, int p) {
    const int dm = static_cast<int>(m.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= dm) {
        int da = static_cast<int>(a.size()) - 1;
        int lead = a[da] % p;
        if (lead != 0) {
            for (int i = 0; i <= dm; ++i) {
                int& c = a[da - dm + i];
                c = ((c - lead * m[i]) % p + p) % p;
            }
        }
        while (a.size() > 1 && a.back() == 0) a.pop_back();
        if (static_cast<int>(a.size()) - 1 < dm) break;
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, int p) {
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(r), m, p);
}

Poly poly_powmod(Poly base, long e, const Poly& m, int p) {
    Poly r{1};
    while (e > 0) {
        if (e & 1) r = poly_mulmod(r, base, m, p);
        base = poly_mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd(Poly a, Poly b, int p) {
    auto inv_mod_p = [p](int x) {
        for (int i = 1; i < p; ++i)
            if ((x * i) % p == 1) return i;
        throw InternalError("inverse mod p");
    };
    while (!(b.size() == 1 && b[0] == 0)) {
        // a mod b
        int db = static_cast<int>(b.size()) - 1;
        int li = inv_mod_p(b[db]);
        Poly r = a;
        while (static_cast<int>(r.size()) - 1 >= db && !(r.size() == 1 && r[0] == 0)) {
            int dr = static_cast<int>(r.size()) - 1;
            int factor = (r[dr] * li) % p;
            if (factor != 0)
                for (int i = 0; i <= db; ++i) {
                    int& c = r[dr - db + i];
                    c = ((c - factor * b[i]) % p + p) % p;
                }
            while (r.size() > 1 && r.back() == 0) r.pop_back();
        }
        a = b;
        b = r;
    }
    return a;
}

bool poly_is_x(const Poly& a) { return a.size() == 2 && a[0] == 0 && a[1] == 1; }

// m monic of degree d is irreducible over F_p iff x^{p^d} = x mod m and for
// every prime l | d the gcd of x^{p^{d/l}} - x with m is constant.
bool is_irreducible(const Poly& m, int p) {
    const int d = static_cast<int>(m.size()) - 1;
    Poly x{0, 1};
    Poly xp = x;
    std::vector<Poly> frob_powers(d + 1);  // x^{p^i} mod m
    frob_powers[0] = x;
    for (int i = 1; i <= d; ++i)
        frob_powers[i] = poly_powmod(frob_powers[i - 1], p, m, p);
    if (!poly_is_x(frob_powers[d])) return false;
    for (int l = 2; l <= d; ++l) {
        if (d % l != 0) continue;
        bool prime = true;
        for (int t = 2; t * t <= l; ++t)
            if (l % t == 0) prime = false;
        if (!prime) continue;
        Poly diff = frob_powers[d / l];
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;
        while (diff.size() > 1 && diff.back() == 0) diff.pop_back();
        if (diff.size() == 1 && diff[0] == 0) return false;
        Poly g = poly_gcd(m, diff, p);
        if (g.size() > 1) return false;
    }
    return true;
}

std::vector<long> prime_factors(long n) {
    std::vector<long> fs;
    for (long t = 2; t * t <= n; ++t)
        while (n % t == 0) {
            if (fs.empty() || fs.back() != t) fs.push_back(t);
            n /= t;
        }
    if (n > 1) fs.push_back(n);
    return fs;
}

} // namespace

FieldTower::FieldTower(int p, int f, int default_precision)
    : p_(p), f_(f), default_precision_(default_precision) {
    if (p < 3 || p % 2 == 0) throw ConstraintViolation("residue characteristic must be an odd prime");
    for (int t = 2; t * t <= p; ++t)
        if (p % t == 0) throw ConstraintViolation("p is not prime");
    if (f < 1) throw ConstraintViolation("f must be positive");
    q_ = 1;
    for (int i = 0; i < f; ++i) q_ *= p;
    q2_ = q_ * q_;
    if (q2_ > 30000) throw EnumerationTooLarge("q^2 beyond the desk-scale cap");

    // least monic irreducible modulus of degree 2f, by integer encoding
    const int d = 2 * f;
    long span = 1;
    for (int i = 0; i < d; ++i) span *= p;
    for (long enc = 0; enc < span; ++enc) {
        Poly m(d + 1, 0);
        long e = enc;
        for (int i = 0; i < d; ++i) { m[i] = static_cast<int>(e % p); e /= p; }
        m[d] = 1;
        if (is_irreducible(m, p)) { modulus_ = m; break; }
    }
    if (modulus_.empty()) throw InternalError("no irreducible modulus found");

    // index <-> polynomial helpers
    auto decode = [&](uint16_t idx) {
        Poly a(d, 0);
        long e = idx;
        for (int i = 0; i < d; ++i) { a[i] = static_cast<int>(e % p); e /= p; }
        while (a.size() > 1 && a.back() == 0) a.pop_back();
        return a;
    };
    auto encode = [&](const Poly& a) {
        long idx = 0, mul = 1;
        for (size_t i = 0; i < a.size(); ++i) { idx += a[i] * mul; mul *= p; }
        return static_cast<uint16_t>(idx);
    };

    use_tables_ = q2_ <= 2048;
    if (use_tables_) {
        add_table_.assign(q2_ * q2_, 0);
        mul_table_.assign(q2_ * q2_, 0);
        for (long a = 0; a < q2_; ++a) {
            Poly pa = decode(static_cast<uint16_t>(a));
            for (long b = 0; b <= a; ++b) {
                Poly pb = decode(static_cast<uint16_t>(b));
                Poly s(std::max(pa.size(), pb.size()), 0);
                for (size_t i = 0; i < s.size(); ++i) {
                    int c = (i < pa.size() ? pa[i] : 0) + (i < pb.size() ? pb[i] : 0);
                    s[i] = c % p;
                }
                uint16_t sv = encode(s);
                add_table_[a * q2_ + b] = sv;
                add_table_[b * q2_ + a] = sv;
                uint16_t mv = encode(poly_mulmod(pa, pb, modulus_, p));
                mul_table_[a * q2_ + b] = mv;
                mul_table_[b * q2_ + a] = mv;
            }
        }
    }

    // generator: least index of full multiplicative order
    const long n = q2_ - 1;
    auto factors = prime_factors(n);
    auto pow_raw = [&](uint16_t a, long e) {
        Poly r = poly_powmod(decode(a), e, modulus_, p);
        return encode(r);
    };
    for (long a = 2; a < q2_; ++a) {
        bool full = true;
        for (long l : factors)
            if (pow_raw(static_cast<uint16_t>(a), n / l) == 1) { full = false; break; }
        if (full) { gen_ = static_cast<uint16_t>(a); break; }
    }
    if (gen_ == 0) throw InternalError("no generator found");

    exp_.assign(n, 0);
    log_.assign(q2_, -1);
    uint16_t cur = 1;
    for (long k = 0; k < n; ++k) {
        exp_[k] = cur;
        log_[cur] = k;
        cur = use_tables_ ? mul_table_[cur * q2_ + gen_]
                          : encode(poly_mulmod(decode(cur), decode(gen_), modulus_, p));
    }

    frob_.assign(q2_, 0);
    for (long a = 1; a < q2_; ++a)
        frob_[a] = exp_[(log_[a] * q_) % n];

    // canonical trace-zero unit: least k >= 1 with g^k + (g^k)^q = 0
    for (long k = 1; k < n; ++k) {
        uint16_t x = exp_[k];
        if (add_idx(x, frob_[x]) == 0) { trace_zero_k_ = static_cast<int>(k); break; }
    }
    if (trace_zero_k_ == 0) throw InternalError("no trace-zero unit (q even?)");
}

uint16_t FieldTower::add_slow(uint16_t a, uint16_t b) const {
    long r = 0, mul = 1, ea = a, eb = b;
    for (int i = 0; i < 2 * f_; ++i) {
        r += ((ea % p_) + (eb % p_)) % p_ * mul;
        ea /= p_; eb /= p_; mul *= p_;
    }
    return static_cast<uint16_t>(r);
}

uint16_t FieldTower::mul_slow(uint16_t a, uint16_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[(log_[a] + log_[b]) % (q2_ - 1)];
}

uint16_t FieldTower::add_idx(uint16_t a, uint16_t b) const {
    return use_tables_ ? add_table_[static_cast<long>(a) * q2_ + b] : add_slow(a, b);
}

uint16_t FieldTower::neg_idx(uint16_t a) const {
    long r = 0, mul = 1, ea = a;
    for (int i = 0; i < 2 * f_; ++i) {
        r += ((p_ - ea % p_) % p_) * mul;
        ea /= p_; mul *= p_;
    }
    return static_cast<uint16_t>(r);
}

uint16_t FieldTower::sub_idx(uint16_t a, uint16_t b) const { return add_idx(a, neg_idx(b)); }

uint16_t FieldTower::mul_idx(uint16_t a, uint16_t b) const {
    return use_tables_ ? mul_table_[static_cast<long>(a) * q2_ + b] : mul_slow(a, b);
}

uint16_t FieldTower::inv_idx(uint16_t a) const {
    if (a == 0) throw ZeroDivision("inverse of zero in F_{q^2}");
    long n = q2_ - 1;
    return exp_[(n - log_[a]) % n];
}

uint16_t FieldTower::pow_idx(uint16_t a, long e) const {
    if (a == 0) {
        if (e <= 0) throw ZeroDivision("0 to a nonpositive power");
        return 0;
    }
    long n = q2_ - 1;
    long k = (log_[a] * (e % n)) % n;
    if (k < 0) k += n;
    return exp_[k];
}

uint16_t FieldTower::frob_idx(uint16_t a) const { return frob_[a]; }

long FieldTower::log_idx(uint16_t a) const {
    if (a == 0) throw ZeroArgument("discrete log of zero");
    return log_[a];
}

uint16_t FieldTower::exp_idx(long k) const {
    long n = q2_ - 1;
    k %= n;
    if (k < 0) k += n;
    return exp_[k];
}

std::string FieldTower::to_string(uint16_t a) const {
    if (a == 0) return "0";
    if (a < static_cast<uint16_t>(p_)) return std::to_string(a);  // prime-field value
    return "g^" + std::to_string(log_[a]);
}

ResidueScalar FieldTower::zero() const { return {this, 0}; }
ResidueScalar FieldTower::one() const { return {this, 1}; }
ResidueScalar FieldTower::from_index(long idx) const {
    if (idx < 0 || idx >= q2_) throw ConstraintViolation("element index out of range");
    return {this, static_cast<uint16_t>(idx)};
}
ResidueScalar FieldTower::from_int(long n) const {
    long r = n % p_;
    if (r < 0) r += p_;
    return {this, static_cast<uint16_t>(r)};
}
ResidueScalar FieldTower::generator() const { return {this, gen_}; }
ResidueScalar FieldTower::trace_zero_unit() const { return {this, exp_[trace_zero_k_]}; }

ResidueScalar conjugate(ResidueScalar x) {
    return {&x.tower(), x.tower().frob_idx(x.index())};
}

TraceNorm trace_and_norm(ResidueScalar x) {
    return {x + conjugate(x), x * conjugate(x)};
}

bool in_base_field(ResidueScalar x) { return conjugate(x) == x; }

ResidueScalar find_trace_zero_unit(const FieldTower& tower) { return tower.trace_zero_unit(); }

ResidueScalar norm_solve(ResidueScalar target) {
    const FieldTower& tw = target.tower();
    if (target.is_zero()) return tw.zero();
    if (!in_base_field(target)) throw ConstraintViolation("norm target not in F_q");
    long j = tw.log_idx(target.index());
    long m = tw.q() + 1;
    if (j % m != 0) throw ConstraintViolation("target is not a norm");
    return {&tw, tw.exp_idx(j / m)};
}

// ---------------------------------------------------------------------------
// LaurentScalar

LaurentScalar::LaurentScalar(const FieldTower* tw, int val, int prec, std::vector<uint16_t> c)
    : tw_(tw), val_(val), prec_(prec), c_(std::move(c)) {
    normalize();
}

void LaurentScalar::normalize() {
    size_t lead = 0;
    while (lead < c_.size() && c_[lead] == 0) ++lead;
    if (lead > 0) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
        val_ += static_cast<int>(lead);
    }
    if (c_.empty()) val_ = prec_;
    if (static_cast<int>(c_.size()) != prec_ - val_) c_.resize(prec_ - val_, 0);
}

LaurentScalar LaurentScalar::zero(const FieldTower& tw) {
    return {&tw, tw.default_precision(), tw.default_precision(), {}};
}
LaurentScalar LaurentScalar::zero_at(const FieldTower& tw, int prec) {
    return {&tw, prec, prec, {}};
}
LaurentScalar LaurentScalar::constant(ResidueScalar a) { return monomial(a, 0); }
LaurentScalar LaurentScalar::monomial(ResidueScalar a, int deg) {
    const FieldTower& tw = a.tower();
    int prec = tw.default_precision();
    if (a.is_zero() || deg >= prec) return zero(tw);
    std::vector<uint16_t> c(prec - deg, 0);
    c[0] = a.index();
    return {&tw, deg, prec, std::move(c)};
}
LaurentScalar LaurentScalar::uniformizer_pow(const FieldTower& tw, int deg) {
    return monomial(tw.one(), deg);
}
LaurentScalar LaurentScalar::one(const FieldTower& tw) { return constant(tw.one()); }

int LaurentScalar::valuation() const {
    if (c_.empty())
        throw PrecisionExhausted("valuation of an element that vanishes to precision O(w^" +
                                 std::to_string(prec_) + ")");
    return val_;
}

bool LaurentScalar::valuation_at_least(int k) const {
    if (!c_.empty()) return val_ >= k;
    if (prec_ >= k) return true;
    throw PrecisionExhausted("valuation bound v >= " + std::to_string(k) +
                             " undecidable at precision " + std::to_string(prec_));
}

ResidueScalar LaurentScalar::coeff(int deg) const {
    if (deg >= prec_) throw PrecisionExhausted("coefficient beyond retained precision");
    if (deg < val_) return tw_->zero();
    return {tw_, c_[deg - val_]};
}

LaurentScalar LaurentScalar::operator+(const LaurentScalar& o) const {
    int prec = std::min(prec_, o.prec_);
    int val = std::min(std::min(val_, o.val_), prec);
    std::vector<uint16_t> c(prec - val, 0);
    for (int d = val; d < prec; ++d) {
        uint16_t a = (d >= val_ && d < prec_ && d - val_ < static_cast<int>(c_.size())) ? c_[d - val_] : 0;
        uint16_t b = (d >= o.val_ && d < o.prec_ && d - o.val_ < static_cast<int>(o.c_.size())) ? o.c_[d - o.val_] : 0;
        c[d - val] = tw_->add_idx(a, b);
    }
    return {tw_, val, prec, std::move(c)};
}

LaurentScalar LaurentScalar::operator-() const {
    std::vector<uint16_t> c(c_);
    for (auto& x : c) x = tw_->neg_idx(x);
    return {tw_, val_, prec_, std::move(c)};
}

LaurentScalar LaurentScalar::operator-(const LaurentScalar& o) const { return *this + (-o); }

LaurentScalar LaurentScalar::operator*(const LaurentScalar& o) const {
    // precision of the product: min over the two O(w^p)-error routes
    int prec = std::min(prec_ + o.val_, o.prec_ + val_);
    int val = val_ + o.val_;
    if (c_.empty() || o.c_.empty())
        return {tw_, prec, prec, {}};
    if (val >= prec) return {tw_, prec, prec, {}};
    std::vector<uint16_t> c(prec - val, 0);
    const int n1 = static_cast<int>(c_.size()), n2 = static_cast<int>(o.c_.size());
    for (int i = 0; i < n1; ++i) {
        if (c_[i] == 0) continue;
        int jmax = std::min(n2, prec - val - i);
        for (int j = 0; j < jmax; ++j) {
            if (o.c_[j] == 0) continue;
            int k = i + j;
            c[k] = tw_->add_idx(c[k], tw_->mul_idx(c_[i], o.c_[j]));
        }
    }
    return {tw_, val, prec, std::move(c)};
}

LaurentScalar LaurentScalar::operator*(ResidueScalar s) const {
    if (s.is_zero()) return zero_at(*tw_, prec_);  // scalar from the residue field is exact
    std::vector<uint16_t> c(c_);
    for (auto& x : c) x = tw_->mul_idx(x, s.index());
    return {tw_, val_, prec_, std::move(c)};
}

LaurentScalar LaurentScalar::conj() const {
    std::vector<uint16_t> c(c_);
    for (auto& x : c) x = tw_->frob_idx(x);
    return {tw_, val_, prec_, std::move(c)};
}

LaurentScalar LaurentScalar::shifted(int k) const {
    return {tw_, val_ + k, prec_ + k, c_};
}

LaurentScalar laurent_invert(const LaurentScalar& x) {
    if (x.c_.empty()) throw ZeroDivision("inverting a series that vanishes to precision");
    const FieldTower* tw = x.tw_;
    const int n = x.prec_ - x.val_;  // relative precision carries over
    std::vector<uint16_t> r(n, 0);
    uint16_t lead_inv = tw->inv_idx(x.c_[0]);
    r[0] = lead_inv;
    for (int k = 1; k < n; ++k) {
        // coefficient k of x*r must vanish: sum_{i=0..k} x_i r_{k-i} = 0
        uint16_t s = 0;
        for (int i = 1; i <= k && i < static_cast<int>(x.c_.size()); ++i)
            s = tw->add_idx(s, tw->mul_idx(x.c_[i], r[k - i]));
        r[k] = tw->mul_idx(tw->neg_idx(s), lead_inv);
    }
    return {tw, -x.val_, -x.val_ + n, std::move(r)};
}

LaurentScalar conjugate(const LaurentScalar& x) { return x.conj(); }

std::string LaurentScalar::str() const {
    if (c_.empty()) return "O(w^" + std::to_string(prec_) + ")";
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < static_cast<int>(c_.size()); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        int d = val_ + i;
        os << tw_->to_string(c_[i]);
        if (d != 0) os << "*w^" << d;
    }
    os << " + O(w^" << prec_ << ")";
    return os.str();
}

} // namespace u21
