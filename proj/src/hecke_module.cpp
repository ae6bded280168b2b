#include "u21/hecke_module.hpp"

#include <algorithm>
#include <sstream>

namespace u21 {

// ---------------------------------------------------------------------------
// Poly

void Poly::add_term(Key k, uint16_t v) {
    auto it = terms_.find(k);
    uint16_t s = it == terms_.end() ? v : tw_->add_idx(it->second, v);
    if (s == 0) {
        if (it != terms_.end()) terms_.erase(it);
    } else {
        terms_[k] = s;
    }
}

Poly Poly::scalar(ResidueScalar s) {
    Poly p(s.tower());
    if (!s.is_zero()) p.terms_[{0, 0}] = s.index();
    return p;
}

Poly Poly::integer(const FieldTower& tw, long n) { return scalar(tw.from_int(n)); }

Poly Poly::c(const FieldTower& tw) {
    Poly p(tw);
    p.terms_[{1, 0}] = 1;
    return p;
}

Poly Poly::lambda(const FieldTower& tw) {
    Poly p(tw);
    p.terms_[{0, 1}] = 1;
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Key{0, 0});
}

ResidueScalar Poly::constant_value() const {
    if (!is_constant()) throw InternalError("constant_value of a nonconstant polynomial");
    return terms_.empty() ? tw_->zero() : tw_->from_index(terms_.begin()->second);
}

bool Poly::mentions_lambda() const {
    for (auto& [k, v] : terms_)
        if (k.second > 0) return true;
    return false;
}

int Poly::degree_c() const {
    int d = 0;
    for (auto& [k, v] : terms_) d = std::max(d, k.first);
    return d;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [k, v] : o.terms_) r.add_term(k, v);
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [k, v] : r.terms_) v = tw_->neg_idx(v);
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    Poly r(*tw_);
    for (auto& [ka, va] : terms_)
        for (auto& [kb, vb] : o.terms_)
            r.add_term({ka.first + kb.first, ka.second + kb.second}, tw_->mul_idx(va, vb));
    return r;
}

Poly Poly::eval_c(ResidueScalar v) const {
    Poly r(*tw_);
    for (auto& [k, coeff] : terms_) {
        uint16_t s = tw_->mul_idx(coeff, v.pow(k.first).index());
        r.add_term({0, k.second}, s);
    }
    return r;
}

Poly Poly::reduce_mod(const Poly& m) const {
    if (m.mentions_lambda() || m.is_constant())
        throw InternalError("reduction modulus must be nonconstant and lambda-free");
    int dm = m.degree_c();
    uint16_t lead = 0;
    for (auto& [k, v] : m.terms_)
        if (k.first == dm) lead = v;
    uint16_t lead_inv = tw_->inv_idx(lead);
    Poly r = *this;
    for (int d = r.degree_c(); d >= dm; --d) {
        // clear every term of c-degree d (any lambda part)
        std::vector<std::pair<Key, uint16_t>> tops;
        for (auto& [k, v] : r.terms_)
            if (k.first == d) tops.push_back({k, v});
        for (auto& [k, v] : tops) {
            uint16_t f = tw_->mul_idx(v, lead_inv);
            for (auto& [km, vm] : m.terms_)
                r.add_term({k.first - dm + km.first, k.second + km.second},
                           tw_->neg_idx(tw_->mul_idx(f, vm)));
        }
    }
    return r;
}

Poly Poly::monic_in_c() const {
    if (is_constant()) return *this;
    if (mentions_lambda()) throw InternalError("monic normalization of a lambda-mixed polynomial");
    int d = degree_c();
    uint16_t lead = 0;
    for (auto& [k, v] : terms_)
        if (k.first == d) lead = v;
    return *this * Poly::scalar(tw_->from_index(tw_->inv_idx(lead)));
}

Poly Poly::gcd_in_c(const Poly& a, const Poly& b) {
    if (a.mentions_lambda() || b.mentions_lambda())
        throw InternalError("gcd of lambda-mixed polynomials");
    Poly x = a, y = b;
    while (!y.is_zero()) {
        if (y.is_constant()) return Poly::scalar(y.tower().one());
        Poly r = x.reduce_mod(y.monic_in_c());
        x = y;
        y = r;
    }
    return x.is_constant() ? x : x.monic_in_c();
}

std::optional<Poly> Poly::divide_exact(const Poly& o) const {
    if (o.is_zero()) return std::nullopt;
    Poly rem = *this;
    Poly quot(*tw_);
    Key olead = o.terms_.rbegin()->first;
    uint16_t olead_inv = tw_->inv_idx(o.terms_.rbegin()->second);
    while (!rem.is_zero()) {
        Key rlead = rem.terms_.rbegin()->first;
        if (rlead.first < olead.first || rlead.second < olead.second) return std::nullopt;
        Key qk{rlead.first - olead.first, rlead.second - olead.second};
        uint16_t qv = tw_->mul_idx(rem.terms_.rbegin()->second, olead_inv);
        Poly mono(*tw_);
        mono.terms_[qk] = qv;
        quot = quot + mono;
        rem = rem - mono * o;
    }
    return quot;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // descending in (deg_c, deg_lambda)
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << "+";
        first = false;
        auto [dc, dl] = it->first;
        bool has_var = dc > 0 || dl > 0;
        if (it->second != 1 || !has_var) {
            os << tw_->to_string(it->second);
            if (has_var) os << "*";
        }
        if (dc > 0) {
            os << "c";
            if (dc > 1) os << "^" << dc;
            if (dl > 0) os << "*";
        }
        if (dl > 0) {
            os << "l";
            if (dl > 1) os << "^" << dl;
        }
    }
    return os.str();
}

Poly Poly::parse(const FieldTower& tw, const std::string& s) {
    Poly out(tw);
    std::string t;
    for (char ch : s)
        if (!isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw UsageError("empty polynomial");
    size_t pos = 0;
    while (pos < t.size()) {
        size_t end = t.find('+', pos);
        if (end == std::string::npos) end = t.size();
        std::string term = t.substr(pos, end - pos);
        pos = end + 1;
        // term: factors separated by '*'
        uint16_t coeff = 1;
        int dc = 0, dl = 0;
        size_t fp = 0;
        while (fp < term.size()) {
            size_t fe = term.find('*', fp);
            if (fe == std::string::npos) fe = term.size();
            std::string fac = term.substr(fp, fe - fp);
            fp = fe + 1;
            if (fac.empty()) throw UsageError("malformed polynomial term");
            if (fac[0] == 'c' || fac[0] == 'l') {
                int e = 1;
                if (fac.size() > 1) {
                    if (fac[1] != '^') throw UsageError("malformed power");
                    e = std::stoi(fac.substr(2));
                }
                (fac[0] == 'c' ? dc : dl) += e;
            } else if (fac[0] == 'g') {
                if (fac.size() < 3 || fac[1] != '^') throw UsageError("malformed coefficient");
                coeff = tw.mul_idx(coeff, tw.exp_idx(std::stol(fac.substr(2))));
            } else {
                long n = std::stol(fac);
                coeff = tw.mul_idx(coeff, tw.from_int(n).index());
            }
        }
        if (coeff != 0) out.add_term({dc, dl}, coeff);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ModuleVector

ModuleVector ModuleVector::basis(const FieldTower& tw, int n) {
    ModuleVector v(tw);
    v.comps_[n] = Poly::scalar(tw.one());
    return v;
}

Poly ModuleVector::coeff(int n) const {
    auto it = comps_.find(n);
    return it == comps_.end() ? Poly(*tw_) : it->second;
}

void ModuleVector::set_coeff(int n, Poly p) {
    if (p.is_zero()) comps_.erase(n);
    else comps_[n] = std::move(p);
}

ModuleVector ModuleVector::operator+(const ModuleVector& o) const {
    ModuleVector r = *this;
    for (auto& [n, p] : o.comps_) r.set_coeff(n, r.coeff(n) + p);
    return r;
}

ModuleVector ModuleVector::operator-(const ModuleVector& o) const {
    ModuleVector r = *this;
    for (auto& [n, p] : o.comps_) r.set_coeff(n, r.coeff(n) - p);
    return r;
}

ModuleVector ModuleVector::scaled(const Poly& p) const {
    ModuleVector r(*tw_);
    for (auto& [n, q] : comps_) r.set_coeff(n, q * p);
    return r;
}

bool ModuleVector::operator==(const ModuleVector& o) const {
    return (*this - o).is_zero();
}

ModuleVector ModuleVector::map_coeffs(const std::function<Poly(const Poly&)>& f) const {
    ModuleVector r(*tw_);
    for (auto& [n, q] : comps_) r.set_coeff(n, f(q));
    return r;
}

std::string ModuleVector::str() const {
    if (comps_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [n, p] : comps_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << p.str() << ")*f[" << n << "]";
    }
    return os.str();
}

ModuleVector ModuleVector::parse(const FieldTower& tw, const std::string& s) {
    ModuleVector out(tw);
    std::string t;
    for (char ch : s)
        if (!isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t == "0") return out;
    size_t pos = 0;
    while (pos < t.size()) {
        if (t[pos] != '(') throw UsageError("malformed module vector");
        size_t close = t.find(')', pos);
        if (close == std::string::npos) throw UsageError("malformed module vector");
        Poly p = Poly::parse(tw, t.substr(pos + 1, close - pos - 1));
        size_t fb = t.find("*f[", close);
        if (fb != close + 1) throw UsageError("malformed module vector");
        size_t fe = t.find(']', fb);
        int n = std::stoi(t.substr(fb + 3, fe - fb - 3));
        out.set_coeff(n, out.coeff(n) + p);
        pos = fe + 1;
        if (pos < t.size()) {
            if (t[pos] != '+') throw UsageError("malformed module vector");
            ++pos;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// operator actions

ConstantsPack make_pack(const FieldTower& tw, const WeightDescriptor& w, Tag tag) {
    ConstantsPack pk{tag,         char_sum(tw, w.chi_sigma, tag, SumKind::Big),
                     tw.zero(),   char_sum(tw, w.chi_sigma, tag, SumKind::Small),
                     tw.zero(),   tw.zero(),
                     false,       w.dim_gt_one};
    pk.d0 = d0(tw, w);
    pk.chi_t = eval_char(tw, w.chi_sigma, tw.trace_zero_unit());
    pk.degenerate = classify_weight(tw, w.chi_sigma, tag) == WeightClass::Degenerate;
    pk.cm = w.dim_gt_one ? tw.zero() : pk.c_minus;
    return pk;
}

std::string op_name(OpName n) {
    switch (n) {
        case OpName::S_K: return "S_K";
        case OpName::S_minus: return "S_minus";
        case OpName::T: return "T";
        case OpName::T_sigma: return "T_sigma";
    }
    throw InternalError("unknown operator");
}

std::optional<OpName> parse_op(const std::string& s) {
    if (s == "S_K") return OpName::S_K;
    if (s == "S_minus") return OpName::S_minus;
    if (s == "T") return OpName::T;
    if (s == "T_sigma") return OpName::T_sigma;
    return std::nullopt;
}

ModuleVector apply_op(OpName name, const ModuleVector& v, const ConstantsPack& pack) {
    const FieldTower& tw = v.tower();
    ModuleVector out(tw);
    auto add = [&](int n, const Poly& p) { out.set_coeff(n, out.coeff(n) + p); };
    for (auto& [n, p] : v.components()) {
        switch (name) {
            case OpName::S_K:
                if (n >= 1) add(-n, p);
                else if (n == 0) add(0, p * Poly::scalar(pack.d0));
                else add(n, p * Poly::scalar(pack.dn));
                break;
            case OpName::S_minus:
                if (n >= 1) add(n, p * Poly::scalar(pack.c_minus));
                else add(1 - n, p);
                break;
            case OpName::T:
            case OpName::T_sigma:
                if (n < 0)
                    throw UnsupportedTAction("no published action of T on f_" + std::to_string(n));
                if (n == 0) {
                    if (!pack.degenerate)
                        throw UnsupportedTAction("T on f_0 is only available for degenerate weights");
                    add(-1, p);
                    add(1, p * Poly::lambda(tw));
                } else {
                    add(n, p * Poly::scalar(pack.cm));
                    add(n + 1, p);
                }
                break;
        }
    }
    if (name == OpName::T_sigma)
        out = out - v.scaled(Poly::scalar(pack.c_minus));
    return out;
}

// ---------------------------------------------------------------------------
// coset-sum oracle

namespace {

std::vector<ResidueScalar> seed_vector(const WeightModel& model, int n) {
    std::vector<ResidueScalar> v0 = model.v0();
    if (n <= 0) return v0;
    GammaElem w = reduce_mod_K1(beta_K(model.tower(), model.tag()), model.tag());
    return model.act(w, v0);
}

} // namespace

std::vector<std::pair<int, std::vector<ResidueScalar>>> oracle_apply(
    OpName name, int n, const WeightModel& model, const std::vector<int>& probe_levels,
    int m_max) {
    if (name != OpName::S_K && name != OpName::S_minus)
        throw UnsupportedTAction("the oracle evaluates the group operators S_K and S_minus only");
    const FieldTower& tw = model.tower();
    Tag tag = model.tag();
    if (std::abs(n) > m_max) throw LevelTooLarge("basis index beyond m_max");
    for (int j : probe_levels)
        if (std::abs(j) > m_max) throw LevelTooLarge("probe level beyond m_max");
    ParahoricInfo info = parahoric_info(tw, tag);
    GroupElement bK = beta_K(tw, tag);

    // right factors of the operator's group sum
    std::vector<GroupElement> terms;
    if (name == OpName::S_K) {
        for (const auto& u : transversal(tw, Side::Upper, info.n_K)) terms.push_back(u * bK);
    } else {
        GroupElement ainv = GroupElement::alpha_pow(tw, -1);
        for (const auto& u : transversal(tw, Side::Lower, info.m_K)) terms.push_back(u * bK * ainv);
    }

    CosetDecider support(tw, n, tag, m_max);
    std::vector<ResidueScalar> seed = seed_vector(model, n);
    std::vector<std::pair<int, std::vector<ResidueScalar>>> out;
    for (int j : probe_levels) {
        GroupElement aj = GroupElement::alpha_pow(tw, -j);
        std::vector<ResidueScalar> acc(seed.size(), tw.zero());
        for (const auto& T : terms) {
            GroupElement g = aj * T;
            auto w = support.witness(g);
            if (!w) continue;
            std::vector<ResidueScalar> val = model.act(reduce_mod_K1(w->k, tag), seed);
            for (size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] + val[i];
        }
        out.emplace_back(j, std::move(acc));
    }
    return out;
}

std::vector<ResidueScalar> predicted_value(const ModuleVector& v, const WeightModel& model,
                                           int probe_level) {
    Poly p = v.coeff(probe_level);
    if (!p.is_constant())
        throw InternalError("predicted_value needs scalar coefficients");
    std::vector<ResidueScalar> seed = seed_vector(model, probe_level);
    ResidueScalar s = p.constant_value();
    for (auto& x : seed) x = x * s;
    return seed;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<int, Poly>> decompose(const ModuleVector& v) {
    std::vector<std::pair<int, Poly>> out;
    for (auto& [n, p] : v.components()) out.emplace_back(n, p);
    return out;
}

std::optional<PolyRatio> is_proportional(const ModuleVector& v, const ModuleVector& w) {
    const FieldTower& tw = v.tower();
    if (v.is_zero() && w.is_zero()) return PolyRatio{Poly::scalar(tw.one()), Poly::scalar(tw.one())};
    if (v.is_zero() || w.is_zero()) return std::nullopt;
    auto dv = decompose(v), dw = decompose(w);
    if (dv.size() != dw.size()) return std::nullopt;
    for (size_t i = 0; i < dv.size(); ++i)
        if (dv[i].first != dw[i].first) return std::nullopt;
    // cross-ratio agreement over the fraction field
    const Poly &p0 = dv[0].second, &q0 = dw[0].second;
    for (size_t i = 1; i < dv.size(); ++i)
        if (!(p0 * dw[i].second == q0 * dv[i].second)) return std::nullopt;
    if (auto q = p0.divide_exact(q0)) return PolyRatio{*q, Poly::scalar(tw.one())};
    return PolyRatio{p0, q0};
}

} // namespace u21
