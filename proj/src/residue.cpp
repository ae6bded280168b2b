#include "u21/residue.hpp"

#include <algorithm>
#include <map>

namespace u21 {

// ---------------------------------------------------------------------------
// L-groups

bool L_member(const LElem& a) {
    return (a.x * conjugate(a.x) + a.t + conjugate(a.t)).is_zero();
}

LElem L_identity(const FieldTower& tw) { return {tw.zero(), tw.zero()}; }

LElem L_mul(const LElem& a, const LElem& b) {
    if (!L_member(a) || !L_member(b)) throw ConstraintViolation("L_mul off the variety");
    return {a.x + b.x, a.t + b.t - b.x * conjugate(a.x)};
}

LElem L_inverse(const LElem& a) { return {-a.x, conjugate(a.t)}; }

bool L_equal(const LElem& a, const LElem& b) { return a.x == b.x && a.t == b.t; }

std::vector<LElem> enumerate_L(const FieldTower& tw, int order_exponent) {
    if (order_exponent != 1 && order_exponent != 3)
        throw ConstraintViolation("L-group exponent must be 1 or 3");
    std::vector<LElem> out;
    if (order_exponent == 3) {
        for (long xi = 0; xi < tw.q2(); ++xi)
            for (long ti = 0; ti < tw.q2(); ++ti) {
                LElem e{tw.from_index(xi), tw.from_index(ti)};
                if (L_member(e)) out.push_back(e);
            }
    } else {
        for (long ti = 0; ti < tw.q2(); ++ti) {
            LElem e{tw.zero(), tw.from_index(ti)};
            if (L_member(e)) out.push_back(e);
        }
    }
    return out;
}

LElem L_identify(const GroupElement& u, Side side, Tag tag) {
    const FieldTower& tw = u.tower();
    ParahoricInfo info = parahoric_info(tw, tag);
    int level = side == Side::Upper ? info.n_K : info.m_K;
    if (!in_filtration(u, side, level))
        throw NotInFiltration("element outside the filtration step the chart reads");
    const LaurentScalar& xent = side == Side::Upper ? u.at(0, 1) : u.at(1, 0);
    const LaurentScalar& yent = side == Side::Upper ? u.at(0, 2) : u.at(2, 0);
    ResidueScalar t = yent.coeff(level);
    if (side == Side::Upper) {
        ResidueScalar a = xent.coeff(level);  // x * w^{-n_K} mod p
        return {-conjugate(a), t};
    }
    ResidueScalar a = xent.coeff(level - 1);  // (x/w) * w^{2-m_K} mod p
    return {a, t};
}

// ---------------------------------------------------------------------------
// Gamma_K

namespace {

void require_k1_pattern(const GammaElem& a) {
    if (a.at(0, 1) != 0 || a.at(1, 0) != 0 || a.at(1, 2) != 0 || a.at(2, 1) != 0)
        throw InternalError("K1 residue element off the block pattern");
}

} // namespace

GammaElem gamma_identity(const FieldTower& tw, Tag tag) {
    GammaElem r{&tw, tag, {}};
    r.at(0, 0) = r.at(1, 1) = r.at(2, 2) = 1;
    return r;
}

GammaElem gamma_mul(const GammaElem& a, const GammaElem& b) {
    const FieldTower& tw = *a.tw;
    GammaElem r{a.tw, a.tag, {}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            uint16_t s = 0;
            for (int k = 0; k < 3; ++k)
                s = tw.add_idx(s, tw.mul_idx(a.at(i, k), b.at(k, j)));
            r.at(i, j) = s;
        }
    return r;
}

GammaElem gamma_inverse(const GammaElem& a) {
    const FieldTower& tw = *a.tw;
    auto mul = [&](uint16_t x, uint16_t y) { return tw.mul_idx(x, y); };
    auto sub = [&](uint16_t x, uint16_t y) { return tw.sub_idx(x, y); };
    uint16_t det = 0;
    det = tw.add_idx(det, mul(a.at(0, 0), sub(mul(a.at(1, 1), a.at(2, 2)), mul(a.at(1, 2), a.at(2, 1)))));
    det = tw.sub_idx(det, mul(a.at(0, 1), sub(mul(a.at(1, 0), a.at(2, 2)), mul(a.at(1, 2), a.at(2, 0)))));
    det = tw.add_idx(det, mul(a.at(0, 2), sub(mul(a.at(1, 0), a.at(2, 1)), mul(a.at(1, 1), a.at(2, 0)))));
    uint16_t dinv = tw.inv_idx(det);
    GammaElem r{a.tw, a.tag, {}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            r.at(j, i) = mul(dinv, sub(mul(a.at(i1, j1), a.at(i2, j2)), mul(a.at(i1, j2), a.at(i2, j1))));
        }
    return r;
}

bool gamma_is_unitary(const GammaElem& a) {
    const FieldTower& tw = *a.tw;
    // gamma^T beta conj(gamma) = beta; for the K1 block pattern this is
    // exactly the U(1,1) x U(1) relation
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            uint16_t s = 0;
            for (int k = 0; k < 3; ++k)
                s = tw.add_idx(s, tw.mul_idx(a.at(k, i), tw.frob_idx(a.at(2 - k, j))));
            if (s != (i + j == 2 ? 1 : 0)) return false;
        }
    if (a.tag == Tag::K1)
        if (a.at(0, 1) != 0 || a.at(1, 0) != 0 || a.at(1, 2) != 0 || a.at(2, 1) != 0) return false;
    return true;
}

bool gamma_is_upper(const GammaElem& a) {
    if (a.tag == Tag::K0)
        return a.at(1, 0) == 0 && a.at(2, 0) == 0 && a.at(2, 1) == 0;
    require_k1_pattern(a);
    return a.at(2, 0) == 0;
}

bool gamma_is_unipotent_upper(const GammaElem& a) {
    return gamma_is_upper(a) && a.at(0, 0) == 1 && a.at(1, 1) == 1 && a.at(2, 2) == 1;
}

GammaElem weyl_reflection(const FieldTower& tw, Tag tag) {
    GammaElem r{&tw, tag, {}};
    r.at(0, 2) = r.at(1, 1) = r.at(2, 0) = 1;
    return r;
}

GammaElem reduce_mod_K1(const GroupElement& g, Tag tag) {
    const FieldTower& tw = g.tower();
    if (!is_member(g, Subgroup::K, tag)) throw NotInK("reduction of an element outside K");
    GammaElem r{&tw, tag, {}};
    if (tag == Tag::K0) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.at(i, j) = g.at(i, j).coeff(0).index();
        return r;
    }
    r.at(0, 0) = g.at(0, 0).coeff(0).index();
    r.at(0, 2) = g.at(0, 2).coeff(-1).index();
    r.at(2, 0) = g.at(2, 0).coeff(1).index();
    r.at(2, 2) = g.at(2, 2).coeff(0).index();
    r.at(1, 1) = g.at(1, 1).coeff(0).index();
    return r;
}

GroupElement gamma_section(const GammaElem& a) {
    const FieldTower& tw = *a.tw;
    Mat3 m;
    if (a.tag == Tag::K0) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m.at(i, j) = LaurentScalar::constant(tw.from_index(a.at(i, j)));
    } else {
        require_k1_pattern(a);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m.at(i, j) = LaurentScalar::zero(tw);
        m.at(0, 0) = LaurentScalar::constant(tw.from_index(a.at(0, 0)));
        m.at(1, 1) = LaurentScalar::constant(tw.from_index(a.at(1, 1)));
        m.at(2, 2) = LaurentScalar::constant(tw.from_index(a.at(2, 2)));
        m.at(0, 2) = LaurentScalar::monomial(tw.from_index(a.at(0, 2)), -1);
        m.at(2, 0) = LaurentScalar::monomial(tw.from_index(a.at(2, 0)), 1);
    }
    return GroupElement::from_matrix(tw, std::move(m));
}

std::vector<GammaElem> enumerate_unipotent(const FieldTower& tw, Tag tag) {
    std::vector<GammaElem> out;
    if (tag == Tag::K0) {
        for (const LElem& e : enumerate_L(tw, 3)) {
            GammaElem g = gamma_identity(tw, tag);
            g.at(0, 1) = e.x.index();
            g.at(0, 2) = e.t.index();
            g.at(1, 2) = (-conjugate(e.x)).index();
            out.push_back(g);
        }
    } else {
        for (const LElem& e : enumerate_L(tw, 1)) {
            GammaElem g = gamma_identity(tw, tag);
            g.at(0, 2) = e.t.index();
            out.push_back(g);
        }
    }
    return out;
}

namespace {

uint16_t herm_pair(const FieldTower& tw, const std::array<uint16_t, 3>& v,
                   const std::array<uint16_t, 3>& w) {
    // v^T beta conj(w)
    uint16_t s = 0;
    for (int k = 0; k < 3; ++k)
        s = tw.add_idx(s, tw.mul_idx(v[k], tw.frob_idx(w[2 - k])));
    return s;
}

} // namespace

std::vector<GammaElem> enumerate_Gamma(const FieldTower& tw, Tag tag) {
    if (tw.q() > 7) throw EnumerationTooLarge("Gamma_K enumeration capped at q <= 7");
    std::vector<GammaElem> out;
    const long n = tw.q2();
    auto dec = [&](long v) {
        return std::array<uint16_t, 3>{static_cast<uint16_t>(v % n),
                                       static_cast<uint16_t>((v / n) % n),
                                       static_cast<uint16_t>(v / (n * n))};
    };
    if (tag == Tag::K1) {
        // columns (a,c) and (b,d) of the U(1,1) block, then the U(1) scalar
        for (long v1 = 1; v1 < n * n; ++v1) {
            long a = v1 % n, c = v1 / n;
            uint16_t ac = tw.add_idx(tw.mul_idx(static_cast<uint16_t>(a), tw.frob_idx(static_cast<uint16_t>(c))),
                                     tw.mul_idx(static_cast<uint16_t>(c), tw.frob_idx(static_cast<uint16_t>(a))));
            if (ac != 0) continue;
            for (long v2 = 0; v2 < n * n; ++v2) {
                long b = v2 % n, d = v2 / n;
                uint16_t bd = tw.add_idx(tw.mul_idx(static_cast<uint16_t>(b), tw.frob_idx(static_cast<uint16_t>(d))),
                                         tw.mul_idx(static_cast<uint16_t>(d), tw.frob_idx(static_cast<uint16_t>(b))));
                if (bd != 0) continue;
                uint16_t cross = tw.add_idx(tw.mul_idx(static_cast<uint16_t>(a), tw.frob_idx(static_cast<uint16_t>(d))),
                                            tw.mul_idx(static_cast<uint16_t>(c), tw.frob_idx(static_cast<uint16_t>(b))));
                if (cross != 1) continue;
                for (long ui = 1; ui < n; ++ui) {
                    uint16_t u = static_cast<uint16_t>(ui);
                    if (tw.mul_idx(u, tw.frob_idx(u)) != 1) continue;
                    GammaElem g{&tw, tag, {}};
                    g.at(0, 0) = static_cast<uint16_t>(a);
                    g.at(2, 0) = static_cast<uint16_t>(c);
                    g.at(0, 2) = static_cast<uint16_t>(b);
                    g.at(2, 2) = static_cast<uint16_t>(d);
                    g.at(1, 1) = u;
                    out.push_back(g);
                }
            }
        }
        return out;
    }
    // K0: columns c1 (isotropic), c2 (norm one, orthogonal to c1), then c3 on
    // the solved affine line with the trace-fiber parameter
    std::vector<std::array<uint16_t, 3>> iso;
    std::vector<std::array<uint16_t, 3>> all;
    for (long v = 1; v < n * n * n; ++v) {
        auto c = dec(v);
        all.push_back(c);
        if (herm_pair(tw, c, c) == 0) iso.push_back(c);
    }
    for (const auto& c1 : iso) {
        for (const auto& c2 : all) {
            if (herm_pair(tw, c2, c2) != 1 || herm_pair(tw, c1, c2) != 0) continue;
            // particular solution v0 of h(c1, x) = 1, h(c2, x) = 0: Gaussian
            // elimination on the conjugated system rows (beta c1bar)^T etc.
            // unknowns y = conj(x): row_i . y = rhs_i with row1 = c1^T beta,
            // row2 = c2^T beta
            std::array<std::array<uint16_t, 4>, 2> sys{};
            for (int k = 0; k < 3; ++k) {
                sys[0][k] = c1[2 - k];
                sys[1][k] = c2[2 - k];
            }
            sys[0][3] = 1;
            sys[1][3] = 0;
            // eliminate
            int pivcol0 = -1;
            for (int k = 0; k < 3 && pivcol0 < 0; ++k)
                if (sys[0][k] != 0) pivcol0 = k;
            uint16_t inv0 = tw.inv_idx(sys[0][pivcol0]);
            for (int k = 0; k < 4; ++k) sys[0][k] = tw.mul_idx(sys[0][k], inv0);
            uint16_t f = sys[1][pivcol0];
            for (int k = 0; k < 4; ++k) sys[1][k] = tw.sub_idx(sys[1][k], tw.mul_idx(f, sys[0][k]));
            int pivcol1 = -1;
            for (int k = 0; k < 3 && pivcol1 < 0; ++k)
                if (k != pivcol0 && sys[1][k] != 0) pivcol1 = k;
            if (pivcol1 < 0) continue;  // c2 dependent on c1: impossible here
            uint16_t inv1 = tw.inv_idx(sys[1][pivcol1]);
            for (int k = 0; k < 4; ++k) sys[1][k] = tw.mul_idx(sys[1][k], inv1);
            uint16_t f0 = sys[0][pivcol1];
            for (int k = 0; k < 4; ++k) sys[0][k] = tw.sub_idx(sys[0][k], tw.mul_idx(f0, sys[1][k]));
            std::array<uint16_t, 3> y{0, 0, 0};
            y[pivcol0] = sys[0][3];
            y[pivcol1] = sys[1][3];
            std::array<uint16_t, 3> v0;
            for (int k = 0; k < 3; ++k) v0[k] = tw.frob_idx(y[k]);  // x = conj(y)
            // c3 = v0 + s c1 with s + conj(s) = -h(v0, v0)
            uint16_t hv = herm_pair(tw, v0, v0);
            for (long si = 0; si < n; ++si) {
                uint16_t s = static_cast<uint16_t>(si);
                if (tw.add_idx(tw.add_idx(s, tw.frob_idx(s)), hv) != 0) continue;
                std::array<uint16_t, 3> c3;
                for (int k = 0; k < 3; ++k) c3[k] = tw.add_idx(v0[k], tw.mul_idx(s, c1[k]));
                GammaElem g{&tw, tag, {}};
                for (int i = 0; i < 3; ++i) {
                    g.at(i, 0) = c1[i];
                    g.at(i, 1) = c2[i];
                    g.at(i, 2) = c3[i];
                }
                out.push_back(g);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// weight models

namespace {

std::array<uint16_t, 3> normalize_row(const FieldTower& tw, const std::array<uint16_t, 3>& r) {
    for (int k = 0; k < 3; ++k)
        if (r[k] != 0) {
            uint16_t inv = tw.inv_idx(r[k]);
            return {tw.mul_idx(inv, r[0]), tw.mul_idx(inv, r[1]), tw.mul_idx(inv, r[2])};
        }
    throw InternalError("normalizing the zero row");
}

std::array<uint16_t, 3> row_times_gamma(const FieldTower& tw, const std::array<uint16_t, 3>& r,
                                        const GammaElem& g) {
    std::array<uint16_t, 3> out{0, 0, 0};
    for (int j = 0; j < 3; ++j) {
        uint16_t s = 0;
        for (int k = 0; k < 3; ++k) s = tw.add_idx(s, tw.mul_idx(r[k], g.at(k, j)));
        out[j] = s;
    }
    return out;
}

} // namespace

WeightModel WeightModel::steinberg(const FieldTower& tw, Tag tag) {
    if (tw.q() > 7) throw EnumerationTooLarge("weight model enumeration capped at q <= 7");
    WeightModel m(&tw, tag, Kind::Steinberg);
    const long n = tw.q2();
    std::vector<std::array<uint16_t, 3>> labels;
    for (long v = 1; v < n * n * n; ++v) {
        std::array<uint16_t, 3> r{static_cast<uint16_t>(v % n), static_cast<uint16_t>((v / n) % n),
                                  static_cast<uint16_t>(v / (n * n))};
        if (tag == Tag::K1 && r[1] != 0) continue;
        if (herm_pair(tw, r, r) != 0) continue;
        auto nr = normalize_row(tw, r);
        if (std::find(labels.begin(), labels.end(), nr) == labels.end()) labels.push_back(nr);
    }
    std::sort(labels.begin(), labels.end());
    std::array<uint16_t, 3> base{0, 0, 1};  // bottom row of the identity
    auto it = std::find(labels.begin(), labels.end(), base);
    if (it == labels.end()) throw InternalError("base coset label missing");
    std::iter_swap(labels.begin(), it);
    std::sort(labels.begin() + 1, labels.end());
    m.labels_ = std::move(labels);
    return m;
}

WeightModel WeightModel::trivial_character(const FieldTower& tw, Tag tag) {
    return WeightModel(&tw, tag, Kind::TrivialCharacter);
}

int WeightModel::dim() const {
    return kind_ == Kind::TrivialCharacter ? 1 : static_cast<int>(labels_.size()) - 1;
}

int WeightModel::label_index(const std::array<uint16_t, 3>& row) const {
    auto it = std::find(labels_.begin(), labels_.end(), row);
    if (it == labels_.end()) throw InternalError("unknown coset label");
    return static_cast<int>(it - labels_.begin());
}

std::vector<ResidueScalar> WeightModel::v0() const {
    if (kind_ == Kind::TrivialCharacter) return {tw_->one()};
    // image of the indicator of the base coset: all components -1 in the
    // value-at-base-normalized chart
    return std::vector<ResidueScalar>(dim(), -tw_->one());
}

std::vector<ResidueScalar> WeightModel::act(const GammaElem& g,
                                            const std::vector<ResidueScalar>& v) const {
    if (static_cast<int>(v.size()) != dim()) throw ShapeMismatch("weight vector of wrong size");
    if (kind_ == Kind::TrivialCharacter) return v;
    // full function: F(base) = 0, F(labels_[i]) = v[i-1]; the action is right
    // translation, then renormalize to value 0 at the base coset
    auto full_value = [&](const std::array<uint16_t, 3>& label) {
        int idx = label_index(label);
        return idx == 0 ? tw_->zero() : v[idx - 1];
    };
    ResidueScalar at_base = full_value(normalize_row(*tw_, row_times_gamma(*tw_, labels_[0], g)));
    std::vector<ResidueScalar> out;
    out.reserve(dim());
    for (size_t i = 1; i < labels_.size(); ++i) {
        ResidueScalar val = full_value(normalize_row(*tw_, row_times_gamma(*tw_, labels_[i], g)));
        out.push_back(val - at_base);
    }
    return out;
}

WeightModel build_steinberg(const FieldTower& tw, Tag tag) {
    return WeightModel::steinberg(tw, tag);
}

} // namespace u21
