#include "u21/group.hpp"

#include <algorithm>

#include "u21/residue.hpp"

namespace u21 {

// ---------------------------------------------------------------------------
// Mat3

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.at(i, j) = at(i, 0) * o.at(0, j) + at(i, 1) * o.at(1, j) + at(i, 2) * o.at(2, j);
    return r;
}

Mat3 Mat3::operator-(const Mat3& o) const {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r.e[k] = e[k] - o.e[k];
    return r;
}

bool Mat3::operator==(const Mat3& o) const {
    for (int k = 0; k < 9; ++k)
        if (!(e[k] - o.e[k]).is_zero()) return false;
    return true;
}

Mat3 Mat3::conj() const {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r.e[k] = e[k].conj();
    return r;
}

Mat3 Mat3::transpose() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at(i, j) = at(j, i);
    return r;
}

LaurentScalar Mat3::det() const {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
         - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
         + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

Mat3 Mat3::inverse() const {
    LaurentScalar d = det();
    LaurentScalar dinv = laurent_invert(d);
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
            int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            // cofactor expansion written cyclically needs no sign juggling
            r.at(j, i) = (at(i1, j1) * at(i2, j2) - at(i1, j2) * at(i2, j1)) * dinv;
        }
    return r;
}

Mat3 identity_mat(const FieldTower& tw) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m.at(i, j) = (i == j) ? LaurentScalar::one(tw) : LaurentScalar::zero(tw);
    return m;
}

namespace {

Mat3 form_matrix(const FieldTower& tw) {
    Mat3 b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b.at(i, j) = (i + j == 2) ? LaurentScalar::one(tw) : LaurentScalar::zero(tw);
    return b;
}

} // namespace

// ---------------------------------------------------------------------------
// GroupElement factories

GroupElement GroupElement::n_upper(const LaurentScalar& x, const LaurentScalar& y) {
    const FieldTower& tw = x.attached() ? x.tower() : y.tower();
    LaurentScalar rel = x * x.conj() + y + y.conj();
    if (!rel.is_zero())
        throw ConstraintViolation("n(x,y): x*conj(x) + y + conj(y) != 0");
    Mat3 m = identity_mat(tw);
    m.at(0, 1) = x;
    m.at(0, 2) = y;
    m.at(1, 2) = -x.conj();
    return {&tw, std::move(m)};
}

GroupElement GroupElement::n_lower(const LaurentScalar& x, const LaurentScalar& y) {
    const FieldTower& tw = x.attached() ? x.tower() : y.tower();
    LaurentScalar rel = x * x.conj() + y + y.conj();
    if (!rel.is_zero())
        throw ConstraintViolation("n'(x,y): x*conj(x) + y + conj(y) != 0");
    Mat3 m = identity_mat(tw);
    m.at(1, 0) = x;
    m.at(2, 0) = y;
    m.at(2, 1) = -x.conj();
    return {&tw, std::move(m)};
}

GroupElement GroupElement::h_diag(const LaurentScalar& x) {
    const FieldTower& tw = x.tower();
    if (x.is_zero()) throw ConstraintViolation("h(x) needs a unit times a power of w");
    LaurentScalar xb = x.conj();
    Mat3 m = identity_mat(tw);
    m.at(0, 0) = x;
    m.at(1, 1) = -(xb * laurent_invert(x));
    m.at(2, 2) = laurent_invert(xb);
    return {&tw, std::move(m)};
}

GroupElement GroupElement::alpha_pow(const FieldTower& tw, int n) {
    Mat3 m = identity_mat(tw);
    m.at(0, 0) = LaurentScalar::uniformizer_pow(tw, -n);
    m.at(2, 2) = LaurentScalar::uniformizer_pow(tw, n);
    return {&tw, std::move(m)};
}

GroupElement GroupElement::beta(const FieldTower& tw) { return {&tw, form_matrix(tw)}; }

GroupElement GroupElement::beta_prime(const FieldTower& tw) {
    Mat3 m = identity_mat(tw);
    m.at(0, 0) = LaurentScalar::zero(tw);
    m.at(2, 2) = LaurentScalar::zero(tw);
    m.at(0, 2) = LaurentScalar::uniformizer_pow(tw, -1);
    m.at(2, 0) = LaurentScalar::uniformizer_pow(tw, 1);
    return {&tw, std::move(m)};
}

GroupElement GroupElement::identity(const FieldTower& tw) { return {&tw, identity_mat(tw)}; }

GroupElement GroupElement::from_matrix(const FieldTower& tw, Mat3 m) {
    GroupElement g{&tw, std::move(m)};
    if (!g.is_unitary()) throw ConstraintViolation("matrix does not preserve the Hermitian form");
    return g;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
    return {tw_, m_ * o.m_};
}

GroupElement GroupElement::inverse() const { return {tw_, m_.inverse()}; }

bool GroupElement::is_unitary() const {
    Mat3 lhs = m_.transpose() * form_matrix(*tw_) * m_.conj();
    return lhs == form_matrix(*tw_);
}

GroupElement beta_K(const FieldTower& tw, Tag tag) {
    return tag == Tag::K0 ? GroupElement::beta(tw) : GroupElement::beta_prime(tw);
}

// ---------------------------------------------------------------------------
// membership by entry-valuation patterns (equivalently, reduction into B or U)

namespace {

bool entry_val_at_least(const GroupElement& g, int i, int j, int k) {
    return g.at(i, j).valuation_at_least(k);
}

bool diag_one_mod_p(const GroupElement& g) {
    const FieldTower& tw = g.tower();
    for (int i = 0; i < 3; ++i)
        if (!(g.at(i, i) - LaurentScalar::one(tw)).valuation_at_least(1)) return false;
    return true;
}

constexpr int kK1Bounds[3][3] = {{0, 0, -1}, {1, 0, 0}, {1, 1, 0}};

} // namespace

bool is_member(const GroupElement& g, Subgroup s, Tag tag) {
    auto in_K = [&] {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!entry_val_at_least(g, i, j, tag == Tag::K0 ? 0 : kK1Bounds[i][j]))
                    return false;
        return true;
    };
    switch (s) {
        case Subgroup::K:
            return in_K();
        case Subgroup::ProP: {
            if (!in_K()) return false;
            if (!diag_one_mod_p(g)) return false;
            if (tag == Tag::K0) {
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        if (i != j && !entry_val_at_least(g, i, j, 1)) return false;
                return true;
            }
            return entry_val_at_least(g, 0, 1, 0) && entry_val_at_least(g, 0, 2, 0) &&
                   entry_val_at_least(g, 1, 0, 1) && entry_val_at_least(g, 1, 2, 0) &&
                   entry_val_at_least(g, 2, 0, 2) && entry_val_at_least(g, 2, 1, 1);
        }
        case Subgroup::Iwahori:
            if (!in_K()) return false;
            if (tag == Tag::K0)
                return entry_val_at_least(g, 1, 0, 1) && entry_val_at_least(g, 2, 0, 1) &&
                       entry_val_at_least(g, 2, 1, 1);
            return entry_val_at_least(g, 2, 0, 2);
        case Subgroup::ProPIwahori:
            return is_member(g, Subgroup::Iwahori, tag) && diag_one_mod_p(g);
        case Subgroup::H0: {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    if (i == j) continue;
                    if (!g.at(i, j).is_zero()) return false;
                }
            for (int i = 0; i < 3; ++i) {
                if (!entry_val_at_least(g, i, i, 0)) return false;
                if (g.at(i, i).valuation_at_least(1)) return false;  // unit entries
            }
            return true;
        }
        case Subgroup::H1:
            return is_member(g, Subgroup::H0, tag) && diag_one_mod_p(g);
    }
    throw InternalError("unhandled subgroup");
}

bool in_filtration(const GroupElement& g, Side side, int k) {
    const FieldTower& tw = g.tower();
    const LaurentScalar one = LaurentScalar::one(tw);
    for (int i = 0; i < 3; ++i)
        if (!(g.at(i, i) - one).is_zero()) return false;
    int xi, xj, yi, yj, ci, cj;  // x entry, y entry, the -conj(x) entry
    if (side == Side::Upper) { xi = 0; xj = 1; yi = 0; yj = 2; ci = 1; cj = 2; }
    else                     { xi = 1; xj = 0; yi = 2; yj = 0; ci = 2; cj = 1; }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j || (i == xi && j == xj) || (i == yi && j == yj) || (i == ci && j == cj))
                continue;
            if (!g.at(i, j).is_zero()) return false;
        }
    if (!(g.at(ci, cj) + g.at(xi, xj).conj()).is_zero()) return false;
    return g.at(yi, yj).valuation_at_least(k);
}

// ---------------------------------------------------------------------------
// transversals

std::vector<GroupElement> transversal(const FieldTower& tw, Side side, int k) {
    if (tw.default_precision() < k + 2)
        throw PrecisionExhausted("transversal at level beyond precision");
    std::vector<GroupElement> out;
    auto emit = [&](const LaurentScalar& x, const LaurentScalar& y) {
        out.push_back(side == Side::Upper ? GroupElement::n_upper(x, y)
                                          : GroupElement::n_lower(x, y));
    };
    if (k % 2 == 0) {
        // level of order q^3: residue pairs (x0, t0) with x0*conj(x0) + t0 + conj(t0) = 0
        int j = k / 2;
        for (long xi = 0; xi < tw.q2(); ++xi)
            for (long ti = 0; ti < tw.q2(); ++ti) {
                ResidueScalar x0 = tw.from_index(xi), t0 = tw.from_index(ti);
                if (!(x0 * conjugate(x0) + t0 + conjugate(t0)).is_zero()) continue;
                emit(LaurentScalar::monomial(x0, j), LaurentScalar::monomial(t0, k));
            }
    } else {
        // level of order q: x = 0, t0 of trace zero
        for (long ti = 0; ti < tw.q2(); ++ti) {
            ResidueScalar t0 = tw.from_index(ti);
            if (!(t0 + conjugate(t0)).is_zero()) continue;
            emit(LaurentScalar::zero(tw), LaurentScalar::monomial(t0, k));
        }
    }
    return out;
}

std::vector<GroupElement> filtration_transversal(const FieldTower& tw, Side side,
                                                 int from_level, int to_level) {
    std::vector<GroupElement> out{GroupElement::identity(tw)};
    // N_from = N_to * T_{to-1} * ... * T_from, deepest factor leftmost
    for (int lev = to_level - 1; lev >= from_level; --lev) {
        auto reps = transversal(tw, side, lev);
        std::vector<GroupElement> next;
        next.reserve(out.size() * reps.size());
        for (const auto& a : out)
            for (const auto& t : reps) next.push_back(a * t);
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// parahoric data by membership enumeration

ParahoricInfo parahoric_info(const FieldTower& tw, Tag tag) {
    auto filtration_inside = [&](Side side, int k) {
        // N_k <= I_{1,K} iff the level transversals from k to a depth where
        // containment is automatic all land in I_{1,K}
        for (int lev = k; lev <= 4; ++lev)
            for (const auto& u : transversal(tw, side, lev))
                if (!is_member(u, Subgroup::ProPIwahori, tag)) return false;
        return true;
    };
    auto least_level = [&](Side side) {
        for (int k = -2; k <= 4; ++k)
            if (filtration_inside(side, k)) return k;
        throw InternalError("no filtration level contained in I_1");
    };
    ParahoricInfo info;
    info.tag = tag;
    info.n_K = least_level(Side::Upper);
    info.m_K = least_level(Side::Lower);
    if (info.n_K + info.m_K != 1) throw InternalError("n_K + m_K != 1");
    size_t sz = transversal(tw, Side::Upper, info.n_K).size();
    info.t_K = 0;
    for (size_t acc = 1; acc < sz; acc *= tw.q()) ++info.t_K;
    return info;
}

// ---------------------------------------------------------------------------
// Bruhat cells

BruhatResult bruhat_cell(const GroupElement& g, Tag tag) {
    const FieldTower& tw = g.tower();
    if (!is_member(g, Subgroup::K, tag)) throw NotInK("bruhat_cell outside K");
    if (is_member(g, Subgroup::Iwahori, tag)) return {false, std::nullopt, std::nullopt};
    GammaElem gam = reduce_mod_K1(g, tag);
    GammaElem w = weyl_reflection(tw, tag);
    GroupElement bk = beta_K(tw, tag);
    for (const auto& u : enumerate_unipotent(tw, tag)) {
        // gamma = b * w * u for some b in the finite Borel
        GammaElem b = gamma_mul(gamma_mul(gam, gamma_inverse(u)), gamma_inverse(w));
        if (!gamma_is_upper(b)) continue;
        GroupElement i1 = gamma_section(b);
        GroupElement i2 = bk.inverse() * i1.inverse() * g;
        if (!is_member(i1, Subgroup::Iwahori, tag) || !is_member(i2, Subgroup::Iwahori, tag))
            throw InternalError("bruhat witnesses outside the Iwahori subgroup");
        return {true, i1, i2};
    }
    throw InternalError("element of K in neither Bruhat cell");
}

// ---------------------------------------------------------------------------
// elementary divisors over F_{q^2}[[w]]

std::array<int, 3> smith_valuations(const GroupElement& g) {
    Mat3 m = g.mat();
    std::array<int, 3> vals{0, 0, 0};
    for (int piv = 0; piv < 3; ++piv) {
        int bi = -1, bj = -1, bv = 0;
        for (int i = piv; i < 3; ++i)
            for (int j = piv; j < 3; ++j) {
                const LaurentScalar& x = m.at(i, j);
                if (x.is_zero()) continue;
                if (bi < 0 || x.valuation() < bv) { bi = i; bj = j; bv = x.valuation(); }
            }
        if (bi < 0) throw PrecisionExhausted("elementary divisor not visible at this precision");
        std::swap_ranges(&m.at(piv, 0), &m.at(piv, 0) + 3, &m.at(bi, 0));
        for (int i = 0; i < 3; ++i) std::swap(m.at(i, piv), m.at(i, bj));
        LaurentScalar pinv = laurent_invert(m.at(piv, piv));
        for (int i = piv + 1; i < 3; ++i) {
            if (m.at(i, piv).is_zero()) continue;
            LaurentScalar f = m.at(i, piv) * pinv;
            for (int j = piv; j < 3; ++j) m.at(i, j) = m.at(i, j) - f * m.at(piv, j);
        }
        for (int j = piv + 1; j < 3; ++j) {
            if (m.at(piv, j).is_zero()) continue;
            LaurentScalar f = m.at(piv, j) * pinv;
            for (int i = piv; i < 3; ++i) m.at(i, j) = m.at(i, j) - f * m.at(i, piv);
        }
        vals[piv] = bv;
    }
    std::sort(vals.begin(), vals.end());
    return vals;
}

int cartan_level(const GroupElement& g, Tag tag, int m_max) {
    if (tag == Tag::K0) {
        auto v = smith_valuations(g);
        if (v[0] + v[2] != 0 || v[1] != 0)
            throw PrecisionExhausted("elementary divisors not of unitary shape");
        return v[2];
    }
    for (int n = 0; n <= m_max; ++n)
        for (int m : {n, -n}) {
            if (in_coset_K_alpha_I1(g, m, tag, m_max)) return n;
            if (n == 0) break;
        }
    throw LevelTooLarge("no double coset found at level <= m_max");
}

// ---------------------------------------------------------------------------
// coset decision g in K a^{-m} I_{1,K}

namespace {

// candidate = g * right with an entry-by-entry K-pattern check, bailing early
bool candidate_in_K(const GroupElement& g, const GroupElement& right, Tag tag,
                    GroupElement* out) {
    const FieldTower& tw = g.tower();
    Mat3 k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            LaurentScalar v = g.at(i, 0) * right.at(0, j) + g.at(i, 1) * right.at(1, j) +
                              g.at(i, 2) * right.at(2, j);
            int bound = tag == Tag::K0 ? 0 : kK1Bounds[i][j];
            if (!v.valuation_at_least(bound)) return false;
            k.at(i, j) = std::move(v);
        }
    if (out) *out = GroupElement::from_matrix(tw, std::move(k));
    return true;
}

} // namespace

CosetDecider::CosetDecider(const FieldTower& tw, int m, Tag tag, int m_max) : tag_(tag) {
    if (std::abs(m) > m_max) throw LevelTooLarge("coset level beyond m_max");
    ParahoricInfo info = parahoric_info(tw, tag);
    GroupElement am = GroupElement::alpha_pow(tw, m);
    std::vector<GroupElement> reps;
    if (m == 0) {
        reps.push_back(GroupElement::identity(tw));
    } else if (m > 0) {
        int kappa = tag == Tag::K0 ? 0 : 1;  // least level with N'_k <= K
        reps = filtration_transversal(tw, Side::Lower, info.m_K, 2 * m + kappa);
    } else {
        int kappa = tag == Tag::K0 ? 0 : -1;  // least level with N_k <= K
        reps = filtration_transversal(tw, Side::Upper, info.n_K, 2 * (-m) + kappa);
    }
    reps_.reserve(reps.size());
    for (auto& u : reps) reps_.emplace_back(u, u.inverse() * am);
}

std::optional<CosetWitness> CosetDecider::witness(const GroupElement& g) const {
    for (auto& [u, right] : reps_) {
        GroupElement k = GroupElement::identity(g.tower());
        if (candidate_in_K(g, right, tag_, &k)) return CosetWitness{u, k};
    }
    return std::nullopt;
}

bool CosetDecider::contains(const GroupElement& g) const {
    for (auto& [u, right] : reps_)
        if (candidate_in_K(g, right, tag_, nullptr)) return true;
    return false;
}

std::optional<CosetWitness> coset_witness(const GroupElement& g, int m, Tag tag, int m_max) {
    return CosetDecider(g.tower(), m, tag, m_max).witness(g);
}

bool in_coset_K_alpha_I1(const GroupElement& g, int m, Tag tag, int m_max) {
    return CosetDecider(g.tower(), m, tag, m_max).contains(g);
}

// ---------------------------------------------------------------------------
// flip identities

namespace {

// x with x*conj(x) = -(y + conj(y)) for y = w^level * [t]; ConstraintViolation
// when no such element exists (odd level with nonzero trace).
LaurentScalar solve_hermitian_x(const FieldTower& tw, int level, ResidueScalar t) {
    ResidueScalar tr = t + conjugate(t);
    if (tr.is_zero()) return LaurentScalar::zero(tw);
    if (level % 2 != 0)
        throw ConstraintViolation("no unipotent with this t at an odd level");
    return LaurentScalar::monomial(norm_solve(-tr), level / 2);
}

bool meaningful_equal(const Mat3& a, const Mat3& b) {
    for (int k = 0; k < 9; ++k) {
        LaurentScalar d = a.e[k] - b.e[k];
        if (d.precision() < 1)
            throw PrecisionExhausted("flip residual below one retained coefficient");
        if (!d.is_zero()) return false;
    }
    return true;
}

} // namespace

std::vector<ResidueScalar> flip_valid_units(const FieldTower& tw, Tag tag, FlipSide side) {
    ParahoricInfo info = parahoric_info(tw, tag);
    int level = side == FlipSide::LowerToUpper ? info.m_K : info.n_K;
    std::vector<ResidueScalar> out;
    for (long i = 1; i < tw.q2(); ++i) {
        ResidueScalar t = tw.from_index(i);
        if (level % 2 != 0 && !(t + conjugate(t)).is_zero()) continue;
        out.push_back(t);
    }
    return out;
}

FlipWitness verify_flip(const FieldTower& tw, int n, ResidueScalar t, Tag tag, FlipSide side) {
    if (n < 1) throw ConstraintViolation("flip level must be >= 1");
    if (t.is_zero()) throw ZeroArgument("flip needs a unit t");
    ParahoricInfo info = parahoric_info(tw, tag);
    GroupElement bK = beta_K(tw, tag);
    ResidueScalar tinv = t.inverse();

    if (side == FlipSide::LowerToUpper) {
        LaurentScalar x0 = solve_hermitian_x(tw, info.m_K, t);
        GroupElement u = GroupElement::n_lower(x0, LaurentScalar::monomial(t, info.m_K));
        Mat3 L = (GroupElement::alpha_pow(tw, -n) * u * GroupElement::alpha_pow(tw, 1) * bK).mat();
        LaurentScalar y1 = LaurentScalar::monomial(tinv, 2 * n - 1 + info.n_K);
        LaurentScalar y2 = LaurentScalar::monomial(tinv, info.m_K);
        GroupElement h = GroupElement::h_diag(LaurentScalar::constant(conjugate(t).inverse()));
        // n(x1,y1)^{-1} L = h a^{-n} n'(x2,y2): rows below kill (1,2) and (1,3)
        LaurentScalar y1c = y1.conj();
        LaurentScalar x1 = (L.at(0, 1) + y1c * L.at(2, 1)) * laurent_invert(L.at(1, 1));
        if (!(L.at(0, 2) - x1 * L.at(1, 2) + y1c * L.at(2, 2)).is_zero())
            throw IdentityFails("flip: inconsistent linear system for the outer entry");
        if (!(x1 * x1.conj() + y1 + y1c).is_zero())
            throw IdentityFails("flip: solved outer entry violates the Hermitian relation");
        GroupElement outer = GroupElement::n_upper(x1, y1);
        Mat3 D = (GroupElement::alpha_pow(tw, n) * h.inverse() * outer.inverse()).mat() * L;
        LaurentScalar x2 = D.at(1, 0);
        GroupElement inner = GroupElement::n_lower(x2, y2);
        if (!meaningful_equal(D, inner.mat()))
            throw IdentityFails("flip: central part is not h(conj(t)^-1) a^-n n'(x2, w^m t^-1)");
        Mat3 rhs = (outer * h * GroupElement::alpha_pow(tw, -n) * inner).mat();
        if (!meaningful_equal(L, rhs)) throw IdentityFails("flip identity residual nonzero");
        return {x0, x1, x2};
    }

    LaurentScalar x0 = solve_hermitian_x(tw, info.n_K, t);
    GroupElement u = GroupElement::n_upper(x0, LaurentScalar::monomial(t, info.n_K));
    Mat3 L = (GroupElement::alpha_pow(tw, n) * u * bK).mat();
    LaurentScalar y1 = LaurentScalar::monomial(tinv, 2 * n - 1 + info.m_K);
    LaurentScalar y2 = LaurentScalar::monomial(tinv, info.n_K);
    GroupElement h = GroupElement::h_diag(LaurentScalar::constant(t));
    // n'(x1,y1)^{-1} L = h a^n n(x2,y2): kill (2,1) and (3,1)
    LaurentScalar y1c = y1.conj();
    LaurentScalar x1 = L.at(1, 0) * laurent_invert(L.at(0, 0));
    if (!(y1c * L.at(0, 0) + x1.conj() * L.at(1, 0) + L.at(2, 0)).is_zero())
        throw IdentityFails("flip: inconsistent linear system for the outer entry");
    if (!(x1 * x1.conj() + y1 + y1c).is_zero())
        throw IdentityFails("flip: solved outer entry violates the Hermitian relation");
    GroupElement outer = GroupElement::n_lower(x1, y1);
    Mat3 D = (GroupElement::alpha_pow(tw, -n) * h.inverse() * outer.inverse()).mat() * L;
    LaurentScalar x2 = D.at(0, 1);
    GroupElement inner = GroupElement::n_upper(x2, y2);
    if (!meaningful_equal(D, inner.mat()))
        throw IdentityFails("flip: central part is not h(t) a^n n(x2, w^{n_K} t^-1)");
    Mat3 rhs = (outer * h * GroupElement::alpha_pow(tw, n) * inner).mat();
    if (!meaningful_equal(L, rhs)) throw IdentityFails("flip identity residual nonzero");
    return {x0, x1, x2};
}

} // namespace u21
