#include "u21/constants.hpp"

namespace u21 {

TorusCharacter TorusCharacter::normalized(const FieldTower& tw, long a, long b) {
    long na = tw.q2() - 1, nb = tw.q() + 1;
    a %= na; if (a < 0) a += na;
    b %= nb; if (b < 0) b += nb;
    return {a, b};
}

std::vector<TorusCharacter> all_characters(const FieldTower& tw) {
    std::vector<TorusCharacter> out;
    for (long a = 0; a < tw.q2() - 1; ++a)
        for (long b = 0; b < tw.q() + 1; ++b) out.push_back({a, b});
    return out;
}

ResidueScalar eval_char_torus(const FieldTower& tw, const TorusCharacter& chi,
                              ResidueScalar x, ResidueScalar z) {
    if (x.is_zero() || z.is_zero()) throw ZeroArgument("character of a singular torus point");
    if (z * conjugate(z) != tw.one()) throw ConstraintViolation("z is not norm-one");
    return x.pow(chi.a) * z.pow(chi.b);
}

ResidueScalar eval_char(const FieldTower& tw, const TorusCharacter& chi, ResidueScalar t) {
    if (t.is_zero()) throw ZeroArgument("character at t = 0");
    // h(t) = diag(t, -conj(t)/t, conj(t)^-1): torus coordinates (t, -t^{q-1})
    return eval_char_torus(tw, chi, t, -t.pow(tw.q() - 1));
}

TorusCharacter char_conjugate(const FieldTower& tw, const TorusCharacter& chi, Tag) {
    // beta_K diag(x, z, conj(x)^-1) beta_K = diag(conj(x)^-1, z, x) for both
    // parahorics, so x^a z^b pulls back to x^{-qa} z^b
    return TorusCharacter::normalized(tw, -tw.q() * chi.a, chi.b);
}

ResidueScalar char_sum(const FieldTower& tw, const TorusCharacter& chi, Tag tag, SumKind kind) {
    ParahoricInfo info = parahoric_info(tw, tag);
    int exponent = kind == SumKind::Big ? 4 - info.t_K : info.t_K;
    ResidueScalar acc = tw.zero();
    for (const LElem& e : enumerate_L(tw, exponent)) {
        if (e.x.is_zero() && e.t.is_zero()) continue;  // L^x drops the identity
        if (e.t.is_zero()) throw InternalError("nonidentity L-point with t = 0");
        acc = acc + eval_char(tw, chi, e.t);
    }
    return acc;
}

WeightClass classify_weight(const FieldTower& tw, const TorusCharacter& chi, Tag tag) {
    ResidueScalar s = char_sum(tw, chi, tag, SumKind::Big);
    if (s.is_zero()) return WeightClass::Regular;
    if (s != -eval_char(tw, chi, tw.trace_zero_unit()))
        throw DegenerateValueMismatch("degenerate sum differs from -chi(h(t0)) for chi = " + chi.str());
    return WeightClass::Degenerate;
}

WeightDescriptor WeightDescriptor::steinberg() { return {{0, 0}, true, true}; }
WeightDescriptor WeightDescriptor::trivial_character() { return {{0, 0}, false, false}; }

ResidueScalar d0(const FieldTower& tw, const WeightDescriptor& w) {
    if (!w.steinberg_twist) return tw.zero();
    return -eval_char(tw, w.chi_sigma, tw.trace_zero_unit());
}

ResidueScalar d0_oracle(const WeightModel& model) {
    const FieldTower& tw = model.tower();
    Tag tag = model.tag();
    ParahoricInfo info = parahoric_info(tw, tag);
    GroupElement bK = beta_K(tw, tag);
    std::vector<ResidueScalar> v0 = model.v0();
    std::vector<ResidueScalar> acc(v0.size(), tw.zero());
    for (const GroupElement& u : transversal(tw, Side::Upper, info.n_K)) {
        GammaElem g = reduce_mod_K1(u * bK, tag);
        std::vector<ResidueScalar> term = model.act(g, v0);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] + term[i];
    }
    // the sum must be a scalar multiple of v0
    std::optional<ResidueScalar> ratio;
    for (size_t i = 0; i < acc.size(); ++i) {
        if (v0[i].is_zero()) {
            if (!acc[i].is_zero()) throw NotProportional("transversal sum escapes the v0 line");
            continue;
        }
        ResidueScalar r = acc[i] * v0[i].inverse();
        if (ratio && *ratio != r) throw NotProportional("transversal sum escapes the v0 line");
        ratio = r;
    }
    if (!ratio) throw NotProportional("v0 vanishes");
    return *ratio;
}

ResidueScalar hecke_eigenvalue(const FieldTower& tw, const UnramifiedCharacter& eps,
                               const TorusCharacter& chi_sigma, Tag tag) {
    if (eps.value_at_alpha.is_zero()) throw ZeroArgument("eps(alpha) must be a unit");
    if (!(eps.restriction == char_conjugate(tw, chi_sigma, tag)))
        throw IncompatibleCharacters("the intertwining space is zero: eps|_{H cap K} != chi^s");
    return eps.value_at_alpha + char_sum(tw, chi_sigma, tag, SumKind::Big);
}

} // namespace u21
