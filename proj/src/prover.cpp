#include "u21/prover.hpp"

#include <sstream>

namespace u21 {

std::string rule_name(Rule r) {
    switch (r) {
        case Rule::HypothesisVanishing: return "hypothesis_vanishing";
        case Rule::ApplyOpRule: return "apply_op";
        case Rule::TSigmaIdeal: return "t_sigma_ideal";
        case Rule::TSigmaCombine: return "t_sigma_combine";
        case Rule::LinearCombine: return "linear_combine";
        case Rule::ReduceModConstraint: return "reduce_mod_constraint";
        case Rule::ExtractConstraint: return "extract_constraint";
        case Rule::UnitContradiction: return "unit_contradiction";
        case Rule::RefuteHypothesis: return "refute_hypothesis";
    }
    throw InternalError("unknown rule");
}

std::optional<Rule> parse_rule(const std::string& s) {
    for (Rule r : {Rule::HypothesisVanishing, Rule::ApplyOpRule, Rule::TSigmaIdeal,
                   Rule::TSigmaCombine, Rule::LinearCombine, Rule::ReduceModConstraint,
                   Rule::ExtractConstraint, Rule::UnitContradiction, Rule::RefuteHypothesis})
        if (rule_name(r) == s) return r;
    return std::nullopt;
}

namespace {

constexpr const char* kAnchorSK = "finite sums of group translates preserve the vanishing set";
constexpr const char* kAnchorTSigma = "the quotient is taken modulo the image of t_sigma";
constexpr const char* kAnchorExtract = "a vanishing multiple of a nonvanishing vector kills its coefficient";
constexpr const char* kAnchorReduce = "evaluate coefficients under the constraints derived so far";
constexpr const char* kAnchorUnit = "a nonzero constant has no root: contradiction";
constexpr const char* kAnchorGenerator = "f_0 generates the induction; its image cannot vanish";
constexpr const char* kAnchorHypSeed = "assume the seed vector vanishes in the quotient";

struct Builder {
    const FieldTower& tw;
    ConstantsPack pack;
    DerivationTrace trace;
    std::set<int> registered{0};  // f_0 always nonvanishing (it generates)
    std::vector<Poly> constraints;
    bool contradiction = false;

    int add(TraceStep s) {
        s.index = static_cast<int>(trace.steps.size());
        trace.steps.push_back(std::move(s));
        return trace.steps.back().index;
    }

    static std::string step_ref(int k) { return "step:" + std::to_string(k); }
    static std::string basis_ref(int n) { return "f:" + std::to_string(n); }

    const ModuleVector& vec_of(int k) const { return *trace.steps[k].out_vec; }

    int hypothesis(ModuleVector v, const std::string& anchor) {
        TraceStep s;
        s.rule = Rule::HypothesisVanishing;
        s.anchor = anchor;
        s.out_vec = std::move(v);
        return add(s);
    }

    int apply(OpName op, int in) {
        TraceStep s;
        s.rule = Rule::ApplyOpRule;
        s.anchor = kAnchorSK;
        s.op = op;
        s.inputs = {step_ref(in)};
        s.out_vec = apply_op(op, vec_of(in), pack);
        return add(s);
    }

    int t_sigma_ideal(int basis_n) {
        TraceStep s;
        s.rule = Rule::TSigmaIdeal;
        s.anchor = kAnchorTSigma;
        s.inputs = {basis_ref(basis_n)};
        s.out_vec = apply_op(OpName::T_sigma, ModuleVector::basis(tw, basis_n), pack);
        return add(s);
    }

    int combine(const std::vector<int>& ins, const std::vector<Poly>& mults) {
        TraceStep s;
        s.rule = Rule::LinearCombine;
        s.anchor = kAnchorTSigma;
        ModuleVector acc(tw);
        for (size_t i = 0; i < ins.size(); ++i) {
            s.inputs.push_back(step_ref(ins[i]));
            acc = acc + vec_of(ins[i]).scaled(mults[i]);
        }
        s.multipliers = mults;
        s.out_vec = acc;
        return add(s);
    }

    // t_sigma of a basis vector folded into one linear move:
    // out = m0 * T_sigma(f_n) + sum m_i * step_i
    int t_sigma_combine(int basis_n, const std::vector<int>& ins, std::vector<Poly> mults,
                        const std::string& anchor) {
        TraceStep s;
        s.rule = Rule::TSigmaCombine;
        s.anchor = anchor;
        s.inputs = {basis_ref(basis_n)};
        ModuleVector acc = apply_op(OpName::T_sigma, ModuleVector::basis(tw, basis_n), pack)
                               .scaled(mults[0]);
        for (size_t i = 0; i < ins.size(); ++i) {
            s.inputs.push_back(step_ref(ins[i]));
            acc = acc + vec_of(ins[i]).scaled(mults[i + 1]);
        }
        s.multipliers = std::move(mults);
        s.out_vec = acc;
        return add(s);
    }

    int reduce_mod(int vec_in, int constraint_in) {
        TraceStep s;
        s.rule = Rule::ReduceModConstraint;
        s.anchor = kAnchorReduce;
        s.inputs = {step_ref(vec_in), step_ref(constraint_in)};
        const Poly& m = *trace.steps[constraint_in].out_poly;
        s.out_vec = vec_of(vec_in).map_coeffs([&](const Poly& p) { return p.reduce_mod(m); });
        return add(s);
    }

    // extraction when the vector is supported on one registered nonvanishing
    // basis index and its coefficient is free of the unevaluated constant;
    // returns the constraint step index, or nullopt when the rule cannot fire
    std::optional<int> try_extract(int vec_in) {
        const ModuleVector& v = vec_of(vec_in);
        if (v.is_zero()) return std::nullopt;
        auto comps = decompose(v);
        if (comps.size() != 1) return std::nullopt;
        auto [n, p] = comps[0];
        if (!registered.count(n)) return std::nullopt;
        if (p.mentions_lambda()) return std::nullopt;
        TraceStep s;
        s.rule = Rule::ExtractConstraint;
        s.anchor = kAnchorExtract;
        s.inputs = {step_ref(vec_in)};
        s.target = n;
        s.out_poly = p.is_constant() ? p : p.monic_in_c();
        int idx = add(s);
        constraints.push_back(*trace.steps[idx].out_poly);
        if (trace.steps[idx].out_poly->is_unit()) {
            TraceStep u;
            u.rule = Rule::UnitContradiction;
            u.anchor = kAnchorUnit;
            u.inputs = {step_ref(idx)};
            u.out_poly = *trace.steps[idx].out_poly;
            add(u);
            contradiction = true;
        }
        return idx;
    }

    void refute(int vec_in, int target_basis) {
        TraceStep s;
        s.rule = Rule::RefuteHypothesis;
        s.anchor = kAnchorGenerator;
        s.inputs = {step_ref(vec_in)};
        s.target = target_basis;
        add(s);
        registered.insert(target_basis);
    }
};

} // namespace

DerivationTrace prove_f1_nonzero(const FieldTower& tw, const WeightDescriptor& w, Tag tag) {
    ConstantsPack pack = make_pack(tw, w, tag);
    if (!pack.degenerate)
        throw NotDegenerate("the nonvanishing argument needs a degenerate weight");
    Builder b{tw, pack, {}, {0}, {}, false};
    int h = b.hypothesis(ModuleVector::basis(tw, 1), "assume the image of f_1 vanishes");
    int fm1 = b.apply(OpName::S_K, h);
    // T_sigma f_0 - f_{-1} - l f_1 = chi(h(t0)) f_0, and every term vanishes
    int gen = b.t_sigma_combine(0, {fm1, h},
                                {Poly::scalar(tw.one()), -Poly::scalar(tw.one()),
                                 -Poly::lambda(tw)},
                                kAnchorTSigma);
    b.refute(gen, 1);
    return b.trace;
}

namespace {

Verdict run_conjecture_script(const FieldTower& tw, const WeightDescriptor& w, Tag tag,
                              std::optional<ResidueScalar> c_value, int depth) {
    ConstantsPack pack = make_pack(tw, w, tag);
    Builder b{tw, pack, {}, {0}, {}, false};

    // the nonvanishing of f_1 feeds the extraction rule; for regular weights
    // it is unavailable and the engine reports honestly
    if (pack.degenerate) {
        DerivationTrace sub = prove_f1_nonzero(tw, w, tag);
        for (TraceStep s : sub.steps) b.add(std::move(s));
        b.registered.insert(1);
    }

    Poly cpoly = c_value ? Poly::scalar(*c_value) : Poly::c(tw);
    ModuleVector seed = ModuleVector::basis(tw, 0) + ModuleVector::basis(tw, 1).scaled(cpoly);
    int z0 = b.hypothesis(seed, kAnchorHypSeed);

    auto finish = [&]() {
        Verdict v;
        v.kind = b.contradiction ? Verdict::Kind::Contradiction : Verdict::Kind::Inconclusive;
        v.trace = std::move(b.trace);
        v.constraints = b.constraints;
        if (v.kind == Verdict::Kind::Inconclusive) v.residual = v.constraints;
        return v;
    };

    // with c specialized to zero the seed is the generator itself
    b.try_extract(z0);
    if (b.contradiction) return finish();

    int phase = 0;
    if (++phase > depth) return finish();
    int z1 = b.apply(OpName::S_K, z0);
    if (++phase > depth) return finish();
    int z2 = b.apply(OpName::S_minus, z1);
    if (++phase > depth) return finish();
    // z2 - c * T_sigma(f_1) is supported on f_1 when T f_1 = c_1 f_1 + f_2
    int z3 = b.combine({z2}, {Poly::scalar(tw.one())});
    {
        TraceStep& s = b.trace.steps[z3];
        ModuleVector acc = b.vec_of(z2) -
            apply_op(OpName::T_sigma, ModuleVector::basis(tw, 1), pack).scaled(cpoly);
        s.rule = Rule::TSigmaCombine;
        s.inputs = {Builder::basis_ref(1), Builder::step_ref(z2)};
        s.multipliers = {-cpoly, Poly::scalar(tw.one())};
        s.out_vec = acc;
    }
    if (!b.vec_of(z3).is_zero()) {
        b.try_extract(z3);
        if (b.contradiction) return finish();
    }
    if (++phase > depth) return finish();
    int z4 = b.apply(OpName::S_minus, z0);
    int z5 = z4;
    for (size_t ci = 0; ci < b.trace.steps.size(); ++ci) {
        const TraceStep& s = b.trace.steps[ci];
        if (s.rule != Rule::ExtractConstraint || !s.out_poly || s.out_poly->is_constant())
            continue;
        z5 = b.reduce_mod(z5, static_cast<int>(ci));
    }
    if (!b.vec_of(z5).is_zero()) {
        b.try_extract(z5);
        if (b.contradiction) return finish();
    }
    return finish();
}

} // namespace

Verdict prove_conjecture(const FieldTower& tw, const WeightDescriptor& w, Tag tag, int depth) {
    return run_conjecture_script(tw, w, tag, std::nullopt, depth);
}

Verdict prove_conjecture_at(const FieldTower& tw, const WeightDescriptor& w, Tag tag,
                            ResidueScalar c_value, int depth) {
    return run_conjecture_script(tw, w, tag, c_value, depth);
}

// ---------------------------------------------------------------------------
// lambda independence and certificate validation

bool check_lambda_independence(const DerivationTrace& trace) {
    for (size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        bool lam = false;
        if (s.out_vec)
            for (auto& [n, p] : s.out_vec->components()) lam = lam || p.mentions_lambda();
        if (s.out_poly) lam = lam || s.out_poly->mentions_lambda();
        if (!lam) continue;
        // a lambda-carrying output must cancel into a later lambda-free output
        std::string ref = "step:" + std::to_string(i);
        bool cancelled = false;
        for (size_t j = i + 1; j < trace.steps.size() && !cancelled; ++j) {
            const TraceStep& t = trace.steps[j];
            bool consumes = false;
            for (const auto& in : t.inputs) consumes = consumes || in == ref;
            if (!consumes) continue;
            bool tlam = false;
            if (t.out_vec)
                for (auto& [n, p] : t.out_vec->components()) tlam = tlam || p.mentions_lambda();
            if (t.out_poly) tlam = tlam || t.out_poly->mentions_lambda();
            cancelled = !tlam;
        }
        if (!cancelled) return false;
    }
    return true;
}

namespace {

struct RefReader {
    const FieldTower& tw;
    const DerivationTrace& trace;

    ModuleVector vec(const std::string& ref, size_t before) const {
        if (ref.rfind("f:", 0) == 0) return ModuleVector::basis(tw, std::stoi(ref.substr(2)));
        if (ref.rfind("step:", 0) == 0) {
            size_t k = std::stoul(ref.substr(5));
            if (k >= before) throw IdentityFails("forward reference in certificate");
            if (!trace.steps[k].out_vec) throw IdentityFails("reference to a non-vector step");
            return *trace.steps[k].out_vec;
        }
        throw IdentityFails("malformed step reference '" + ref + "'");
    }

    Poly poly(const std::string& ref, size_t before) const {
        if (ref.rfind("step:", 0) == 0) {
            size_t k = std::stoul(ref.substr(5));
            if (k >= before) throw IdentityFails("forward reference in certificate");
            if (!trace.steps[k].out_poly) throw IdentityFails("reference to a non-constraint step");
            return *trace.steps[k].out_poly;
        }
        throw IdentityFails("malformed constraint reference '" + ref + "'");
    }
};

void fail(size_t idx, const std::string& what) {
    throw IdentityFails("step " + std::to_string(idx) + ": " + what);
}

} // namespace

void validate_trace(const DerivationTrace& trace, const ConstantsPack& pack) {
    if (trace.steps.empty()) throw IdentityFails("empty certificate");
    const FieldTower* twp = nullptr;
    for (const auto& s : trace.steps)
        if (s.out_vec) { twp = &s.out_vec->tower(); break; }
    if (!twp) throw IdentityFails("certificate carries no vectors");
    const FieldTower& tw = *twp;
    RefReader rd{tw, trace};
    std::set<int> registered{0};

    for (size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        switch (s.rule) {
            case Rule::HypothesisVanishing:
                if (!s.out_vec || s.out_vec->is_zero()) fail(i, "hypothesis without a vector");
                break;
            case Rule::ApplyOpRule: {
                if (!s.op || s.inputs.size() != 1 || !s.out_vec) fail(i, "malformed operator step");
                ModuleVector in = rd.vec(s.inputs[0], i);
                if (!(apply_op(*s.op, in, pack) == *s.out_vec))
                    fail(i, "operator image does not match");
                break;
            }
            case Rule::TSigmaIdeal: {
                if (s.inputs.size() != 1 || !s.out_vec) fail(i, "malformed t_sigma step");
                ModuleVector in = rd.vec(s.inputs[0], i);
                if (!(apply_op(OpName::T_sigma, in, pack) == *s.out_vec))
                    fail(i, "t_sigma image does not match");
                break;
            }
            case Rule::TSigmaCombine: {
                if (s.inputs.empty() || s.multipliers.size() != s.inputs.size() || !s.out_vec)
                    fail(i, "malformed combine step");
                ModuleVector acc =
                    apply_op(OpName::T_sigma, rd.vec(s.inputs[0], i), pack).scaled(s.multipliers[0]);
                for (size_t k = 1; k < s.inputs.size(); ++k)
                    acc = acc + rd.vec(s.inputs[k], i).scaled(s.multipliers[k]);
                if (!(acc == *s.out_vec)) fail(i, "combination does not match");
                break;
            }
            case Rule::LinearCombine: {
                if (s.multipliers.size() != s.inputs.size() || !s.out_vec)
                    fail(i, "malformed combine step");
                ModuleVector acc(tw);
                for (size_t k = 0; k < s.inputs.size(); ++k)
                    acc = acc + rd.vec(s.inputs[k], i).scaled(s.multipliers[k]);
                if (!(acc == *s.out_vec)) fail(i, "combination does not match");
                break;
            }
            case Rule::ReduceModConstraint: {
                if (s.inputs.size() != 2 || !s.out_vec) fail(i, "malformed reduction step");
                ModuleVector in = rd.vec(s.inputs[0], i);
                Poly m = rd.poly(s.inputs[1], i);
                ModuleVector red = in.map_coeffs([&](const Poly& p) { return p.reduce_mod(m); });
                if (!(red == *s.out_vec)) fail(i, "reduction does not match");
                break;
            }
            case Rule::ExtractConstraint: {
                if (s.inputs.size() != 1 || !s.out_poly || !s.target) fail(i, "malformed extraction");
                ModuleVector in = rd.vec(s.inputs[0], i);
                auto comps = decompose(in);
                if (comps.size() != 1 || comps[0].first != *s.target)
                    fail(i, "extraction from a vector not supported on the target alone");
                if (!registered.count(*s.target))
                    fail(i, "extraction at an unregistered basis vector");
                Poly p = comps[0].second;
                if (p.mentions_lambda()) fail(i, "extraction of an l-dependent coefficient");
                Poly expect = p.is_constant() ? p : p.monic_in_c();
                if (!(expect == *s.out_poly)) fail(i, "extracted constraint does not match");
                break;
            }
            case Rule::UnitContradiction: {
                if (s.inputs.size() != 1) fail(i, "malformed contradiction step");
                Poly p = rd.poly(s.inputs[0], i);
                if (!p.is_unit()) fail(i, "claimed unit constraint is not a nonzero constant");
                break;
            }
            case Rule::RefuteHypothesis: {
                if (s.inputs.size() != 1 || !s.target) fail(i, "malformed refutation");
                ModuleVector in = rd.vec(s.inputs[0], i);
                auto comps = decompose(in);
                if (comps.size() != 1 || comps[0].first != 0)
                    fail(i, "refutation requires a multiple of the generator f_0");
                const Poly& p = comps[0].second;
                if (!p.is_unit()) fail(i, "generator coefficient is not a unit");
                registered.insert(*s.target);
                break;
            }
        }
    }
}

std::string trace_to_text(const DerivationTrace& trace) {
    std::ostringstream os;
    for (const auto& s : trace.steps) {
        os << "step=" << s.index << " rule=" << rule_name(s.rule);
        if (s.op) os << " op=" << op_name(*s.op);
        os << " inputs=[";
        for (size_t i = 0; i < s.inputs.size(); ++i) os << (i ? "," : "") << s.inputs[i];
        os << "]";
        if (!s.multipliers.empty()) {
            os << " multipliers=[";
            for (size_t i = 0; i < s.multipliers.size(); ++i)
                os << (i ? "," : "") << s.multipliers[i].str();
            os << "]";
        }
        if (s.target) os << " target=" << *s.target;
        os << " output=";
        if (s.out_vec) os << s.out_vec->str();
        else if (s.out_poly) os << s.out_poly->str();
        else os << "-";
        os << " anchor=\"" << s.anchor << "\"\n";
    }
    return os.str();
}

} // namespace u21
