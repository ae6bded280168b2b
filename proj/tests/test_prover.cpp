#include "doctest.h"

#include "u21/prover.hpp"

using namespace u21;

TEST_CASE("nonvanishing of f_1 for degenerate weights") {
    FieldTower tw(3, 1);
    for (Tag tag : {Tag::K0, Tag::K1}) {
        WeightDescriptor st = WeightDescriptor::steinberg();
        DerivationTrace tr = prove_f1_nonzero(tw, st, tag);
        REQUIRE(tr.steps.size() == 4);
        CHECK(tr.steps[0].rule == Rule::HypothesisVanishing);
        CHECK(tr.steps[1].rule == Rule::ApplyOpRule);
        CHECK(tr.steps[2].rule == Rule::TSigmaCombine);
        CHECK(tr.steps[3].rule == Rule::RefuteHypothesis);
        CHECK(tr.steps[3].target == 1);
        // the derived generator multiple is free of the unevaluated constant
        CHECK(check_lambda_independence(tr));
        validate_trace(tr, make_pack(tw, st, tag));
        // a regular weight refuses
        TorusCharacter reg{1, 0};
        REQUIRE(classify_weight(tw, reg, tag) == WeightClass::Regular);
        CHECK_THROWS_AS(prove_f1_nonzero(tw, {reg, false, true}, tag), NotDegenerate);
    }
    // every degenerate character admits the argument (any weight kind)
    for (Tag tag : {Tag::K0, Tag::K1})
        for (const auto& chi : all_characters(tw)) {
            WeightDescriptor w{chi, false, true};
            if (classify_weight(tw, chi, tag) == WeightClass::Degenerate)
                CHECK_NOTHROW(prove_f1_nonzero(tw, w, tag));
            else
                CHECK_THROWS_AS(prove_f1_nonzero(tw, w, tag), NotDegenerate);
        }
}

TEST_CASE("contradiction certificate for the steinberg weight") {
    for (int p : {3, 5}) {
        FieldTower tw(p, 1);
        for (Tag tag : {Tag::K0, Tag::K1}) {
            WeightDescriptor st = WeightDescriptor::steinberg();
            Verdict v = prove_conjecture(tw, st, tag);
            CHECK(v.kind == Verdict::Kind::Contradiction);
            REQUIRE(v.constraints.size() == 2);
            CHECK(v.constraints[0].str() == "c+1");
            CHECK(v.constraints[1].str() == "2");
            CHECK(check_lambda_independence(v.trace));
            validate_trace(v.trace, make_pack(tw, st, tag));
            // determinism
            Verdict v2 = prove_conjecture(tw, st, tag);
            CHECK(trace_to_text(v.trace) == trace_to_text(v2.trace));
        }
    }
}

TEST_CASE("generator probe: seed specialized to f_0") {
    FieldTower tw(3, 1);
    WeightDescriptor st = WeightDescriptor::steinberg();
    Verdict v = prove_conjecture_at(tw, st, Tag::K0, tw.zero());
    CHECK(v.kind == Verdict::Kind::Contradiction);
    REQUIRE(!v.constraints.empty());
    CHECK(v.constraints[0].str() == "1");  // the generator's own coefficient
    validate_trace(v.trace, make_pack(tw, st, Tag::K0));
}

TEST_CASE("the derivation is honest off the steinberg weight") {
    FieldTower tw(3, 1);
    // the trivial character weight is degenerate but the chain leaves c = 1 open
    WeightDescriptor tc = WeightDescriptor::trivial_character();
    Verdict v = prove_conjecture(tw, tc, Tag::K0);
    CHECK(v.kind == Verdict::Kind::Inconclusive);
    REQUIRE(v.residual.size() == 1);
    CHECK(v.residual[0].str() == "c+2");  // c = 1 survives the argument
    validate_trace(v.trace, make_pack(tw, tc, Tag::K0));
    // a regular weight: no nonvanishing registration, nothing extractable
    TorusCharacter reg{1, 0};
    Verdict vr = prove_conjecture(tw, {reg, false, true}, Tag::K0);
    CHECK(vr.kind == Verdict::Kind::Inconclusive);
    CHECK(vr.constraints.empty());
    // a depth too small to finish reports inconclusive, not a fake proof
    Verdict vd = prove_conjecture(tw, WeightDescriptor::steinberg(), Tag::K0, 2);
    CHECK(vd.kind == Verdict::Kind::Inconclusive);
}

TEST_CASE("certificates reject tampering") {
    FieldTower tw(3, 1);
    WeightDescriptor st = WeightDescriptor::steinberg();
    ConstantsPack pack = make_pack(tw, st, Tag::K0);
    Verdict v = prove_conjecture(tw, st, Tag::K0);
    validate_trace(v.trace, pack);
    // flip a sign in a derived vector
    DerivationTrace bad = v.trace;
    for (auto& s : bad.steps)
        if (s.rule == Rule::ApplyOpRule && s.out_vec) {
            s.out_vec = s.out_vec->scaled(Poly::integer(tw, -1));
            break;
        }
    CHECK_THROWS_AS(validate_trace(bad, pack), IdentityFails);
    // forge a constraint at an unregistered index
    DerivationTrace bad2 = v.trace;
    for (auto& s : bad2.steps)
        if (s.rule == Rule::ExtractConstraint) {
            s.target = 2;
            break;
        }
    CHECK_THROWS_AS(validate_trace(bad2, pack), IdentityFails);
}

TEST_CASE("lambda bookkeeping") {
    FieldTower tw(3, 1);
    WeightDescriptor st = WeightDescriptor::steinberg();
    ConstantsPack pack = make_pack(tw, st, Tag::K0);

    // an expansion step carrying l that a later combine cancels is accepted
    DerivationTrace tr;
    TraceStep hyp;
    hyp.index = 0;
    hyp.rule = Rule::HypothesisVanishing;
    hyp.anchor = "assume the image of f_1 vanishes";
    hyp.out_vec = ModuleVector::basis(tw, 1);
    tr.steps.push_back(hyp);
    TraceStep ideal;
    ideal.index = 1;
    ideal.rule = Rule::TSigmaIdeal;
    ideal.anchor = "t_sigma image";
    ideal.inputs = {"f:0"};
    ideal.out_vec = apply_op(OpName::T_sigma, ModuleVector::basis(tw, 0), pack);
    tr.steps.push_back(ideal);
    TraceStep skst;
    skst.index = 2;
    skst.rule = Rule::ApplyOpRule;
    skst.op = OpName::S_K;
    skst.anchor = "s-operator";
    skst.inputs = {"step:0"};
    skst.out_vec = apply_op(OpName::S_K, ModuleVector::basis(tw, 1), pack);
    tr.steps.push_back(skst);
    TraceStep comb;
    comb.index = 3;
    comb.rule = Rule::LinearCombine;
    comb.anchor = "cancellation";
    comb.inputs = {"step:1", "step:2", "step:0"};
    comb.multipliers = {Poly::scalar(tw.one()), -Poly::scalar(tw.one()), -Poly::lambda(tw)};
    comb.out_vec = *ideal.out_vec - *skst.out_vec -
                   ModuleVector::basis(tw, 1).scaled(Poly::lambda(tw));
    tr.steps.push_back(comb);
    validate_trace(tr, pack);
    CHECK(check_lambda_independence(tr));

    // an uncancelled l-carrying fact flunks the check
    DerivationTrace bad = tr;
    bad.steps.resize(2);
    CHECK(!check_lambda_independence(bad));
}
