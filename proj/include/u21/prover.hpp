#pragma once

// Certificate-producing derivations over the knowledge base "elements whose
// image in an irreducible quotient vanishes": the nonvanishing of f_1 for
// degenerate weights, and the elimination of every proportionality constant
// c for the Steinberg weight.  Every step is replayable through apply_op.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "u21/hecke_module.hpp"

namespace u21 {

enum class Rule {
    HypothesisVanishing,  // assume a vector vanishes (opens the derivation)
    ApplyOpRule,          // S_K or S_minus image of a vanishing vector
    TSigmaIdeal,          // T_sigma of any vector vanishes in the quotient
    TSigmaCombine,        // T_sigma of a basis vector combined linearly in one move
    LinearCombine,        // polynomial combination of vanishing vectors
    ReduceModConstraint,  // evaluate coefficients under an extracted constraint
    ExtractConstraint,    // single-support multiple of a registered nonvanishing f_j
    UnitContradiction,    // a nonzero constant constraint
    RefuteHypothesis,     // unit multiple of the generator f_0: hypothesis fails
};

std::string rule_name(Rule r);
std::optional<Rule> parse_rule(const std::string& s);

/// One deduction step.  Inputs reference earlier steps ("step:k") or basis
/// vectors ("f:n"); the output is a module vector or a constraint polynomial.
struct TraceStep {
    int index = 0;
    Rule rule;
    std::string anchor;                 // which closure rule licenses the step
    std::optional<OpName> op;
    std::vector<std::string> inputs;
    std::vector<Poly> multipliers;      // for the combine rules
    std::optional<ModuleVector> out_vec;
    std::optional<Poly> out_poly;
    std::optional<int> target;          // basis index for extract/refute
};

struct DerivationTrace {
    std::vector<TraceStep> steps;
};

struct Verdict {
    enum class Kind { Contradiction, Inconclusive };
    Kind kind;
    DerivationTrace trace;
    std::vector<Poly> constraints;  // in extraction order
    std::vector<Poly> residual;     // unresolved constraints when Inconclusive
};

/// Replay of the nonvanishing argument for f_1: assuming f_1 vanishes forces
/// the generator f_0 to vanish.  Registers f_1 as nonvanishing (final step).
/// NotDegenerate when the weight's big character sum vanishes.
DerivationTrace prove_f1_nonzero(const FieldTower& tw, const WeightDescriptor& w, Tag tag);

/// The contradiction derivation for f_0 + c f_1 with c an indeterminate unit:
/// S_K, then S_minus, then the T_sigma combination extracts a constraint on
/// c; the S_minus image of the seed reduced under it yields a unit.  For the
/// Steinberg weight the constraint sequence is exactly [c+1, 2].  Honest
/// Inconclusive (with residual constraints) when the chain does not close.
Verdict prove_conjecture(const FieldTower& tw, const WeightDescriptor& w, Tag tag,
                         int depth = 6);

/// Same script with c specialized to a scalar before closure; with c = 0 the
/// seed is f_0 alone and the generator argument fires immediately.
Verdict prove_conjecture_at(const FieldTower& tw, const WeightDescriptor& w, Tag tag,
                            ResidueScalar c_value, int depth = 6);

/// True when no terminal step output mentions the indeterminate l: a step
/// output carrying l must be consumed by a later combine whose output is
/// l-free (the cancellation pattern of the nonvanishing argument).
bool check_lambda_independence(const DerivationTrace& trace);

/// Certificate checker: recomputes every step through apply_op and the
/// polynomial arithmetic, tracks the nonvanishing registry, and verifies the
/// claimed outputs.  Throws IdentityFails with a description on mismatch.
void validate_trace(const DerivationTrace& trace, const ConstantsPack& pack);

std::string trace_to_text(const DerivationTrace& trace);

} // namespace u21
