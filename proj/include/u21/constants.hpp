#pragma once

// Torus characters of H_0/H_1, the character sums over the punctured
// L-groups, the degenerate/regular classifier, the structure constants
// c_-, d_n, d_0, and the principal-series Hecke eigenvalue.

#include <optional>
#include <string>

#include "u21/residue.hpp"

namespace u21 {

/// A character of H_0/H_1 = k_E^x x U_1(k_E): exponents a mod q^2-1 and
/// b mod q+1, evaluating diag(x, z, conj(x)^-1) to x^a z^b.
struct TorusCharacter {
    long a = 0;
    long b = 0;

    static TorusCharacter normalized(const FieldTower& tw, long a, long b);
    bool operator==(const TorusCharacter& o) const { return a == o.a && b == o.b; }
    std::string str() const { return std::to_string(a) + "," + std::to_string(b); }
};

/// All (q^2-1)(q+1) characters, in (a, b) lexicographic order.
std::vector<TorusCharacter> all_characters(const FieldTower& tw);

/// chi(h(t)) = t^a (-t^{q-1})^b for a unit t; ZeroArgument at t = 0.
ResidueScalar eval_char(const FieldTower& tw, const TorusCharacter& chi, ResidueScalar t);

/// Evaluation on a general torus point diag(x, z, conj(x)^-1).
ResidueScalar eval_char_torus(const FieldTower& tw, const TorusCharacter& chi,
                              ResidueScalar x, ResidueScalar z);

/// chi^s(h) = chi(beta_K h beta_K): conjugation swaps the outer diagonal,
/// so (a, b) -> (-q a, b).  An involution.
TorusCharacter char_conjugate(const FieldTower& tw, const TorusCharacter& chi, Tag tag);

enum class SumKind {
    Big,    // over L^x_{q^{4-t_K}}; equals c_-
    Small,  // over L^x_{q^{t_K}}; equals d_n for n >= 1
};

/// Exact sum of chi(h(t)) over the nonidentity points of the indicated
/// L-group.  Every nonidentity point has t != 0 (asserted at enumeration).
ResidueScalar char_sum(const FieldTower& tw, const TorusCharacter& chi, Tag tag, SumKind kind);

enum class WeightClass { Degenerate, Regular };

/// Degenerate iff the big sum is nonzero; in that case the sum must equal
/// -chi(h(t_0)) for the canonical trace-zero unit t_0, and a mismatch throws
/// DegenerateValueMismatch.
WeightClass classify_weight(const FieldTower& tw, const TorusCharacter& chi, Tag tag);

/// A weight through the data the module actions depend on.
struct WeightDescriptor {
    TorusCharacter chi_sigma;
    bool steinberg_twist = false;
    bool dim_gt_one = false;

    static WeightDescriptor steinberg();         // trivial chi, twist, dim > 1
    static WeightDescriptor trivial_character(); // trivial chi, dim 1
};

/// d_0: -chi_sigma(h(t_0)) for twists of the Steinberg weight, 0 otherwise.
ResidueScalar d0(const FieldTower& tw, const WeightDescriptor& w);

/// The defining sum of d_0 evaluated inside an explicit model: the
/// transversal sum of u beta_K acting on v0 must be a multiple of v0
/// (NotProportional otherwise); returns the scalar.
ResidueScalar d0_oracle(const WeightModel& model);

/// An unramified character of the Borel through its restriction to H_0 and
/// its value at alpha (nonzero).
struct UnramifiedCharacter {
    TorusCharacter restriction;
    ResidueScalar value_at_alpha;
};

/// The Hecke eigenvalue eps(alpha) + sum_{L^x} chi_sigma(h(t)) on the
/// intertwining space; IncompatibleCharacters unless the restriction of eps
/// equals chi_sigma^s (the space is zero then).
ResidueScalar hecke_eigenvalue(const FieldTower& tw, const UnramifiedCharacter& eps,
                               const TorusCharacter& chi_sigma, Tag tag);

} // namespace u21
