#pragma once

// The finite groups behind the parahorics: Gamma_K = K/K^1 (the unitary group
// of the residue extension for K0, U(1,1) x U(1) for K1), its Borel and
// unipotent radical, the twisted groups L_{q^3} > L_q identified with the
// unipotent filtration quotients, and explicit weight models (Steinberg as
// the Borel induction modulo constants).

#include <array>
#include <vector>

#include "u21/group.hpp"

namespace u21 {

// -- the groups L_{q^3} and L_q ---------------------------------------------

/// A point (x, t) with x*conj(x) + t + conj(t) = 0; the group law is
/// (x, t)(x', t') = (x + x', t + t' - x'*conj(x)).  L_q is the central
/// subgroup with x = 0.
struct LElem {
    ResidueScalar x, t;
};

bool L_member(const LElem& a);
LElem L_identity(const FieldTower& tw);
LElem L_mul(const LElem& a, const LElem& b);           // ConstraintViolation off the variety
LElem L_inverse(const LElem& a);                        // (-x, conj(t))
bool L_equal(const LElem& a, const LElem& b);

/// Complete enumeration in lexicographic (x, t) index order.
/// order_exponent 3 gives L_{q^3} (all solutions), 1 gives L_q (x = 0).
std::vector<LElem> enumerate_L(const FieldTower& tw, int order_exponent);

/// The isomorphism N_{n_K}/N_{n_K+1} = L_{q^{t_K}} (Side::Upper) resp.
/// N'_{m_K}/N'_{m_K+1} = L_{q^{4-t_K}} (Side::Lower) on representatives.
/// On the upper side the raw reduction chart is composed with
/// (a, t) -> (-conj(a), t), which fixes the t-coordinate and turns the
/// anti-homomorphic chart into a homomorphism onto the law above.
LElem L_identify(const GroupElement& u, Side side, Tag tag);

// -- Gamma_K = K/K^1 ---------------------------------------------------------

/// An element of the finite group Gamma_K as a 3x3 matrix over F_{q^2}.
/// For K1 the matrix is the block embedding [[a,0,b],[0,u,0],[c,0,d]] of
/// (A, u) in U(1,1) x U(1); the rescaled reduction of K1 lands there.
struct GammaElem {
    const FieldTower* tw;
    Tag tag;
    std::array<uint16_t, 9> m;

    uint16_t at(int i, int j) const { return m[3 * i + j]; }
    uint16_t& at(int i, int j) { return m[3 * i + j]; }
    bool operator==(const GammaElem& o) const { return m == o.m; }
    bool operator<(const GammaElem& o) const { return m < o.m; }
};

GammaElem gamma_identity(const FieldTower& tw, Tag tag);
GammaElem gamma_mul(const GammaElem& a, const GammaElem& b);
GammaElem gamma_inverse(const GammaElem& a);
bool gamma_is_unitary(const GammaElem& a);
bool gamma_is_upper(const GammaElem& a);             // in the Borel B
bool gamma_is_unipotent_upper(const GammaElem& a);   // in U
GammaElem weyl_reflection(const FieldTower& tw, Tag tag);

/// Reduction K -> Gamma_K with kernel K^1; NotInK outside K.  For K1 the
/// (1,3) and (3,1) entries are rescaled by w^{+1} and w^{-1} first.
GammaElem reduce_mod_K1(const GroupElement& g, Tag tag);

/// A section of the reduction: constant matrices for K0, the block lift
/// [[a,0,w^-1 b],[0,u,0],[w c,0,d]] for K1.  Exact, lands in K.
GroupElement gamma_section(const GammaElem& a);

/// All of U (the unipotent radical of the Borel of Gamma_K), size q^{t_K}.
std::vector<GammaElem> enumerate_unipotent(const FieldTower& tw, Tag tag);

/// Full enumeration of Gamma_K; EnumerationTooLarge for q > 7.
std::vector<GammaElem> enumerate_Gamma(const FieldTower& tw, Tag tag);

// -- weight models -----------------------------------------------------------

/// An explicit model of a weight: a based vector space over F_{q^2} with the
/// Gamma_K-action and a distinguished U-invariant vector v0.
///
/// Steinberg: functions on B\Gamma_K modulo constants.  Cosets are labelled
/// by normalized isotropic bottom rows (the B-coset invariant); a vector
/// holds the function values at the non-base cosets of the representative
/// with value 0 at the base coset; v0 is the image of the indicator of B.
class WeightModel {
public:
    enum class Kind { Steinberg, TrivialCharacter };

    static WeightModel steinberg(const FieldTower& tw, Tag tag);
    static WeightModel trivial_character(const FieldTower& tw, Tag tag);

    Kind kind() const { return kind_; }
    Tag tag() const { return tag_; }
    const FieldTower& tower() const { return *tw_; }
    int dim() const;
    size_t coset_count() const { return labels_.size(); }

    std::vector<ResidueScalar> v0() const;
    std::vector<ResidueScalar> act(const GammaElem& g, const std::vector<ResidueScalar>& v) const;

private:
    WeightModel(const FieldTower* tw, Tag tag, Kind kind) : tw_(tw), tag_(tag), kind_(kind) {}
    int label_index(const std::array<uint16_t, 3>& row) const;

    const FieldTower* tw_;
    Tag tag_;
    Kind kind_;
    std::vector<std::array<uint16_t, 3>> labels_;  // labels_[0] is the base coset
};

/// The Steinberg weight of Gamma_K; dim q^{t_K}.  EnumerationTooLarge when
/// q exceeds the desk-scale cap.
WeightModel build_steinberg(const FieldTower& tw, Tag tag);

} // namespace u21
