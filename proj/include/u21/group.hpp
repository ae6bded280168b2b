#pragma once

// The unitary group G = U(2,1)(E/F) as 3x3 matrices over truncated Laurent
// series: named elements, the two maximal compacts K0 and K1 with their
// filtration subgroups, coset transversals, Bruhat and Cartan cell decisions,
// and the matrix flip identities that drive the operator structure constants.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "u21/arith.hpp"

namespace u21 {

enum class Tag { K0, K1 };

/// n_K, m_K, t_K and the choice of beta_K for a maximal compact.
struct ParahoricInfo {
    Tag tag;
    int n_K;   // N cap I_{1,K} = N_{n_K}
    int m_K;   // N' cap I_{1,K} = N'_{m_K}
    int t_K;   // |N_{n_K}/N_{n_K+1}| = q^{t_K}
};

/// 3x3 matrix over LaurentScalar.
struct Mat3 {
    std::array<LaurentScalar, 9> e;

    const LaurentScalar& at(int i, int j) const { return e[3 * i + j]; }
    LaurentScalar& at(int i, int j) { return e[3 * i + j]; }

    Mat3 operator*(const Mat3& o) const;
    Mat3 operator-(const Mat3& o) const;
    bool operator==(const Mat3& o) const;
    Mat3 conj() const;        // entry-wise Galois conjugation
    Mat3 transpose() const;
    Mat3 inverse() const;     // adjugate over the series field
    LaurentScalar det() const;
};

Mat3 identity_mat(const FieldTower& tw);

/// An element of G; construction through the named factories checks the
/// defining relations, products and inverses stay in G.
class GroupElement {
public:
    static GroupElement n_upper(const LaurentScalar& x, const LaurentScalar& y);
    static GroupElement n_lower(const LaurentScalar& x, const LaurentScalar& y);
    static GroupElement h_diag(const LaurentScalar& x);
    static GroupElement alpha_pow(const FieldTower& tw, int n);
    static GroupElement beta(const FieldTower& tw);
    static GroupElement beta_prime(const FieldTower& tw);
    static GroupElement identity(const FieldTower& tw);
    static GroupElement from_matrix(const FieldTower& tw, Mat3 m);  // checks unitarity

    const Mat3& mat() const { return m_; }
    const FieldTower& tower() const { return *tw_; }
    const LaurentScalar& at(int i, int j) const { return m_.at(i, j); }

    GroupElement operator*(const GroupElement& o) const;
    GroupElement inverse() const;
    bool operator==(const GroupElement& o) const { return m_ == o.m_; }

    bool is_unitary() const;

private:
    GroupElement(const FieldTower* tw, Mat3 m) : tw_(tw), m_(std::move(m)) {}
    const FieldTower* tw_;
    Mat3 m_;
};

GroupElement beta_K(const FieldTower& tw, Tag tag);

/// Parahoric data derived by membership enumeration over k in [-2, 4] and
/// checked against n_K + m_K = 1.
ParahoricInfo parahoric_info(const FieldTower& tw, Tag tag);

enum class Subgroup {
    K,            // the maximal compact itself
    ProP,         // K^1, its maximal normal pro-p subgroup
    Iwahori,      // I_K
    ProPIwahori,  // I_{1,K}
    H0,           // H cap I_K
    H1,           // H cap I_{1,K}
};

bool is_member(const GroupElement& g, Subgroup s, Tag tag);

/// Membership in the unipotent filtration N_k (upper) or N'_k (lower).
enum class Side { Upper, Lower };
bool in_filtration(const GroupElement& g, Side side, int k);

/// Complete duplicate-free representatives of N_k/N_{k+1} (upper) or
/// N'_k/N'_{k+1} (lower), in a fixed lexicographic order on the residue
/// chart.  Size q^3 at even k, q at odd k.
std::vector<GroupElement> transversal(const FieldTower& tw, Side side, int k);

/// Representatives of N_to \ N_from (from <= to), deepest level first.
std::vector<GroupElement> filtration_transversal(const FieldTower& tw, Side side,
                                                 int from_level, int to_level);

struct BruhatResult {
    bool big_cell;                     // false: g in I_K; true: g in I_K beta_K I_K
    std::optional<GroupElement> i1, i2;  // big cell witnesses: g = i1 * beta_K * i2
};

/// K = I_K u I_K beta_K I_K, exclusively; NotInK when g fails the K pattern.
BruhatResult bruhat_cell(const GroupElement& g, Tag tag);

/// Elementary-divisor valuations (sorted ascending) of g over F_{q^2}[[w]].
std::array<int, 3> smith_valuations(const GroupElement& g);

/// The unique n >= 0 with g in K a^n K u K a^-n K.  For K0 this is read off
/// the elementary divisors; for K1 it is decided by exhaustive coset search
/// at small level (LevelTooLarge beyond m_max).
int cartan_level(const GroupElement& g, Tag tag, int m_max = 2);

struct CosetWitness {
    GroupElement u;  // element of I_{1,K}
    GroupElement k;  // element of K with g = k * a^{-m} * u
};

/// Decision procedure for g in K a^{-m} I_{1,K} at a fixed level m: brute
/// force over a transversal of (a^m K a^-m cap I_{1,K}) \ I_{1,K}, with the
/// right factors precomputed.  Build once, query many times.
class CosetDecider {
public:
    CosetDecider(const FieldTower& tw, int m, Tag tag, int m_max = 2);
    std::optional<CosetWitness> witness(const GroupElement& g) const;
    bool contains(const GroupElement& g) const;
    size_t transversal_size() const { return reps_.size(); }

private:
    Tag tag_;
    std::vector<std::pair<GroupElement, GroupElement>> reps_;  // (u, u^-1 a^m)
};

/// One-shot wrappers around CosetDecider.
std::optional<CosetWitness> coset_witness(const GroupElement& g, int m, Tag tag, int m_max = 2);
bool in_coset_K_alpha_I1(const GroupElement& g, int m, Tag tag, int m_max = 2);

enum class FlipSide { LowerToUpper, UpperToLower };

struct FlipWitness {
    LaurentScalar x0;  // the * entry of the left-hand unipotent
    LaurentScalar x1;  // solved * entry of the outer unipotent on the right
    LaurentScalar x2;  // solved * entry of the inner unipotent on the right
};

/// Verifies the conjugation-flip matrix identity for level n >= 1 and unit
/// residue t, solving the unspecified entries from the matrix equation:
///   lower-to-upper:  a^-n n'(x0, w^m t) a b_K
///                      = n(x1, w^{2n-1+n_K} t^-1) h(conj(t)^-1) a^-n n'(x2, w^m t^-1)
///   upper-to-lower:  a^n n(x0, w^{n_K} t) b_K
///                      = n'(x1, w^{2n-1+m_K} t^-1) h(t) a^n n(x2, w^{n_K} t^-1)
/// ConstraintViolation when no element with that t exists at the level;
/// IdentityFails when the solved identity does not hold to precision.
FlipWitness verify_flip(const FieldTower& tw, int n, ResidueScalar t, Tag tag, FlipSide side);

/// The unit residues t that occur as t-components at the level a flip side
/// sums over: every unit at even level, the trace-zero units at odd level.
std::vector<ResidueScalar> flip_valid_units(const FieldTower& tw, Tag tag, FlipSide side);

} // namespace u21
