#pragma once

// The formal span of the basis {f_n : n in Z} of the pro-p-Iwahori
// invariants of the compact induction, over polynomial coefficients in the
// indeterminates c (proportionality constant) and l (the unevaluated
// operator constant), with the closed-form actions of S_K, S_-, T, T_sigma
// and a brute-force coset-sum oracle tying them to the explicit models.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "u21/constants.hpp"

namespace u21 {

/// Sparse polynomial over F_{q^2} in c and l, canonical form (terms sorted,
/// no zero coefficients).
class Poly {
public:
    Poly() : tw_(nullptr) {}
    explicit Poly(const FieldTower& tw) : tw_(&tw) {}

    static Poly scalar(ResidueScalar s);
    static Poly integer(const FieldTower& tw, long n);
    static Poly c(const FieldTower& tw);
    static Poly lambda(const FieldTower& tw);

    const FieldTower& tower() const { return *tw_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    ResidueScalar constant_value() const;  // requires is_constant
    bool mentions_lambda() const;
    bool is_unit() const { return is_constant() && !is_zero(); }
    int degree_c() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }

    /// Substitute a scalar for c.
    Poly eval_c(ResidueScalar v) const;

    /// Remainder modulo a monic lambda-free polynomial in c.
    Poly reduce_mod(const Poly& monic_in_c) const;

    /// Monic normalization in c for lambda-free nonconstant polynomials;
    /// constants are returned untouched.
    Poly monic_in_c() const;

    /// gcd of lambda-free univariate polynomials in c, monic (or a constant).
    static Poly gcd_in_c(const Poly& a, const Poly& b);

    /// Exact division; nullopt when o does not divide exactly.
    std::optional<Poly> divide_exact(const Poly& o) const;

    std::string str() const;
    static Poly parse(const FieldTower& tw, const std::string& s);

private:
    // (deg_c, deg_lambda) -> coefficient index
    using Key = std::pair<int, int>;
    const FieldTower* tw_;
    std::map<Key, uint16_t> terms_;
    void add_term(Key k, uint16_t v);
};

/// Finitely supported map n -> Poly, representing sum coeff_n * f_n.
class ModuleVector {
public:
    ModuleVector() : tw_(nullptr) {}
    explicit ModuleVector(const FieldTower& tw) : tw_(&tw) {}

    static ModuleVector basis(const FieldTower& tw, int n);  // f_n

    const FieldTower& tower() const { return *tw_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<int, Poly>& components() const { return comps_; }
    Poly coeff(int n) const;
    void set_coeff(int n, Poly p);

    ModuleVector operator+(const ModuleVector& o) const;
    ModuleVector operator-(const ModuleVector& o) const;
    ModuleVector scaled(const Poly& p) const;
    bool operator==(const ModuleVector& o) const;

    ModuleVector map_coeffs(const std::function<Poly(const Poly&)>& f) const;

    std::string str() const;
    static ModuleVector parse(const FieldTower& tw, const std::string& s);

private:
    const FieldTower* tw_;
    std::map<int, Poly> comps_;
};

/// The scalars the closed-form operator actions use, all derived from one
/// weight and one parahoric.
struct ConstantsPack {
    Tag tag;
    ResidueScalar c_minus;   // big character sum
    ResidueScalar d0;        // S_K f_0 eigenvalue
    ResidueScalar dn;        // S_K f_{-n} eigenvalue, n >= 1 (small sum)
    ResidueScalar chi_t;     // chi_sigma(h(t0))
    ResidueScalar cm;        // T f_m = cm f_m + f_{m+1} for m >= 1
    bool degenerate;
    bool dim_gt_one;
};

ConstantsPack make_pack(const FieldTower& tw, const WeightDescriptor& w, Tag tag);

enum class OpName { S_K, S_minus, T, T_sigma };
std::string op_name(OpName n);
std::optional<OpName> parse_op(const std::string& s);

/// Linear extension of the basis actions
///   S_K  f_n = f_{-n} (n>=1),  S_K  f_{-n} = d_n f_{-n} (n>=1),  S_K f_0 = d_0 f_0
///   S_-  f_n = c_- f_n (n>=1), S_-  f_{-n} = f_{n+1} (n>=0)
///   T    f_m = c_m f_m + f_{m+1} (m>=1),  T f_0 = f_{-1} + l f_1 (degenerate only)
///   T_sigma = T - c_- id
/// UnsupportedTAction where the basis action of T is not defined.
ModuleVector apply_op(OpName name, const ModuleVector& v, const ConstantsPack& pack);

/// The value vectors of (S f_n) at the probe points alpha^{-j}, computed by
/// the defining coset sums over the explicit model (no closed forms).
std::vector<std::pair<int, std::vector<ResidueScalar>>> oracle_apply(
    OpName name, int n, const WeightModel& model, const std::vector<int>& probe_levels,
    int m_max = 2);

/// The value the closed form predicts at alpha^{-j} for a scalar-coefficient
/// vector (coefficients must be constants).
std::vector<ResidueScalar> predicted_value(const ModuleVector& v, const WeightModel& model,
                                           int probe_level);

std::vector<std::pair<int, Poly>> decompose(const ModuleVector& v);

struct PolyRatio {
    Poly num, den;
};

/// Proportionality over the fraction field: v = (num/den) w with matching
/// supports; nullopt when not proportional.
std::optional<PolyRatio> is_proportional(const ModuleVector& v, const ModuleVector& w);

} // namespace u21
