#pragma once

// Exact arithmetic for the residue fields F_q < F_{q^2} and for the
// equal-characteristic model E = F_{q^2}((w)) of the quadratic unramified
// extension, realized as truncated Laurent series over F_{q^2}.
//
// All values are immutable; operations are pure and deterministic.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "u21/errors.hpp"

namespace u21 {

class ResidueScalar;

/// F_{q^2} = F_p[y]/(m(y)), deg m = 2f, with q = p^f.  Elements are encoded
/// as integers in [0, q^2): the base-p digits are the polynomial coefficients.
/// The modulus is the least monic irreducible polynomial of degree 2f in that
/// encoding, so the table layout is reproducible across runs.  A fixed
/// generator g of the cyclic group F_{q^2}^x drives discrete logs, Frobenius
/// and the canonical trace-zero unit.
class FieldTower {
public:
    FieldTower(int p, int f, int default_precision = 8);

    int p() const { return p_; }
    int f() const { return f_; }
    long q() const { return q_; }
    long q2() const { return q2_; }
    int default_precision() const { return default_precision_; }

    ResidueScalar zero() const;
    ResidueScalar one() const;
    ResidueScalar from_index(long idx) const;
    ResidueScalar from_int(long n) const;          // image of an integer in F_p
    ResidueScalar generator() const;               // g, of order q^2 - 1
    ResidueScalar trace_zero_unit() const;         // canonical t: t != 0, t + t^q = 0
    int trace_zero_exponent() const { return trace_zero_k_; }

    /// Coefficients of the modulus polynomial, constant term first.
    const std::vector<int>& modulus() const { return modulus_; }

    // raw index arithmetic (used by the scalar wrapper and hot loops)
    uint16_t add_idx(uint16_t a, uint16_t b) const;
    uint16_t sub_idx(uint16_t a, uint16_t b) const;
    uint16_t neg_idx(uint16_t a) const;
    uint16_t mul_idx(uint16_t a, uint16_t b) const;
    uint16_t inv_idx(uint16_t a) const;
    uint16_t pow_idx(uint16_t a, long e) const;
    uint16_t frob_idx(uint16_t a) const;           // x -> x^q
    long log_idx(uint16_t a) const;                // discrete log base g, a != 0
    uint16_t exp_idx(long k) const;                // g^k

    std::string to_string(uint16_t a) const;       // "0", "1", ..., or "g^k"

private:
    int p_, f_;
    long q_, q2_;
    int default_precision_;
    std::vector<int> modulus_;
    std::vector<uint16_t> exp_;                    // g^k, k in [0, q2-1)
    std::vector<long> log_;                        // log table, log_[0] = -1
    std::vector<uint16_t> frob_;
    std::vector<uint16_t> mul_table_;              // only when q2 is small
    std::vector<uint16_t> add_table_;
    bool use_tables_ = false;
    uint16_t gen_ = 0;
    int trace_zero_k_ = 0;

    uint16_t mul_slow(uint16_t a, uint16_t b) const;
    uint16_t add_slow(uint16_t a, uint16_t b) const;
};

/// An element of F_{q^2}.  Carries its tower; arithmetic between different
/// towers is a programming error.
class ResidueScalar {
public:
    ResidueScalar() : tw_(nullptr), v_(0) {}
    ResidueScalar(const FieldTower* tw, uint16_t v) : tw_(tw), v_(v) {}

    const FieldTower& tower() const { return *tw_; }
    uint16_t index() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    ResidueScalar operator+(ResidueScalar o) const { return {tw_, tw_->add_idx(v_, o.v_)}; }
    ResidueScalar operator-(ResidueScalar o) const { return {tw_, tw_->sub_idx(v_, o.v_)}; }
    ResidueScalar operator*(ResidueScalar o) const { return {tw_, tw_->mul_idx(v_, o.v_)}; }
    ResidueScalar operator-() const { return {tw_, tw_->neg_idx(v_)}; }
    ResidueScalar inverse() const { return {tw_, tw_->inv_idx(v_)}; }
    ResidueScalar pow(long e) const { return {tw_, tw_->pow_idx(v_, e)}; }

    bool operator==(ResidueScalar o) const { return v_ == o.v_; }
    bool operator!=(ResidueScalar o) const { return v_ != o.v_; }
    bool operator<(ResidueScalar o) const { return v_ < o.v_; }

    std::string str() const { return tw_->to_string(v_); }

private:
    const FieldTower* tw_;
    uint16_t v_;
};

/// Galois conjugation x -> x^q (the nontrivial automorphism of F_{q^2}/F_q).
ResidueScalar conjugate(ResidueScalar x);

struct TraceNorm {
    ResidueScalar trace;  // x + x^q, lands in F_q
    ResidueScalar norm;   // x^{q+1}, lands in F_q
};
TraceNorm trace_and_norm(ResidueScalar x);

bool in_base_field(ResidueScalar x);  // fixed by Frobenius

/// The least power g^k (k >= 1) with trace zero; exists for odd q.
ResidueScalar find_trace_zero_unit(const FieldTower& tower);

/// Deterministic solution x of x * conj(x) = target for target in F_q^x.
ResidueScalar norm_solve(ResidueScalar target);

/// Truncated Laurent series sum a_i w^i over F_{q^2}: coefficients are
/// retained for degrees in [valuation, precision); everything at degree
/// >= precision is unknown.  Freshly constructed values carry the tower's
/// default (absolute) precision; arithmetic contracts precision as
///   add: min(p1, p2),   mul: min(p1 + v2, p2 + v1),   invert: p - 2v.
/// A value that is zero up to its precision has empty coefficients and
/// valuation == precision.
class LaurentScalar {
public:
    LaurentScalar() : tw_(nullptr), val_(0), prec_(0) {}

    static LaurentScalar zero(const FieldTower& tw);
    static LaurentScalar zero_at(const FieldTower& tw, int prec);
    static LaurentScalar constant(ResidueScalar a);
    static LaurentScalar monomial(ResidueScalar a, int deg);
    static LaurentScalar uniformizer_pow(const FieldTower& tw, int deg);
    static LaurentScalar one(const FieldTower& tw);

    const FieldTower& tower() const { return *tw_; }
    bool attached() const { return tw_ != nullptr; }

    /// True when every retained coefficient vanishes (the value is
    /// indistinguishable from zero at this precision).
    bool is_zero() const { return c_.empty(); }
    int precision() const { return prec_; }

    /// Valuation of a visibly nonzero element; PrecisionExhausted if the
    /// element is zero up to precision (its valuation is only bounded below).
    int valuation() const;
    int valuation_lower_bound() const { return c_.empty() ? prec_ : val_; }

    /// Decides v(x) >= k; PrecisionExhausted when the truncation cannot tell.
    bool valuation_at_least(int k) const;

    /// Coefficient at a degree; degrees below the valuation window give 0,
    /// degrees at or beyond the precision throw PrecisionExhausted.
    ResidueScalar coeff(int deg) const;

    LaurentScalar operator+(const LaurentScalar& o) const;
    LaurentScalar operator-(const LaurentScalar& o) const;
    LaurentScalar operator-() const;
    LaurentScalar operator*(const LaurentScalar& o) const;
    LaurentScalar operator*(ResidueScalar s) const;
    bool operator==(const LaurentScalar& o) const { return (*this - o).is_zero(); }
    bool operator!=(const LaurentScalar& o) const { return !(*this == o); }

    LaurentScalar conj() const;            // coefficient-wise Frobenius
    LaurentScalar shifted(int k) const;    // multiply by w^k

    std::string str() const;

    friend LaurentScalar laurent_invert(const LaurentScalar& x);

private:
    LaurentScalar(const FieldTower* tw, int val, int prec, std::vector<uint16_t> c);
    void normalize();

    const FieldTower* tw_;
    int val_;
    int prec_;
    std::vector<uint16_t> c_;  // c_[i] = coefficient of w^(val_ + i); front nonzero unless empty
};

/// Multiplicative inverse: x * laurent_invert(x) = 1 + O(w^{prec - 2 val}).
/// ZeroDivision when all retained coefficients vanish.
LaurentScalar laurent_invert(const LaurentScalar& x);

LaurentScalar conjugate(const LaurentScalar& x);

} // namespace u21
