#include "doctest.h"

#include <random>
#include <set>

#include "u21/residue.hpp"

using namespace u21;

namespace {

// rank of a set of vectors over F_{q^2}, for the invariant-dimension oracle
int rank_over_fq2(const FieldTower& tw, std::vector<std::vector<uint16_t>> rows) {
    int rank = 0;
    size_t cols = rows.empty() ? 0 : rows[0].size();
    for (size_t c = 0; c < cols; ++c) {
        size_t piv = rows.size();
        for (size_t r = rank; r < rows.size(); ++r)
            if (rows[r][c] != 0) { piv = r; break; }
        if (piv == rows.size()) continue;
        std::swap(rows[rank], rows[piv]);
        uint16_t inv = tw.inv_idx(rows[rank][c]);
        for (auto& x : rows[rank]) x = tw.mul_idx(x, inv);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<size_t>(rank) || rows[r][c] == 0) continue;
            uint16_t f = rows[r][c];
            for (size_t k = 0; k < cols; ++k)
                rows[r][k] = tw.sub_idx(rows[r][k], tw.mul_idx(f, rows[rank][k]));
        }
        ++rank;
        if (static_cast<size_t>(rank) == rows.size()) break;
    }
    return rank;
}

// dimension of the subspace fixed by a list of model actions
int fixed_space_dim(const WeightModel& model, const std::vector<GammaElem>& gens) {
    const FieldTower& tw = model.tower();
    int d = model.dim();
    std::vector<std::vector<uint16_t>> rows;
    for (const auto& g : gens)
        for (int j = 0; j < d; ++j) {
            std::vector<ResidueScalar> e(d, tw.zero());
            e[j] = tw.one();
            auto ge = model.act(g, e);
            std::vector<uint16_t> row(d);
            for (int i = 0; i < d; ++i) row[i] = (ge[i] - e[i]).index();
            // row j of (action - id), transposed entry order is immaterial for rank
            rows.push_back(row);
        }
    // kernel dimension of the stacked (action - id) columns
    // build matrix with columns = basis action differences: rank of the map
    // v -> ((g-1)v)_g equals d - dim(fixed)
    std::vector<std::vector<uint16_t>> cols(d, std::vector<uint16_t>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (int j = 0; j < d; ++j) cols[j][r] = rows[r][j];
    return d - rank_over_fq2(tw, cols);
}

} // namespace

TEST_CASE("the twisted group law") {
    FieldTower tw(3, 1);
    auto L3 = enumerate_L(tw, 3);
    auto L1 = enumerate_L(tw, 1);
    CHECK(L3.size() == 27);
    CHECK(L1.size() == 3);
    // nonidentity points never have t = 0
    for (const auto& e : L3)
        if (!e.x.is_zero() || !e.t.is_zero()) CHECK(!e.t.is_zero());
    // identity, inverses, and full associativity
    for (const auto& a : L3) {
        CHECK(L_equal(L_mul(L_identity(tw), a), a));
        CHECK(L_equal(L_mul(a, L_inverse(a)), L_identity(tw)));
        for (const auto& b : L3) {
            CHECK(L_member(L_mul(a, b)));
            for (const auto& c : L3)
                CHECK(L_equal(L_mul(L_mul(a, b), c), L_mul(a, L_mul(b, c))));
        }
    }
    // L_q is central
    for (const auto& z : L1)
        for (const auto& a : L3) CHECK(L_equal(L_mul(z, a), L_mul(a, z)));
    CHECK_THROWS_AS(L_mul({tw.one(), tw.trace_zero_unit()}, L_identity(tw)), ConstraintViolation);
}

TEST_CASE("filtration charts are group isomorphisms") {
    FieldTower tw(3, 1);
    for (Tag tag : {Tag::K0, Tag::K1}) {
        ParahoricInfo info = parahoric_info(tw, tag);
        ResidueScalar tz = tw.trace_zero_unit();
        // the canonical points map to (0, t0) on both sides
        auto nu = GroupElement::n_upper(LaurentScalar::zero(tw),
                                        LaurentScalar::monomial(tz, info.n_K));
        LElem eu = L_identify(nu, Side::Upper, tag);
        CHECK(eu.x.is_zero());
        CHECK(eu.t == tz);
        auto nl = GroupElement::n_lower(LaurentScalar::zero(tw),
                                        LaurentScalar::monomial(tz, info.m_K));
        LElem el = L_identify(nl, Side::Lower, tag);
        CHECK(el.x.is_zero());
        CHECK(el.t == tz);
        for (Side side : {Side::Upper, Side::Lower}) {
            int level = side == Side::Upper ? info.n_K : info.m_K;
            auto reps = transversal(tw, side, level);
            // homomorphism property over all pairs
            for (const auto& u : reps)
                for (const auto& v : reps) {
                    LElem lhs = L_identify(u * v, side, tag);
                    LElem rhs = L_mul(L_identify(u, side, tag), L_identify(v, side, tag));
                    CHECK(L_equal(lhs, rhs));
                }
            // kernel: one level deeper maps to the identity
            for (const auto& u : transversal(tw, side, level + 1))
                CHECK(L_equal(L_identify(u, side, tag), L_identity(tw)));
            // bijective onto the right L-group
            std::set<std::pair<uint16_t, uint16_t>> image;
            for (const auto& u : reps)
                image.insert({L_identify(u, side, tag).x.index(), L_identify(u, side, tag).t.index()});
            int expo = side == Side::Upper ? info.t_K : 4 - info.t_K;
            CHECK(image.size() == enumerate_L(tw, expo == 3 ? 3 : 1).size());
        }
        // an element shallower than the chart level is rejected
        auto shallow = GroupElement::n_upper(LaurentScalar::zero(tw),
                                             LaurentScalar::monomial(tz, info.n_K - 2));
        CHECK_THROWS_AS(L_identify(shallow, Side::Upper, tag), NotInFiltration);
    }
}

TEST_CASE("reduction mod the pro-p radical") {
    FieldTower tw(3, 1);
    std::mt19937 rng(5);
    for (Tag tag : {Tag::K0, Tag::K1}) {
        // kernel: pro-p elements reduce to the identity
        ResidueScalar tz = tw.trace_zero_unit();
        auto deep = GroupElement::n_lower(LaurentScalar::zero(tw), LaurentScalar::monomial(tz, 2));
        CHECK(is_member(deep, Subgroup::ProP, tag));
        CHECK(reduce_mod_K1(deep, tag) == gamma_identity(tw, tag));
        // beta_K reduces to the order-2 Weyl reflection
        GammaElem w = reduce_mod_K1(beta_K(tw, tag), tag);
        CHECK(w == weyl_reflection(tw, tag));
        CHECK(gamma_mul(w, w) == gamma_identity(tw, tag));
        // section is a right inverse of the reduction, and reduction is a
        // homomorphism on section lifts
        auto Gamma = enumerate_Gamma(tw, tag);
        std::uniform_int_distribution<size_t> pick(0, Gamma.size() - 1);
        for (int it = 0; it < 200; ++it) {
            GammaElem a = Gamma[pick(rng)], b = Gamma[pick(rng)];
            CHECK(gamma_is_unitary(a));
            CHECK(reduce_mod_K1(gamma_section(a), tag) == a);
            GroupElement prod = gamma_section(a) * gamma_section(b);
            CHECK(reduce_mod_K1(prod, tag) == gamma_mul(a, b));
            CHECK(gamma_mul(a, gamma_inverse(a)) == gamma_identity(tw, tag));
        }
        CHECK_THROWS_AS(reduce_mod_K1(GroupElement::alpha_pow(tw, 1), tag), NotInK);
    }
}

TEST_CASE("orders of the finite groups") {
    FieldTower tw(3, 1);
    // the full isometry group of the residue Hermitian form:
    // q^3 (q+1) (q^2-1) (q^3+1) = 24192 at q = 3
    auto G0 = enumerate_Gamma(tw, Tag::K0);
    CHECK(G0.size() == 24192);
    std::set<std::array<uint16_t, 9>> uniq;
    for (auto& g : G0) uniq.insert(g.m);
    CHECK(uniq.size() == G0.size());
    // U(1,1) x U(1): q (q+1) (q^2-1) * (q+1) = 384 at q = 3
    auto G1 = enumerate_Gamma(tw, Tag::K1);
    CHECK(G1.size() == 384);
    // unipotent radicals have order q^{t_K}
    CHECK(enumerate_unipotent(tw, Tag::K0).size() == 27);
    CHECK(enumerate_unipotent(tw, Tag::K1).size() == 3);
    // words in K-generators reduce into the enumerated group
    std::set<std::array<uint16_t, 9>> all(uniq);
    GammaElem acc = gamma_identity(tw, Tag::K0);
    for (const auto& g : enumerate_unipotent(tw, Tag::K0)) {
        acc = gamma_mul(gamma_mul(acc, g), weyl_reflection(tw, Tag::K0));
        CHECK(all.count(acc.m));
    }
}

TEST_CASE("iwahori membership agrees with the finite reduction") {
    FieldTower tw(3, 1);
    std::mt19937 rng(7);
    for (Tag tag : {Tag::K0, Tag::K1}) {
        auto Gamma = enumerate_Gamma(tw, tag);
        std::uniform_int_distribution<size_t> pick(0, Gamma.size() - 1);
        for (int it = 0; it < 500; ++it) {
            GammaElem a = Gamma[pick(rng)];
            GroupElement g = gamma_section(a);
            CHECK(is_member(g, Subgroup::Iwahori, tag) == gamma_is_upper(a));
            CHECK(is_member(g, Subgroup::ProPIwahori, tag) == gamma_is_unipotent_upper(a));
        }
    }
}

TEST_CASE("steinberg model: dimensions and invariants") {
    FieldTower tw(3, 1);
    for (Tag tag : {Tag::K0, Tag::K1}) {
        WeightModel st = build_steinberg(tw, tag);
        int tK = parahoric_info(tw, tag).t_K;
        long expect_dim = 1;
        for (int i = 0; i < tK; ++i) expect_dim *= tw.q();
        CHECK(st.dim() == expect_dim);                       // 27 resp. 3
        CHECK(st.coset_count() == static_cast<size_t>(expect_dim + 1));  // 28 resp. 4
        auto v0 = st.v0();
        // v0 is fixed by every unipotent element
        for (const auto& u : enumerate_unipotent(tw, tag)) CHECK(st.act(u, v0) == v0);
        // the action is a group action
        std::mt19937 rng(11);
        auto Gamma = enumerate_Gamma(tw, tag);
        std::uniform_int_distribution<size_t> pick(0, Gamma.size() - 1);
        std::uniform_int_distribution<long> coeff(0, tw.q2() - 1);
        for (int it = 0; it < 50; ++it) {
            GammaElem a = Gamma[pick(rng)], b = Gamma[pick(rng)];
            std::vector<ResidueScalar> v;
            for (int i = 0; i < st.dim(); ++i) v.push_back(tw.from_index(coeff(rng)));
            CHECK(st.act(gamma_identity(tw, tag), v) == v);
            CHECK(st.act(gamma_mul(a, b), v) == st.act(a, st.act(b, v)));
        }
        // the quotient's unipotent invariants are one-dimensional ...
        CHECK(fixed_space_dim(st, enumerate_unipotent(tw, tag)) == 1);
        // ... and the full group fixes nothing (the trivial subrepresentation
        // of the induction is exactly the constants that were divided out)
        std::vector<GammaElem> gens = enumerate_unipotent(tw, tag);
        gens.push_back(weyl_reflection(tw, tag));
        CHECK(fixed_space_dim(st, gens) == 0);
        // the Iwahori character on v0 is trivial: torus sections fix v0
        for (long i = 1; i < tw.q2(); ++i) {
            GroupElement h = GroupElement::h_diag(LaurentScalar::monomial(tw.from_index(i), 0));
            CHECK(st.act(reduce_mod_K1(h, tag), v0) == v0);
        }
        CHECK_THROWS_AS(st.act(gamma_identity(tw, tag), std::vector<ResidueScalar>(2, tw.zero())),
                        ShapeMismatch);
    }
}
