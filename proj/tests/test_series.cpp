#include <catch2/catch_amalgamated.hpp>

#include "qca/laur.hpp"
#include "qca/params.hpp"
#include "qca/series_ops.hpp"

using namespace qca;

namespace {

HSeries hs(int order, long num, long den = 1) { return HSeries(order, rat(num, den)); }

Laur<1, HSeries> zmono(int k, int order = 1, long num = 1, long den = 1) {
    return Laur<1, HSeries>::monomial({'z'}, {k}, hs(order, num, den));
}

// Independent convolution oracle: multiply two bivariate expansions with a
// plain double loop over stored terms, no window logic at all.
std::map<std::array<int, 2>, Rat> conv_oracle(const Laur<2, HSeries> &a,
                                              const Laur<2, HSeries> &b) {
    std::map<std::array<int, 2>, Rat> r;
    for (const auto &[ea, va] : a.terms())
        for (const auto &[eb, vb] : b.terms())
            r[{ea[0] + eb[0], ea[1] + eb[1]}] += va.constant_term() * vb.constant_term();
    return r;
}

} // namespace

TEST_CASE("h-series ring laws hold exactly on the stored window") {
    const int M = 3;
    std::vector<HSeries> pool;
    std::vector<Rat> coeffs = {rat(0), rat(1), rat(-2), rat(1, 2)};
    for (const Rat &a : coeffs)
        for (const Rat &b : coeffs) {
            HSeries s(M, a);
            s.set_coeff(1, b);
            s.set_coeff(2, a - b);
            pool.push_back(s);
        }
    for (const auto &x : pool)
        for (const auto &y : pool) {
            REQUIRE((x + y) - y == x);
            REQUIRE(x * y == y * x);
            for (const auto &z : pool) {
                REQUIRE((x * y) * z == x * (y * z));
                REQUIRE(x * (y + z) == x * y + x * z);
            }
        }
}

TEST_CASE("h-truncation commutes with multiplication") {
    const int M = 4, m = 2;
    HSeries x(M), y(M);
    x.set_coeff(0, rat(3));
    x.set_coeff(1, rat(-1, 2));
    x.set_coeff(2, rat(5));
    x.set_coeff(3, rat(7));
    y.set_coeff(0, rat(-2));
    y.set_coeff(1, rat(4, 3));
    y.set_coeff(3, rat(1));
    REQUIRE((x * y).truncated(m) == x.truncated(m) * y.truncated(m));
}

TEST_CASE("iota expansion of (z+w)^2 is the finite binomial") {
    auto e = iota_pow('z', 'w', 2, +1, 8, 1);
    REQUIRE(e.coeff({2, 0}) == hs(1, 1));
    REQUIRE(e.coeff({1, 1}) == hs(1, 2));
    REQUIRE(e.coeff({0, 2}) == hs(1, 1));
    REQUIRE(e.terms().size() == 3);
    REQUIRE(e.axis_exact(1));
}

TEST_CASE("iota expansion of (z+w)^{-1} alternates signs") {
    auto e = iota_pow('z', 'w', -1, +1, 6, 1);
    for (int l = 0; l <= 6; ++l) {
        Rat expect = (l % 2 == 0) ? rat(1) : rat(-1);
        REQUIRE(e.coeff({-1 - l, l}).constant_term() == expect);
    }
    REQUIRE_FALSE(e.axis_exact(1));
}

TEST_CASE("iota expansion of (z-w)^{-2} matches the self-convolution oracle") {
    auto m1 = iota_pow('z', 'w', -1, -1, 8, 1);
    auto oracle = conv_oracle(m1, m1);
    auto e = iota_pow('z', 'w', -2, -1, 8, 1);
    for (int l = 0; l <= 8; ++l) {
        REQUIRE(e.coeff({-2 - l, l}).constant_term() == Rat(l + 1));
        REQUIRE(oracle[{-2 - l, l}] == Rat(l + 1));
    }
}

TEST_CASE("iota expansions are multiplicative on the shared window") {
    for (int n = -3; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m) {
            auto a = iota_pow('z', 'w', n, +1, 8, 1);
            auto b = iota_pow('z', 'w', m, +1, 8, 1);
            auto prod = a * b;
            auto direct = iota_pow('z', 'w', n + m, +1, 8, 1);
            auto d = prod - direct;
            for (const auto &[e, v] : d.terms()) REQUIRE(v.is_zero());
        }
}

TEST_CASE("taylor shift agrees with iota expansion on monomials") {
    for (int k = -4; k <= 4; ++k) {
        auto shifted = taylor_shift(zmono(k), 'w', +1, 8);
        auto direct = iota_pow('z', 'w', k, +1, 8, 1);
        auto d = shifted - direct;
        for (const auto &[e, v] : d.terms()) REQUIRE(v.is_zero());
    }
}

TEST_CASE("taylor shift of z^2 equals direct differentiation") {
    // oracle: d^j/dz^j z^2 / j! gives {z^2, 2z, 1}
    auto s = taylor_shift(zmono(2), 'w', +1, 8);
    REQUIRE(s.coeff({2, 0}) == hs(1, 1));
    REQUIRE(s.coeff({1, 1}) == hs(1, 2));
    REQUIRE(s.coeff({0, 2}) == hs(1, 1));
    REQUIRE(s.terms().size() == 3);
    REQUIRE(s.axis_exact(0));
    REQUIRE(s.axis_exact(1));
}

TEST_CASE("residue picks the z^{-1} coefficient") {
    REQUIRE(residue1(zmono(-1)).constant_term() == 1);
    REQUIRE(residue1(zmono(3)).is_zero());
}

TEST_CASE("residue of e^{lambda z} z^{-3} is lambda^2/2") {
    auto ex = exp_param_z('z', P_LAM, 4, 1);
    auto f = ex * with_params(zmono(-3), 4);
    ScalarPoly r = residue_checked(f);
    REQUIRE(r.coeff1(P_LAM, 2) == hs(1, 1, 2));
    REQUIRE(r.coeff1(P_LAM, 0).is_zero());
    REQUIRE(r.coeff1(P_LAM, 1).is_zero());
}

TEST_CASE("derivative lowers exponents and kills residues") {
    auto d = zmono(-1).derivative(0);
    REQUIRE(d.coeff({-2}).constant_term() == -1);
    // residue of a derivative vanishes for any object covering exponents -2..0
    for (int a = -2; a <= 0; ++a)
        for (int b = -2; b <= 0; ++b) {
            auto f = zmono(a) + zmono(b, 1, 3) + zmono(0, 1, -2);
            REQUIRE(residue1(f.derivative(0)).is_zero());
        }
}

TEST_CASE("h-truncated product collapses to one") {
    // (1 + h z)(1 - h z) at h-order 2: the h^2 z^2 term truncates away
    Laur<1, HSeries> a({'z'}), b({'z'});
    a.add_term({0}, HSeries::one(2));
    a.add_term({1}, HSeries::h_power(2, 1));
    b.add_term({0}, HSeries::one(2));
    b.add_term({1}, -HSeries::h_power(2, 1));
    auto p = a * b;
    REQUIRE(p.coeff({0}) == HSeries::one(2));
    REQUIRE(p.coeff({1}).is_zero());
    REQUIRE(p.coeff({2}).is_zero());
    REQUIRE((zmono(-1) * zmono(1)).coeff({0}).constant_term() == 1);
}

TEST_CASE("reading outside the reliable window refuses instead of lying") {
    auto e = iota_pow('z', 'w', -1, +1, 4, 1); // truncated at w^4
    REQUIRE_THROWS_AS(e.coeff({-6, 5}), TruncationError);
    // shifting so that the residue row depends on discarded terms
    auto f = e.shifted(1, -6); // w-exponents now start at -6, ceiling -2
    REQUIRE_THROWS_AS(slice(f, 1, -1), TruncationError);
}

TEST_CASE("window narrowing under multiplication is conservative and sound") {
    auto a = iota_pow('z', 'w', -1, +1, 6, 1);  // reliable to w^6
    auto b = iota_pow('z', 'w', -2, +1, 4, 1);  // reliable to w^4
    auto p = a * b;
    REQUIRE(p.trunc(1).has_value());
    REQUIRE(*p.trunc(1) == 4); // unknown w^5-terms of b meet w^0 of a
    auto direct = iota_pow('z', 'w', -3, +1, 4, 1);
    auto d = p - direct;
    for (const auto &[e, v] : d.terms()) REQUIRE(v.is_zero());
}

TEST_CASE("parameter polynomials integrate and differentiate exactly") {
    const int cap = 6;
    ScalarPoly one = ScalarPoly::constant(cap, HSeries::one(1));
    ScalarPoly lam = param_var(cap, P_LAM, 1);
    // integral of 1 dmu from 0 to lambda = lambda
    ScalarPoly i1 = one.antiderivative(P_MU).subst(P_MU, lam);
    REQUIRE(i1.coeff1(P_LAM, 1) == hs(1, 1));
    // integral of mu dmu from 0 to lambda = lambda^2/2
    ScalarPoly mu = param_var(cap, P_MU, 1);
    ScalarPoly i2 = mu.antiderivative(P_MU).subst(P_MU, lam);
    REQUIRE(i2.coeff1(P_LAM, 2) == hs(1, 1, 2));
    // antiderivative then derivative is the identity below the cap
    for (int d = 0; d + 1 <= cap; ++d) {
        ScalarPoly p = ScalarPoly::monomial(cap, P_LAM, d, hs(1, 7, 3));
        REQUIRE((p.antiderivative(P_LAM).derivative(P_LAM) - p).stored_zero());
    }
}

TEST_CASE("degree cap drops are flagged, never silent") {
    ScalarPoly p = ScalarPoly::monomial(2, P_LAM, 2, hs(1, 1));
    ScalarPoly q = p.antiderivative(P_LAM); // degree 3 > cap 2
    REQUIRE(q.clipped());
    REQUIRE(q.stored_zero());
    ScalarPoly r = mul(p, param_var(2, P_MU, 1)); // total degree 3
    REQUIRE(r.clipped());
}
