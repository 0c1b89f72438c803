#pragma once

#include "qca/laur.hpp"
#include "qca/params.hpp"

namespace qca {

// e^{param * z} truncated at the parameter degree cap: sum_{n<=cap} param^n z^n / n!.
// Coefficients above z^cap exist but have parameter degree > cap, so the z-axis
// is marked truncated there.
inline Laur<1, ScalarPoly> exp_param_z(char zvar, int param, int cap, int horder) {
    Laur<1, ScalarPoly> r({zvar});
    for (int n = 0; n <= cap; ++n)
        r.add_term({n},
                   ScalarPoly::monomial(cap, param, n, HSeries(horder, rat(1) / factorial(n))));
    r.set_trunc_raw(0, cap);
    return r;
}

// Res_z e^{param z} f(z) F(z): picks coefficients at z^{-n-1} weighted by
// param^n / n!. If F has reliable support at z^{-n-1} for n beyond the cap,
// the result is marked clipped rather than silently wrong.
template <typename C>
auto weighted_residue(const Laur<1, C> &F, int param, int cap) -> ParamPoly<C> {
    ParamPoly<C> r(cap);
    for (const auto &[e, v] : F.terms()) {
        int n = -e[0] - 1;
        if (n < 0) continue;
        if (n > cap) {
            r.mark_clipped();
            continue;
        }
        r.add_term(
            [&] {
                Mono m{};
                m[static_cast<size_t>(param)] = static_cast<uint8_t>(n);
                return m;
            }(),
            mul(v, HSeries(h_order_probe(v), rat(1) / factorial(n))));
    }
    return r;
}

// Plain residue with reliability: the -1 coefficient must lie in the window.
template <typename C> C residue_checked(const Laur<1, C> &F) { return F.coeff({-1}); }

// Lift a scalar Laurent to carry ParamPoly coefficients (degree cap attached).
inline Laur<1, ScalarPoly> with_params(const Laur<1, HSeries> &f, int cap) {
    Laur<1, ScalarPoly> r({f.var(0)});
    if (auto t = f.trunc(0)) r.set_trunc_raw(0, *t);
    for (const auto &[e, v] : f.terms()) r.add_term(e, ScalarPoly::constant(cap, v));
    return r;
}

} // namespace qca
