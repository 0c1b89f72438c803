#pragma once

#include <functional>
#include <vector>

#include "qca/braiding.hpp"
#include "qca/check.hpp"
#include "qca/series_ops.hpp"
#include "qca/tables.hpp"

namespace qca {

using VecSeries = Laur<1, Vec>;
using VecSeries2 = Laur<2, Vec>;

/*
 * Mode family of one field Y(a,z) = sum_n a_(n) z^{-n-1} on the truncated
 * module. Modes above the stored window vanish by grading; modes below `lo`
 * map everything into the overflow bucket unless `overflow_below` is false
 * (which happens when the divided T-powers of the state die out early, e.g.
 * for the vacuum).
 */
struct ModeField {
    int lo = 0;
    std::map<int, Op> modes;
    bool overflow_below = true;
    bool uncertain = false; // built from an overflow-contaminated state
    int dim = 0;
    int horder = 1;

    Vec apply_mode(int n, const Vec &v) const {
        if (n < lo) {
            Vec r;
            r.ovf = overflow_below && (!v.c.empty() || v.ovf);
            r.ovf = r.ovf || uncertain;
            return r;
        }
        auto it = modes.find(n);
        Vec r;
        if (it != modes.end()) r = it->second.apply(v);
        if (uncertain && (!v.c.empty() || v.ovf)) r.ovf = true;
        return r;
    }

    int hi() const { return modes.empty() ? lo - 1 : modes.rbegin()->first; }
};

struct FieldFamily {
    std::vector<ModeField> f;
    const ModeField &of(int i) const { return f[static_cast<size_t>(i)]; }
};

// Y(a,z)v as a windowed Laurent series; coefficients above z^{-lo-1} are
// overflow-only and stay behind the ceiling.
inline VecSeries apply_field(const ModeField &F, const Vec &v, char zvar = 'z') {
    VecSeries r({zvar});
    bool nonzero_arg = !v.c.empty() || v.ovf;
    if (F.overflow_below && nonzero_arg) r.set_trunc_raw(0, -F.lo - 1);
    for (const auto &[n, op] : F.modes) {
        Vec img = op.apply(v);
        if (F.uncertain && nonzero_arg) img.ovf = true;
        if (!is_zero(img)) r.add_term({-n - 1}, img);
    }
    return r;
}

// Linear combination of basis fields for a general state.
inline ModeField field_of_state(const Algebra &A, const FieldFamily &FF, const Vec &u) {
    ModeField r;
    r.dim = A.dim();
    r.horder = A.hord();
    r.lo = 0;
    bool first = true;
    for (const auto &[i, x] : u.c) {
        const ModeField &Fi = FF.of(i);
        if (first || Fi.lo < r.lo) r.lo = Fi.lo;
        first = false;
    }
    r.overflow_below = false;
    for (const auto &[i, x] : u.c) {
        const ModeField &Fi = FF.of(i);
        if (Fi.overflow_below) r.overflow_below = true;
        if (Fi.uncertain) r.uncertain = true;
        for (const auto &[n, op] : Fi.modes) {
            auto it = r.modes.find(n);
            if (it == r.modes.end()) it = r.modes.emplace(n, Op(A.dim())).first;
            it->second = it->second + op.scaled(x);
        }
    }
    if (u.ovf) r.uncertain = true;
    return r;
}

// d/dz of a field: (da)_(n) = -n a_(n-1).
inline ModeField derivative_field(const Algebra &A, const ModeField &F) {
    ModeField r;
    r.dim = F.dim;
    r.horder = F.horder;
    r.lo = F.lo - 1;
    r.overflow_below = F.overflow_below;
    r.uncertain = F.uncertain;
    for (const auto &[n, op] : F.modes) {
        if (n + 1 == 0) continue;
        Op d = op.scaled(Rat(-(n + 1)));
        if (!d.is_zero_map()) r.modes.emplace(n + 1, d);
    }
    (void)A;
    return r;
}

// --- reconstruction ----------------------------------------------------------

// Rebuild all mode matrices from the lambda- and dot-tables:
// non-negative modes from the lambda table, a_(-1) the dot table, deeper
// negative modes via a_(-k-1) b = (T^(k) a) . b. Rejects tables violating the
// unit or vacuum laws.
inline FieldFamily reconstruct_Y(const Algebra &A) {
    const Module &V = A.V;
    // unit laws
    for (int j = 0; j < A.dim(); ++j) {
        Vec e = V.unit(j);
        if (!is_zero(dot_vec(A, V.vac(), e) - e))
            throw ConfigError("reconstruct_Y: unit law violated: vac . " + V.name(j));
        if (!is_zero(lambda_vec(A, V.vac(), e)))
            throw ConfigError("reconstruct_Y: vacuum lambda row not zero at " + V.name(j));
    }
    if (!is_zero(V.t_apply(V.vac()))) throw ConfigError("reconstruct_Y: T(vac) != 0");

    FieldFamily FF;
    FF.f.resize(static_cast<size_t>(A.dim()));
    for (int i = 0; i < A.dim(); ++i) {
        ModeField F;
        F.dim = A.dim();
        F.horder = A.hord();
        Vec a = V.unit(i);
        int deg_a = V.degree(i);
        F.lo = -(V.depth - deg_a) - 2;
        F.overflow_below = true;
        // nilpotence certificate: if T^(k) a is exactly zero the tail vanishes
        for (int k = 0; k <= V.depth + 1; ++k) {
            Vec ta = V.t_divpow(k, a);
            if (ta.c.empty() && !ta.ovf) {
                F.overflow_below = false;
                F.lo = std::max(F.lo, -k - 1);
                break;
            }
        }
        int himode = deg_a + V.depth + 1;
        for (int n = F.lo; n <= himode; ++n) {
            Op op(A.dim());
            bool any = false;
            for (int j = 0; j < A.dim(); ++j) {
                Vec col = mode_vec(A, n, a, V.unit(j));
                if (!is_zero(col)) any = true;
                op.ovf_col[static_cast<size_t>(j)] = col.ovf;
                col.ovf = false;
                op.col[static_cast<size_t>(j)] = col;
            }
            if (any) F.modes.emplace(n, op);
        }
        FF.f[static_cast<size_t>(i)] = F;
    }
    return FF;
}

// Res_z e^{lambda z} f(z) Y(a,z) b computed directly from mode matrices; the
// independent route against the reduction-based lambda_f_vec.
inline VecPoly residue_lambda_f(const Algebra &A, const FieldFamily &FF, const Vec &a,
                                const Vec &b, const FSeries &f, int param = P_LAM) {
    ModeField Fa = field_of_state(A, FF, a);
    VecSeries Yab = apply_field(Fa, b);
    Laur<1, VecPoly> lifted({'z'});
    if (auto t = Yab.trunc(0)) lifted.set_trunc_raw(0, *t);
    for (const auto &[e, v] : Yab.terms())
        lifted.add_term(e, VecPoly::constant(A.cap(), v));
    auto ex = exp_param_z('z', param, A.cap(), A.hord());
    Laur<1, ScalarPoly> weight({'z'});
    // e^{lambda z} f(z)
    {
        auto fz = with_params(f, A.cap());
        weight = ex * fz;
    }
    auto prod = weight * lifted;
    VecPoly r(A.cap());
    for (const auto &[e, v] : prod.terms()) {
        if (e[0] != -1) continue;
        r = r + v;
    }
    if (auto t = prod.trunc(0); t && *t < -1)
        throw TruncationError("residue_lambda_f: residue outside reliable window");
    return r;
}

// --- products of fields -------------------------------------------------------

// Apply the field of each w-coefficient of G in a second variable.
inline VecSeries2 compose_fields(const Algebra &A, const ModeField &Fa, const VecSeries &G,
                                 char xvar) {
    (void)A;
    char wvar = G.vars()[0];
    VecSeries2 r({xvar, wvar});
    if (auto t = G.trunc(0)) r.set_trunc_raw(1, *t);
    std::optional<int> trunc_x;
    if (Fa.overflow_below) trunc_x = -Fa.lo - 1;
    for (const auto &[e, v] : G.terms()) {
        VecSeries col = apply_field(Fa, v, xvar);
        if (auto t = col.trunc(0)) trunc_x = trunc_x ? std::min(*trunc_x, *t) : *t;
        for (const auto &[xe, xv] : col.terms()) r.add_term({xe[0], e[0]}, xv);
    }
    if (trunc_x) r.set_trunc_raw(0, *trunc_x);
    return r;
}

// Classical n-th product of fields, computed from the defining residue.
inline ModeField n_product_fields(const Algebra &A, const ModeField &Fa, const ModeField &Fb,
                                  int n, int ceiling = -1) {
    if (ceiling < 0) ceiling = 2 * A.V.depth + std::abs(n) + 6;
    ModeField r;
    r.dim = A.dim();
    r.horder = A.hord();
    r.uncertain = Fa.uncertain || Fb.uncertain;
    int lo_bound = 0;
    bool lo_set = false;
    std::map<int, Op> cols;
    for (int j = 0; j < A.dim(); ++j) {
        Vec c = A.V.unit(j);
        // term 1: Res_x iota_{x,z}(x-z)^n Y(a,x) Y(b,z) c
        VecSeries G = apply_field(Fb, c, 'z');
        VecSeries2 t1 = compose_fields(A, Fa, G, 'x');
        auto i1 = iota_pow('x', 'z', n, -1, ceiling, A.hord());
        VecSeries term1 = residue(i1 * t1, 0);
        // term 2: Res_x iota_{z,x}(x-z)^n Y(b,z) Y(a,x) c
        VecSeries H = apply_field(Fa, c, 'x');
        VecSeries2 t2 = compose_fields(A, Fb, H, 'z');
        auto i2 = iota_pow('z', 'x', n, -1, ceiling, A.hord());
        if (n % 2 != 0) i2 = -i2;
        // i2 now expands (x-z)^n in |z|>|x|
        VecSeries term2 = residue(i2 * t2, 1);
        VecSeries col = term1 - term2;
        if (auto t = col.trunc(0)) {
            int lim = -*t - 1;
            lo_set = true;
            lo_bound = std::max(lo_bound, lim);
        }
        for (const auto &[e, v] : col.terms()) {
            int m = -e[0] - 1;
            auto it = cols.find(m);
            if (it == cols.end()) it = cols.emplace(m, Op(A.dim())).first;
            it->second.col[static_cast<size_t>(j)] = [&] {
                Vec vv = v;
                vv.ovf = false;
                return vv;
            }();
            it->second.ovf_col[static_cast<size_t>(j)] = v.ovf;
        }
    }
    r.lo = lo_set ? lo_bound : -(A.V.depth + 2);
    r.overflow_below = true;
    for (auto &[m, op] : cols)
        if (m >= r.lo) r.modes.emplace(m, op);
    return r;
}

// iota_{z,x}-expansion of S^{12}(z-x) applied to (b (x) a): pair-series terms
// (z-x)^k expanded in |z| > |x|.
inline std::vector<std::tuple<Laur<2, HSeries>, int, int, HSeries, bool>>
expand_s12_zx(const Algebra &A, const Braiding &S, const Vec &b, const Vec &a, int ceiling) {
    std::vector<std::tuple<Laur<2, HSeries>, int, int, HSeries, bool>> out;
    PairSeries P = S.apply(b, a);
    bool tail = P.trunc(0).has_value();
    for (const auto &[xe, pv] : P.terms()) {
        auto expansion = iota_pow('z', 'x', xe[0], -1, ceiling, A.hord());
        for (const auto &[kl, hs] : pv.c)
            out.emplace_back(expansion, kl[0], kl[1], hs, pv.ovf || tail);
    }
    return out;
}

/*
 * The quantum n-product applied to a (x) b (x) c, as a z-series:
 *   Res_x( iota_{x,z}(x-z)^n Y(a,x) Y(b,z) c
 *        - iota_{z,x}(x-z)^n Y(z)(1 (x) Y(x)) S^{12}(z-x)(b (x) a (x) c) ).
 * With the identity braiding this is the classical n-product.
 */
inline VecSeries quantum_n_apply(const Algebra &A, const FieldFamily &FF, const Braiding &S,
                                 const Vec &a, const Vec &b, int n, const Vec &c,
                                 int ceiling = -1) {
    if (ceiling < 0) ceiling = 2 * A.V.depth + std::abs(n) + 6;
    ModeField Fa = field_of_state(A, FF, a);
    ModeField Fb = field_of_state(A, FF, b);
    VecSeries G = apply_field(Fb, c, 'z');
    VecSeries2 t1 = compose_fields(A, Fa, G, 'x');
    auto i1 = iota_pow('x', 'z', n, -1, ceiling, A.hord());
    VecSeries term1 = residue(i1 * t1, 0);

    VecSeries term2({'z'});
    for (auto &[expansion, p, q, hs, unc] : expand_s12_zx(A, S, b, a, ceiling)) {
        ModeField Fq = field_of_state(A, FF, A.V.unit(q));
        VecSeries Gq = apply_field(Fq, c, 'x');
        ModeField Fp = field_of_state(A, FF, A.V.unit(p));
        VecSeries2 t2 = compose_fields(A, Fp, Gq, 'z');
        // iota_{z,x}(x-z)^n * expansion of (z-x)^k, both in |z|>|x|
        auto i2 = iota_pow('z', 'x', n, -1, ceiling, A.hord());
        if (n % 2 != 0) i2 = -i2;
        auto weight = i2 * expansion;
        VecSeries piece = residue(weight * t2, 1).scaled(hs);
        if (unc) {
            Vec fl;
            fl.ovf = true;
            piece = piece + VecSeries::monomial({'z'}, {0}, fl);
        }
        term2 = term2 + piece;
    }
    return term1 - term2;
}

// a ^S_(n) b = Res_z z^n Y(z) S(z) (a (x) b)
inline Vec s_mode_product(const Algebra &A, const FieldFamily &FF, const Braiding &S, const Vec &a,
                          const Vec &b, int n) {
    PairSeries P = S.apply(a, b);
    Vec r;
    for (const auto &[xe, pv] : P.terms()) {
        // z^{xe} * sum_pairs Y(u,z)v ; pick the z^{-n-1-xe} mode
        for (const auto &[kl, hs] : pv.c) {
            ModeField Fu = field_of_state(A, FF, A.V.unit(kl[0]));
            Vec contrib = Fu.apply_mode(n + xe[0], [&] {
                Vec e;
                e.add(kl[1], hs);
                return e;
            }());
            r = r + contrib;
        }
        if (pv.ovf) r.ovf = true;
    }
    if (P.trunc(0)) {
        // braiding tail could contribute unknown modes
        r.ovf = true;
    }
    return r;
}

// Y(z) S(z) (a (x) b): skew-symmetry left side, braiding variable set to z.
inline VecSeries y_after_s(const Algebra &A, const FieldFamily &FF, const Braiding &S,
                           const Vec &a, const Vec &b) {
    PairSeries P = S.apply(a, b);
    VecSeries r({'z'});
    if (auto t = P.trunc(0)) r.set_trunc_raw(0, *t - A.V.depth - 2);
    for (const auto &[xe, pv] : P.terms()) {
        for (const auto &[kl, hs] : pv.c) {
            ModeField Fu = field_of_state(A, FF, A.V.unit(kl[0]));
            Vec arg;
            arg.add(kl[1], hs);
            arg.ovf = pv.ovf;
            VecSeries piece = apply_field(Fu, arg, 'z').shifted(0, xe[0]);
            r = r + piece;
        }
    }
    return r;
}

// e^{zT}-convolution along the z axis; the T-divided-power tail beyond depth
// becomes a ceiling.
inline VecSeries exp_zT_mul(const Algebra &A, const VecSeries &F) {
    VecSeries r(F.vars());
    if (auto t = F.trunc(0)) r.set_trunc_raw(0, *t);
    for (const auto &[e, v] : F.terms()) {
        for (int k = 0; k <= A.V.depth + 1; ++k) {
            Vec tv = A.V.t_divpow(k, v);
            if (tv.c.empty() && !tv.ovf) break; // exact nilpotence, tail vanishes
            if (tv.c.empty() && tv.ovf) {
                r.set_trunc_raw(0, e[0] + k - 1); // pure overflow tail
                break;
            }
            r.add_term({e[0] + k}, tv);
        }
    }
    return r;
}

// Y^op(a,z) b = e^{zT} Y(b,-z) a.
inline VecSeries y_op_apply(const Algebra &A, const FieldFamily &FF, const Vec &a, const Vec &b) {
    ModeField Fb = field_of_state(A, FF, b);
    VecSeries R = apply_field(Fb, a, 'z').negated_var(0);
    return exp_zT_mul(A, R);
}

inline FieldFamily y_op_family(const Algebra &A, const FieldFamily &FF) {
    FieldFamily out;
    out.f.resize(static_cast<size_t>(A.dim()));
    for (int i = 0; i < A.dim(); ++i) {
        ModeField F;
        F.dim = A.dim();
        F.horder = A.hord();
        F.lo = -(A.V.depth + 2);
        F.overflow_below = true;
        std::map<int, Op> cols;
        int lo_bound = F.lo;
        for (int j = 0; j < A.dim(); ++j) {
            VecSeries col = y_op_apply(A, FF, A.V.unit(i), A.V.unit(j));
            if (auto t = col.trunc(0)) lo_bound = std::max(lo_bound, -*t - 1);
            for (const auto &[e, v] : col.terms()) {
                int m = -e[0] - 1;
                auto it = cols.find(m);
                if (it == cols.end()) it = cols.emplace(m, Op(A.dim())).first;
                Vec vv = v;
                it->second.ovf_col[static_cast<size_t>(j)] = vv.ovf;
                vv.ovf = false;
                it->second.col[static_cast<size_t>(j)] = vv;
            }
        }
        F.lo = lo_bound;
        for (auto &[m, op] : cols)
            if (m >= F.lo) F.modes.emplace(m, op);
        out.f[static_cast<size_t>(i)] = F;
    }
    return out;
}

} // namespace qca
