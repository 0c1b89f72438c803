#pragma once

#include "qca/field.hpp"

namespace qca {

// e^{sign*wT} v as a series in `wvar` (divided T-powers, overflow-aware tail).
inline VecSeries exp_wT_vec(const Algebra &A, const Vec &v, int sign, char wvar) {
    VecSeries r({wvar});
    for (int k = 0; k <= A.V.depth + 1; ++k) {
        Vec tv = A.V.t_divpow(k, v);
        if (tv.c.empty() && !tv.ovf) break;
        if (tv.c.empty() && tv.ovf) {
            r.set_trunc_raw(0, k - 1);
            break;
        }
        if (sign < 0 && (k & 1)) tv = -tv;
        r.add_term({k}, tv);
    }
    return r;
}

// e^{sign*T*var(axis)}-convolution of a multivariate series.
template <int K> Laur<K, Vec> exp_T_conv(const Algebra &A, const Laur<K, Vec> &F, int axis,
                                         int sign) {
    Laur<K, Vec> r(F.vars());
    for (int ax = 0; ax < K; ++ax)
        if (auto t = F.trunc(ax)) r.set_trunc_raw(ax, *t);
    for (const auto &[e, v] : F.terms()) {
        for (int k = 0; k <= A.V.depth + 1; ++k) {
            Vec tv = A.V.t_divpow(k, v);
            if (tv.c.empty() && !tv.ovf) break;
            std::array<int, K> e2 = e;
            e2[static_cast<size_t>(axis)] += k;
            if (tv.c.empty() && tv.ovf) {
                r.set_trunc_raw(axis, e2[static_cast<size_t>(axis)] - 1);
                break;
            }
            if (sign < 0 && (k & 1)) tv = -tv;
            r.add_term(e2, tv);
        }
    }
    return r;
}

// --- topological state-field correspondence axioms --------------------------

inline CheckReport check_field_vacuum(const Algebra &A, const FieldFamily &FF) {
    CheckAccum acc("field.vacuum");
    for (int j = 0; j < A.dim(); ++j) {
        Vec e = A.V.unit(j);
        VecSeries lhs = apply_field(FF.of(A.V.vacuum), e);
        VecSeries expect = VecSeries::monomial({'z'}, {0}, e);
        acc.instance(lhs - expect, A.hord(), "vac-field " + A.V.name(j));

        VecSeries rhs = apply_field(FF.of(j), A.V.vac());
        // constant coefficient is the state itself, no singular part
        DiffView d;
        for (const auto &[ex, v] : rhs.terms()) {
            if (ex[0] < 0) probe_diff(v, A.hord(), d, "singular z^" + std::to_string(ex[0]));
        }
        Vec c0 = rhs.reliable({0}) ? rhs.coeff({0}) : Vec{};
        if (!rhs.reliable({0})) d.uncertain = true;
        probe_diff(c0 - e, A.hord(), d, "z^0");
        acc.instance_view(d, A.V.name(j) + "-on-vac");
    }
    return acc.finish();
}

inline CheckReport check_translation_covariance(const Algebra &A, const FieldFamily &FF) {
    CheckAccum acc("field.translation");
    for (int i = 0; i < A.dim(); ++i) {
        const ModeField &F = FF.of(i);
        ModeField TF = field_of_state(A, FF, A.V.t_apply(A.V.unit(i)));
        for (int n = F.lo + 1; n <= F.hi() + 1; ++n) {
            for (int j = 0; j < A.dim(); ++j) {
                Vec v = A.V.unit(j);
                std::string lbl = A.V.name(i) + " mode " + std::to_string(n) + " on " + A.V.name(j);
                // [T, a_(n)] = -n a_(n-1)
                Vec d1 = A.V.t_apply(F.apply_mode(n, v)) - F.apply_mode(n, A.V.t_apply(v)) +
                         mul(F.apply_mode(n - 1, v), Rat(n));
                acc.instance(d1, A.hord(), "commutator " + lbl);
                // (Ta)_(n) = -n a_(n-1)
                Vec d2 = TF.apply_mode(n, v) + mul(F.apply_mode(n - 1, v), Rat(n));
                acc.instance(d2, A.hord(), "first-slot " + lbl);
            }
        }
    }
    return acc.finish();
}

// a(z)|0> = e^{zT} a
inline CheckReport check_state_vacuum_expansion(const Algebra &A, const FieldFamily &FF) {
    CheckAccum acc("field.state_vacuum_expansion");
    for (int i = 0; i < A.dim(); ++i) {
        VecSeries lhs = apply_field(FF.of(i), A.V.vac());
        VecSeries rhs = exp_wT_vec(A, A.V.unit(i), +1, 'z');
        acc.instance(lhs - rhs, A.hord(), A.V.name(i));
    }
    return acc.finish();
}

// e^{wT} Y(a,z) e^{-wT} v = iota_{z,w} Y(a, z+w) v
inline CheckReport check_conjugation_shift(const Algebra &A, const FieldFamily &FF) {
    CheckAccum acc("field.conjugation_shift");
    int cw = A.V.depth + 2;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            VecSeries inner = exp_wT_vec(A, A.V.unit(j), -1, 'w');
            VecSeries2 mid = compose_fields(A, FF.of(i), inner, 'z');
            VecSeries2 lhs = exp_T_conv(A, mid, 1, +1);
            VecSeries2 rhs = taylor_shift(apply_field(FF.of(i), A.V.unit(j), 'z'), 'w', +1, cw);
            acc.instance(lhs - rhs, A.hord(), A.V.name(i) + "," + A.V.name(j));
        }
    return acc.finish();
}

// Y(z)(e^{wT} a (x) b) = iota_{z,w} Y(a, z+w) b
inline CheckReport check_first_slot_shift(const Algebra &A, const FieldFamily &FF) {
    CheckAccum acc("field.first_slot_shift");
    int cw = A.V.depth + 2;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            VecSeries2 lhs({'z', 'w'});
            for (int k = 0; k <= A.V.depth + 1; ++k) {
                Vec ta = A.V.t_divpow(k, A.V.unit(i));
                if (ta.c.empty() && !ta.ovf) break;
                if (ta.c.empty() && ta.ovf) {
                    lhs.set_trunc_raw(1, k - 1);
                    break;
                }
                ModeField Fk = field_of_state(A, FF, ta);
                VecSeries col = apply_field(Fk, A.V.unit(j), 'z');
                if (auto t = col.trunc(0)) lhs.set_trunc_raw(0, *t);
                for (const auto &[e, v] : col.terms()) lhs.add_term({e[0], k}, v);
            }
            VecSeries2 rhs = taylor_shift(apply_field(FF.of(i), A.V.unit(j), 'z'), 'w', +1, cw);
            acc.instance(lhs - rhs, A.hord(), A.V.name(i) + "," + A.V.name(j));
        }
    return acc.finish();
}

// Round-trip: tables -> fields -> tables.
inline CheckReport check_reconstruction_roundtrip(const Algebra &A, const FieldFamily &FF) {
    CheckAccum acc("field.reconstruction_roundtrip");
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            VecSeries Y = apply_field(FF.of(i), A.V.unit(j));
            Laur<1, VecPoly> lifted({'z'});
            if (auto t = Y.trunc(0)) lifted.set_trunc_raw(0, *t);
            for (const auto &[e, v] : Y.terms()) lifted.add_term(e, VecPoly::constant(A.cap(), v));
            auto ex = exp_param_z('z', P_LAM, A.cap(), A.hord());
            VecPoly lam_back(A.cap());
            for (const auto &[e, v] : (ex * lifted).terms())
                if (e[0] == -1) lam_back = lam_back + v;
            VecPoly dl = lam_back - A.tab.lam[static_cast<size_t>(i)][static_cast<size_t>(j)];
            acc.instance(dl, A.hord(), "lambda " + A.V.name(i) + "," + A.V.name(j));

            Vec dot_back = Y.reliable({-1}) ? Y.coeff({-1}) : Vec{};
            Vec dd = dot_back - A.tab.dot[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (!Y.reliable({-1})) dd.ovf = true;
            acc.instance(dd, A.hord(), "dot " + A.V.name(i) + "," + A.V.name(j));
        }
    return acc.finish();
}

// --- locality / associativity with N-search ---------------------------------

struct NSearchResult {
    bool found = false;
    int N = -1;
    bool uncertain = false;
};

template <typename Obj>
NSearchResult n_search(const Obj &diff0, char zv, char wv, int sign, int nmax, int hmod) {
    NSearchResult res;
    Obj d = diff0;
    auto step = plain_pow(zv, wv, 1, sign, 1);
    for (int N = 0; N <= nmax; ++N) {
        DiffView dv;
        probe_diff(d, hmod, dv, "");
        if (dv.uncertain) {
            res.uncertain = true;
        }
        if (!dv.nonzero && !dv.uncertain) {
            res.found = true;
            res.N = N;
            return res;
        }
        d = step * d;
    }
    return res;
}

// S-locality: (z-w)^N Y(z)(1 (x) Y(w)) S^{12}(z-w)(a(x)b(x)c)
//           = (z-w)^N Y(w)(1 (x) Y(z))(b(x)a(x)c)   mod h^M.
inline CheckReport check_s_locality(const Algebra &A, const FieldFamily &FF, const Braiding &S,
                                    int hmod, bool vacuum_only, int ceiling = -1) {
    CheckAccum acc("field.s_locality");
    if (ceiling < 0) ceiling = 2 * A.V.depth + A.nmax + 6;
    int maxN = -1;
    bool exhausted = false;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            std::vector<int> cs;
            if (vacuum_only)
                cs.push_back(A.V.vacuum);
            else
                for (int k = 0; k < A.dim(); ++k) cs.push_back(k);
            for (int k : cs) {
                Vec a = A.V.unit(i), b = A.V.unit(j), c = A.V.unit(k);
                // L0: braided order, braiding argument z-w
                VecSeries2 L0({'z', 'w'});
                PairSeries P = S.apply(a, b);
                if (auto t = P.trunc(0)) {
                    L0.set_trunc_raw(0, *t - A.V.depth - 2);
                    L0.set_trunc_raw(1, *t - A.V.depth - 2);
                }
                for (const auto &[xe, pv] : P.terms()) {
                    auto expansion = iota_pow('z', 'w', xe[0], -1, ceiling, A.hord());
                    for (const auto &[kl, hs] : pv.c) {
                        ModeField Fq = field_of_state(A, FF, A.V.unit(kl[1]));
                        VecSeries Gq = apply_field(Fq, c, 'w');
                        ModeField Fp = field_of_state(A, FF, A.V.unit(kl[0]));
                        VecSeries2 t2 = compose_fields(A, Fp, Gq, 'z');
                        VecSeries2 piece = (expansion * t2).scaled(hs);
                        if (pv.ovf) {
                            Vec fl;
                            fl.ovf = true;
                            TriVec dummy;
                            (void)dummy;
                            piece = piece + VecSeries2::monomial({'z', 'w'}, {0, 0}, fl);
                        }
                        L0 = L0 + piece;
                    }
                }
                // R0: opposite order, no braiding
                ModeField Fa = field_of_state(A, FF, a);
                VecSeries Ga = apply_field(Fa, c, 'z');
                ModeField Fb = field_of_state(A, FF, b);
                VecSeries2 R0 = transpose(compose_fields(A, Fb, Ga, 'w')); // to (z,w)
                auto res = n_search(L0 - R0, 'z', 'w', -1, A.nmax, hmod);
                std::string lbl = A.V.name(i) + "," + A.V.name(j) + "," + A.V.name(k);
                if (res.found) {
                    acc.holds_instance();
                    maxN = std::max(maxN, res.N);
                } else {
                    acc.inconclusive_instance();
                    exhausted = true;
                }
            }
        }
    CheckReport r = acc.finish();
    r.minimal_N = maxN;
    if (exhausted) r.note = "N search exhausted on some instances";
    return r;
}

// Associativity. Braided form:
//   iota_{z,w}(z+w)^N Y(z+w)(1 (x) Y(w)) = (z+w)^N Y(w)(Y(z) (x) 1)  mod h^M;
// classical form:
//   (z-w)^N Y(-w)(Y(z) (x) 1) = (z-w)^N iota_{z,w} Y(z-w)(1 (x) Y(-w)).
inline CheckReport check_associativity(const Algebra &A, const FieldFamily &FF, int hmod,
                                       bool braided, int ceiling = -1) {
    CheckAccum acc(braided ? "field.braided_associativity" : "field.associativity");
    if (ceiling < 0) ceiling = 2 * A.V.depth + A.nmax + 6;
    int maxN = -1;
    bool exhausted = false;
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j)
            for (int k = 0; k < A.dim(); ++k) {
                Vec a = A.V.unit(i), b = A.V.unit(j), c = A.V.unit(k);
                NSearchResult res;
                if (braided) {
                    VecSeries G = apply_field(field_of_state(A, FF, b), c, 'w');
                    VecSeries2 lhs({'z', 'w'});
                    std::optional<int> tz;
                    for (const auto &[e, v] : G.terms()) {
                        VecSeries col = apply_field(field_of_state(A, FF, a), v, 'z');
                        VecSeries2 sh = taylor_shift(col, 'w', +1, ceiling);
                        for (const auto &[e2, v2] : sh.terms())
                            lhs.add_term({e2[0], e2[1] + e[0]}, v2);
                        if (auto t = sh.trunc(0)) tz = tz ? std::min(*tz, *t) : *t;
                        if (auto t = sh.trunc(1)) lhs.set_trunc_raw(1, *t + e[0]);
                    }
                    if (tz) lhs.set_trunc_raw(0, *tz);
                    if (auto t = G.trunc(0)) lhs.set_trunc_raw(1, *t);
                    VecSeries H = apply_field(field_of_state(A, FF, a), b, 'z');
                    VecSeries2 rhs({'z', 'w'});
                    std::optional<int> tw;
                    for (const auto &[e, u] : H.terms()) {
                        VecSeries col = apply_field(field_of_state(A, FF, u), c, 'w');
                        for (const auto &[e2, v2] : col.terms()) rhs.add_term({e[0], e2[0]}, v2);
                        if (auto t = col.trunc(0)) tw = tw ? std::min(*tw, *t) : *t;
                    }
                    if (tw) rhs.set_trunc_raw(1, *tw);
                    if (auto t = H.trunc(0)) rhs.set_trunc_raw(0, *t);
                    res = n_search(lhs - rhs, 'z', 'w', +1, A.nmax, hmod);
                } else {
                    VecSeries H = apply_field(field_of_state(A, FF, a), b, 'z');
                    VecSeries2 lhs({'z', 'w'});
                    std::optional<int> tw;
                    for (const auto &[e, u] : H.terms()) {
                        VecSeries col = apply_field(field_of_state(A, FF, u), c, 'w').negated_var(0);
                        for (const auto &[e2, v2] : col.terms()) lhs.add_term({e[0], e2[0]}, v2);
                        if (auto t = col.trunc(0)) tw = tw ? std::min(*tw, *t) : *t;
                    }
                    if (tw) lhs.set_trunc_raw(1, *tw);
                    if (auto t = H.trunc(0)) lhs.set_trunc_raw(0, *t);
                    VecSeries G = apply_field(field_of_state(A, FF, b), c, 'w').negated_var(0);
                    VecSeries2 rhs({'z', 'w'});
                    std::optional<int> tz;
                    for (const auto &[e, v] : G.terms()) {
                        VecSeries col = apply_field(field_of_state(A, FF, a), v, 'z');
                        VecSeries2 sh = taylor_shift(col, 'w', -1, ceiling);
                        for (const auto &[e2, v2] : sh.terms())
                            rhs.add_term({e2[0], e2[1] + e[0]}, v2);
                        if (auto t = sh.trunc(0)) tz = tz ? std::min(*tz, *t) : *t;
                        if (auto t = sh.trunc(1)) rhs.set_trunc_raw(1, *t + e[0]);
                    }
                    if (tz) rhs.set_trunc_raw(0, *tz);
                    if (auto t = G.trunc(0)) rhs.set_trunc_raw(1, *t);
                    res = n_search(lhs - rhs, 'z', 'w', -1, A.nmax, hmod);
                }
                if (res.found) {
                    acc.holds_instance();
                    maxN = std::max(maxN, res.N);
                } else {
                    acc.inconclusive_instance();
                    exhausted = true;
                }
            }
    CheckReport r = acc.finish();
    r.minimal_N = maxN;
    if (exhausted) r.note = "N search exhausted on some instances";
    return r;
}

// Y(a_(n)b, z) = Y(a,z)_(n) Y(b,z) for n in [nmin, nmax].
inline CheckReport check_n_product_axiom(const Algebra &A, const FieldFamily &FF, int nmin,
                                         int nmax_n) {
    CheckAccum acc("field.n_product_axiom");
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            const ModeField &Fa = FF.of(i);
            const ModeField &Fb = FF.of(j);
            for (int n = nmin; n <= nmax_n; ++n) {
                Vec u = Fa.apply_mode(n, A.V.unit(j));
                ModeField lhs = field_of_state(A, FF, u);
                ModeField rhs = n_product_fields(A, Fa, Fb, n);
                for (int k = 0; k < A.dim(); ++k) {
                    VecSeries d = apply_field(lhs, A.V.unit(k)) - apply_field(rhs, A.V.unit(k));
                    acc.instance(d, A.hord(), A.V.name(i) + "," + A.V.name(j) + ",n=" +
                                                  std::to_string(n) + "," + A.V.name(k));
                }
            }
        }
    return acc.finish();
}

// Quantum n-product identities: Y(z)(a S_(n) b (x) c) = (Y(z) S_(n) Y(z))(a(x)b(x)c).
inline CheckReport check_quantum_n_product(const Algebra &A, const FieldFamily &FF,
                                           const Braiding &S, int nmin, int nmax_n, int hmod) {
    CheckAccum acc("field.quantum_n_product");
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j)
            for (int n = nmin; n <= nmax_n; ++n) {
                Vec u = s_mode_product(A, FF, S, A.V.unit(i), A.V.unit(j), n);
                ModeField Fu = field_of_state(A, FF, u);
                for (int k = 0; k < A.dim(); ++k) {
                    VecSeries lhs = apply_field(Fu, A.V.unit(k));
                    VecSeries rhs =
                        quantum_n_apply(A, FF, S, A.V.unit(i), A.V.unit(j), n, A.V.unit(k));
                    acc.instance(lhs - rhs, hmod, A.V.name(i) + "," + A.V.name(j) + ",n=" +
                                                      std::to_string(n) + "," + A.V.name(k));
                }
            }
    return acc.finish();
}

// Y(z) S(z) = Y^op(z)
inline CheckReport check_skew_symmetry(const Algebra &A, const FieldFamily &FF, const Braiding &S,
                                       int hmod) {
    CheckAccum acc("field.skew_symmetry");
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j) {
            VecSeries lhs = y_after_s(A, FF, S, A.V.unit(i), A.V.unit(j));
            VecSeries rhs = y_op_apply(A, FF, A.V.unit(i), A.V.unit(j));
            acc.instance(lhs - rhs, hmod, A.V.name(i) + "," + A.V.name(j));
        }
    return acc.finish();
}

// d/dz (Y(a,z) S_n Y(b,z)) = (dY(a,z)) S_n Y(b,z) + Y(a,z) S_n (dY(b,z)),
// valid under the shift conditions; derivative fields are Y(Ta,z) by
// translation covariance.
inline CheckReport check_quantum_leibniz(const Algebra &A, const FieldFamily &FF,
                                         const Braiding &S, int n, int hmod,
                                         bool shift_ok = true) {
    CheckAccum acc("field.quantum_leibniz");
    if (!shift_ok) {
        CheckReport r = acc.finish();
        r.status = Status::Inconclusive;
        r.note = "skipped: braiding fails the shift conditions";
        return r;
    }
    for (int i = 0; i < A.dim(); ++i)
        for (int j = 0; j < A.dim(); ++j)
            for (int k = 0; k < A.dim(); ++k) {
                Vec a = A.V.unit(i), b = A.V.unit(j), c = A.V.unit(k);
                VecSeries q = quantum_n_apply(A, FF, S, a, b, n, c);
                VecSeries lhs = q.derivative(0);
                VecSeries rhs = quantum_n_apply(A, FF, S, A.V.t_apply(a), b, n, c) +
                                quantum_n_apply(A, FF, S, a, A.V.t_apply(b), n, c);
                acc.instance(lhs - rhs, hmod,
                             A.V.name(i) + "," + A.V.name(j) + "," + A.V.name(k));
            }
    return acc.finish();
}

// --- kernel functors for modulo-Ker-Y verdicts -------------------------------

inline PairKernelFn make_pair_kernel(const Algebra &A, const FieldFamily &FF) {
    return [&A, &FF](const PairSeries &delta) {
        VecSeries img({'z'});
        if (auto t = delta.trunc(0)) img.set_trunc_raw(0, *t - A.V.depth - 2);
        for (const auto &[xe, pv] : delta.terms()) {
            for (const auto &[kl, hs] : pv.c) {
                Vec arg;
                arg.add(kl[1], hs);
                arg.ovf = pv.ovf;
                img = img + apply_field(field_of_state(A, FF, A.V.unit(kl[0])), arg, 'z')
                                .shifted(0, xe[0]);
            }
        }
        DiffView d;
        probe_diff(img, A.hord(), d, "kernel image");
        return d;
    };
}

inline TriKernelFn make_tri_kernel(const Algebra &A, const FieldFamily &FF, int ceiling = 8) {
    return [&A, &FF, ceiling](const TriSeries2 &delta) {
        Laur<3, Vec> img({'1', '2', '3'});
        if (delta.trunc(0) || delta.trunc(1)) {
            img.set_trunc_raw(0, -A.V.depth - 2);
            img.set_trunc_raw(1, -A.V.depth - 2);
            img.set_trunc_raw(2, -A.V.depth - 2);
        }
        for (const auto &[e, tv] : delta.terms()) {
            // u^alpha v^beta with u = z1-z2, v = z2-z3
            Laur<3, HSeries> factor({'1', '2', '3'});
            auto ua = iota_pow('1', '2', e[0], -1, ceiling, A.hord());
            auto vb = iota_pow('2', '3', e[1], -1, ceiling, A.hord());
            for (const auto &[eu, cu] : ua.terms())
                for (const auto &[ev, cv] : vb.terms())
                    factor.add_term({eu[0], eu[1] + ev[0], ev[1]}, cu * cv);
            if (auto t = ua.trunc(1)) factor.set_trunc_raw(1, *t);
            if (auto t = vb.trunc(1)) factor.set_trunc_raw(2, *t);
            for (const auto &[ijk, hs] : tv.c) {
                VecSeries F3 = apply_field(field_of_state(A, FF, A.V.unit(ijk[2])), A.V.vac(), '3');
                Laur<2, Vec> F23({'2', '3'});
                if (auto t = F3.trunc(0)) F23.set_trunc_raw(1, *t);
                std::optional<int> t2;
                for (const auto &[e3, v3] : F3.terms()) {
                    VecSeries c2 = apply_field(field_of_state(A, FF, A.V.unit(ijk[1])), v3, '2');
                    if (auto t = c2.trunc(0)) t2 = t2 ? std::min(*t2, *t) : *t;
                    for (const auto &[e2, v2] : c2.terms()) F23.add_term({e2[0], e3[0]}, v2);
                }
                if (t2) F23.set_trunc_raw(0, *t2);
                Laur<3, Vec> F123({'1', '2', '3'});
                if (auto t = F23.trunc(0)) F123.set_trunc_raw(1, *t);
                if (auto t = F23.trunc(1)) F123.set_trunc_raw(2, *t);
                std::optional<int> t1;
                for (const auto &[e23, v23] : F23.terms()) {
                    VecSeries c1 = apply_field(field_of_state(A, FF, A.V.unit(ijk[0])), v23, '1');
                    if (auto t = c1.trunc(0)) t1 = t1 ? std::min(*t1, *t) : *t;
                    for (const auto &[e1, v1] : c1.terms())
                        F123.add_term({e1[0], e23[0], e23[1]}, v1);
                }
                if (t1) F123.set_trunc_raw(0, *t1);
                img = img + (factor * F123).scaled(hs);
                if (tv.ovf) {
                    Vec fl;
                    fl.ovf = true;
                    Laur<3, Vec> fmark({'1', '2', '3'});
                    fmark.add_term({0, 0, 0}, fl);
                    img = img + fmark;
                }
            }
        }
        DiffView d;
        probe_diff(img, A.hord(), d, "kernel image");
        return d;
    };
}

} // namespace qca
