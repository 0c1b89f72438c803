#pragma once

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

#include "qca/field_checks.hpp"

namespace qca {

/*
 * Truncated Zamolodchikov-Faddeev module V(H,S): the tensor module on modes
 * g(n) of the generators, cyclic on the vacuum with g(n)1 = 0 for n >= 0,
 * divided by the exchange relation
 *
 *   a(x1) b(x2) w  =  sum_i iota_{x2,x1} f_i(x2-x1) b^i(x2) a^i(x1) w
 *                     + x2^{-1} delta(x1/x2) <a,b> w,
 *
 * where S_H(b (x) a) = sum_i b^i (x) a^i (x) f_i(x). Rewriting is oriented:
 * a descending adjacent letter pair is replaced by the right side; each step
 * either raises the h-degree, shortens the word, or removes an inversion.
 */

struct Letter {
    int gen;
    int mode;
    auto operator<=>(const Letter &) const = default;
};
using Word = std::vector<Letter>;

struct ZFSTerm {
    FSeries f; // polynomial in x, coefficients in K[h]/h^M
    int out1;  // generator landing at the x2 position
    int out2;  // generator landing at the x1 position
};

struct ZFSpec {
    std::string name = "zf";
    std::vector<std::string> gens;
    std::vector<std::vector<HSeries>> form;           // <g_p, g_q>
    std::vector<std::vector<std::vector<ZFSTerm>>> sh; // S_H(g_p (x) g_q) terms
    int depth = 3;
    int h_order = 2;
    int lambda_cap = 6;
    int nmax = 8;

    int ngens() const { return static_cast<int>(gens.size()); }

    void validate() const {
        int G = ngens();
        if (G == 0) throw ConfigError("zf: no generators");
        if (static_cast<int>(form.size()) != G) throw ConfigError("zf: form size mismatch");
        if (static_cast<int>(sh.size()) != G) throw ConfigError("zf: braiding size mismatch");
        for (int p = 0; p < G; ++p)
            for (int q = 0; q < G; ++q) {
                for (const auto &t : sh[static_cast<size_t>(p)][static_cast<size_t>(q)]) {
                    if (t.f.lo_bound(0) < 0)
                        throw ConfigError("zf: braiding series must have no negative powers");
                    if (t.f.trunc(0))
                        throw ConfigError("zf: braiding series must be polynomial (exact)");
                }
                // h^0 slice of S_H must be the identity
                std::map<std::pair<std::pair<int, int>, int>, Rat> slice;
                for (const auto &t : sh[static_cast<size_t>(p)][static_cast<size_t>(q)])
                    for (const auto &[e, c] : t.f.terms())
                        slice[{{t.out1, t.out2}, e[0]}] += c.coeff(0);
                for (const auto &[k, v] : slice) {
                    Rat expect =
                        (k.first.first == p && k.first.second == q && k.second == 0) ? Rat(1) : Rat(0);
                    if (v != expect)
                        throw ConfigError("zf: S_H is not 1 + O(h) at generator pair (" +
                                          gens[static_cast<size_t>(p)] + "," +
                                          gens[static_cast<size_t>(q)] + ")");
                }
            }
    }
};

inline ZFSpec zf_scalar_spec(std::vector<std::string> gens,
                             std::vector<std::vector<Rat>> form_entries, const FSeries &gfun,
                             int depth, int h_order, int lambda_cap = 6) {
    ZFSpec s;
    s.gens = std::move(gens);
    int G = s.ngens();
    s.form.assign(static_cast<size_t>(G), std::vector<HSeries>(static_cast<size_t>(G)));
    s.sh.assign(static_cast<size_t>(G),
                std::vector<std::vector<ZFSTerm>>(static_cast<size_t>(G)));
    for (int p = 0; p < G; ++p)
        for (int q = 0; q < G; ++q) {
            s.form[static_cast<size_t>(p)][static_cast<size_t>(q)] =
                HSeries(h_order, form_entries[static_cast<size_t>(p)][static_cast<size_t>(q)]);
            s.sh[static_cast<size_t>(p)][static_cast<size_t>(q)].push_back(ZFSTerm{gfun, p, q});
        }
    s.depth = depth;
    s.h_order = h_order;
    s.lambda_cap = lambda_cap;
    return s;
}

struct LinComb {
    std::map<Word, HSeries> t;
    bool ovf = false;
    void add(const Word &w, const HSeries &c) {
        if (c.is_zero()) return;
        auto [it, fresh] = t.emplace(w, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) t.erase(it);
        }
    }
};

class ZFModel {
  public:
    ZFSpec spec;
    std::vector<Word> words;
    std::map<Word, int> index;
    long rewrite_budget = 10'000'000;

    static std::array<int, 3> letter_key(const Letter &L) {
        int cls = L.mode >= 0 ? 1 : 0;
        return {cls, cls == 0 ? -L.mode : L.mode, L.gen};
    }
    static int degree(const Word &w) {
        int d = 0;
        for (const auto &L : w) d -= L.mode;
        return d;
    }
    static int first_redex(const Word &w) {
        for (int p = 0; p + 1 < static_cast<int>(w.size()); ++p)
            if (letter_key(w[static_cast<size_t>(p)]) > letter_key(w[static_cast<size_t>(p + 1)]))
                return p;
        return -1;
    }

    std::string word_str(const Word &w) const {
        if (w.empty()) return "1";
        std::string s;
        for (const auto &L : w)
            s += spec.gens[static_cast<size_t>(L.gen)] + "(" + std::to_string(L.mode) + ")";
        return s + "1";
    }

    // One oriented rewrite of the descending pair at `pos`.
    std::vector<std::pair<Word, HSeries>> rewrite_at(const Word &w, const HSeries &c,
                                                     int pos) const {
        std::vector<std::pair<Word, HSeries>> out;
        Letter P = w[static_cast<size_t>(pos)], Q = w[static_cast<size_t>(pos + 1)];
        if (P.mode + Q.mode == -1) {
            const HSeries &pq =
                spec.form[static_cast<size_t>(P.gen)][static_cast<size_t>(Q.gen)];
            if (!pq.is_zero()) {
                Word w2 = w;
                w2.erase(w2.begin() + pos, w2.begin() + pos + 2);
                out.emplace_back(std::move(w2), c * pq);
            }
        }
        for (const auto &term : spec.sh[static_cast<size_t>(Q.gen)][static_cast<size_t>(P.gen)]) {
            for (const auto &[ed, cd] : term.f.terms()) {
                int d = ed[0];
                for (int l = 0; l <= d; ++l) {
                    Rat bc = binomial(d, l);
                    if (l & 1) bc = -bc;
                    HSeries coef = c * cd * bc;
                    if (coef.is_zero()) continue;
                    Word w2 = w;
                    w2[static_cast<size_t>(pos)] = Letter{term.out1, Q.mode + d - l};
                    w2[static_cast<size_t>(pos + 1)] = Letter{term.out2, P.mode + l};
                    out.emplace_back(std::move(w2), coef);
                }
            }
        }
        return out;
    }

    LinComb normal_form(const Word &w0, const HSeries &c0) const {
        LinComb out;
        std::vector<std::pair<Word, HSeries>> stack;
        stack.emplace_back(w0, c0);
        long budget = rewrite_budget;
        while (!stack.empty()) {
            auto [w, c] = std::move(stack.back());
            stack.pop_back();
            if (c.is_zero()) continue;
            if (!w.empty() && w.back().mode >= 0) continue; // annihilates the vacuum
            int pos = first_redex(w);
            if (pos < 0) {
                if (degree(w) > spec.depth)
                    out.ovf = true;
                else
                    out.add(w, c);
                continue;
            }
            if (--budget < 0)
                throw ConstructionError("zf: rewriting budget exhausted at " + word_str(w));
            for (auto &child : rewrite_at(w, c, pos)) stack.push_back(std::move(child));
        }
        return out;
    }

    // Local-confluence probe: rewrite once at every redex, then normalize
    // deterministically; all branches must agree exactly.
    bool confluent_at(const Word &w, std::string *why = nullptr) const {
        std::vector<int> redexes;
        for (int p = 0; p + 1 < static_cast<int>(w.size()); ++p)
            if (letter_key(w[static_cast<size_t>(p)]) > letter_key(w[static_cast<size_t>(p + 1)]))
                redexes.push_back(p);
        if (redexes.size() < 2) return true;
        std::vector<LinComb> results;
        for (int p : redexes) {
            LinComb total;
            for (const auto &[w2, c2] : rewrite_at(w, HSeries::one(spec.h_order), p)) {
                LinComb nf = normal_form(w2, c2);
                total.ovf = total.ovf || nf.ovf;
                for (const auto &[ww, cc] : nf.t) total.add(ww, cc);
            }
            results.push_back(std::move(total));
        }
        for (size_t r = 1; r < results.size(); ++r)
            if (results[r].t != results[0].t) {
                if (why) *why = "branch mismatch at " + word_str(w);
                return false;
            }
        return true;
    }

    Vec to_vec(const LinComb &lc) const {
        Vec v;
        v.ovf = lc.ovf;
        for (const auto &[w, c] : lc.t) {
            auto it = index.find(w);
            if (it == index.end()) throw ConstructionError("zf: non-basis normal word " + word_str(w));
            v.add(it->second, c);
        }
        return v;
    }

    // g(n) applied to a basis word.
    Vec mode_apply(int gen, int n, int j) const {
        Word w = words[static_cast<size_t>(j)];
        w.insert(w.begin(), Letter{gen, n});
        return to_vec(normal_form(w, HSeries::one(spec.h_order)));
    }

    void enumerate_basis() {
        words.clear();
        std::vector<Word> cur{Word{}};
        // extend by letters with non-decreasing key, total degree <= depth
        std::function<void(Word &, int)> rec = [&](Word &w, int deg) {
            // candidate next letters: creation letters with key >= last key
            for (int m = -1; m >= -(spec.depth - deg); --m)
                for (int g = 0; g < spec.ngens(); ++g) {
                    Letter L{g, m};
                    if (!w.empty() && letter_key(w.back()) > letter_key(L)) continue;
                    w.push_back(L);
                    words.push_back(w);
                    rec(w, deg - m);
                    w.pop_back();
                }
        };
        Word w;
        words.push_back(w);
        rec(w, 0);
        std::sort(words.begin(), words.end(), [&](const Word &a, const Word &b) {
            auto ka = std::tuple(degree(a), a.size(), a);
            auto kb = std::tuple(degree(b), b.size(), b);
            return ka < kb;
        });
        index.clear();
        for (int i = 0; i < static_cast<int>(words.size()); ++i)
            index.emplace(words[static_cast<size_t>(i)], i);
    }
};

// Free-module dimension count per degree (PBW yardstick): multisets of
// colored creation letters g(-m), m >= 1.
inline std::vector<long> zf_free_counts(int ngens, int depth) {
    std::vector<long> dp(static_cast<size_t>(depth + 1), 0);
    dp[0] = 1;
    for (int m = 1; m <= depth; ++m)
        for (int g = 0; g < ngens; ++g)
            for (int d = m; d <= depth; ++d) dp[static_cast<size_t>(d)] += dp[static_cast<size_t>(d - m)];
    return dp;
}

struct ZFBuild {
    ZFModel model;
    Algebra A;
    Braiding S;
    FieldFamily FF;
    std::vector<CheckReport> diagnostics;
};

namespace detail {

// Pairwise field-exchange extension of the generator braiding to words:
// exchanging letters a(-m), b(-n) applies the (m-1, n-1)-fold divided
// derivative of the generator exchange factor, with the x1-side derivative
// entering positively and the x2-side negatively.
struct BraidTerm {
    FSeries f;
    Word u, v;
};

inline std::vector<BraidTerm> pair_exchange(const ZFSpec &spec, const BraidTerm &t, size_t iu,
                                            size_t iv) {
    std::vector<BraidTerm> out;
    Letter Lu = t.u[iu], Lv = t.v[iv];
    int m = -Lu.mode, n = -Lv.mode; // cluster orders (>=1)
    for (const auto &sterm : spec.sh[static_cast<size_t>(Lu.gen)][static_cast<size_t>(Lv.gen)]) {
        for (int p = 0; p <= m - 1; ++p)
            for (int q = 0; q <= n - 1; ++q) {
                FSeries fd = sterm.f;
                for (int d = 0; d < p + q; ++d) fd = fd.derivative(0);
                if (fd.stored_zero()) continue;
                Rat c = rat(1) / (factorial(p) * factorial(q));
                if (q & 1) c = -c;
                BraidTerm nt;
                nt.f = (t.f * fd).scaled(HSeries(spec.h_order, c));
                if (nt.f.stored_zero()) continue;
                nt.u = t.u;
                nt.v = t.v;
                nt.u[iu] = Letter{sterm.out1, -(m - p)};
                nt.v[iv] = Letter{sterm.out2, -(n - q)};
                out.push_back(std::move(nt));
            }
    }
    return out;
}

} // namespace detail

inline PairSeries zf_braiding_pair(const ZFModel &model, int i, int j) {
    const Word &u = model.words[static_cast<size_t>(i)];
    const Word &v = model.words[static_cast<size_t>(j)];
    std::vector<detail::BraidTerm> terms;
    {
        detail::BraidTerm t0;
        t0.f = FSeries::monomial({'x'}, {0}, HSeries::one(model.spec.h_order));
        t0.u = u;
        t0.v = v;
        terms.push_back(std::move(t0));
    }
    for (size_t iu = 0; iu < u.size(); ++iu)
        for (size_t iv = 0; iv < v.size(); ++iv) {
            std::vector<detail::BraidTerm> next;
            for (const auto &t : terms) {
                auto expanded = detail::pair_exchange(model.spec, t, iu, iv);
                for (auto &nt : expanded) next.push_back(std::move(nt));
            }
            terms = std::move(next);
        }
    PairSeries r({'x'});
    for (const auto &t : terms) {
        LinComb nu = model.normal_form(t.u, HSeries::one(model.spec.h_order));
        LinComb nv = model.normal_form(t.v, HSeries::one(model.spec.h_order));
        for (const auto &[xe, fc] : t.f.terms()) {
            PairVec pv;
            pv.ovf = nu.ovf || nv.ovf;
            for (const auto &[wu, cu] : nu.t)
                for (const auto &[wv, cv] : nv.t)
                    pv.add({model.index.at(wu), model.index.at(wv)}, fc * cu * cv);
            if (!is_zero(pv)) r = r + PairSeries::monomial({'x'}, xe, pv);
        }
    }
    return r;
}

inline Braiding zf_braiding(const ZFModel &model) {
    Braiding S;
    S.dim = static_cast<int>(model.words.size());
    S.h_order = model.spec.h_order;
    S.img.assign(static_cast<size_t>(S.dim), std::vector<PairSeries>(static_cast<size_t>(S.dim)));
    bool nontrivial = false;
    for (int p = 0; p < model.spec.ngens(); ++p)
        for (int q = 0; q < model.spec.ngens(); ++q) {
            const auto &ts = model.spec.sh[static_cast<size_t>(p)][static_cast<size_t>(q)];
            if (ts.size() != 1 || ts[0].out1 != p || ts[0].out2 != q ||
                !(ts[0].f - FSeries::monomial({'x'}, {0}, HSeries::one(model.spec.h_order)))
                     .stored_zero())
                nontrivial = true;
        }
    S.heuristic = nontrivial;
    for (int i = 0; i < S.dim; ++i)
        for (int j = 0; j < S.dim; ++j)
            S.img[static_cast<size_t>(i)][static_cast<size_t>(j)] = zf_braiding_pair(model, i, j);
    return S;
}

// --- the braided iterate: fields of composite words --------------------------

namespace detail {

inline ModeField modefield_from_series(const Algebra &A,
                                       const std::vector<VecSeries> &cols) {
    ModeField F;
    F.dim = A.dim();
    F.horder = A.hord();
    int lo = -(A.V.depth + 2);
    std::map<int, Op> modes;
    for (int j = 0; j < A.dim(); ++j) {
        const VecSeries &col = cols[static_cast<size_t>(j)];
        if (auto t = col.trunc(0)) lo = std::max(lo, -*t - 1);
    }
    for (int j = 0; j < A.dim(); ++j)
        for (const auto &[e, v] : cols[static_cast<size_t>(j)].terms()) {
            int m = -e[0] - 1;
            if (m < lo) continue;
            auto it = modes.find(m);
            if (it == modes.end()) it = modes.emplace(m, Op(A.dim())).first;
            Vec vv = v;
            it->second.ovf_col[static_cast<size_t>(j)] = vv.ovf;
            vv.ovf = false;
            it->second.col[static_cast<size_t>(j)] = vv;
        }
    F.lo = lo;
    F.overflow_below = true;
    for (auto &[m, op] : modes) F.modes.emplace(m, op);
    return F;
}

} // namespace detail

/*
 * Builds mode fields for every basis word. Generator clusters g(-m)1 get the
 * divided derivative of the generator field; a longer word w = u w' (u the
 * leftmost cluster) is resolved from the braided iterate
 *
 *   Y(u S_(-1) w', z) c = Res_x( iota_{x,z}(x-z)^{-1} Y(u,x) Y(w',z) c
 *                  - iota_{z,x}(x-z)^{-1} Y(z)(1 (x) Y(x)) S^{12}(z-x)(w' (x) u (x) c) ),
 *
 * solved for Y(w, z) h-adically within each word-length class.
 */
inline FieldFamily zf_fields(const ZFModel &model, const Algebra &A, const Braiding &S) {
    const int dim = A.dim();
    int ceiling = 2 * A.V.depth + A.nmax + 6;
    FieldFamily FF;
    FF.f.resize(static_cast<size_t>(dim));
    std::vector<bool> ready(static_cast<size_t>(dim), false);

    // vacuum: identity field
    {
        ModeField F;
        F.dim = dim;
        F.horder = A.hord();
        F.lo = -1;
        F.overflow_below = false;
        F.modes.emplace(-1, Op::identity(dim, A.hord()));
        FF.f[static_cast<size_t>(A.V.vacuum)] = F;
        ready[static_cast<size_t>(A.V.vacuum)] = true;
    }

    // generator clusters: Y(g(-m)1, z) = d^(m-1) g(z)
    std::vector<std::vector<Op>> gen_modes(static_cast<size_t>(model.spec.ngens()));
    int mode_lo = -(A.V.depth + 1), mode_hi = A.V.depth;
    for (int g = 0; g < model.spec.ngens(); ++g) {
        for (int n = mode_lo; n <= mode_hi; ++n) {
            Op op(dim);
            for (int j = 0; j < dim; ++j) {
                Vec col = model.mode_apply(g, n, j);
                op.ovf_col[static_cast<size_t>(j)] = col.ovf;
                col.ovf = false;
                op.col[static_cast<size_t>(j)] = col;
            }
            gen_modes[static_cast<size_t>(g)].push_back(op);
        }
    }
    auto cluster_field = [&](int g, int m) {
        ModeField F;
        F.dim = dim;
        F.horder = A.hord();
        F.lo = mode_lo;
        F.overflow_below = true;
        for (int n = mode_lo; n <= mode_hi; ++n) {
            // mode of d^{(m-1)} g at n comes from g(j), j = n - m + 1
            int j = n - m + 1;
            if (j < mode_lo || j > mode_hi) continue;
            Rat c = binomial(-j - 1, m - 1);
            if (is_zero(c)) continue;
            Op op = gen_modes[static_cast<size_t>(g)][static_cast<size_t>(j - mode_lo)].scaled(c);
            if (!op.is_zero_map()) F.modes.emplace(n, op);
        }
        return F;
    };
    for (int i = 0; i < dim; ++i) {
        const Word &w = model.words[static_cast<size_t>(i)];
        if (w.size() == 1) {
            FF.f[static_cast<size_t>(i)] = cluster_field(w[0].gen, -w[0].mode);
            ready[static_cast<size_t>(i)] = true;
        }
    }

    // longer words, by length class
    size_t max_len = 0;
    for (const auto &w : model.words) max_len = std::max(max_len, w.size());
    for (size_t len = 2; len <= max_len; ++len) {
        std::vector<int> cls;
        for (int i = 0; i < dim; ++i)
            if (model.words[static_cast<size_t>(i)].size() == len) cls.push_back(i);
        if (cls.empty()) continue;

        // per class member: the iterate value as z-series columns, and the
        // coefficients of uS = u S_(-1) w' over the basis
        std::map<int, std::vector<VecSeries>> rhs_cols;
        std::map<int, Vec> us_vec;
        for (int i : cls) {
            const Word &w = model.words[static_cast<size_t>(i)];
            Letter L = w[0];
            Word rest(w.begin() + 1, w.end());
            int irest = model.index.at(rest);
            int iu = model.index.at(Word{L});
            Vec u = A.V.unit(iu), wp = A.V.unit(irest);
            ModeField Fu = cluster_field(L.gen, -L.mode);

            // uS = Res_z z^{-1} Y(z) S(z) (u (x) w')
            PairSeries P = S.apply(u, wp);
            Vec uS;
            for (const auto &[xe, pv] : P.terms())
                for (const auto &[kl, hs] : pv.c) {
                    const Word &wu = model.words[static_cast<size_t>(kl[0])];
                    ModeField Fo = cluster_field(wu[0].gen, -wu[0].mode);
                    Vec contrib = Fo.apply_mode(-1 + xe[0], [&] {
                        Vec e;
                        e.add(kl[1], hs);
                        return e;
                    }());
                    uS = uS + contrib;
                }
            us_vec.emplace(i, uS);

            std::vector<VecSeries> cols;
            cols.reserve(static_cast<size_t>(dim));
            ModeField Frest = FF.f[static_cast<size_t>(irest)];
            for (int k = 0; k < dim; ++k) {
                Vec c = A.V.unit(k);
                VecSeries G = apply_field(Frest, c, 'z');
                VecSeries2 t1c = compose_fields(A, Fu, G, 'x');
                auto i1 = iota_pow('x', 'z', -1, -1, ceiling, A.hord());
                VecSeries term1 = residue(i1 * t1c, 0);

                VecSeries term2({'z'});
                PairSeries PS = S.apply(wp, u);
                for (const auto &[xe, pv] : PS.terms()) {
                    auto expansion = iota_pow('z', 'x', xe[0], -1, ceiling, A.hord());
                    auto i2 = -iota_pow('z', 'x', -1, -1, ceiling, A.hord());
                    auto weight = i2 * expansion;
                    for (const auto &[kl, hs] : pv.c) {
                        const Word &wq = model.words[static_cast<size_t>(kl[1])];
                        ModeField Fq = cluster_field(wq[0].gen, -wq[0].mode);
                        VecSeries Gq = apply_field(Fq, c, 'x');
                        ModeField Fp = FF.f[static_cast<size_t>(kl[0])];
                        VecSeries2 t2c = compose_fields(A, Fp, Gq, 'z');
                        VecSeries piece = residue(weight * t2c, 1).scaled(hs);
                        if (pv.ovf) {
                            Vec fl;
                            fl.ovf = true;
                            piece = piece + VecSeries::monomial({'z'}, {0}, fl);
                        }
                        term2 = term2 + piece;
                    }
                }
                cols.push_back(term1 - term2);
            }
            rhs_cols.emplace(i, std::move(cols));
        }

        // solve Y(uS_i) = sum_j coef_{ij} Y(w_j) for the class: coef = 1 + O(h)
        // on the diagonal, so a Jacobi sweep per h-order converges exactly
        std::map<int, std::vector<VecSeries>> cur;
        for (int i : cls) cur.emplace(i, rhs_cols.at(i));
        for (int sweep = 1; sweep < A.hord(); ++sweep) {
            std::map<int, std::vector<VecSeries>> next;
            for (int i : cls) {
                std::vector<VecSeries> cols = rhs_cols.at(i);
                const Vec &uS = us_vec.at(i);
                for (const auto &[j, coef] : uS.c) {
                    HSeries corr = coef;
                    if (j == i) corr = corr - HSeries::one(A.hord());
                    if (corr.is_zero()) continue;
                    for (int k = 0; k < dim; ++k) {
                        VecSeries yj;
                        if (model.words[static_cast<size_t>(j)].size() < len)
                            yj = apply_field(FF.f[static_cast<size_t>(j)], A.V.unit(k));
                        else
                            yj = cur.at(j)[static_cast<size_t>(k)];
                        cols[static_cast<size_t>(k)] =
                            cols[static_cast<size_t>(k)] - yj.scaled(corr);
                    }
                }
                next.emplace(i, std::move(cols));
            }
            cur = std::move(next);
        }
        for (int i : cls) {
            std::vector<VecSeries> cols = cur.at(i);
            if (us_vec.at(i).ovf)
                for (int k = 0; k < dim; ++k) {
                    Vec fl;
                    fl.ovf = true;
                    cols[static_cast<size_t>(k)] =
                        cols[static_cast<size_t>(k)] + VecSeries::monomial({'z'}, {0}, fl);
                }
            FF.f[static_cast<size_t>(i)] = detail::modefield_from_series(A, cols);
            ready[static_cast<size_t>(i)] = true;
        }
    }
    return FF;
}

// --- assembling the exported algebra -----------------------------------------

inline ZFBuild build_zf(const ZFSpec &spec0) {
    ZFSpec spec = spec0;
    spec.validate();
    ZFBuild B;
    B.model.spec = spec;
    B.model.enumerate_basis();
    const int dim = static_cast<int>(B.model.words.size());

    // PBW count check
    {
        CheckAccum acc("zf.pbw_count");
        auto free_counts = zf_free_counts(spec.ngens(), spec.depth);
        std::vector<long> got(static_cast<size_t>(spec.depth + 1), 0);
        for (const auto &w : B.model.words) ++got[static_cast<size_t>(ZFModel::degree(w))];
        for (int d = 0; d <= spec.depth; ++d) {
            if (got[static_cast<size_t>(d)] == free_counts[static_cast<size_t>(d)])
                acc.holds_instance();
            else
                acc.fail_instance("degree " + std::to_string(d) + ": " +
                                  std::to_string(got[static_cast<size_t>(d)]) + " words vs free " +
                                  std::to_string(free_counts[static_cast<size_t>(d)]));
        }
        CheckReport r = acc.finish();
        if (r.status == Status::Fails)
            throw ConstructionError("zf: PBW count mismatch: " + r.witness);
        B.diagnostics.push_back(r);
    }

    Module V;
    for (const auto &w : B.model.words)
        V.basis.push_back(BasisVector{B.model.word_str(w), ZFModel::degree(w)});
    V.vacuum = B.model.index.at(Word{});
    V.depth = spec.depth;
    V.h_order = spec.h_order;
    V.lambda_cap = spec.lambda_cap;
    V.T = Op(dim);
    for (int j = 0; j < dim; ++j) {
        const Word &w = B.model.words[static_cast<size_t>(j)];
        LinComb total;
        for (size_t p = 0; p < w.size(); ++p) {
            Word w2 = w;
            w2[p].mode -= 1;
            LinComb nf = B.model.normal_form(w2, HSeries(spec.h_order, Rat(-w[p].mode)));
            total.ovf = total.ovf || nf.ovf;
            for (const auto &[ww, cc] : nf.t) total.add(ww, cc);
        }
        Vec col = B.model.to_vec(total);
        V.T.ovf_col[static_cast<size_t>(j)] = col.ovf;
        col.ovf = false;
        V.T.col[static_cast<size_t>(j)] = col;
    }
    V.finalize();

    // local-confluence probe, words of length <= 3 within depth
    {
        CheckAccum acc("zf.local_confluence");
        std::vector<Word> probes;
        std::function<void(Word &, int)> rec = [&](Word &w, int len) {
            if (len == 3) return;
            for (int g = 0; g < spec.ngens(); ++g)
                for (int m = -spec.depth; m <= spec.depth; ++m) {
                    w.push_back(Letter{g, m});
                    if (ZFModel::degree(w) <= spec.depth) probes.push_back(w);
                    rec(w, len + 1);
                    w.pop_back();
                }
        };
        Word w;
        rec(w, 0);
        for (const auto &p : probes) {
            std::string why;
            if (B.model.confluent_at(p, &why))
                acc.holds_instance();
            else
                acc.fail_instance(why);
        }
        B.diagnostics.push_back(acc.finish());
    }

    B.A.V = V;
    B.A.nmax = spec.nmax;
    B.S = zf_braiding(B.model);
    B.FF = zf_fields(B.model, B.A, B.S);

    // tables from the constructed fields
    B.A.tab.lam.assign(static_cast<size_t>(dim), std::vector<VecPoly>(static_cast<size_t>(dim)));
    B.A.tab.dot.assign(static_cast<size_t>(dim), std::vector<Vec>(static_cast<size_t>(dim)));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            VecSeries Y = apply_field(B.FF.of(i), B.A.V.unit(j));
            VecPoly lam(B.A.cap());
            for (const auto &[e, v] : Y.terms()) {
                int n = -e[0] - 1;
                if (n < 0) continue;
                if (n > B.A.cap()) {
                    lam.mark_clipped();
                    continue;
                }
                Mono m{};
                m[P_LAM] = static_cast<uint8_t>(n);
                lam.add_term(m, mul(v, rat(1) / factorial(n)));
            }
            B.A.tab.lam[static_cast<size_t>(i)][static_cast<size_t>(j)] = lam;
            Vec d = Y.reliable({-1}) ? Y.coeff({-1}) : Vec{};
            if (!Y.reliable({-1})) d.ovf = true;
            B.A.tab.dot[static_cast<size_t>(i)][static_cast<size_t>(j)] = d;
        }

    return B;
}

// (g(-1)1)_lambda w as a polynomial, divided-power normalization; the plain
// lambda^m variant is returned alongside for the convention comparison.
inline std::pair<VecPoly, VecPoly> generator_lambda(const ZFBuild &B, int gen, int j) {
    VecPoly divided(B.A.cap()), plain(B.A.cap());
    for (int m = 0; m <= B.A.V.depth; ++m) {
        Vec v = B.model.mode_apply(gen, m, j);
        if (is_zero(v)) continue;
        Mono mo{};
        mo[P_LAM] = static_cast<uint8_t>(m);
        divided.add_term(mo, mul(v, rat(1) / factorial(m)));
        plain.add_term(mo, v);
    }
    return {divided, plain};
}

} // namespace qca
