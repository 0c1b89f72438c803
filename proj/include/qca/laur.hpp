#pragma once

#include <array>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "qca/errors.hpp"
#include "qca/hseries.hpp"

namespace qca {

/*
 * Windowed Laurent series in K formal variables.
 *
 * Knowledge model, per axis:
 *   - below the stored support the series is exactly zero (finite principal part);
 *   - if trunc[axis] is set, coefficients with exponent > trunc[axis] were
 *     discarded somewhere upstream and are unknown;
 *   - if trunc[axis] is unset, the axis is exact: everything not stored is zero.
 *
 * A coefficient is reliable iff its exponent is <= trunc on every truncated
 * axis. Multiplication narrows ceilings by sums of bounds: unknown terms of one
 * factor start at trunc+1 and meet the other factor's minimal exponent, so the
 * product is reliable up to trunc_a + min_b (and symmetrically). Reading an
 * unreliable coefficient is an error, never a silent zero.
 */
template <int K, typename C> class Laur {
  public:
    using Key = std::array<int, K>;

    Laur() { vars_.fill('?'); }
    explicit Laur(std::array<char, K> vars) : vars_(vars) {}

    static Laur monomial(std::array<char, K> vars, Key e, C v) {
        Laur r(vars);
        if (!is_zero(v)) r.c_.emplace(e, std::move(v));
        return r;
    }

    const std::map<Key, C> &terms() const { return c_; }
    std::array<char, K> vars() const { return vars_; }
    char var(int axis) const { return vars_[static_cast<size_t>(axis)]; }
    void set_var(int axis, char v) { vars_[static_cast<size_t>(axis)] = v; }

    bool axis_exact(int axis) const { return !trunc_[static_cast<size_t>(axis)].has_value(); }
    std::optional<int> trunc(int axis) const { return trunc_[static_cast<size_t>(axis)]; }
    void set_trunc(int axis, std::optional<int> t) {
        auto &cur = trunc_[static_cast<size_t>(axis)];
        if (!t) return; // never widen knowledge
        cur = cur ? std::min(*cur, *t) : *t;
        drop_unreliable();
    }

    bool reliable(const Key &e) const {
        for (int a = 0; a < K; ++a) {
            const auto &t = trunc_[static_cast<size_t>(a)];
            if (t && e[static_cast<size_t>(a)] > *t) return false;
        }
        return true;
    }

    // Entirely zero and exact on every axis.
    bool is_exact_zero() const {
        if (!c_.empty()) return false;
        for (const auto &t : trunc_)
            if (t) return false;
        return true;
    }
    bool stored_zero() const { return c_.empty(); }

    const C &coeff(const Key &e) const {
        static const C kZero{};
        if (!reliable(e))
            throw TruncationError("Laur::coeff: exponent outside reliable window");
        auto it = c_.find(e);
        return it == c_.end() ? kZero : it->second;
    }

    void add_term(const Key &e, const C &v) {
        if (is_zero(v)) return;
        if (!reliable(e)) return; // lands in the unknown region; ceiling already records it
        auto [it, fresh] = c_.emplace(e, v);
        if (!fresh) {
            it->second = it->second + v;
            if (is_zero(it->second)) c_.erase(it);
        }
    }

    friend Laur operator+(const Laur &a, const Laur &b) {
        Laur r(merge_vars(a, b));
        for (int ax = 0; ax < K; ++ax) {
            auto ta = a.trunc(ax), tb = b.trunc(ax);
            if (ta || tb)
                r.trunc_[static_cast<size_t>(ax)] =
                    ta && tb ? std::min(*ta, *tb) : (ta ? *ta : *tb);
        }
        for (const auto &[e, v] : a.c_) r.add_term(e, v);
        for (const auto &[e, v] : b.c_) r.add_term(e, v);
        return r;
    }
    friend Laur operator-(const Laur &a, const Laur &b) { return a + (-b); }
    Laur operator-() const {
        Laur r = *this;
        for (auto &[e, v] : r.c_) v = -v;
        return r;
    }

    template <typename C2>
    auto operator*(const Laur<K, C2> &b) const
        -> Laur<K, decltype(mul(std::declval<const C &>(), std::declval<const C2 &>()))> {
        using R = decltype(mul(std::declval<const C &>(), std::declval<const C2 &>()));
        Laur<K, R> r(merge_vars_with(b));
        if (is_exact_zero() || b.is_exact_zero()) return r;
        for (int ax = 0; ax < K; ++ax) {
            std::optional<int> t;
            if (auto ta = trunc(ax)) {
                int lo_b = b.lo_bound(ax);
                t = *ta + lo_b;
            }
            if (auto tb = b.trunc(ax)) {
                int cand = *tb + lo_bound(ax);
                t = t ? std::min(*t, cand) : cand;
            }
            if (t) r.set_trunc_raw(ax, *t);
        }
        for (const auto &[ea, va] : c_)
            for (const auto &[eb, vb] : b.terms()) {
                Key e;
                for (int ax = 0; ax < K; ++ax)
                    e[static_cast<size_t>(ax)] =
                        ea[static_cast<size_t>(ax)] + eb[static_cast<size_t>(ax)];
                r.add_term(e, mul(va, vb));
            }
        return r;
    }

    template <typename S> Laur scaled(const S &s) const {
        Laur r(vars_);
        r.trunc_ = trunc_;
        for (const auto &[e, v] : c_) r.add_term(e, mul(v, s));
        return r;
    }

    // d/d(variable of `axis`); exponents drop by one.
    Laur derivative(int axis) const {
        Laur r(vars_);
        r.trunc_ = trunc_;
        if (auto t = trunc(axis)) r.trunc_[static_cast<size_t>(axis)] = *t - 1;
        for (const auto &[e, v] : c_) {
            int n = e[static_cast<size_t>(axis)];
            if (n == 0) continue;
            Key e2 = e;
            e2[static_cast<size_t>(axis)] = n - 1;
            r.add_term(e2, mul(v, HSeries(h_order_of(v), Rat(n))));
        }
        return r;
    }

    // Multiply by var^k along an axis.
    Laur shifted(int axis, int k) const {
        Laur r(vars_);
        r.trunc_ = trunc_;
        if (auto t = trunc(axis)) r.trunc_[static_cast<size_t>(axis)] = *t + k;
        for (const auto &[e, v] : c_) {
            Key e2 = e;
            e2[static_cast<size_t>(axis)] += k;
            r.c_.emplace(e2, v);
        }
        return r;
    }

    // Substitute var -> -var along an axis.
    Laur negated_var(int axis) const {
        Laur r(vars_);
        r.trunc_ = trunc_;
        for (const auto &[e, v] : c_) {
            if ((e[static_cast<size_t>(axis)] & 1) == 0)
                r.c_.emplace(e, v);
            else
                r.c_.emplace(e, -v);
        }
        return r;
    }

    int lo_bound(int axis) const {
        bool any = false;
        int lo = 0;
        for (const auto &[e, v] : c_) {
            int x = e[static_cast<size_t>(axis)];
            if (!any || x < lo) lo = x, any = true;
        }
        if (any) return lo;
        if (auto t = trunc(axis)) return *t + 1;
        return 0;
    }
    int hi_support(int axis) const {
        bool any = false;
        int hi = 0;
        for (const auto &[e, v] : c_) {
            int x = e[static_cast<size_t>(axis)];
            if (!any || x > hi) hi = x, any = true;
        }
        return any ? hi : lo_bound(axis) - 1;
    }

    // Stored terms are always reliable: narrowing a ceiling drops anything
    // that fell outside, so walking terms() never reads an unknown value.
    void set_trunc_raw(int axis, int t) {
        auto &cur = trunc_[static_cast<size_t>(axis)];
        cur = cur ? std::min(*cur, t) : t;
        drop_unreliable();
    }

    std::array<char, K> merge_vars_with(const Laur<K, auto> &b) const {
        std::array<char, K> v = vars_;
        for (int ax = 0; ax < K; ++ax) {
            char vb = b.var(ax);
            if (v[static_cast<size_t>(ax)] == '?')
                v[static_cast<size_t>(ax)] = vb;
            else if (vb != '?' && vb != v[static_cast<size_t>(ax)])
                throw ConfigError(std::string("Laur: variable mismatch '") +
                                  v[static_cast<size_t>(ax)] + "' vs '" + vb + "'");
        }
        return v;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (const auto &[e, v] : c_) {
            os << (first ? "" : " + ") << "(" << to_string(v) << ")";
            first = false;
            for (int ax = 0; ax < K; ++ax) {
                int n = e[static_cast<size_t>(ax)];
                if (n == 0) continue;
                os << "*" << vars_[static_cast<size_t>(ax)];
                if (n != 1) os << "^" << n;
            }
        }
        if (first) os << "0";
        for (int ax = 0; ax < K; ++ax)
            if (auto t = trunc(ax))
                os << "  [" << vars_[static_cast<size_t>(ax)] << "<=" << *t << "]";
        return os.str();
    }

  private:
    static std::array<char, K> merge_vars(const Laur &a, const Laur &b) {
        return a.merge_vars_with(b);
    }
    void drop_unreliable() {
        for (auto it = c_.begin(); it != c_.end();)
            it = reliable(it->first) ? std::next(it) : c_.erase(it);
    }
    static int h_order_of(const C &v);

    std::map<Key, C> c_;
    std::array<char, K> vars_;
    std::array<std::optional<int>, K> trunc_;
};

// h-order probe used when a derivative needs an integer as an HSeries factor.
inline int h_order_probe(const HSeries &v) { return v.order(); }
template <typename T> inline int h_order_probe(const T &v) { return v.h_order(); }
template <int K, typename C> int Laur<K, C>::h_order_of(const C &v) { return h_order_probe(v); }

inline HSeries mul(const HSeries &a, const HSeries &b) { return a * b; }

template <int K, typename C> bool is_zero(const Laur<K, C> &f) {
    return f.stored_zero();
}

// --- slicing / residues ---------------------------------------------------

template <typename C> C slice1(const Laur<1, C> &f, int e) { return f.coeff({e}); }

template <int K, typename C> Laur<K - 1, C> slice(const Laur<K, C> &f, int axis, int e) {
    static_assert(K >= 2);
    std::array<char, K - 1> vars;
    for (int a = 0, j = 0; a < K; ++a)
        if (a != axis) vars[static_cast<size_t>(j++)] = f.var(a);
    Laur<K - 1, C> r(vars);
    for (int a = 0, j = 0; a < K; ++a) {
        if (a == axis) continue;
        if (auto t = f.trunc(a)) r.set_trunc_raw(j, *t);
        ++j;
    }
    if (auto t = f.trunc(axis); t && e > *t)
        throw TruncationError("slice: exponent outside reliable window");
    for (const auto &[key, v] : f.terms()) {
        if (key[static_cast<size_t>(axis)] != e) continue;
        std::array<int, K - 1> k2;
        for (int a = 0, j = 0; a < K; ++a)
            if (a != axis) k2[static_cast<size_t>(j++)] = key[static_cast<size_t>(a)];
        r.add_term(k2, v);
    }
    return r;
}

template <typename C> Laur<2, C> transpose(const Laur<2, C> &f) {
    Laur<2, C> r({f.var(1), f.var(0)});
    if (auto t = f.trunc(1)) r.set_trunc_raw(0, *t);
    if (auto t = f.trunc(0)) r.set_trunc_raw(1, *t);
    for (const auto &[e, v] : f.terms()) r.add_term({e[1], e[0]}, v);
    return r;
}

// Res along one axis: the coefficient of (var)^{-1}.
template <typename C> C residue1(const Laur<1, C> &f) { return f.coeff({-1}); }
template <int K, typename C> Laur<K - 1, C> residue(const Laur<K, C> &f, int axis) {
    return slice(f, axis, -1);
}

// --- expansions -----------------------------------------------------------

// iota_{z,w}(z + sign*w)^n  =  sum_l binom(n,l) z^{n-l} (sign*w)^l, expanded in
// the domain |z| > |w|; exact for n >= 0, truncated at w-degree `ceiling` else.
inline Laur<2, HSeries> iota_pow(char zv, char wv, int n, int sign, int ceiling, int horder) {
    if (ceiling < 0) throw ConfigError("iota_pow: ceiling must be >= 0");
    Laur<2, HSeries> r({zv, wv});
    int lmax = n >= 0 ? n : ceiling;
    for (int l = 0; l <= lmax; ++l) {
        Rat c = binomial(n, l);
        if (sign < 0 && (l & 1)) c = -c;
        r.add_term({n - l, l}, HSeries(horder, c));
    }
    if (n < 0) r.set_trunc_raw(1, ceiling);
    return r;
}

// Plain binomial (z + sign*w)^n for n >= 0; no expansion domain involved.
inline Laur<2, HSeries> plain_pow(char zv, char wv, int n, int sign, int horder) {
    if (n < 0) throw ConfigError("plain_pow: exponent must be >= 0");
    return iota_pow(zv, wv, n, sign, n, horder);
}

// Taylor germ e^{s w d/dz} applied to a one-variable series:
// coefficient at z^e w^j is s^j binom(e+j, j) a_{e+j}.
template <typename C>
Laur<2, C> taylor_shift(const Laur<1, C> &a, char wv, int sign, int ceiling) {
    Laur<2, C> r({a.var(0), wv});
    bool wexact = a.axis_exact(0) && a.lo_bound(0) >= 0;
    int jmax = ceiling;
    if (wexact) jmax = std::max(a.hi_support(0), 0);
    if (auto t = a.trunc(0)) r.set_trunc_raw(0, *t - jmax);
    if (!wexact) r.set_trunc_raw(1, ceiling);
    for (const auto &[key, v] : a.terms()) {
        int m = key[0];
        for (int j = 0; j <= jmax; ++j) {
            int e = m - j;
            Rat c = binomial(m, j);
            if (sign < 0 && (j & 1)) c = -c;
            if (::qca::is_zero(c)) continue;
            r.add_term({e, j}, mul(v, HSeries(h_order_probe(v), c)));
        }
    }
    return r;
}

} // namespace qca
