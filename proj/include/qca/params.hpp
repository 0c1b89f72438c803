#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>

#include "qca/errors.hpp"
#include "qca/hseries.hpp"
#include "qca/sparsevec.hpp"

namespace qca {

// Commuting formal parameters used by the lambda calculus layer.
enum Param : int { P_LAM = 0, P_MU = 1, P_ALF = 2, P_BET = 3, P_SIG = 4, NPARAMS = 5 };

inline const char *param_name(int p) {
    static const char *names[NPARAMS] = {"lambda", "mu", "alpha", "beta", "sigma"};
    return names[p];
}

using Mono = std::array<uint8_t, NPARAMS>;

inline int total_deg(const Mono &m) {
    int d = 0;
    for (auto e : m) d += e;
    return d;
}

/*
 * Polynomial in the formal parameters with coefficients in C (scalar series or
 * module vectors), total degree capped at `cap`. Dropping a nonzero monomial
 * beyond the cap sets `clipped`; a clipped value can only yield an
 * inconclusive check, never a pass/fail.
 */
template <typename C> class ParamPoly {
  public:
    ParamPoly() : cap_(0) {}
    explicit ParamPoly(int cap) : cap_(cap) {}

    static ParamPoly constant(int cap, C v) {
        ParamPoly r(cap);
        r.add_term(Mono{}, v);
        return r;
    }
    static ParamPoly monomial(int cap, int param, int deg, C v) {
        Mono m{};
        m[static_cast<size_t>(param)] = static_cast<uint8_t>(deg);
        ParamPoly r(cap);
        r.add_term(m, std::move(v));
        return r;
    }

    int cap() const { return cap_; }
    bool clipped() const { return clipped_; }
    void mark_clipped() { clipped_ = true; }
    const std::map<Mono, C> &terms() const { return c_; }
    bool stored_zero() const { return c_.empty(); }

    void add_term(const Mono &m, const C &v) {
        if (is_zero(v)) return;
        if (total_deg(m) > cap_) {
            clipped_ = true;
            return;
        }
        auto [it, fresh] = c_.emplace(m, v);
        if (!fresh) {
            it->second = it->second + v;
            if (is_zero(it->second)) c_.erase(it);
        }
    }

    const C &coeff(const Mono &m) const {
        static const C kZero{};
        auto it = c_.find(m);
        return it == c_.end() ? kZero : it->second;
    }
    // Coefficient of param^deg with all other parameters at exponent zero.
    const C &coeff1(int param, int deg) const {
        Mono m{};
        m[static_cast<size_t>(param)] = static_cast<uint8_t>(deg);
        return coeff(m);
    }
    int deg_in(int param) const {
        int d = 0;
        for (const auto &[m, v] : c_) d = std::max(d, int(m[static_cast<size_t>(param)]));
        return d;
    }

    friend ParamPoly operator+(const ParamPoly &a, const ParamPoly &b) {
        ParamPoly r(std::min(a.cap_, b.cap_));
        r.clipped_ = a.clipped_ || b.clipped_;
        for (const auto &[m, v] : a.c_) r.add_term(m, v);
        for (const auto &[m, v] : b.c_) r.add_term(m, v);
        return r;
    }
    friend ParamPoly operator-(const ParamPoly &a, const ParamPoly &b) { return a + (-b); }
    ParamPoly operator-() const {
        ParamPoly r = *this;
        for (auto &[m, v] : r.c_) v = -v;
        return r;
    }

    int h_order() const { return c_.empty() ? 1 : h_order_probe(c_.begin()->second); }

    // d/d(param)
    ParamPoly derivative(int param) const {
        ParamPoly r(cap_);
        r.clipped_ = clipped_;
        for (const auto &[m, v] : c_) {
            int e = m[static_cast<size_t>(param)];
            if (e == 0) continue;
            Mono m2 = m;
            m2[static_cast<size_t>(param)] = static_cast<uint8_t>(e - 1);
            r.add_term(m2, mul(v, HSeries(h_order_probe(v), Rat(e))));
        }
        return r;
    }

    // Antiderivative in `param` vanishing at zero; raises degree by one.
    ParamPoly antiderivative(int param) const {
        ParamPoly r(cap_);
        r.clipped_ = clipped_;
        for (const auto &[m, v] : c_) {
            int e = m[static_cast<size_t>(param)];
            Mono m2 = m;
            m2[static_cast<size_t>(param)] = static_cast<uint8_t>(e + 1);
            r.add_term(m2, mul(v, HSeries(h_order_probe(v), rat(1, e + 1))));
        }
        return r;
    }

    // Set param := 0.
    ParamPoly at_zero(int param) const {
        ParamPoly r(cap_);
        r.clipped_ = clipped_;
        for (const auto &[m, v] : c_)
            if (m[static_cast<size_t>(param)] == 0) r.add_term(m, v);
        return r;
    }

    // Product of two scalar polynomials (local to avoid lookup-order knots).
    static ParamPoly<HSeries> sp_mul(const ParamPoly<HSeries> &a, const ParamPoly<HSeries> &b) {
        ParamPoly<HSeries> r(std::min(a.cap(), b.cap()));
        if (a.clipped() || b.clipped()) r.mark_clipped();
        for (const auto &[ma, va] : a.terms())
            for (const auto &[mb, vb] : b.terms()) {
                Mono m;
                for (int p = 0; p < NPARAMS; ++p)
                    m[static_cast<size_t>(p)] = static_cast<uint8_t>(
                        ma[static_cast<size_t>(p)] + mb[static_cast<size_t>(p)]);
                r.add_term(m, va * vb);
            }
        return r;
    }

    // Substitute a scalar polynomial for `param` (commuting substitution).
    ParamPoly subst(int param, const ParamPoly<HSeries> &value) const {
        ParamPoly r(cap_);
        r.clipped_ = clipped_ || value.clipped();
        std::map<int, ParamPoly<HSeries>> powers;
        for (const auto &[m, v] : c_) {
            int e = m[static_cast<size_t>(param)];
            Mono m2 = m;
            m2[static_cast<size_t>(param)] = 0;
            if (e == 0) {
                r.add_term(m2, v);
                continue;
            }
            auto pit = powers.find(e);
            if (pit == powers.end()) {
                ParamPoly<HSeries> p =
                    ParamPoly<HSeries>::constant(cap_, HSeries::one(h_order_probe(v)));
                for (int k = 0; k < e; ++k) p = sp_mul(p, value);
                pit = powers.emplace(e, std::move(p)).first;
            }
            for (const auto &[pm, pv] : pit->second.terms()) {
                Mono m3 = m2;
                bool ok = true;
                for (int q = 0; q < NPARAMS; ++q) {
                    int s = m3[static_cast<size_t>(q)] + pm[static_cast<size_t>(q)];
                    if (s > 255) ok = false;
                    m3[static_cast<size_t>(q)] = static_cast<uint8_t>(s);
                }
                if (!ok) throw ConfigError("ParamPoly::subst: exponent overflow");
                r.add_term(m3, mul(v, pv));
            }
            if (pit->second.clipped()) r.clipped_ = true;
        }
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (const auto &[m, v] : c_) {
            os << (first ? "" : " + ") << "(" << to_string(v) << ")";
            first = false;
            for (int p = 0; p < NPARAMS; ++p) {
                int e = m[static_cast<size_t>(p)];
                if (e == 0) continue;
                os << "*" << param_name(p);
                if (e > 1) os << "^" << e;
            }
        }
        if (first) os << "0";
        if (clipped_) os << " [clipped]";
        return os.str();
    }

  private:
    std::map<Mono, C> c_;
    int cap_;
    bool clipped_ = false;
};

template <typename C> bool is_zero(const ParamPoly<C> &p) {
    return p.stored_zero() && !p.clipped();
}
template <typename C> std::string to_string(const ParamPoly<C> &p) { return p.str(); }

template <typename A, typename B>
auto mul(const ParamPoly<A> &a, const ParamPoly<B> &b)
    -> ParamPoly<decltype(mul(std::declval<const A &>(), std::declval<const B &>()))> {
    using R = decltype(mul(std::declval<const A &>(), std::declval<const B &>()));
    ParamPoly<R> r(std::min(a.cap(), b.cap()));
    if (a.clipped() || b.clipped()) r.mark_clipped();
    for (const auto &[ma, va] : a.terms())
        for (const auto &[mb, vb] : b.terms()) {
            Mono m;
            for (int p = 0; p < NPARAMS; ++p)
                m[static_cast<size_t>(p)] = static_cast<uint8_t>(ma[static_cast<size_t>(p)] +
                                                                 mb[static_cast<size_t>(p)]);
            r.add_term(m, mul(va, vb));
        }
    return r;
}

template <typename A> ParamPoly<A> mul(const ParamPoly<A> &a, const HSeries &s) {
    ParamPoly<A> r(a.cap());
    if (a.clipped()) r.mark_clipped();
    for (const auto &[m, v] : a.terms()) r.add_term(m, mul(v, s));
    return r;
}
template <typename A> ParamPoly<A> mul(const HSeries &s, const ParamPoly<A> &a) {
    return mul(a, s);
}
template <typename A> ParamPoly<A> mul(const ParamPoly<A> &a, const Rat &s) {
    ParamPoly<A> r(a.cap());
    if (a.clipped()) r.mark_clipped();
    for (const auto &[m, v] : a.terms()) r.add_term(m, mul(v, s));
    return r;
}

// Scalar polynomial times module vector.
template <typename Idx>
ParamPoly<SparseVec<Idx>> mul(const ParamPoly<HSeries> &a, const SparseVec<Idx> &v) {
    ParamPoly<SparseVec<Idx>> r(a.cap());
    if (a.clipped()) r.mark_clipped();
    for (const auto &[m, s] : a.terms()) r.add_term(m, mul(v, s));
    return r;
}
template <typename Idx>
ParamPoly<SparseVec<Idx>> mul(const SparseVec<Idx> &v, const ParamPoly<HSeries> &a) {
    return mul(a, v);
}

inline HSeries mul(const HSeries &a, const Rat &b) { return a * b; }
inline HSeries mul(const Rat &a, const HSeries &b) { return b * a; }

using ScalarPoly = ParamPoly<HSeries>;
using VecPoly = ParamPoly<Vec>;
using PairPoly = ParamPoly<PairVec>;

template <typename C> ParamPoly<C> rename_param(const ParamPoly<C> &p, int from, int to) {
    if (from == to) return p;
    ParamPoly<C> r(p.cap());
    if (p.clipped()) r.mark_clipped();
    for (const auto &[m, v] : p.terms()) {
        Mono m2 = m;
        int e = m2[static_cast<size_t>(from)];
        m2[static_cast<size_t>(from)] = 0;
        int s = m2[static_cast<size_t>(to)] + e;
        if (s > 255) throw ConfigError("rename_param: exponent overflow");
        m2[static_cast<size_t>(to)] = static_cast<uint8_t>(s);
        r.add_term(m2, v);
    }
    return r;
}

inline ScalarPoly param_var(int cap, int param, int horder) {
    return ScalarPoly::monomial(cap, param, 1, HSeries::one(horder));
}

} // namespace qca
