#pragma once

#include <array>
#include <map>
#include <sstream>
#include <string>

#include "qca/hseries.hpp"

namespace qca {

/*
 * Sparse module vector indexed by basis position (int for V, int-pairs for
 * V(x)V, triples for V(x)V(x)V). `ovf` marks that the true value additionally
 * had components beyond the depth cutoff which were projected away; any check
 * whose result carries the flag must report inconclusive, never pass/fail.
 */
template <typename Idx> struct SparseVec {
    std::map<Idx, HSeries> c;
    bool ovf = false;

    SparseVec() = default;

    bool stored_zero() const { return c.empty(); }

    void add(const Idx &i, const HSeries &v) {
        if (v.is_zero()) return;
        auto [it, fresh] = c.emplace(i, v);
        if (!fresh) {
            it->second += v;
            if (it->second.is_zero()) c.erase(it);
        }
    }

    const HSeries &at(const Idx &i, int horder) const {
        static thread_local HSeries z;
        auto it = c.find(i);
        if (it != c.end()) return it->second;
        z = HSeries::zero(horder);
        return z;
    }

    friend SparseVec operator+(SparseVec a, const SparseVec &b) {
        a.ovf = a.ovf || b.ovf;
        for (const auto &[i, v] : b.c) a.add(i, v);
        return a;
    }
    friend SparseVec operator-(SparseVec a, const SparseVec &b) {
        a.ovf = a.ovf || b.ovf;
        for (const auto &[i, v] : b.c) a.add(i, -v);
        return a;
    }
    SparseVec operator-() const {
        SparseVec r = *this;
        for (auto &[i, v] : r.c) v = -v;
        return r;
    }

    int h_order() const { return c.empty() ? 1 : c.begin()->second.order(); }

    bool zero_mod(int m) const {
        for (const auto &[i, v] : c)
            if (!v.is_zero_mod(m)) return false;
        return true;
    }

    friend bool operator==(const SparseVec &a, const SparseVec &b) {
        return a.ovf == b.ovf && a.c == b.c;
    }
};

using Vec = SparseVec<int>;
using PairVec = SparseVec<std::array<int, 2>>;
using TriVec = SparseVec<std::array<int, 3>>;

template <typename Idx> bool is_zero(const SparseVec<Idx> &v) {
    return v.c.empty() && !v.ovf;
}

template <typename Idx> SparseVec<Idx> mul(const SparseVec<Idx> &v, const HSeries &s) {
    SparseVec<Idx> r;
    r.ovf = v.ovf;
    for (const auto &[i, x] : v.c) r.add(i, x * s);
    return r;
}
template <typename Idx> SparseVec<Idx> mul(const HSeries &s, const SparseVec<Idx> &v) {
    return mul(v, s);
}
template <typename Idx> SparseVec<Idx> mul(const SparseVec<Idx> &v, const Rat &s) {
    SparseVec<Idx> r;
    r.ovf = v.ovf;
    for (const auto &[i, x] : v.c) r.add(i, x * s);
    return r;
}

template <typename Idx> std::string to_string(const SparseVec<Idx> &v);

inline std::string idx_str(int i) { return std::to_string(i); }
template <size_t N> std::string idx_str(const std::array<int, N> &a) {
    std::string s = "(";
    for (size_t k = 0; k < N; ++k) s += (k ? "," : "") + std::to_string(a[k]);
    return s + ")";
}

template <typename Idx> std::string to_string(const SparseVec<Idx> &v) {
    std::ostringstream os;
    bool first = true;
    for (const auto &[i, x] : v.c) {
        os << (first ? "" : " + ") << "(" << x.str() << ")e" << idx_str(i);
        first = false;
    }
    if (first) os << "0";
    if (v.ovf) os << " [+overflow]";
    return os.str();
}

} // namespace qca
