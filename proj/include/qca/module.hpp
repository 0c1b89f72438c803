#pragma once

#include <string>
#include <vector>

#include "qca/errors.hpp"
#include "qca/params.hpp"
#include "qca/sparsevec.hpp"

namespace qca {

struct BasisVector {
    std::string name;
    int degree = 0;
};

// Linear map V -> V given by sparse columns. `ovf_col[j]` records that the
// true image of basis j had components beyond the depth cutoff.
struct Op {
    std::vector<Vec> col;
    std::vector<bool> ovf_col;

    Op() = default;
    explicit Op(int dim) : col(static_cast<size_t>(dim)), ovf_col(static_cast<size_t>(dim)) {}

    int dim() const { return static_cast<int>(col.size()); }

    static Op identity(int dim, int horder) {
        Op r(dim);
        for (int j = 0; j < dim; ++j) r.col[static_cast<size_t>(j)].add(j, HSeries::one(horder));
        return r;
    }

    Vec apply(const Vec &v) const {
        Vec r;
        r.ovf = v.ovf;
        for (const auto &[j, x] : v.c) {
            if (j < 0 || j >= dim()) throw ConfigError("Op::apply: index out of range");
            r = r + mul(col[static_cast<size_t>(j)], x);
            if (ovf_col[static_cast<size_t>(j)]) r.ovf = true;
        }
        return r;
    }

    friend Op operator+(const Op &a, const Op &b) {
        Op r(a.dim());
        for (int j = 0; j < a.dim(); ++j) {
            r.col[static_cast<size_t>(j)] =
                a.col[static_cast<size_t>(j)] + b.col[static_cast<size_t>(j)];
            r.ovf_col[static_cast<size_t>(j)] =
                a.ovf_col[static_cast<size_t>(j)] || b.ovf_col[static_cast<size_t>(j)];
        }
        return r;
    }
    friend Op operator-(const Op &a, const Op &b) { return a + b.scaled(Rat(-1)); }
    Op scaled(const Rat &s) const {
        Op r(dim());
        r.ovf_col = ovf_col;
        for (int j = 0; j < dim(); ++j) r.col[static_cast<size_t>(j)] = mul(col[static_cast<size_t>(j)], s);
        return r;
    }
    Op scaled(const HSeries &s) const {
        Op r(dim());
        r.ovf_col = ovf_col;
        for (int j = 0; j < dim(); ++j) r.col[static_cast<size_t>(j)] = mul(col[static_cast<size_t>(j)], s);
        return r;
    }
    // this o other
    Op compose(const Op &other) const {
        Op r(dim());
        for (int j = 0; j < dim(); ++j) {
            r.col[static_cast<size_t>(j)] = apply(other.col[static_cast<size_t>(j)]);
            r.ovf_col[static_cast<size_t>(j)] =
                other.ovf_col[static_cast<size_t>(j)] || r.col[static_cast<size_t>(j)].ovf;
        }
        return r;
    }
    bool is_zero_map() const {
        for (const auto &v : col)
            if (!v.c.empty()) return false;
        return true;
    }
};

/*
 * Finite truncated model of (V, |0>, T): named graded basis, vacuum index,
 * translation operator, filtration depth D and h-order M. T strictly raises
 * degree, so its divided powers T^(k) vanish into the overflow bucket for
 * k > D; divided powers are precomputed up to that point.
 */
struct Module {
    std::vector<BasisVector> basis;
    int vacuum = 0;
    Op T;
    int depth = 0;
    int h_order = 1;
    int lambda_cap = 6;

    std::vector<Op> t_div; // t_div[k] = T^k / k!

    int dim() const { return static_cast<int>(basis.size()); }
    int degree(int i) const { return basis[static_cast<size_t>(i)].degree; }
    const std::string &name(int i) const { return basis[static_cast<size_t>(i)].name; }

    Vec unit(int i) const {
        Vec v;
        v.add(i, HSeries::one(h_order));
        return v;
    }
    Vec vac() const { return unit(vacuum); }
    Vec zero_vec() const { return Vec{}; }

    void finalize() {
        t_div.clear();
        t_div.push_back(Op::identity(dim(), h_order));
        for (int k = 1; k <= depth + 1; ++k) {
            Op prev = t_div.back();
            Op next = T.compose(prev).scaled(rat(1, k));
            t_div.push_back(next);
        }
    }

    // T^k / k! ; for k beyond depth the image is pure overflow.
    Vec t_divpow(int k, const Vec &v) const {
        if (k < static_cast<int>(t_div.size())) return t_div[static_cast<size_t>(k)].apply(v);
        Vec r;
        r.ovf = v.ovf || !v.c.empty();
        return r;
    }
    Vec t_apply(const Vec &v) const { return T.apply(v); }

    int max_degree_of(const Vec &v) const {
        int d = 0;
        for (const auto &[i, x] : v.c) d = std::max(d, degree(i));
        return d;
    }

    std::string vec_str(const Vec &v) const {
        std::ostringstream os;
        bool first = true;
        for (const auto &[i, x] : v.c) {
            os << (first ? "" : " + ") << "(" << x.str() << ")*" << name(i);
            first = false;
        }
        if (first) os << "0";
        if (v.ovf) os << " [+overflow]";
        return os.str();
    }
};

// Substitute param := tcoef*T + shift into a Vec-valued polynomial; the T
// powers act on the coefficient vectors, scalar parameters commute through.
inline VecPoly subst_affine_T(const VecPoly &p, int param, const Rat &tcoef,
                              const ScalarPoly &shift, const Module &V) {
    VecPoly r(p.cap());
    if (p.clipped()) r.mark_clipped();
    for (const auto &[m, v] : p.terms()) {
        int k = m[static_cast<size_t>(param)];
        Mono base = m;
        base[static_cast<size_t>(param)] = 0;
        // (tcoef*T + shift)^k = sum_j C(k,j) tcoef^j T^j shift^(k-j)
        for (int j = 0; j <= k; ++j) {
            Rat cj = binomial(k, j) * factorial(j); // C(k,j) * j!  (T^j = j! * T^(j))
            Rat tj = 1;
            for (int t = 0; t < j; ++t) tj *= tcoef;
            Vec tv = mul(V.t_divpow(j, v), cj * tj);
            if (is_zero(tv) && !tv.ovf) continue;
            ScalarPoly sp = ScalarPoly::constant(p.cap(), HSeries::one(V.h_order));
            for (int t = 0; t < k - j; ++t) sp = mul(sp, shift);
            VecPoly term = mul(sp, tv);
            for (const auto &[tm, tvv] : term.terms()) {
                Mono m2;
                bool ok = true;
                for (int q = 0; q < NPARAMS; ++q) {
                    int s = base[static_cast<size_t>(q)] + tm[static_cast<size_t>(q)];
                    if (s > 255) ok = false;
                    m2[static_cast<size_t>(q)] = static_cast<uint8_t>(s);
                }
                if (!ok) throw ConfigError("subst_affine_T: exponent overflow");
                r.add_term(m2, tvv);
            }
            if (term.clipped()) r.mark_clipped();
        }
    }
    return r;
}

// Value-level operator-bounded integral: antiderivative in `param`, then the
// upper bound tcoef*T + shift substituted with T acting on coefficient values.
inline VecPoly integral_op_bound(const VecPoly &p, int param, const Rat &tcoef,
                                 const ScalarPoly &shift, const Module &V) {
    return subst_affine_T(p.antiderivative(param), param, tcoef, shift, V);
}

} // namespace qca
