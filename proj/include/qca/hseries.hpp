#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "qca/errors.hpp"
#include "qca/rational.hpp"

namespace qca {

// Truncated power series in the deformation variable h over exact rationals.
// Coefficients at h^j for j >= order are identified with zero; every
// operation truncates, so ring laws hold exactly on the stored window.
class HSeries {
  public:
    HSeries() : order_(1), c_(1) {}
    explicit HSeries(int order) : order_(order), c_(static_cast<size_t>(order)) {
        if (order < 1) throw ConfigError("HSeries: h-order must be >= 1");
    }
    HSeries(int order, const Rat &constant) : HSeries(order) { c_[0] = constant; }

    static HSeries zero(int order) { return HSeries(order); }
    static HSeries one(int order) { return HSeries(order, Rat(1)); }
    // c * h^k, zero if k is at or above the truncation order.
    static HSeries h_power(int order, int k, const Rat &c = Rat(1)) {
        HSeries s(order);
        if (k >= 0 && k < order) s.c_[static_cast<size_t>(k)] = c;
        return s;
    }

    int order() const { return order_; }
    const Rat &coeff(int j) const {
        static const Rat kZero{0};
        if (j < 0 || j >= order_) return kZero;
        return c_[static_cast<size_t>(j)];
    }
    void set_coeff(int j, const Rat &v) {
        if (j >= 0 && j < order_) c_[static_cast<size_t>(j)] = v;
    }

    bool is_zero() const {
        for (const Rat &x : c_)
            if (sgn(x) != 0) return false;
        return true;
    }
    // Zero modulo h^m (m <= order).
    bool is_zero_mod(int m) const {
        for (int j = 0; j < m && j < order_; ++j)
            if (sgn(c_[static_cast<size_t>(j)]) != 0) return false;
        return true;
    }

    const Rat &constant_term() const { return c_[0]; }

    HSeries &operator+=(const HSeries &o) {
        check(o);
        for (int j = 0; j < order_; ++j) c_[j] += o.c_[j];
        return *this;
    }
    HSeries &operator-=(const HSeries &o) {
        check(o);
        for (int j = 0; j < order_; ++j) c_[j] -= o.c_[j];
        return *this;
    }
    friend HSeries operator+(HSeries a, const HSeries &b) { return a += b; }
    friend HSeries operator-(HSeries a, const HSeries &b) { return a -= b; }
    friend HSeries operator-(const HSeries &a) {
        HSeries r(a.order_);
        for (int j = 0; j < a.order_; ++j) r.c_[j] = -a.c_[j];
        return r;
    }
    friend HSeries operator*(const HSeries &a, const HSeries &b) {
        a.check(b);
        HSeries r(a.order_);
        for (int i = 0; i < a.order_; ++i) {
            if (sgn(a.c_[i]) == 0) continue;
            for (int j = 0; i + j < a.order_; ++j) {
                if (sgn(b.c_[j]) == 0) continue;
                r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }
    friend HSeries operator*(const Rat &s, const HSeries &a) {
        HSeries r(a.order_);
        for (int j = 0; j < a.order_; ++j) r.c_[j] = s * a.c_[j];
        return r;
    }
    friend HSeries operator*(const HSeries &a, const Rat &s) { return s * a; }
    HSeries &operator*=(const HSeries &o) { return *this = *this * o; }
    HSeries &operator*=(const Rat &s) { return *this = s * *this; }

    friend bool operator==(const HSeries &a, const HSeries &b) {
        a.check(b);
        return a.c_ == b.c_;
    }
    friend bool operator!=(const HSeries &a, const HSeries &b) { return !(a == b); }

    // Re-truncation to a lower order (projection K[h]/h^M -> K[h]/h^m).
    HSeries truncated(int m) const {
        HSeries r(m);
        for (int j = 0; j < m && j < order_; ++j) r.c_[j] = c_[j];
        return r;
    }

    // Multiplicative inverse, defined when the h^0 coefficient is nonzero.
    HSeries inverse() const {
        if (sgn(c_[0]) == 0)
            throw UnsupportedError("HSeries::inverse: constant term is zero");
        HSeries r(order_);
        r.c_[0] = 1 / c_[0];
        for (int j = 1; j < order_; ++j) {
            Rat acc{0};
            for (int i = 1; i <= j; ++i) acc += c_[i] * r.c_[j - i];
            r.c_[j] = -acc / c_[0];
        }
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (int j = 0; j < order_; ++j) {
            if (sgn(c_[j]) == 0) continue;
            if (!first) os << " + ";
            first = false;
            os << c_[j].get_str();
            if (j == 1) os << "*h";
            if (j > 1) os << "*h^" << j;
        }
        if (first) os << "0";
        return os.str();
    }

  private:
    void check(const HSeries &o) const {
        if (order_ != o.order_)
            throw ConfigError("HSeries: mixed h-orders " + std::to_string(order_) + " and " +
                              std::to_string(o.order_));
    }
    int order_;
    std::vector<Rat> c_;
};

inline bool is_zero(const HSeries &s) { return s.is_zero(); }
inline std::string to_string(const HSeries &s) { return s.str(); }

} // namespace qca
