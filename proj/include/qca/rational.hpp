#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace qca {

using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rat &r) { return sgn(r) == 0; }

inline Rat factorial(int k) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
    return Rat(f);
}

// Generalized binomial n(n-1)...(n-l+1)/l!, valid for any integer n and l >= 0.
inline Rat binomial(long n, int l) {
    Rat num = 1;
    for (int i = 0; i < l; ++i) num *= Rat(n - i);
    return num / factorial(l);
}

inline std::string to_string(const Rat &r) { return r.get_str(); }

} // namespace qca
