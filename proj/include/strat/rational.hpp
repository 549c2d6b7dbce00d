#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace strat {

// Exact coefficient arithmetic. cpp_rational keeps the canonical form we
// rely on everywhere: denominator > 0, gcd(|num|, den) = 1, zero is 0/1.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) return Rational(-num, -den);
    return Rational(num, den);
}

// Exact dyadic rational from a double (every finite double is one).
inline Rational rational_from_double(double x) {
    if (x != x || x - x != 0.0) throw std::invalid_argument("non-finite value");
    if (x == 0.0) return Rational(0);
    bool neg = x < 0;
    if (neg) x = -x;
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, mant in [0.5, 1)
    BigInt num = 0;
    for (int i = 0; i < 64 && mant != 0.0; ++i) {
        mant *= 2.0;
        int bit = static_cast<int>(mant);
        num = (num << 1) | bit;
        mant -= bit;
        --exp;
    }
    Rational r(num);
    if (exp > 0) {
        r *= Rational(BigInt(1) << exp);
    } else if (exp < 0) {
        r /= Rational(BigInt(1) << (-exp));
    }
    return neg ? Rational(-r) : r;
}

inline std::string rational_to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

}  // namespace strat
