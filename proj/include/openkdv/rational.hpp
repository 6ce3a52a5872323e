#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace okdv {

// Arbitrary-precision rational, always stored in lowest terms with a
// positive denominator (cpp_rational maintains both invariants).
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
    return Rational(Integer(num), Integer(den));
}

// Serializes as "p/q", or just "p" when q = 1.
inline std::string rat_str(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Integer factorial(int n) {
    Integer f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// n!! with the conventions (-1)!! = 0!! = 1.
inline Integer double_factorial(int n) {
    Integer f = 1;
    for (int i = n; i >= 2; i -= 2) f *= i;
    return f;
}

// Binomial coefficient C(n, k) for possibly negative integer n, k >= 0:
// n(n-1)...(n-k+1)/k!.
inline Rational binomial(int n, int k) {
    if (k < 0) return 0;
    Integer num = 1;
    for (int i = 0; i < k; ++i) num *= (n - i);
    return Rational(num, factorial(k));
}

} // namespace okdv
