#pragma once

#include <map>
#include <string>
#include <utility>

#include "errors.hpp"
#include "rational.hpp"

namespace okdv {

/// Laurent polynomial in the coupling u with rational coefficients.
/// The universal scalar of the whole engine. Immutable value semantics;
/// no zero coefficients are ever stored.
class ULaurent {
public:
    using Terms = std::map<int, Rational>;

    ULaurent() = default;

    ULaurent(const Rational& c, int exp = 0) {
        if (c != 0) terms_[exp] = c;
    }

    ULaurent(long long c) : ULaurent(Rational(c)) {}

    /// The monomial u^exp.
    static ULaurent u(int exp) { return ULaurent(Rational(1), exp); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_monomial() const { return terms_.size() == 1; }

    /// Coefficient of u^exp (zero if absent).
    Rational coeff(int exp) const {
        auto it = terms_.find(exp);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    ULaurent& operator+=(const ULaurent& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    ULaurent& operator-=(const ULaurent& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend ULaurent operator+(ULaurent a, const ULaurent& b) { return a += b; }
    friend ULaurent operator-(ULaurent a, const ULaurent& b) { return a -= b; }

    friend ULaurent operator*(const ULaurent& a, const ULaurent& b) {
        ULaurent r;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
        return r;
    }
    ULaurent& operator*=(const ULaurent& o) { return *this = *this * o; }

    ULaurent operator-() const {
        ULaurent r;
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    friend ULaurent operator*(const Rational& s, const ULaurent& a) {
        ULaurent r;
        if (s == 0) return r;
        for (const auto& [e, c] : a.terms_) r.terms_[e] = s * c;
        return r;
    }

    /// Integer power. A negative exponent is only defined for monomials.
    ULaurent pow(int n) const {
        if (n < 0) {
            if (!is_monomial())
                throw UnsupportedInverse("negative power of a non-monomial u-Laurent");
            const auto& [e, c] = *terms_.begin();
            ULaurent base(Rational(1) / c, -e);
            return base.pow(-n);
        }
        ULaurent r(Rational(1));
        ULaurent base = *this;
        while (n > 0) {
            if (n & 1) r *= base;
            base *= base;
            n >>= 1;
        }
        return r;
    }

    bool operator==(const ULaurent& o) const { return terms_ == o.terms_; }
    bool operator!=(const ULaurent& o) const { return !(*this == o); }

    /// "1/2*u^-1 + 3 + 2*u^2"; empty polynomial prints "0".
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            if (!s.empty()) s += " + ";
            if (e == 0) {
                s += rat_str(c);
            } else {
                s += rat_str(c) + "*u^" + std::to_string(e);
            }
        }
        return s;
    }

private:
    void add_term(int e, const Rational& c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (c != 0) terms_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Terms terms_;
};

} // namespace okdv
