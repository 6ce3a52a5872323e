#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ulaurent.hpp"

namespace okdv {

enum class Family : int { V = 0, W = 1, X = 2 };

/// A jet variable v_j, w_j, or the adjoined spatial variable x
/// (family X admits only order 0).
struct JetVar {
    Family family;
    int order;

    auto operator<=>(const JetVar&) const = default;

    std::string str() const {
        switch (family) {
            case Family::V: return "v" + std::to_string(order);
            case Family::W: return "w" + std::to_string(order);
            default: return "x";
        }
    }
};

inline JetVar vjet(int j) { return {Family::V, j}; }
inline JetVar wjet(int j) { return {Family::W, j}; }
inline JetVar xvar() { return {Family::X, 0}; }

/// Monomial in jet variables: sorted (var, exponent) pairs, exponents > 0.
struct Monomial {
    std::vector<std::pair<JetVar, int>> factors;

    auto operator<=>(const Monomial&) const = default;

    bool empty() const { return factors.empty(); }

    int exponent(JetVar v) const {
        for (const auto& [var, e] : factors)
            if (var == v) return e;
        return 0;
    }

    Monomial times(JetVar v, int e) const {
        Monomial m = *this;
        for (std::size_t i = 0; i < m.factors.size(); ++i) {
            if (m.factors[i].first == v) {
                m.factors[i].second += e;
                if (m.factors[i].second == 0)
                    m.factors.erase(m.factors.begin() + static_cast<long>(i));
                return m;
            }
        }
        if (e != 0) {
            m.factors.push_back({v, e});
            std::sort(m.factors.begin(), m.factors.end());
        }
        return m;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [var, e] : factors) d += e;
        return d;
    }

    std::string str() const {
        std::string s;
        for (const auto& [var, e] : factors) {
            if (!s.empty()) s += "*";
            s += var.str();
            if (e != 1) s += "^" + std::to_string(e);
        }
        return s;
    }
};

/// Element of the differential-polynomial ring in the jets of v and w with x
/// adjoined, over u-Laurent coefficients. Immutable value semantics; the zero
/// polynomial is the empty term map, so equality checks are structural.
class DiffPoly {
public:
    using Terms = std::map<Monomial, ULaurent>;

    DiffPoly() = default;
    DiffPoly(const ULaurent& c) {
        if (!c.is_zero()) terms_[Monomial{}] = c;
    }
    DiffPoly(long long c) : DiffPoly(ULaurent(c)) {}

    static DiffPoly var(JetVar v) {
        DiffPoly p;
        p.terms_[Monomial{}.times(v, 1)] = ULaurent(1);
        return p;
    }
    static DiffPoly term(const Monomial& m, const ULaurent& c) {
        DiffPoly p;
        if (!c.is_zero()) p.terms_[m] = c;
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    DiffPoly& operator+=(const DiffPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    DiffPoly& operator-=(const DiffPoly& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }

    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
        DiffPoly r;
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m = ma;
                for (const auto& [var, e] : mb.factors) m = m.times(var, e);
                r.add_term(m, ca * cb);
            }
        }
        return r;
    }
    DiffPoly& operator*=(const DiffPoly& o) { return *this = *this * o; }

    DiffPoly operator-() const {
        DiffPoly r;
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    friend DiffPoly operator*(const ULaurent& s, const DiffPoly& a) {
        DiffPoly r;
        for (const auto& [m, c] : a.terms_) r.add_term(m, s * c);
        return r;
    }
    friend DiffPoly operator*(const Rational& s, const DiffPoly& a) {
        return ULaurent(s) * a;
    }

    DiffPoly pow(int n) const {
        DiffPoly r(1);
        for (int i = 0; i < n; ++i) r *= *this;
        return r;
    }

    bool operator==(const DiffPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const DiffPoly& o) const { return !(*this == o); }

    /// Partial derivative with respect to a single jet variable (or x).
    DiffPoly partial(JetVar v) const {
        DiffPoly r;
        for (const auto& [m, c] : terms_) {
            int e = m.exponent(v);
            if (e == 0) continue;
            r.add_term(m.times(v, -1), Rational(e) * c);
        }
        return r;
    }

    /// Total x-derivative: jets (F, j) -> (F, j+1) by Leibniz, and d(x)/dx = 1.
    DiffPoly dx() const {
        DiffPoly r;
        for (const auto& [m, c] : terms_) {
            for (const auto& [var, e] : m.factors) {
                Monomial md = m.times(var, -1);
                if (var.family != Family::X) md = md.times({var.family, var.order + 1}, 1);
                r.add_term(md, Rational(e) * c);
            }
        }
        return r;
    }

    DiffPoly dx(int n) const {
        DiffPoly r = *this;
        for (int i = 0; i < n; ++i) r = r.dx();
        return r;
    }

    /// Substitute zero for every jet of the given family (e.g. w_* = 0).
    DiffPoly set_family_zero(Family f) const {
        DiffPoly r;
        for (const auto& [m, c] : terms_) {
            bool has = false;
            for (const auto& [var, e] : m.factors)
                if (var.family == f) { has = true; break; }
            if (!has) r.add_term(m, c);
        }
        return r;
    }

    bool depends_on(Family f) const {
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m.factors)
                if (var.family == f) return true;
        return false;
    }

    /// Highest jet order among V/W jets, or -1 if none appear.
    int max_order() const {
        int mo = -1;
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m.factors)
                if (var.family != Family::X) mo = std::max(mo, var.order);
        return mo;
    }

    /// Highest power of x, or 0 if x does not appear.
    int x_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(xvar()));
        return d;
    }

    /// Every jet variable (not x) appearing in the polynomial.
    std::vector<JetVar> jet_vars() const {
        std::vector<JetVar> vs;
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m.factors)
                if (var.family != Family::X &&
                    std::find(vs.begin(), vs.end(), var) == vs.end())
                    vs.push_back(var);
        std::sort(vs.begin(), vs.end());
        return vs;
    }

    /// "(c)*mono + (c)*mono + ..." with canonically ordered monomials.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [m, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += "(" + c.str() + ")";
            if (!m.empty()) s += "*" + m.str();
        }
        return s;
    }

private:
    void add_term(const Monomial& m, const ULaurent& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Terms terms_;
};

} // namespace okdv
