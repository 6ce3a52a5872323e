#pragma once

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "diffpoly.hpp"
#include "errors.hpp"

namespace okdv {

/// Truncation control for series in t_0..t_M, s_0..s_K. K = -1 means no s
/// variables at all; D bounds the total degree across all couplings.
struct Window {
    int M = 5;
    int K = 0;
    int D = 8;

    int nvars() const { return M + 1 + K + 1; }
    int t_index(int n) const { return n; }
    int s_index(int k) const { return M + 1 + k; }

    bool valid() const { return M >= 1 && D >= 1 && K >= -1; }
    bool operator==(const Window&) const = default;
};

using MultiIndex = std::vector<int>;

inline int mi_degree(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

/// Truncated multivariate power series over u-Laurent coefficients.
class TSeries {
public:
    using Coeffs = std::map<MultiIndex, ULaurent>;

    TSeries() = default;
    explicit TSeries(const Window& w) : win_(w) {}
    TSeries(const Window& w, const ULaurent& c) : win_(w) {
        if (!c.is_zero()) coeffs_[MultiIndex(w.nvars(), 0)] = c;
    }

    const Window& window() const { return win_; }
    const Coeffs& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    ULaurent coeff(const MultiIndex& a) const {
        auto it = coeffs_.find(a);
        return it == coeffs_.end() ? ULaurent() : it->second;
    }

    void set_coeff(const MultiIndex& a, const ULaurent& c) {
        if ((int)a.size() != win_.nvars())
            throw ConfigError("TSeries: multi-index arity mismatch");
        if (mi_degree(a) > win_.D) return;
        if (c.is_zero()) coeffs_.erase(a);
        else coeffs_[a] = c;
    }

    void add_coeff(const MultiIndex& a, const ULaurent& c) {
        if (mi_degree(a) > win_.D || c.is_zero()) return;
        auto it = coeffs_.find(a);
        if (it == coeffs_.end()) {
            coeffs_[a] = c;
        } else {
            it->second += c;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }

    /// The monomial c * (variable var)^1.
    static TSeries var(const Window& w, int var_index, const ULaurent& c = ULaurent(1)) {
        TSeries r(w);
        MultiIndex a(w.nvars(), 0);
        a[var_index] = 1;
        r.set_coeff(a, c);
        return r;
    }

    TSeries& operator+=(const TSeries& o) {
        check_window(o);
        for (const auto& [a, c] : o.coeffs_) add_coeff(a, c);
        return *this;
    }
    TSeries& operator-=(const TSeries& o) {
        check_window(o);
        for (const auto& [a, c] : o.coeffs_) add_coeff(a, -c);
        return *this;
    }
    friend TSeries operator+(TSeries a, const TSeries& b) { return a += b; }
    friend TSeries operator-(TSeries a, const TSeries& b) { return a -= b; }

    TSeries operator-() const {
        TSeries r(win_);
        for (const auto& [a, c] : coeffs_) r.coeffs_[a] = -c;
        return r;
    }

    friend TSeries operator*(const ULaurent& s, const TSeries& x) {
        TSeries r(x.win_);
        for (const auto& [a, c] : x.coeffs_) r.add_coeff(a, s * c);
        return r;
    }
    friend TSeries operator*(const Rational& s, const TSeries& x) {
        return ULaurent(s) * x;
    }

    friend TSeries operator*(const TSeries& x, const TSeries& y) {
        x.check_window(y);
        TSeries r(x.win_);
        int D = x.win_.D;
        for (const auto& [a, ca] : x.coeffs_) {
            int da = mi_degree(a);
            for (const auto& [b, cb] : y.coeffs_) {
                if (da + mi_degree(b) > D) continue;
                MultiIndex s(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
                r.add_coeff(s, ca * cb);
            }
        }
        return r;
    }
    TSeries& operator*=(const TSeries& o) { return *this = *this * o; }

    bool operator==(const TSeries& o) const {
        return win_ == o.win_ && coeffs_ == o.coeffs_;
    }
    bool operator!=(const TSeries& o) const { return !(*this == o); }

    /// Partial derivative with respect to variable var_index.
    TSeries derivative(int var_index) const {
        TSeries r(win_);
        for (const auto& [a, c] : coeffs_) {
            if (a[var_index] == 0) continue;
            MultiIndex b = a;
            --b[var_index];
            r.add_coeff(b, Rational(a[var_index]) * c);
        }
        return r;
    }

    /// Set one variable to zero (keep only terms free of it).
    TSeries restrict_zero(int var_index) const {
        TSeries r(win_);
        for (const auto& [a, c] : coeffs_)
            if (a[var_index] == 0) r.coeffs_[a] = c;
        return r;
    }

    ULaurent constant_term() const { return coeff(MultiIndex(win_.nvars(), 0)); }

    /// Truncated exponential; requires zero constant term.
    TSeries exp() const {
        if (!constant_term().is_zero())
            throw ExpOnUnitFull("exp: nonzero constant term");
        TSeries r(win_, ULaurent(1));
        TSeries power(win_, ULaurent(1));
        Rational fact(1);
        for (int k = 1; k <= win_.D; ++k) {
            power *= *this;
            if (power.is_zero()) break;
            fact *= k;
            r += Rational(1) / fact * power;
        }
        return r;
    }

    /// Drop all coefficients outside (max t-index <= tmax, degree <= dmax);
    /// used to restrict identities to their trust window.
    TSeries trust(int tmax, int dmax) const {
        TSeries r(win_);
        for (const auto& [a, c] : coeffs_) {
            if (mi_degree(a) > dmax) continue;
            bool high = false;
            for (int n = tmax + 1; n <= win_.M; ++n)
                if (a[win_.t_index(n)] > 0) high = true;
            if (!high) r.coeffs_[a] = c;
        }
        return r;
    }

    std::string var_name(int i) const {
        return i <= win_.M ? "t" + std::to_string(i)
                           : "s" + std::to_string(i - win_.M - 1);
    }

    std::string str() const {
        if (coeffs_.empty()) return "0";
        std::string out;
        for (const auto& [a, c] : coeffs_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")";
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] == 0) continue;
                out += "*" + var_name((int)i);
                if (a[i] != 1) out += "^" + std::to_string(a[i]);
            }
        }
        return out;
    }

private:
    void check_window(const TSeries& o) const {
        if (!(win_ == o.win_))
            throw ConfigError("TSeries: window mismatch");
    }

    Window win_;
    Coeffs coeffs_;
};

/// Substitute v_j -> d^j/dt_0^j v_series, w_j -> d^j/dt_0^j w_series and
/// x -> t_0 into a differential polynomial.
inline TSeries jet_eval(const DiffPoly& p, const TSeries& vs, const TSeries& ws) {
    const Window& w = vs.window();
    int mo = p.max_order();
    std::vector<TSeries> dv{vs}, dw{ws};
    for (int j = 1; j <= mo; ++j) {
        dv.push_back(dv.back().derivative(w.t_index(0)));
        dw.push_back(dw.back().derivative(w.t_index(0)));
    }
    TSeries t0 = TSeries::var(w, w.t_index(0));
    TSeries r(w);
    for (const auto& [m, c] : p.terms()) {
        TSeries term(w, c);
        for (const auto& [var, e] : m.factors) {
            const TSeries& base = var.family == Family::X ? t0
                                : var.family == Family::V ? dv[var.order]
                                                          : dw[var.order];
            for (int i = 0; i < e; ++i) term *= base;
        }
        r += term;
    }
    return r;
}

/// The t_0-degree-0 slice of jet_eval(p, vs, ws), computed without ever
/// forming the higher t_0-degrees: slicing each substituted jet first is
/// exact because a product coefficient at t_0-degree 0 only involves factor
/// coefficients at t_0-degree 0.
inline TSeries jet_eval_t0slice(const DiffPoly& p, const TSeries& vs,
                                const TSeries& ws) {
    const Window& w = vs.window();
    int mo = p.max_order();
    std::vector<TSeries> dv, dw;
    dv.push_back(vs.restrict_zero(w.t_index(0)));
    dw.push_back(ws.restrict_zero(w.t_index(0)));
    TSeries cv = vs, cw = ws;
    for (int j = 1; j <= mo; ++j) {
        cv = cv.derivative(w.t_index(0));
        cw = cw.derivative(w.t_index(0));
        dv.push_back(cv.restrict_zero(w.t_index(0)));
        dw.push_back(cw.restrict_zero(w.t_index(0)));
    }
    TSeries r(w);
    for (const auto& [m, c] : p.terms()) {
        if (m.exponent(xvar()) > 0) continue; // x maps to t_0: slice is zero
        TSeries term(w, c);
        for (const auto& [var, e] : m.factors) {
            const TSeries& base = var.family == Family::V ? dv[var.order]
                                                          : dw[var.order];
            for (int i = 0; i < e; ++i) term *= base;
            if (term.is_zero()) break;
        }
        r += term;
    }
    return r;
}

} // namespace okdv
