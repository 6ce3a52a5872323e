#pragma once

#include <string>
#include <vector>

#include "report.hpp"
#include "tseries.hpp"

namespace okdv {

enum class VirasoroKind { Closed, Open };

struct VirasoroOp {
    int n = -1;
    VirasoroKind kind = VirasoroKind::Closed;
};

/// (2i+2n+1)!! / (2^{n+1} (2i-1)!!), the first-derivative coefficients.
inline Rational virasoro_c(int i, int n) {
    return Rational(double_factorial(2 * i + 2 * n + 1),
                    (Integer(1) << (n + 1)) * double_factorial(2 * i - 1));
}

/// a_{i,j} = (2i+1)!!(2j+1)!!/2^{i+j+2}, the second-derivative coefficients.
inline Rational virasoro_a(int i, int j) {
    return Rational(double_factorial(2 * i + 1) * double_factorial(2 * j + 1),
                    Integer(1) << (i + j + 2));
}

/// B_0..B_kmax with B_0 = 1, B_{k+1} = dB_k/ds + F_s B_k, so that
/// B_k = (d^k/ds^k e^F) / e^F.
inline std::vector<TSeries> bell_s(const TSeries& F, int kmax) {
    const Window& w = F.window();
    if (w.K < 0) throw ConfigError("bell_s: series has no s variable");
    TSeries Fs = F.derivative(w.s_index(0));
    std::vector<TSeries> B{TSeries(w, ULaurent(1))};
    for (int k = 0; k < kmax; ++k)
        B.push_back(B.back().derivative(w.s_index(0)) + Fs * B.back());
    return B;
}

/// Re-window a closed-potential series onto a window that carries s slots.
inline TSeries lift_closed(const TSeries& Fc, const Window& target) {
    const Window& w = Fc.window();
    if (w.M != target.M || w.D > target.D)
        throw ConfigError("lift_closed: incompatible windows");
    TSeries r(target);
    for (const auto& [a, c] : Fc.coeffs()) {
        MultiIndex b(target.nvars(), 0);
        for (int i = 0; i <= w.M; ++i) b[i] = a[i];
        r.set_coeff(b, c);
    }
    return r;
}

/// (Op e^F)/e^F by direct derivative expansion: first-derivative transport
/// terms, u^2/2 quadratic terms F_{ij} + F_i F_j, the affine pieces for
/// n = -1, 0, and for the open kind the s-derivative Bell combinations.
inline TSeries apply_to_exp(const VirasoroOp& op, const TSeries& F) {
    if (op.n < -1) throw ConfigError("apply_to_exp: n must be >= -1");
    const Window& w = F.window();
    // the dilaton shift contributes -c(1,n) dF/dt_{n+1} with no t-monomial
    // attached, so the residual is only computable when t_{n+1} is in window
    if (op.n + 1 > w.M)
        throw ConfigError("apply_to_exp: window too small for operator index");
    const int n = op.n;
    TSeries r(w);
    for (int i = std::max(0, -n); i <= w.M && i + n <= w.M; ++i) {
        TSeries d = F.derivative(w.t_index(i + n));
        TSeries term = TSeries::var(w, w.t_index(i)) * d;
        if (i == 1) term -= d;
        r += virasoro_c(i, n) * term;
    }
    for (int i = 0; i <= n - 1; ++i) {
        int j = n - 1 - i;
        TSeries Fi = F.derivative(w.t_index(i));
        TSeries Fj = F.derivative(w.t_index(j));
        r += ULaurent(virasoro_a(i, j) / 2, 2) * (Fi.derivative(w.t_index(j)) + Fi * Fj);
    }
    if (n == -1) {
        TSeries t0 = TSeries::var(w, w.t_index(0));
        r += ULaurent(rat(1, 2), -2) * t0 * t0;
    }
    if (n == 0) r += TSeries(w, ULaurent(rat(1, 16)));
    if (op.kind == VirasoroKind::Open) {
        auto B = bell_s(F, n + 1);
        TSeries open = TSeries::var(w, w.s_index(0)) * B[n + 1];
        if (n >= 0) open += Rational(3 * n + 3, 4) * B[n];
        r += ULaurent::u(n) * open;
    }
    return r;
}

/// The operator applied literally to a series (not divided by it); used to
/// cross-check apply_to_exp and to verify the commutation relations.
inline TSeries apply_direct(const VirasoroOp& op, const TSeries& G) {
    if (op.n < -1) throw ConfigError("apply_direct: n must be >= -1");
    const Window& w = G.window();
    const int n = op.n;
    TSeries r(w);
    for (int i = std::max(0, -n); i <= w.M && i + n <= w.M; ++i) {
        TSeries d = G.derivative(w.t_index(i + n));
        TSeries term = TSeries::var(w, w.t_index(i)) * d;
        if (i == 1) term -= d;
        r += virasoro_c(i, n) * term;
    }
    for (int i = 0; i <= n - 1; ++i) {
        int j = n - 1 - i;
        r += ULaurent(virasoro_a(i, j) / 2, 2)
           * G.derivative(w.t_index(i)).derivative(w.t_index(j));
    }
    if (n == -1) {
        TSeries t0 = TSeries::var(w, w.t_index(0));
        r += ULaurent(rat(1, 2), -2) * t0 * t0 * G;
    }
    if (n == 0) r += Rational(1, 16) * G;
    if (op.kind == VirasoroKind::Open) {
        if (w.K < 0) throw ConfigError("apply_direct: open operator needs an s slot");
        TSeries ds = G;
        for (int k = 0; k <= n; ++k) ds = ds.derivative(w.s_index(0));
        TSeries open = TSeries::var(w, w.s_index(0)) * ds;
        if (n >= 0) {
            TSeries dn = G;
            for (int k = 0; k < n; ++k) dn = dn.derivative(w.s_index(0));
            open += Rational(3 * n + 3, 4) * dn;
        }
        r += ULaurent::u(n) * open;
    }
    return r;
}

/// Trust window of one operator application: derivatives by t_{i+n} push the
/// reliable top index down by n, and the quadratic/s-derivative terms cost
/// max(2, n+1) degrees.
inline std::pair<int, int> virasoro_trust(const VirasoroOp& op, const Window& w) {
    return {w.M - std::max(op.n, 0), w.D - std::max(2, op.n + 1)};
}

/// [Op_n, Op_m] = (n-m) Op_{n+m}, checked on the truncated exponential of an
/// arbitrary test exponent.
inline bool verify_commutation(int n, int m, VirasoroKind kind, const TSeries& testF) {
    if (n < -1 || m < -1 || n + m < -1)
        throw ConfigError("verify_commutation: indices out of range");
    const Window& w = testF.window();
    TSeries E = testF.exp();
    VirasoroOp on{n, kind}, om{m, kind}, onm{n + m, kind};
    TSeries lhs = apply_direct(on, apply_direct(om, E))
                - apply_direct(om, apply_direct(on, E))
                - Rational(n - m) * apply_direct(onm, E);
    int tmax = w.M - std::max(n, 0) - std::max(m, 0);
    int dmax = w.D - std::max(2, n + 1) - std::max(2, m + 1);
    return lhs.trust(tmax, dmax).is_zero();
}

namespace detail {

inline std::string first_monomial(const TSeries& r) {
    if (r.is_zero()) return "";
    const auto& [a, c] = *r.coeffs().begin();
    std::string out = "(" + c.str() + ")";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        out += "*" + r.var_name((int)i);
        if (a[i] != 1) out += "^" + std::to_string(a[i]);
    }
    return out;
}

} // namespace detail

/// Open Virasoro residuals (Op_n e^{F^o+F^c})/e^{F^o+F^c} for n = -1..max_n.
inline Report verify_open_virasoro(int max_n, const TSeries& Fo, const TSeries& Fc) {
    TSeries F = Fo + lift_closed(Fc, Fo.window());
    Report rep;
    for (int n = -1; n <= max_n; ++n) {
        VirasoroOp op{n, VirasoroKind::Open};
        auto [tmax, dmax] = virasoro_trust(op, F.window());
        TSeries res = apply_to_exp(op, F).trust(tmax, dmax);
        rep.checks.push_back({"open virasoro n=" + std::to_string(n), res.is_zero(),
                              detail::first_monomial(res)});
    }
    return rep;
}

/// (2n+1)/2 F^o_n - u F^o_s F^o_{n-1} - u F^o_{s,n-1} - (u^2/2) F^o_0 F^c_{0,n-1}
/// + (u^2/4) F^c_{0,0,n-1}, trusted at degree D-3.
inline TSeries open_kdv_residual(int n, const TSeries& Fo, const TSeries& Fc) {
    const Window& w = Fo.window();
    if (n < 1 || n > w.M) throw ConfigError("open_kdv_residual: index out of range");
    TSeries FcL = lift_closed(Fc, w);
    int t0 = w.t_index(0), s = w.s_index(0);
    TSeries Fon1 = Fo.derivative(w.t_index(n - 1));
    TSeries Fc0n1 = FcL.derivative(t0).derivative(w.t_index(n - 1));
    TSeries res = Rational(2 * n + 1, 2) * Fo.derivative(w.t_index(n));
    res -= ULaurent::u(1) * (Fo.derivative(s) * Fon1);
    res -= ULaurent::u(1) * Fon1.derivative(s);
    res -= ULaurent(rat(1, 2), 2) * (Fo.derivative(t0) * Fc0n1);
    res += ULaurent(rat(1, 4), 2) * Fc0n1.derivative(t0);
    return res.trust(w.M, w.D - 3);
}

/// F^o_s - u(1/2 (F^o_0)^2 + 1/2 F^o_{00} + F^c_{00}), trusted at degree D-2.
inline TSeries s_string_residual(const TSeries& Fo, const TSeries& Fc) {
    const Window& w = Fo.window();
    int t0 = w.t_index(0);
    TSeries Fo0 = Fo.derivative(t0);
    TSeries res = Fo.derivative(w.s_index(0));
    res -= ULaurent(rat(1, 2), 1) * (Fo0 * Fo0);
    res -= ULaurent(rat(1, 2), 1) * Fo0.derivative(t0);
    res -= ULaurent::u(1) * lift_closed(Fc, w).derivative(t0).derivative(t0);
    return res.trust(w.M, w.D - 2);
}

/// Point 1 of the recursion lemma:
/// (L_0 tau)/tau - (u F^o_s + u d/ds)(L_{-1} tau)/tau = 0.
inline bool lemma51_point1(const TSeries& Fo, const TSeries& Fc) {
    const Window& w = Fo.window();
    TSeries F = Fo + lift_closed(Fc, w);
    TSeries L0 = apply_to_exp({0, VirasoroKind::Open}, F);
    TSeries Lm1 = apply_to_exp({-1, VirasoroKind::Open}, F);
    int s = w.s_index(0);
    TSeries lhs = L0 - ULaurent::u(1) * (Fo.derivative(s) * Lm1 + Lm1.derivative(s));
    return lhs.trust(w.M, w.D - 3).is_zero();
}

/// Point 2 of the recursion lemma at index n >= 0: the difference
/// (L_{n+1} tau)/tau - (u F^o_s + u d/ds)(L_n tau)/tau equals the stated
/// combination of second derivatives, including -(u^{n+1}/4) d_s^{n+1}
/// tau^o / tau^o.
inline bool lemma51_point2(int n, const TSeries& Fo, const TSeries& Fc) {
    if (n < 0) throw ConfigError("lemma51_point2: n must be >= 0");
    const Window& w = Fo.window();
    if (n + 2 > w.M) throw ConfigError("lemma51_point2: window too small");
    int t0 = w.t_index(0), s = w.s_index(0);
    TSeries FcL = lift_closed(Fc, w);
    TSeries F = Fo + FcL;

    TSeries Ln1 = apply_to_exp({n + 1, VirasoroKind::Open}, F);
    TSeries Ln = apply_to_exp({n, VirasoroKind::Open}, F);
    TSeries lhs = Ln1 - ULaurent::u(1) * (Fo.derivative(s) * Ln + Ln.derivative(s));

    Rational lead(double_factorial(2 * n + 1), Integer(1) << n);
    TSeries rhs = ULaurent(lead / 4, 2) * FcL.derivative(t0).derivative(w.t_index(n));
    rhs += ULaurent(lead / 8, 2) * (Fo.derivative(w.t_index(n)) * Fo.derivative(t0));
    rhs += ULaurent(lead / 8, 2) * Fo.derivative(t0).derivative(w.t_index(n));
    for (int i = 0; i <= n - 1; ++i) {
        int j = n - 1 - i;
        Rational a = virasoro_a(i, j);
        TSeries Fc0i = FcL.derivative(t0).derivative(w.t_index(i));
        TSeries Fc0j = FcL.derivative(t0).derivative(w.t_index(j));
        rhs += ULaurent(a / 4, 4) * (Fc0i * Fc0j);
        // (u^2/2) F^o_i ((u^2/2) F^o_0 d_x - (u^2/4) d_x^2) F^c_j
        TSeries inner = ULaurent(rat(1, 2), 2) * (Fo.derivative(t0) * Fc0j)
                      - ULaurent(rat(1, 4), 2) * Fc0j.derivative(t0);
        rhs += ULaurent(a / 2, 2) * (Fo.derivative(w.t_index(i)) * inner);
        rhs += ULaurent(a / 4, 4) * (Fo.derivative(t0).derivative(w.t_index(i)) * Fc0j);
    }
    rhs -= ULaurent(rat(1, 4), n + 1) * bell_s(Fo, n + 1)[n + 1];

    int tmax = w.M - (n + 1), dmax = w.D - std::max(3, n + 2);
    return (lhs - rhs).trust(tmax, dmax).is_zero();
}

inline bool lemma51_check(int n, const TSeries& Fo, const TSeries& Fc) {
    return lemma51_point1(Fo, Fc) && lemma51_point2(n, Fo, Fc);
}

/// u^2 D d_x (L_n tau)/tau = d_x^2 (L_{n+1} tau)/tau on the closed potential,
/// with D = F_{00} d_x + (1/2) F_{000} + (1/8) d_x^3 and d_x = d/dt_0.
inline bool appendix_identity_check(int n, const TSeries& Fc) {
    if (n < -1) throw ConfigError("appendix_identity_check: n must be >= -1");
    const Window& w = Fc.window();
    if (n + 2 > w.M) throw ConfigError("appendix_identity_check: window too small");
    int t0 = w.t_index(0);
    TSeries w00 = Fc.derivative(t0).derivative(t0);
    TSeries w000 = w00.derivative(t0);
    auto Dop = [&](const TSeries& X) {
        return w00 * X.derivative(t0) + Rational(1, 2) * (w000 * X)
             + Rational(1, 8) * X.derivative(t0).derivative(t0).derivative(t0);
    };
    TSeries Ln = apply_to_exp({n, VirasoroKind::Closed}, Fc);
    TSeries Ln1 = apply_to_exp({n + 1, VirasoroKind::Closed}, Fc);
    TSeries lhs = ULaurent::u(2) * Dop(Ln.derivative(t0));
    TSeries rhs = Ln1.derivative(t0).derivative(t0);
    int tmax = w.M - (n + 1), dmax = w.D - std::max(2, n + 1) - 4;
    return (lhs - rhs).trust(tmax, dmax).is_zero();
}

} // namespace okdv
