#pragma once

#include "diffpoly.hpp"
#include "errors.hpp"

namespace okdv {

/// Variational derivative sum_j (-dx)^j (dp/dF_j) for family F in {V, W}.
/// Annihilates exactly the image of dx (pure-x terms contribute nothing).
inline DiffPoly euler_op(const DiffPoly& p, Family f) {
    DiffPoly r;
    int mo = p.max_order();
    for (int j = 0; j <= mo; ++j) {
        DiffPoly d = p.partial({f, j}).dx(j);
        if (j % 2 == 0) r += d;
        else r -= d;
    }
    return r;
}

/// True iff p = dx(q) for some q in the ring. With x adjoined every pure-x
/// polynomial is exact, so vanishing of both variational derivatives decides.
inline bool is_exact(const DiffPoly& p) {
    return euler_op(p, Family::V).is_zero() && euler_op(p, Family::W).is_zero();
}

namespace detail {

/// Antiderivative with respect to one variable, treating all other
/// variables as constants; integration constant zero.
inline DiffPoly anti_partial(const DiffPoly& p, JetVar v) {
    DiffPoly r;
    for (const auto& [m, c] : p.terms()) {
        int k = m.exponent(v);
        r += DiffPoly::term(m.times(v, 1), Rational(1, k + 1) * c);
    }
    return r;
}

} // namespace detail

/// Antiderivative: dx(result) = p exactly. Normalization: all integration
/// constants are zero, so for x-free p the jet-free part of the result is
/// zero, and a pure-x term x^k integrates to x^{k+1}/(k+1).
///
/// Greedy top-order reduction: exactness forces p to be linear in its
/// top-order jets with coefficients one order lower, so stripping the
/// v-linear then w-linear top content lowers max_order every pass.
inline DiffPoly integrate_dx(const DiffPoly& p) {
    if (!is_exact(p)) throw NotExact("integrate_dx: variational derivative nonzero");
    DiffPoly rem = p;
    DiffPoly result;
    while (true) {
        int m = rem.max_order();
        if (m < 0) break;
        if (m == 0)
            throw NotExact("integrate_dx: order-0 jet residue");
        for (Family f : {Family::V, Family::W}) {
            DiffPoly a = rem.partial({f, m});
            if (a.is_zero()) continue;
            if (a.max_order() >= m)
                throw NotExact("integrate_dx: nonlinear top-order jet dependence");
            DiffPoly q = detail::anti_partial(a, {f, m - 1});
            result += q;
            rem -= q.dx();
        }
        if (rem.max_order() >= m)
            throw NotExact("integrate_dx: top order failed to decrease");
    }
    // pure-x remainder
    for (const auto& [mono, c] : rem.terms()) {
        int k = mono.exponent(xvar());
        result += DiffPoly::term(mono.times(xvar(), 1), Rational(1, k + 1) * c);
    }
    return result;
}

} // namespace okdv
