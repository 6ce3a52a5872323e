#pragma once

#include "diffpoly.hpp"

namespace okdv {

/// Evolutionary vector field, a pair (pv, pw) of generators. Acts as the
/// derivation sum_j (dx^j pv) d/dv_j + sum_j (dx^j pw) d/dw_j; leaves x alone.
struct EvoField {
    DiffPoly pv;
    DiffPoly pw;

    bool is_zero() const { return pv.is_zero() && pw.is_zero(); }
    bool operator==(const EvoField& o) const { return pv == o.pv && pw == o.pw; }
};

inline DiffPoly field_apply(const EvoField& f, const DiffPoly& q) {
    DiffPoly r;
    int mo = q.max_order();
    DiffPoly dv = f.pv, dw = f.pw;
    for (int j = 0; j <= mo; ++j) {
        DiffPoly qv = q.partial(vjet(j));
        DiffPoly qw = q.partial(wjet(j));
        if (!qv.is_zero()) r += dv * qv;
        if (!qw.is_zero()) r += dw * qw;
        if (j < mo) { dv = dv.dx(); dw = dw.dx(); }
    }
    return r;
}

/// [f, g] = (f(g_v) - g(f_v), f(g_w) - g(f_w)).
inline EvoField lie_bracket(const EvoField& f, const EvoField& g) {
    return {field_apply(f, g.pv) - field_apply(g, f.pv),
            field_apply(f, g.pw) - field_apply(g, f.pw)};
}

} // namespace okdv
