#pragma once

#include <limits>
#include <map>

#include "errors.hpp"
#include "exact.hpp"
#include "hierarchy.hpp"
#include "report.hpp"

namespace okdv {

/// Pseudo-differential operator: finite map order -> DiffPoly coefficient.
/// `depth` is the trust mark: coefficients at orders >= depth are exact,
/// anything below has been discarded. depth == kExactDepth means nothing was
/// ever discarded.
class PsDOp {
public:
    static constexpr int kExactDepth = std::numeric_limits<int>::min();

    using Coeffs = std::map<int, DiffPoly, std::greater<int>>;

    PsDOp() = default;

    static PsDOp d_pow(int k) {
        PsDOp a;
        a.coeffs_[k] = DiffPoly(1);
        return a;
    }

    static PsDOp from(int order, const DiffPoly& c) {
        PsDOp a;
        if (!c.is_zero()) a.coeffs_[order] = c;
        return a;
    }

    /// The Lax operator dx^2 + 2w.
    static PsDOp lax() {
        PsDOp a;
        a.coeffs_[2] = DiffPoly(1);
        a.coeffs_[0] = Rational(2) * DiffPoly::var(wjet(0));
        return a;
    }

    const Coeffs& coeffs() const { return coeffs_; }
    int depth() const { return depth_; }
    bool is_exact_op() const { return depth_ == kExactDepth; }
    bool is_zero() const { return coeffs_.empty(); }

    int top_order() const {
        return coeffs_.empty() ? kExactDepth : coeffs_.begin()->first;
    }
    int bottom_order() const {
        return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
    }

    DiffPoly coeff(int order) const {
        auto it = coeffs_.find(order);
        return it == coeffs_.end() ? DiffPoly() : it->second;
    }

    void set_coeff(int order, const DiffPoly& c) {
        if (c.is_zero()) coeffs_.erase(order);
        else coeffs_[order] = c;
    }

    void set_depth(int d) { depth_ = d; }

    PsDOp& operator+=(const PsDOp& o) {
        for (const auto& [k, c] : o.coeffs_) set_coeff(k, coeff(k) + c);
        if (!is_exact_op() || !o.is_exact_op())
            depth_ = std::max(depth_, o.depth_);
        return *this;
    }
    friend PsDOp operator+(PsDOp a, const PsDOp& b) { return a += b; }

    PsDOp operator-() const {
        PsDOp r = *this;
        for (auto& [k, c] : r.coeffs_) c = -c;
        return r;
    }
    friend PsDOp operator-(PsDOp a, const PsDOp& b) { return a + (-b); }

    /// Structural equality of all coefficients at orders >= the given depth.
    bool equal_to_depth(const PsDOp& o, int d) const {
        for (const auto& [k, c] : coeffs_)
            if (k >= d && o.coeff(k) != c) return false;
        for (const auto& [k, c] : o.coeffs_)
            if (k >= d && coeff(k) != c) return false;
        return true;
    }

private:
    Coeffs coeffs_;
    int depth_ = kExactDepth;
};

/// Composition truncated at `depth`, using dx^k f = sum_i C(k,i) f^(i) dx^(k-i).
/// Throws if the operand trust marks cannot support the requested depth.
inline PsDOp psdo_mul(const PsDOp& a, const PsDOp& b, int depth) {
    int trust = PsDOp::kExactDepth;
    if (!a.is_exact_op() && !b.is_zero())
        trust = std::max(trust, a.depth() + b.top_order());
    if (!b.is_exact_op() && !a.is_zero())
        trust = std::max(trust, b.depth() + a.top_order());
    if (trust != PsDOp::kExactDepth && depth < trust)
        throw DepthUnderflow("psdo_mul: requested depth " + std::to_string(depth)
                             + " below trust depth " + std::to_string(trust));
    PsDOp r;
    for (const auto& [ka, fa] : a.coeffs()) {
        for (const auto& [kb, fb] : b.coeffs()) {
            DiffPoly deriv = fb;
            for (int i = 0; ka + kb - i >= depth; ++i) {
                if (ka >= 0 && i > ka) break;
                if (deriv.is_zero()) break;
                DiffPoly c = binomial(ka, i) * (fa * deriv);
                r.set_coeff(ka + kb - i, r.coeff(ka + kb - i) + c);
                deriv = deriv.dx();
            }
        }
    }
    // a negative order on the left makes the Leibniz tail infinite; otherwise
    // truncation only bites when output orders can dip below `depth`.
    bool truncated = a.bottom_order() < 0
                  || (!b.is_zero() && b.bottom_order() < depth);
    if (trust != PsDOp::kExactDepth || truncated)
        r.set_depth(std::max(trust, depth));
    else
        r.set_depth(PsDOp::kExactDepth);
    return r;
}

/// Unique S = dx + s_0 + s_{-1}dx^{-1} + ... with S*S = L down to `depth`:
/// psdo_mul(S, S, depth) agrees with L at every order >= depth.
inline PsDOp sqrt_L(int depth) {
    PsDOp L = PsDOp::lax();
    PsDOp S = PsDOp::d_pow(1);
    S.set_depth(1);
    for (int d = 0; d >= depth - 1; --d) {
        // coefficients down to d+1 are fixed; the only contribution of the
        // unknown s_d to S*S at order d+1 is 2*s_d, so the defect there
        // determines it.
        S.set_depth(d);
        PsDOp sq = psdo_mul(S, S, d + 1);
        DiffPoly defect = L.coeff(d + 1) - sq.coeff(d + 1);
        S.set_coeff(d, Rational(1, 2) * defect);
    }
    S.set_depth(depth - 1);
    return S;
}

/// Projection onto orders >= 0; exact whenever the input is trusted there.
inline PsDOp positive_part(const PsDOp& a) {
    if (!a.is_exact_op() && a.depth() > 0)
        throw DepthUnderflow("positive_part: order 0 not trusted");
    PsDOp r;
    for (const auto& [k, c] : a.coeffs())
        if (k >= 0) r.set_coeff(k, c);
    return r;
}

/// L^(p/2) for p = twice_exponent >= 1: an integer power of L when p is even,
/// otherwise L^((p-1)/2) composed with sqrt(L). Trusted down to `depth`.
inline PsDOp lax_power_half(int twice_exponent, int depth) {
    if (twice_exponent < 1)
        throw ConfigError("lax_power_half: exponent must be >= 1/2");
    PsDOp L = PsDOp::lax();
    int whole = twice_exponent / 2;
    PsDOp r;
    if (twice_exponent % 2 == 1) {
        r = sqrt_L(depth - 2 * whole + 1);
    } else {
        r = L;
        --whole;
    }
    // each left factor of L lifts the trust mark by its top order 2
    for (int i = whole; i > 0; --i)
        r = psdo_mul(L, r, depth - 2 * (i - 1));
    return r;
}

/// Complete Bell polynomial B_k in the jets of v: e^{-v} dx^k e^v.
inline DiffPoly bell(int k) {
    DiffPoly b(1);
    for (int i = 0; i < k; ++i) b = b_op(b);
    return b;
}

/// Flow generator of the wave function: with O = (L^(n+1/2))_+,
/// u^{2n}/(2n+1)!! * e^{-v} O e^{v} = u^{2n}/(2n+1)!! * sum_k O_k B_k.
/// `twice_n` is 2n; n may be a half-integer >= 1/2.
inline DiffPoly wave_flow(int twice_n, int depth) {
    PsDOp O = positive_part(lax_power_half(twice_n + 1, depth));
    DiffPoly sum;
    for (const auto& [k, c] : O.coeffs()) sum += c * bell(k);
    return ULaurent(Rational(Integer(1), double_factorial(twice_n + 1)), twice_n) * sum;
}

/// wave_flow(n) = R_n for integer n and wave_flow(k+1/2) = Q_k, for all flows
/// with doubled index <= 2*max_n.
inline Report verify_lax_equivalence(int max_n, int depth = -8) {
    FlowTable table;
    Report rep;
    for (int tn = 1; tn <= 2 * max_n; ++tn) {
        DiffPoly flow = wave_flow(tn, depth);
        DiffPoly want = tn % 2 == 0 ? table.R(tn / 2) : table.Q((tn - 1) / 2);
        DiffPoly diff = flow - want;
        std::string name = tn % 2 == 0 ? "wave(n=" + std::to_string(tn / 2) + ")=R"
                                             + std::to_string(tn / 2)
                                       : "wave(n=" + std::to_string(tn) + "/2)=Q"
                                             + std::to_string((tn - 1) / 2);
        std::string detail;
        if (!diff.is_zero()) {
            const auto& [m, c] = *diff.terms().begin();
            detail = "(" + c.str() + ")" + (m.empty() ? "" : "*" + m.str());
        }
        rep.checks.push_back({name, diff.is_zero(), detail});
    }
    return rep;
}

} // namespace okdv
