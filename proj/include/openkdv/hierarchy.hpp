#pragma once

#include <atomic>
#include <future>
#include <vector>

#include "evofield.hpp"
#include "exact.hpp"
#include "report.hpp"

namespace okdv {

/// Deliberate corruptions for negative-control tests. Off by default.
struct FlowFaults {
    bool drop_r1_transport_term = false; // omit (3/4)dxK_{n-1} in the R recursion
};

/// Memoized table of the flow generators K_n (w-flows), R_n (t-flows on v)
/// and Q_n (s-flows on v). Strictly bottom-up; each level is exact.
class FlowTable {
public:
    explicit FlowTable(FlowFaults faults = {}) : faults_(faults) {}

    /// dx(K_n) = (2u^2/(2n+1)) (w dx + (1/2)w_1 + (1/8)dx^3) K_{n-1}, K_0 = w,
    /// normalized by a zero jet-free part.
    const DiffPoly& K(int n) {
        while ((int)k_.size() <= n) {
            if (k_.empty()) {
                k_.push_back(DiffPoly::var(wjet(0)));
                continue;
            }
            int m = (int)k_.size();
            DiffPoly rhs = kdv_rhs(k_.back(), m);
            k_.push_back(integrate_dx(rhs));
        }
        return k_[n];
    }

    /// R_0 = v_1; R_n = (2u^2/(2n+1)) [M R_{n-1} + (1/2)v_1 K_{n-1} + (3/4)dx K_{n-1}]
    /// with M = (1/2)dx^2 + v_1 dx + (v_1^2+v_2)/2 + w.
    const DiffPoly& R(int n) {
        while ((int)r_.size() <= n) {
            if (r_.empty()) {
                r_.push_back(DiffPoly::var(vjet(1)));
                continue;
            }
            int m = (int)r_.size();
            const DiffPoly& km1 = K(m - 1);
            DiffPoly inner = m_op(r_.back()) + Rational(1, 2) * (v1() * km1);
            if (!faults_.drop_r1_transport_term)
                inner += Rational(3, 4) * km1.dx();
            r_.push_back(ULaurent(Rational(2, 2 * m + 1), 2) * inner);
        }
        return r_[n];
    }

    /// Q_0 = u((v_1^2+v_2)/2 + w); Q_n = (u^2/(n+1)) M Q_{n-1}.
    const DiffPoly& Q(int n) {
        while ((int)q_.size() <= n) {
            if (q_.empty()) {
                DiffPoly q0 = Rational(1, 2) * (v1() * v1())
                            + Rational(1, 2) * DiffPoly::var(vjet(2))
                            + DiffPoly::var(wjet(0));
                q_.push_back(ULaurent(Rational(1), 1) * q0);
                continue;
            }
            int m = (int)q_.size();
            q_.push_back(ULaurent(Rational(1, m + 1), 2) * m_op(q_.back()));
        }
        return q_[n];
    }

    /// The flow field of the coupling t_n (n >= 1): v moves by R_n, w by dx K_n.
    EvoField t_flow(int n) { return {R(n), K(n).dx()}; }

    /// The flow field of s_k: v moves by Q_k, w is untouched.
    EvoField s_flow(int k) { return {Q(k), DiffPoly()}; }

private:
    DiffPoly v1() const { return DiffPoly::var(vjet(1)); }

    DiffPoly kdv_rhs(const DiffPoly& k_prev, int n) const {
        DiffPoly inner = DiffPoly::var(wjet(0)) * k_prev.dx()
                       + Rational(1, 2) * (DiffPoly::var(wjet(1)) * k_prev)
                       + Rational(1, 8) * k_prev.dx(3);
        return ULaurent(Rational(2, 2 * n + 1), 2) * inner;
    }

    DiffPoly m_op(const DiffPoly& p) const {
        return Rational(1, 2) * p.dx(2) + v1() * p.dx()
             + (Rational(1, 2) * (v1() * v1() + DiffPoly::var(vjet(2)))
                + DiffPoly::var(wjet(0))) * p;
    }

    FlowFaults faults_;
    std::vector<DiffPoly> k_, r_, q_;
};

/// B = dx + v_1, the reduced-Burgers building block.
inline DiffPoly b_op(const DiffPoly& p) {
    return p.dx() + DiffPoly::var(vjet(1)) * p;
}

inline DiffPoly b_pow(DiffPoly p, int n) {
    for (int i = 0; i < n; ++i) p = b_op(p);
    return p;
}

namespace detail {

inline std::string first_monomial(const EvoField& f) {
    const DiffPoly& p = f.pv.is_zero() ? f.pw : f.pv;
    if (p.is_zero()) return "";
    const auto& [m, c] = *p.terms().begin();
    std::string where = f.pv.is_zero() ? "w-flow " : "v-flow ";
    return where + "(" + c.str() + ")" + (m.empty() ? "" : "*" + m.str());
}

} // namespace detail

/// Pairwise Lie brackets among {(R_i, dxK_i)}_{1<=i<=max} and {(Q_i, 0)}_{0<=i<=max}.
inline Report verify_commutativity(int max_index, FlowFaults faults = {},
                                   unsigned threads = 1) {
    FlowTable table(faults);
    std::vector<std::pair<std::string, EvoField>> fields;
    for (int i = 1; i <= max_index; ++i)
        fields.push_back({"t" + std::to_string(i), table.t_flow(i)});
    for (int i = 0; i <= max_index; ++i)
        fields.push_back({"s" + std::to_string(i), table.s_flow(i)});

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t a = 0; a < fields.size(); ++a)
        for (std::size_t b = a + 1; b < fields.size(); ++b)
            pairs.push_back({(int)a, (int)b});

    auto check = [&](std::size_t i) {
        const auto& [na, fa] = fields[pairs[i].first];
        const auto& [nb, fb] = fields[pairs[i].second];
        EvoField br = lie_bracket(fa, fb);
        return CheckResult{"[" + na + "," + nb + "]", br.is_zero(),
                           detail::first_monomial(br)};
    };

    Report rep;
    rep.checks.resize(pairs.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) rep.checks[i] = check(i);
    } else {
        std::vector<std::future<void>> jobs;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < threads; ++t)
            jobs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < pairs.size(); i = next++)
                    rep.checks[i] = check(i);
            }));
        for (auto& j : jobs) j.get();
    }
    return rep;
}

} // namespace okdv
