#pragma once

#include <map>
#include <utility>
#include <vector>

#include "evofield.hpp"
#include "tseries.hpp"

namespace okdv {

/// Polynomial-in-x initial state for both dependent variables.
struct InitialData {
    DiffPoly v0; // must involve only x
    DiffPoly w0;

    void validate() const {
        if (v0.max_order() >= 0 || w0.max_order() >= 0)
            throw ConfigError("InitialData: jets are not allowed in initial data");
    }
};

/// Integrates a family of pairwise-commuting evolutionary flows from
/// polynomial initial data into a truncated series in the couplings.
///
/// For a multi-index a over the non-t_0 couplings, the value
/// A_a = (V^a applied to a generator) evaluated at the initial state is an
/// exact polynomial in x; the t_0-dependence of the solution is exactly this
/// x-dependence. Coefficient of t_0^m t^a = [x^m] A_a / a!. Truncation
/// selects which coefficients are emitted, never their accuracy.
class TaylorSolver {
public:
    /// flows[i] drives the window variable with index i+1 (t_1..t_M, then s_k).
    /// coupling_budget, when set, bounds the degree in the non-t_0 couplings
    /// separately from the window degree (which still caps t_0 jointly).
    TaylorSolver(std::vector<EvoField> flows, InitialData init, Window window,
                 int coupling_budget = -1)
        : flows_(std::move(flows)), init_(std::move(init)), win_(window),
          budget_(coupling_budget < 0 ? window.D : coupling_budget) {
        init_.validate();
        if (!win_.valid()) throw ConfigError("TaylorSolver: invalid window");
        if ((int)flows_.size() != win_.nvars() - 1)
            throw ConfigError("TaylorSolver: one flow per non-t_0 coupling required");
    }

    std::pair<TSeries, TSeries> solve() {
        TSeries v(win_), w(win_);
        MultiIndex a(flows_.size(), 0);
        emit(a, v, w);
        enumerate(a, 0, std::min(budget_, win_.D), v, w);
        return {v, w};
    }

    /// (V^a generator)|_init as a polynomial in x; family selects v or w.
    const DiffPoly& composite(const MultiIndex& a, Family f) {
        const auto& pair = value(a);
        return f == Family::V ? pair.first : pair.second;
    }

private:
    using Value = std::pair<DiffPoly, DiffPoly>;

    const Value& value(const MultiIndex& a) {
        auto it = memo_.find(a);
        if (it != memo_.end()) return it->second;
        Value val;
        int last = -1;
        for (int i = (int)a.size() - 1; i >= 0; --i)
            if (a[i] > 0) { last = i; break; }
        if (last < 0) {
            val = {init_.v0, init_.w0};
        } else {
            MultiIndex b = a;
            --b[last];
            val = {eval(flows_[last].pv, b), eval(flows_[last].pw, b)};
        }
        return memo_.emplace(a, std::move(val)).first->second;
    }

    /// (V^b P)|_init by the multinomial Leibniz rule over the factors of each
    /// monomial; a jet (F, j) contributes d^j/dx^j of the matching composite.
    DiffPoly eval(const DiffPoly& P, const MultiIndex& b) {
        DiffPoly result;
        for (const auto& [mono, c] : P.terms()) {
            std::vector<JetVar> factors;
            for (const auto& [var, e] : mono.factors)
                for (int i = 0; i < e; ++i) factors.push_back(var);

            std::map<MultiIndex, DiffPoly> state;
            state.emplace(MultiIndex(b.size(), 0), DiffPoly(c));
            for (const JetVar& f : factors) {
                std::map<MultiIndex, DiffPoly> next;
                for (const auto& [used, val] : state) {
                    MultiIndex rem(b.size());
                    for (std::size_t i = 0; i < b.size(); ++i)
                        rem[i] = b[i] - used[i];
                    MultiIndex g(b.size(), 0);
                    assign(f, used, rem, g, 0, Rational(1), val, next);
                }
                state = std::move(next);
                if (state.empty()) break;
            }
            auto it = state.find(b);
            if (it != state.end()) result += it->second;
        }
        return result;
    }

    /// Distribute a sub-index g <= rem onto one factor, weighting by the
    /// running binomial product (which totals the multinomial coefficient).
    void assign(const JetVar& f, const MultiIndex& used, const MultiIndex& rem,
                MultiIndex& g, std::size_t pos, Rational weight,
                const DiffPoly& val, std::map<MultiIndex, DiffPoly>& next) {
        if (pos == g.size()) {
            DiffPoly fv = factor_value(f, g);
            if (fv.is_zero()) return;
            MultiIndex tot(used.size());
            for (std::size_t i = 0; i < used.size(); ++i) tot[i] = used[i] + g[i];
            DiffPoly add = weight * (val * fv);
            auto it = next.find(tot);
            if (it == next.end()) next.emplace(tot, add);
            else {
                it->second += add;
                if (it->second.is_zero()) next.erase(it);
            }
            return;
        }
        for (int k = 0; k <= rem[pos]; ++k) {
            g[pos] = k;
            assign(f, used, rem, g, pos + 1, weight * binomial(rem[pos], k), val, next);
        }
        g[pos] = 0;
    }

    DiffPoly factor_value(const JetVar& f, const MultiIndex& g) {
        if (f.family == Family::X)
            return mi_degree(g) == 0 ? DiffPoly::var(xvar()) : DiffPoly();
        const DiffPoly& base = composite(g, f.family);
        if (base.is_zero() || f.order > base.x_degree()) return DiffPoly();
        return base.dx(f.order);
    }

    void emit(const MultiIndex& a, TSeries& v, TSeries& w) {
        const Value& val = value(a);
        Rational fact(1);
        for (int ai : a)
            fact *= Rational(factorial(ai));
        int da = 0;
        for (int ai : a) da += ai;
        auto push = [&](const DiffPoly& p, TSeries& out) {
            for (const auto& [mono, c] : p.terms()) {
                int m = mono.exponent(xvar());
                if (m + da > win_.D) continue;
                MultiIndex full(win_.nvars(), 0);
                full[0] = m;
                for (std::size_t i = 0; i < a.size(); ++i) full[i + 1] = a[i];
                out.add_coeff(full, Rational(1) / fact * c);
            }
        };
        push(val.first, v);
        push(val.second, w);
    }

    void enumerate(MultiIndex& a, std::size_t pos, int budget, TSeries& v, TSeries& w) {
        if (pos == a.size()) return;
        for (int k = 1; k <= budget; ++k) {
            a[pos] = k;
            emit(a, v, w);
            enumerate(a, pos + 1, budget - k, v, w);
        }
        a[pos] = 0;
        enumerate(a, pos + 1, budget, v, w);
    }

    std::vector<EvoField> flows_;
    InitialData init_;
    Window win_;
    int budget_;
    std::map<MultiIndex, Value> memo_;
};

inline std::pair<TSeries, TSeries> taylor_solve(const std::vector<EvoField>& flows,
                                                const InitialData& init,
                                                const Window& window) {
    TaylorSolver solver(flows, init, window);
    return solver.solve();
}

} // namespace okdv
