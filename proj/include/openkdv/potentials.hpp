#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "hierarchy.hpp"
#include "taylor.hpp"

namespace okdv {

/// Deliberate corruptions for negative-control tests. Off by default.
struct PotentialFaults {
    bool corrupt_open_init = false; // double the s^3 coefficient of the open potential
};

inline InitialData standard_initial_data() {
    return {DiffPoly(), ULaurent::u(-2) * DiffPoly::var(xvar())};
}

// ---------------------------------------------------------------------------
// closed potential, hierarchy route
// ---------------------------------------------------------------------------

namespace detail {

/// Coupling monomial t_{q_1} t_{q_2} ... as a descending list of indices;
/// the string solve walks through indices beyond the window, so a list has
/// no positional cap the way an exponent vector would.
using Partition = std::vector<int>;

inline int pweight(const Partition& p) {
    int s = 0;
    for (int q : p) s += q;
    return s;
}

inline int pmult(const Partition& p, int q) {
    return (int)std::count(p.begin(), p.end(), q);
}

inline Partition erase_one(Partition p, int q) {
    p.erase(std::find(p.begin(), p.end(), q));
    return p;
}

inline Partition insert_one(Partition p, int q) {
    p.insert(std::lower_bound(p.begin(), p.end(), q, std::greater<int>()), q);
    return p;
}

/// Replace one factor t_q by t_{q-1}; q >= 2.
inline Partition lower_one(const Partition& p, int q) {
    return insert_one(erase_one(p, q), q - 1);
}

/// One linear equation sum_i coeff_i * unknown_i = rhs over exact scalars.
struct LinRow {
    std::vector<Rational> coeff;
    ULaurent rhs;
};

/// Gaussian elimination; returns the solved value of every column in
/// `targets`, throwing RecursionStall when a target is not pinned down.
inline std::vector<ULaurent> solve_exact(std::vector<LinRow> rows, std::size_t ncols,
                                         const std::vector<std::size_t>& targets) {
    std::vector<int> pivot_row(ncols, -1);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t sel = rank;
        while (sel < rows.size() && rows[sel].coeff[col] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[rank], rows[sel]);
        Rational p = rows[rank].coeff[col];
        for (auto& c : rows[rank].coeff) c /= p;
        rows[rank].rhs = ULaurent(Rational(1) / p) * rows[rank].rhs;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r].coeff[col] == 0) continue;
            Rational f = rows[r].coeff[col];
            for (std::size_t c = 0; c < ncols; ++c)
                rows[r].coeff[c] -= f * rows[rank].coeff[c];
            rows[r].rhs -= ULaurent(f) * rows[rank].rhs;
        }
        pivot_row[col] = (int)rank;
        ++rank;
    }
    for (std::size_t r = rank; r < rows.size(); ++r)
        if (!rows[r].rhs.is_zero())
            throw RecursionStall("string-equation system is inconsistent");
    std::vector<ULaurent> out;
    for (std::size_t col : targets) {
        if (pivot_row[col] < 0)
            throw RecursionStall("string-equation system leaves a coefficient free");
        const LinRow& row = rows[pivot_row[col]];
        for (std::size_t c = 0; c < ncols; ++c)
            if (c != col && row.coeff[c] != 0 && pivot_row[c] < 0)
                throw RecursionStall("string-equation pivot depends on a free column");
        // pivot columns other than col are zero after full elimination
        out.push_back(row.rhs);
    }
    return out;
}

inline void block_indices_rec(int v, int l, int m, int maxpart, bool over_used,
                              Partition& acc, std::vector<Partition>& out) {
    if (l == 0) {
        if (v == 0) out.push_back(acc);
        return;
    }
    for (int q = std::min(v - (l - 1), maxpart); q >= 1; --q) {
        bool over = q > m;
        if (over && over_used) continue;
        acc.push_back(q);
        block_indices_rec(v - q, l - 1, m, q, over_used || over, acc, out);
        acc.pop_back();
    }
}

/// Partitions of v into exactly l parts, at most one of which exceeds m.
inline std::vector<Partition> block_indices(int v, int l, int m) {
    std::vector<Partition> out;
    Partition acc;
    if (l >= 1 && v >= l) block_indices_rec(v, l, m, v - l + 1, false, acc, out);
    return out;
}

/// Reconstructs the Taylor coefficients of F with t_0-exponent 0 and 1 from
/// the w-series, via the t_0-free components of the string equation. Under
/// truncation those components also involve coefficients with one coupling
/// index beyond the window; the t_0-linear layer at such an index comes from
/// the flow recursion transported to evaluated coefficients, the higher
/// layers from the string equation by induction on the coupling weight.
class StringReconstruction {
public:
    StringReconstruction(int window_m, const TSeries& w) : M_(window_m), w_(w) {}

    /// F coefficient at t_0^1 * t^a; a may have one part beyond the window.
    ULaurent f1(const Partition& a) {
        if (a.empty()) return ULaurent(); // F_{t_0}|_{t_*=0} = 0
        auto it = f1_.find(a);
        if (it != f1_.end()) return it->second;
        solve_block(1, (int)a.size(), pweight(a));
        return f1_.at(a);
    }

    /// F coefficient at t_0^0 * t^a.
    ULaurent f0(const Partition& a) {
        if (a.empty()) return ULaurent(); // F|_{t_*=0} = 0
        auto it = f0_.find(a);
        if (it != f0_.end()) return it->second;
        solve_block(0, (int)a.size(), pweight(a));
        return f0_.at(a);
    }

private:
    bool in_window(const Partition& a) const { return a.empty() || a.front() <= M_; }

    ULaurent wcoef(int m, const Partition& c) const {
        MultiIndex idx(w_.window().nvars(), 0);
        idx[0] = m;
        for (int q : c) ++idx[w_.window().t_index(q)];
        return w_.coeff(idx);
    }

    /// (X F_m)[a] with X = sum_{n>=1} t_{n+1} d/dt_n; lowers the weight by 1.
    ULaurent xshift(int m, const Partition& a) {
        ULaurent acc;
        int prev = 0;
        for (int q : a) {
            if (q == prev || q < 2) continue;
            prev = q;
            acc += Rational(pmult(a, q - 1) + 1) * fm(m, lower_one(a, q));
        }
        return acc;
    }

    /// F coefficient at t_0^m * t^a for m >= 2. Inside the window this is w
    /// integrated twice; outside, the t_0-degree-(m-1) component of the
    /// string equation expresses it through strictly lower coupling weight.
    ULaurent fm(int m, const Partition& a) {
        if (m == 2) return f2(a);
        if (in_window(a)) return Rational(1, (m - 1) * m) * wcoef(m - 2, a);
        auto key = std::make_pair(m, a);
        auto it = fmx_.find(key);
        if (it != fmx_.end()) return it->second;
        ULaurent val = Rational(1, m) * xshift(m - 1, a);
        if (pmult(a, 1) > 0) val += fm(m, erase_one(a, 1));
        return fmx_.emplace(std::move(key), std::move(val)).first->second;
    }

    /// The same-weight f1 partner and its coupling, for an index whose
    /// oversized part P is handled by the flow recursion: the middle term of
    /// the recursion contributes (u^2/(2P+1)) * (1/2) u^{-2} * f1(partner).
    Rational kappa(const Partition& a) const {
        int P = a.front();
        return Rational(pmult(a, P - 1) + 1, 2 * (2 * P + 1));
    }

    /// All splits c = c1 + c2 as multisets.
    template <class Fn>
    void for_each_split(const Partition& c, Fn&& fn) {
        std::vector<std::pair<int, int>> groups;
        for (int q : c) {
            if (!groups.empty() && groups.back().first == q) ++groups.back().second;
            else groups.push_back({q, 1});
        }
        Partition c1, c2;
        split_rec(groups, 0, c1, c2, fn);
    }

    template <class Fn>
    void split_rec(const std::vector<std::pair<int, int>>& groups, std::size_t pos,
                   Partition& c1, Partition& c2, Fn&& fn) {
        if (pos == groups.size()) {
            fn(c1, c2);
            return;
        }
        auto [q, mult] = groups[pos];
        for (int take = 0; take <= mult; ++take) {
            std::size_t s1 = c1.size(), s2 = c2.size();
            c1.insert(c1.end(), take, q);
            c2.insert(c2.end(), mult - take, q);
            split_rec(groups, pos + 1, c1, c2, fn);
            c1.resize(s1);
            c2.resize(s2);
        }
    }

    /// Everything of f2 at an oversized index except the same-weight f1 term:
    /// the t_0-linear coefficient of the flow recursion
    ///   (2P+1) dK_P/dx = 2u^2 (w d/dx + w_x/2 + (1/8) d^3/dx^3) K_{P-1}
    /// evaluated on the solution, written in terms of F-coefficients.
    ULaurent f2_known(const Partition& a) {
        int P = a.front();
        Partition c = erase_one(a, P);
        ULaurent acc;
        for_each_split(c, [&](const Partition& c1, const Partition& c2) {
            if (c1.empty()) return; // w has no constant term; u^{-2} piece split off
            int m2 = pmult(c2, P - 1) + 1;
            ULaurent w0 = wcoef(0, c1);
            ULaurent w1 = wcoef(1, c1);
            if (w0.is_zero() && w1.is_zero()) return;
            Partition down = insert_one(c2, P - 1);
            if (!w0.is_zero()) acc += Rational(2 * m2) * w0 * f2(down);
            if (!w1.is_zero()) acc += Rational(m2, 2) * w1 * f1(down);
        });
        acc += Rational(3 * (pmult(c, P - 1) + 1)) * fm(4, insert_one(c, P - 1));
        return Rational(1, 2 * P + 1) * (ULaurent::u(2) * acc);
    }

    ULaurent f2(const Partition& a) {
        if (in_window(a)) return Rational(1, 2) * wcoef(0, a);
        auto it = f2_.find(a);
        if (it != f2_.end()) return it->second;
        ULaurent val = f2_known(a) + ULaurent(kappa(a)) * f1(lower_one(a, a.front()));
        return f2_.emplace(a, std::move(val)).first->second;
    }

    /// Solve one (degree, weight) block of the t_0-free (layer 0) or
    /// t_0-linear (layer 1) string components. Each equation is indexed by a
    /// partition of weight V+1; lowering its parts references the block's
    /// unknowns, and for layer 1 an oversized equation also references the
    /// partner unknown of its own f2 value.
    void solve_block(int layer, int l, int V) {
        auto tag = std::make_tuple(layer, l, V);
        if (!running_.insert(tag).second)
            throw RecursionStall("string reconstruction revisited a block mid-solve");
        std::vector<Partition> unknowns = block_indices(V, l, M_);
        std::map<Partition, std::size_t> col;
        for (const auto& b : unknowns) col.emplace(b, col.size());
        std::vector<LinRow> rows;
        for (const auto& a : block_indices(V + 1, l, M_)) {
            LinRow row;
            row.coeff.assign(col.size(), Rational(0));
            int prev = 0;
            for (int q : a) {
                if (q == prev || q < 2) continue;
                prev = q;
                row.coeff[col.at(lower_one(a, q))] += Rational(pmult(a, q - 1) + 1);
            }
            if (layer == 1) {
                if (in_window(a)) {
                    row.rhs = wcoef(0, a); // 2 * f2 = 2 * w/2
                } else {
                    row.coeff[col.at(lower_one(a, a.front()))] -= Rational(2) * kappa(a);
                    row.rhs = Rational(2) * f2_known(a);
                }
                if (pmult(a, 1) > 0) row.rhs -= Rational(2) * f2(erase_one(a, 1));
            } else {
                row.rhs = f1(a);
                if (pmult(a, 1) > 0) row.rhs -= f1(erase_one(a, 1));
            }
            rows.push_back(std::move(row));
        }
        std::vector<std::size_t> targets(col.size());
        for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = i;
        std::vector<ULaurent> vals = solve_exact(std::move(rows), col.size(), targets);
        auto& store = layer == 1 ? f1_ : f0_;
        for (const auto& [b, c] : col) store[b] = vals[c];
        running_.erase(tag);
    }

    int M_;
    const TSeries& w_;
    std::map<Partition, ULaurent> f0_, f1_, f2_;
    std::map<std::pair<int, Partition>, ULaurent> fmx_;
    std::set<std::tuple<int, int, int>> running_;
};

} // namespace detail

/// F^c by the hierarchy route: the w-series from the Taylor solver gives all
/// coefficients of t_0-degree >= 2 by double integration; t_0-degrees 1 and 0
/// are pinned down blockwise by the string equation, with the flow recursion
/// supplying the out-of-window data each block needs.
inline TSeries closed_potential_kdv(const Window& req, FlowTable& table) {
    if (!req.valid() || req.M < 1)
        throw ConfigError("closed_potential_kdv: invalid window");
    const int M = req.M, D = req.D;
    Window out{M, -1, D};
    // w at t_0-degree <= 2 is needed at full coupling degree D
    Window tall{M, -1, D + 2};

    std::vector<EvoField> flows;
    for (int n = 1; n <= M; ++n) flows.push_back({DiffPoly(), table.K(n).dx()});
    TaylorSolver solver(flows, standard_initial_data(), tall, D);
    auto [vser, wser] = solver.solve();

    TSeries F(out);
    for (const auto& [a, c] : wser.coeffs()) {
        MultiIndex b = a;
        b[0] += 2;
        if (mi_degree(b) > D) continue;
        F.add_coeff(b, Rational(1, (a[0] + 1) * (a[0] + 2)) * c);
    }

    detail::StringReconstruction rec(M, wser);
    detail::Partition p;
    std::function<void(int, int)> walk = [&](int maxpart, int budget) {
        if (!p.empty()) {
            MultiIndex idx(out.nvars(), 0);
            for (int q : p) ++idx[out.t_index(q)];
            F.add_coeff(idx, rec.f0(p));
            if ((int)p.size() < D) {
                ++idx[0];
                F.add_coeff(idx, rec.f1(p));
            }
        }
        if (budget == 0) return;
        for (int q = maxpart; q >= 1; --q) {
            p.push_back(q);
            walk(q, budget - 1);
            p.pop_back();
        }
    };
    walk(M, D);
    return F;
}

inline TSeries closed_potential_kdv(const Window& req) {
    FlowTable table;
    return closed_potential_kdv(req, table);
}

// ---------------------------------------------------------------------------
// closed potential, Virasoro route
// ---------------------------------------------------------------------------

/// Intersection numbers of psi classes from the Virasoro constraints alone:
/// differentiating L_n exp(F) = 0 at t = 0 expresses any correlator with a
/// top insertion tau_{n+1} through correlators of smaller total index.
class ClosedCorrelators {
public:
    /// <tau_{k_1} ... tau_{k_m}>_g; ks need not be sorted.
    Rational value(int g, std::vector<int> ks) {
        std::sort(ks.begin(), ks.end());
        return eval(g, ks);
    }

private:
    static Rational c_coef(int i, int n) {
        // (2i+2n+1)!! / (2^{n+1} (2i-1)!!)
        return Rational(double_factorial(2 * i + 2 * n + 1),
                        (Integer(1) << (n + 1)) * double_factorial(2 * i - 1));
    }
    static Rational a_coef(int i, int j) {
        return Rational(double_factorial(2 * i + 1) * double_factorial(2 * j + 1),
                        Integer(1) << (i + j + 2));
    }

    Rational eval(int g, const std::vector<int>& ks) {
        int m = (int)ks.size();
        if (g < 0 || m == 0) return 0;
        if (2 * g - 2 + m <= 0) return 0;
        int total = 0;
        for (int k : ks) total += k;
        if (total != 3 * g - 3 + m) return 0;
        auto key = std::make_pair(g, ks);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        int kmax = ks.back();
        int n = kmax - 1;
        std::vector<int> rest(ks.begin(), ks.end() - 1);

        Rational acc = 0;
        // transport terms: the derivative hits one t_{k_j} factor
        std::size_t j = 0;
        while (j < rest.size()) {
            std::size_t j2 = j;
            while (j2 < rest.size() && rest[j2] == rest[j]) ++j2;
            int k = rest[j], mult = (int)(j2 - j);
            if (k >= std::max(0, -n)) {
                std::vector<int> sub = rest;
                sub.erase(sub.begin() + j);
                sub.push_back(k + n);
                std::sort(sub.begin(), sub.end());
                acc += Rational(mult) * c_coef(k, n) * eval(g, sub);
            }
            j = j2;
        }
        // quadratic terms: genus reduction and stable splittings
        for (int i = 0; i <= n - 1; ++i) {
            int jj = n - 1 - i;
            Rational a_ij = a_coef(i, jj);
            {
                std::vector<int> low = rest;
                low.push_back(i);
                low.push_back(jj);
                std::sort(low.begin(), low.end());
                acc += Rational(1, 2) * a_ij * eval(g - 1, low);
            }
            for_each_split(rest, [&](const std::vector<int>& s,
                                     const std::vector<int>& t, const Integer& ways) {
                for (int g1 = 0; g1 <= g; ++g1) {
                    std::vector<int> left = s;
                    left.push_back(i);
                    std::sort(left.begin(), left.end());
                    Rational lv = eval(g1, left);
                    if (lv == 0) continue;
                    std::vector<int> right = t;
                    right.push_back(jj);
                    std::sort(right.begin(), right.end());
                    acc += Rational(1, 2) * a_ij * Rational(ways) * lv * eval(g - g1, right);
                }
            });
        }
        // affine terms of L_{-1} and L_0
        if (n == -1 && g == 0 && rest == std::vector<int>{0, 0}) acc += 1;
        if (n == 0 && g == 1 && rest.empty()) acc += Rational(1, 16);

        Rational result = acc / c_coef(1, n);
        memo_.emplace(std::move(key), result);
        return result;
    }

    /// All sub-multiset splits of a sorted multiset, with multiplicity counts.
    template <class Fn>
    static void for_each_split(const std::vector<int>& rest, Fn&& fn) {
        std::vector<std::pair<int, int>> groups;
        for (int k : rest) {
            if (!groups.empty() && groups.back().first == k) ++groups.back().second;
            else groups.push_back({k, 1});
        }
        std::vector<int> take(groups.size(), 0);
        split_rec(groups, take, 0, Integer(1), fn);
    }

    template <class Fn>
    static void split_rec(const std::vector<std::pair<int, int>>& groups,
                          std::vector<int>& take, std::size_t pos, Integer ways, Fn&& fn) {
        if (pos == groups.size()) {
            std::vector<int> s, t;
            for (std::size_t i = 0; i < groups.size(); ++i) {
                for (int c = 0; c < take[i]; ++c) s.push_back(groups[i].first);
                for (int c = take[i]; c < groups[i].second; ++c) t.push_back(groups[i].first);
            }
            fn(s, t, ways);
            return;
        }
        for (int c = 0; c <= groups[pos].second; ++c) {
            take[pos] = c;
            Integer binom = numerator(binomial(groups[pos].second, c));
            split_rec(groups, take, pos + 1, ways * binom, fn);
        }
        take[pos] = 0;
    }

    std::map<std::pair<int, std::vector<int>>, Rational> memo_;
};

/// F^c assembled from the correlators of the Virasoro recursion; the genus of
/// each monomial is forced by the dimension constraint.
inline TSeries closed_potential_virasoro(const Window& req, ClosedCorrelators& corr) {
    if (!req.valid() || req.M < 1)
        throw ConfigError("closed_potential_virasoro: invalid window");
    Window out{req.M, -1, req.D};
    TSeries F(out);
    MultiIndex a(out.nvars(), 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int budget) {
        if (pos == a.size()) {
            int m = mi_degree(a);
            if (m == 0) return;
            int total = 0;
            for (std::size_t i = 0; i < a.size(); ++i) total += (int)i * a[i];
            if ((total - m + 3) % 3 != 0) return;
            int g = (total - m + 3) / 3;
            if (g < 0) return;
            std::vector<int> ks;
            for (std::size_t i = 0; i < a.size(); ++i)
                for (int c = 0; c < a[i]; ++c) ks.push_back((int)i);
            Rational val = corr.value(g, ks);
            if (val == 0) return;
            Rational norm = val;
            for (int e : a) norm /= Rational(factorial(e));
            F.add_coeff(a, ULaurent(norm, 2 * g - 2));
            return;
        }
        for (int k = 0; k <= budget; ++k) {
            a[pos] = k;
            rec(pos + 1, budget - k);
        }
        a[pos] = 0;
    };
    rec(0, out.D);
    return F;
}

inline TSeries closed_potential_virasoro(const Window& req) {
    ClosedCorrelators corr;
    return closed_potential_virasoro(req, corr);
}

// ---------------------------------------------------------------------------
// open potential
// ---------------------------------------------------------------------------

/// F^o is the v-output of the half hierarchy (t-flows R_n, s-flow Q_0)
/// started from v = 0, w = u^{-2}x.
inline TSeries open_potential(const Window& req, FlowTable& table,
                              PotentialFaults faults = {}) {
    if (!req.valid() || req.K < 0)
        throw ConfigError("open_potential: window needs at least the s variable");
    std::vector<EvoField> flows;
    for (int n = 1; n <= req.M; ++n) flows.push_back(table.t_flow(n));
    for (int k = 0; k <= req.K; ++k) flows.push_back(table.s_flow(k));
    auto [v, w] = taylor_solve(flows, standard_initial_data(), req);
    if (faults.corrupt_open_init) {
        MultiIndex s3(req.nvars(), 0);
        s3[req.s_index(0)] = 3;
        v.add_coeff(s3, ULaurent(rat(1, 6), -1));
    }
    return v;
}

inline TSeries open_potential(const Window& req, PotentialFaults faults = {}) {
    FlowTable table;
    return open_potential(req, table, faults);
}

// ---------------------------------------------------------------------------
// correlator extraction and residual checks
// ---------------------------------------------------------------------------

inline Rational correlator_closed(const TSeries& Fc, int g, std::vector<int> indices) {
    const Window& w = Fc.window();
    MultiIndex a(w.nvars(), 0);
    for (int k : indices) {
        if (k < 0 || k > w.M) throw OutOfWindow("correlator_closed: index beyond window");
        ++a[w.t_index(k)];
    }
    if (mi_degree(a) > w.D) throw OutOfWindow("correlator_closed: degree beyond window");
    Rational val = Fc.coeff(a).coeff(2 * g - 2);
    for (int e : a) val *= Rational(factorial(e));
    return val;
}

inline Rational correlator_open(const TSeries& Fo, int g, int k,
                                std::vector<int> indices) {
    const Window& w = Fo.window();
    if (w.K < 0) throw ConfigError("correlator_open: series has no s variable");
    MultiIndex a(w.nvars(), 0);
    a[w.s_index(0)] = k;
    for (int i : indices) {
        if (i < 0 || i > w.M) throw OutOfWindow("correlator_open: index beyond window");
        ++a[w.t_index(i)];
    }
    if (mi_degree(a) > w.D) throw OutOfWindow("correlator_open: degree beyond window");
    Rational val = Fo.coeff(a).coeff(g - 1);
    val *= Rational(factorial(k));
    for (int n = 0; n <= w.M; ++n) val *= Rational(factorial(a[w.t_index(n)]));
    return val;
}

/// 2*sum(indices) = 3g - 3 + k + 2l, the open analogue of the closed
/// dimension constraint; optional because only conjectural beyond genus 0.
inline bool open_dimension_ok(int g, int k, const std::vector<int>& indices) {
    int total = 0;
    for (int i : indices) total += i;
    return 2 * total == 3 * g - 3 + k + 2 * (int)indices.size();
}

/// S F - t_0^2/(2u^2), trusted at degree D-1.
inline TSeries closed_string_residual(const TSeries& Fc) {
    const Window& w = Fc.window();
    TSeries res = Fc.derivative(w.t_index(0));
    for (int n = 1; n <= w.M; ++n)
        res -= TSeries::var(w, w.t_index(n)) * Fc.derivative(w.t_index(n - 1));
    TSeries t0 = TSeries::var(w, w.t_index(0));
    res -= ULaurent(rat(1, 2), -2) * t0 * t0;
    return res.trust(w.M, w.D - 1);
}

/// Open string equation residual, trusted at degree D-1.
inline TSeries open_string_residual(const TSeries& Fo) {
    const Window& w = Fo.window();
    TSeries res = Fo.derivative(w.t_index(0));
    for (int n = 0; n + 1 <= w.M; ++n)
        res -= TSeries::var(w, w.t_index(n + 1)) * Fo.derivative(w.t_index(n));
    res -= TSeries::var(w, w.s_index(0), ULaurent::u(-1));
    return res.trust(w.M, w.D - 1);
}

/// Closed series carry u^{2g-2}, g >= 0 integer; open series carry u^{g-1}.
inline bool u_grading_closed_ok(const TSeries& Fc) {
    for (const auto& [a, c] : Fc.coeffs())
        for (const auto& [e, r] : c.terms())
            if (e < -2 || e % 2 != 0) return false;
    return true;
}

inline bool u_grading_open_ok(const TSeries& Fo) {
    for (const auto& [a, c] : Fo.coeffs())
        for (const auto& [e, r] : c.terms())
            if (e < -1) return false;
    return true;
}

} // namespace okdv
