// End-to-end acceptance gate: one line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "openkdv/exact.hpp"
#include "openkdv/potentials.hpp"
#include "openkdv/psdo.hpp"
#include "openkdv/virasoro.hpp"

using namespace okdv;

namespace {

int failures = 0;

template <class Fn>
void criterion(int num, const char* what, Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string err;
    try {
        ok = fn();
    } catch (const std::exception& e) {
        err = e.what();
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s (%.1f s)%s%s\n", num, ok ? "PASS" : "FAIL",
                what, secs, err.empty() ? "" : "  error: ", err.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

DiffPoly wv(int order) { return DiffPoly::var(wjet(order)); }
DiffPoly vv(int order) { return DiffPoly::var(vjet(order)); }

TSeries random_exponent(const Window& w, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> num(-5, 5);
    std::uniform_int_distribution<int> den(1, 4);
    std::uniform_int_distribution<int> uexp(-1, 1);
    TSeries r(w);
    std::function<void(MultiIndex&, int, int)> walk = [&](MultiIndex& a, int pos,
                                                          int left) {
        if (pos == (int)a.size()) {
            if (mi_degree(a) == 0) return;
            int n = num(rng);
            if (n != 0) r.set_coeff(a, ULaurent(Rational(n, den(rng)), uexp(rng)));
            return;
        }
        for (int k = 0; k <= left; ++k) {
            a[pos] = k;
            walk(a, pos + 1, left - k);
        }
        a[pos] = 0;
    };
    MultiIndex a(w.nvars(), 0);
    walk(a, 0, 3);
    return r;
}

} // namespace

int main() {
    unsigned threads = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
    FlowTable table;

    criterion(1, "K_1 matches its closed form", [&] {
        DiffPoly want = ULaurent::u(2)
                      * (Rational(1, 2) * (wv(0) * wv(0)) + Rational(1, 12) * wv(2));
        return table.K(1) == want;
    });

    criterion(2, "recursion exactness and integration round-trip, n <= 6", [&] {
        for (int n = 1; n <= 6; ++n) {
            const DiffPoly& prev = table.K(n - 1);
            DiffPoly rhs = ULaurent(Rational(2, 2 * n + 1), 2)
                         * (wv(0) * prev.dx() + Rational(1, 2) * (wv(1) * prev)
                            + Rational(1, 8) * prev.dx(3));
            if (!is_exact(rhs)) return false;
        }
        for (int n = 2; n <= 6; ++n)
            if (integrate_dx(table.K(n).dx()) != table.K(n)) return false;
        return true;
    });

    criterion(3, "pairwise flow brackets vanish up to index 3", [&] {
        return verify_commutativity(3, {}, threads).all_pass();
    });

    criterion(4, "reduced one-variable formulas, n <= 4", [&] {
        DiffPoly half = Rational(1, 2) * (vv(1) * vv(1) + vv(2));
        for (int n = 0; n <= 4; ++n) {
            DiffPoly rn = ULaurent(Rational(Integer(1), double_factorial(2 * n + 1)),
                                   2 * n)
                        * b_pow(vv(1), 2 * n);
            if (table.R(n).set_family_zero(Family::W) != rn) return false;
            DiffPoly qn = ULaurent(Rational(Integer(1),
                                            (Integer(1) << n) * factorial(n + 1)),
                                   2 * n + 1)
                        * b_pow(half, 2 * n);
            if (table.Q(n).set_family_zero(Family::W) != qn) return false;
        }
        return true;
    });

    criterion(5, "wave-function flows match R and Q; sqrt(L)^2 = L", [&] {
        if (!verify_lax_equivalence(2, -8).all_pass()) return false;
        PsDOp s = sqrt_L(-8);
        return psdo_mul(s, s, -8).equal_to_depth(PsDOp::lax(), -8);
    });

    TSeries Fc5, Fc5_kdv;
    criterion(6, "closed potential routes agree at M=5, D=8", [&] {
        Window w{5, -1, 8};
        Fc5_kdv = closed_potential_kdv(w);
        Fc5 = closed_potential_virasoro(w);
        if (Fc5_kdv != Fc5) return false;
        for (const TSeries* F : {&Fc5_kdv, &Fc5}) {
            if (correlator_closed(*F, 0, {0, 0, 0}) != 1) return false;
            if (correlator_closed(*F, 1, {1}) != rat(1, 24)) return false;
        }
        return true;
    });

    Window ow{4, 0, 8};
    Window cw{4, -1, 8};
    TSeries Fc = closed_potential_virasoro(cw);
    TSeries Fo;
    criterion(7, "open KdV n=1..4, the s-equation, and the cubic initial term", [&] {
        Fo = open_potential(ow);
        for (int n = 1; n <= 4; ++n)
            if (!open_kdv_residual(n, Fo, Fc).is_zero()) return false;
        if (!s_string_residual(Fo, Fc).is_zero()) return false;
        TSeries r = Fo;
        for (int n = 1; n <= ow.M; ++n) r = r.restrict_zero(ow.t_index(n));
        TSeries s = TSeries::var(ow, ow.s_index(0));
        TSeries want = ULaurent(rat(1, 6), -1) * s * s * s
                     + TSeries::var(ow, ow.t_index(0), ULaurent::u(-1)) * s;
        return r == want;
    });

    criterion(8, "open string equation residual vanishes", [&] {
        return open_string_residual(Fo).is_zero();
    });

    criterion(9, "open Virasoro n=-1..3, recursion lemma n<=2, ladder identity n<=2",
              [&] {
        if (!verify_open_virasoro(3, Fo, Fc).all_pass()) return false;
        if (!lemma51_point1(Fo, Fc)) return false;
        for (int n = 0; n <= 2; ++n)
            if (!lemma51_point2(n, Fo, Fc)) return false;
        for (int n = -1; n <= 2; ++n)
            if (!appendix_identity_check(n, Fc)) return false;
        return true;
    });

    criterion(10, "commutation relations on 5 random exponents", [&] {
        Window w{3, 0, 6};
        for (unsigned seed = 1; seed <= 5; ++seed) {
            TSeries F = random_exponent(w, seed);
            for (int n = -1; n <= 2; ++n)
                for (int m = n + 1; m <= 2; ++m) {
                    if (n + m < -1) continue;
                    if (!verify_commutation(n, m, VirasoroKind::Closed, F)) return false;
                    if (!verify_commutation(n, m, VirasoroKind::Open, F)) return false;
                }
        }
        return true;
    });

    criterion(11, "injected faults are caught with a named monomial", [&] {
        FlowFaults ff;
        ff.drop_r1_transport_term = true;
        Report bracket = verify_commutativity(1, ff, threads);
        bool caught_flow = false;
        for (const auto& c : bracket.checks)
            if (!c.pass && !c.detail.empty()) caught_flow = true;
        if (!caught_flow) return false;

        Window w{3, 0, 6};
        PotentialFaults pf;
        pf.corrupt_open_init = true;
        TSeries bad = open_potential(w, pf);
        TSeries Fc3 = closed_potential_virasoro(Window{3, -1, 6});
        Report vir = verify_open_virasoro(0, bad, Fc3);
        for (const auto& c : vir.checks)
            if (!c.pass && !c.detail.empty()) return true;
        return false;
    });

    std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed"
                                      : "acceptance: FAILURES");
    return failures == 0 ? 0 : 1;
}
