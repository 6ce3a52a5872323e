#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "openkdv/tseries.hpp"

using namespace okdv;

namespace {

TSeries random_series(std::mt19937& rng, const Window& w, bool unit_free = true) {
    std::uniform_int_distribution<int> nterms(1, 6), deg(unit_free ? 1 : 0, w.D),
        numd(-5, 5), dend(1, 4), expo(-2, 2);
    TSeries r(w);
    int n = nterms(rng);
    for (int t = 0; t < n; ++t) {
        MultiIndex a(w.nvars(), 0);
        int d = deg(rng);
        std::uniform_int_distribution<int> slot(0, w.nvars() - 1);
        for (int i = 0; i < d; ++i) ++a[slot(rng)];
        r.add_coeff(a, ULaurent(Rational(numd(rng), dend(rng)), expo(rng)));
    }
    return r;
}

} // namespace

TEST_CASE("window shape") {
    Window w{5, 0, 8};
    CHECK(w.nvars() == 7);
    CHECK(w.s_index(0) == 6);
    Window closed{5, -1, 8};
    CHECK(closed.nvars() == 6);
    CHECK(closed.valid());
}

TEST_CASE("exponential of t0") {
    Window w{1, -1, 3};
    TSeries t0 = TSeries::var(w, w.t_index(0));
    TSeries e = t0.exp();
    CHECK(e.constant_term() == ULaurent(1));
    MultiIndex a(w.nvars(), 0);
    a[0] = 2;
    CHECK(e.coeff(a) == ULaurent(rat(1, 2)));
    a[0] = 3;
    CHECK(e.coeff(a) == ULaurent(rat(1, 6)));
    CHECK(e.coeffs().size() == 4);
    CHECK_THROWS_AS(TSeries(w, ULaurent(1)).exp(), ExpOnUnitFull);
}

TEST_CASE("derivatives and extraction") {
    Window w{2, -1, 4};
    TSeries t1 = TSeries::var(w, w.t_index(1), ULaurent::u(-2));
    TSeries sq = t1 * TSeries::var(w, w.t_index(1));
    TSeries d = sq.derivative(w.t_index(1));
    MultiIndex a(w.nvars(), 0);
    a[w.t_index(1)] = 1;
    CHECK(d.coeff(a) == Rational(2) * ULaurent::u(-2));

    TSeries cube = ULaurent(rat(1, 6), -2) * TSeries::var(w, 0) * TSeries::var(w, 0)
                 * TSeries::var(w, 0);
    MultiIndex b(w.nvars(), 0);
    b[0] = 3;
    CHECK(cube.coeff(b) == ULaurent(rat(1, 6), -2));
}

TEST_CASE("ring laws and truncation") {
    Window w{2, 0, 4};
    std::mt19937 rng(31);
    for (int i = 0; i < 20; ++i) {
        TSeries a = random_series(rng, w, false), b = random_series(rng, w, false),
                c = random_series(rng, w, false);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        TSeries prod = a * b;
        for (const auto& [mi, cc] : prod.coeffs()) {
            CHECK(mi_degree(mi) <= w.D);
            CHECK_FALSE(cc.is_zero());
        }
    }
}

TEST_CASE("exp is a homomorphism on the window") {
    Window w{2, 0, 5};
    std::mt19937 rng(32);
    for (int i = 0; i < 5; ++i) {
        TSeries a = random_series(rng, w), b = random_series(rng, w);
        CHECK((a + b).exp() == a.exp() * b.exp());
    }
}

TEST_CASE("jet evaluation") {
    Window w{2, -1, 4};
    TSeries vs(w);
    TSeries ws = TSeries::var(w, w.t_index(0), ULaurent::u(-2));

    CHECK(jet_eval(DiffPoly::var(wjet(0)), vs, ws) == ws);

    DiffPoly k1 = ULaurent::u(2)
                * (Rational(1, 2) * (DiffPoly::var(wjet(0)) * DiffPoly::var(wjet(0)))
                   + Rational(1, 12) * DiffPoly::var(wjet(2)));
    TSeries got = jet_eval(k1, vs, ws);
    MultiIndex a(w.nvars(), 0);
    a[0] = 2;
    CHECK(got.coeff(a) == ULaurent(rat(1, 2), -2));
    CHECK(got.coeffs().size() == 1);

    DiffPoly xw1 = DiffPoly::var(xvar()) * DiffPoly::var(wjet(1));
    CHECK(jet_eval(xw1, vs, ws) == ws);
}

TEST_CASE("jet evaluation is a ring homomorphism") {
    Window w{2, 0, 5};
    std::mt19937 rng(33);
    DiffPoly p = DiffPoly::var(vjet(1)) * DiffPoly::var(wjet(0))
               + Rational(1, 3) * DiffPoly::var(wjet(1));
    DiffPoly q = DiffPoly::var(vjet(0)) + DiffPoly::var(xvar());
    TSeries vs = random_series(rng, w), ws = random_series(rng, w);
    TSeries pv = jet_eval(p, vs, ws), qv = jet_eval(q, vs, ws);
    // products only trusted where the jet substitution retains full degree
    TSeries lhs = jet_eval(p * q, vs, ws).trust(w.M, w.D - 2);
    TSeries rhs = (pv * qv).trust(w.M, w.D - 2);
    CHECK(lhs == rhs);
}

TEST_CASE("restriction and trust filters") {
    Window w{3, 0, 4};
    std::mt19937 rng(34);
    TSeries a = random_series(rng, w, false);
    TSeries r = a.restrict_zero(w.t_index(2));
    for (const auto& [mi, c] : r.coeffs()) CHECK(mi[w.t_index(2)] == 0);
    TSeries tr = a.trust(1, 2);
    for (const auto& [mi, c] : tr.coeffs()) {
        CHECK(mi_degree(mi) <= 2);
        CHECK(mi[w.t_index(2)] == 0);
        CHECK(mi[w.t_index(3)] == 0);
    }
}

TEST_CASE("window mismatch is rejected") {
    TSeries a{Window{2, 0, 4}}, b{Window{2, 0, 5}};
    CHECK_THROWS_AS(a + b, ConfigError);
}
