#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "openkdv/hierarchy.hpp"

using namespace okdv;

namespace {

DiffPoly V(int j) { return DiffPoly::var(vjet(j)); }
DiffPoly W(int j) { return DiffPoly::var(wjet(j)); }

DiffPoly kdv_rhs_of(FlowTable& t, int n) {
    const DiffPoly& prev = t.K(n - 1);
    return ULaurent(Rational(2, 2 * n + 1), 2)
         * (W(0) * prev.dx() + Rational(1, 2) * (W(1) * prev)
            + Rational(1, 8) * prev.dx(3));
}

} // namespace

TEST_CASE("base flows") {
    FlowTable t;
    CHECK(t.K(0) == W(0));
    CHECK(t.R(0) == V(1));
    CHECK(t.Q(0) == ULaurent::u(1) * (Rational(1, 2) * (V(1) * V(1) + V(2)) + W(0)));
}

TEST_CASE("first kdv level") {
    FlowTable t;
    CHECK(t.K(1) == ULaurent::u(2) * (Rational(1, 2) * (W(0) * W(0)) + Rational(1, 12) * W(2)));
}

TEST_CASE("first burgers level") {
    FlowTable t;
    DiffPoly r1 = ULaurent::u(2)
                * (Rational(1, 3) * (V(1) * V(1) * V(1)) + V(1) * V(2)
                   + Rational(1, 3) * V(3) + V(1) * W(0) + Rational(1, 2) * W(1));
    CHECK(t.R(1) == r1);
}

TEST_CASE("recursion is regenerated by dx") {
    FlowTable t;
    for (int n = 1; n <= 4; ++n) {
        DiffPoly rhs = kdv_rhs_of(t, n);
        CHECK(is_exact(rhs));
        CHECK(t.K(n).dx() == rhs);
        CHECK_FALSE(t.K(n).depends_on(Family::V));
        CHECK(t.K(n).x_degree() == 0);
        CHECK(t.R(n).x_degree() == 0);
        CHECK(t.Q(n).x_degree() == 0);
    }
}

TEST_CASE("reduced flows at w = 0") {
    FlowTable t;
    for (int n = 0; n <= 4; ++n) {
        DiffPoly lhsR = t.R(n).set_family_zero(Family::W);
        DiffPoly rhsR = ULaurent(Rational(Integer(1), double_factorial(2 * n + 1)), 2 * n)
                      * b_pow(V(1), 2 * n);
        CHECK(lhsR == rhsR);
        DiffPoly gen = Rational(1, 2) * (V(1) * V(1) + V(2));
        DiffPoly lhsQ = t.Q(n).set_family_zero(Family::W);
        DiffPoly rhsQ = ULaurent(Rational(Integer(1), (Integer(1) << n) * factorial(n + 1)),
                                 2 * n + 1)
                      * b_pow(gen, 2 * n);
        CHECK(lhsQ == rhsQ);
    }
}

TEST_CASE("flows commute at low index") {
    Report rep = verify_commutativity(1);
    CHECK(rep.checks.size() == 3);
    CHECK(rep.all_pass());
}

TEST_CASE("kdv flows commute among themselves") {
    FlowTable t;
    for (int m = 1; m <= 3; ++m)
        for (int n = m + 1; n <= 3; ++n) {
            EvoField a{DiffPoly(), t.K(m).dx()}, b{DiffPoly(), t.K(n).dx()};
            CHECK(lie_bracket(a, b).is_zero());
        }
}

TEST_CASE("dropped transport term breaks commutativity") {
    FlowFaults faults;
    faults.drop_r1_transport_term = true;
    Report rep = verify_commutativity(1, faults);
    CHECK_FALSE(rep.all_pass());
    bool named = false;
    for (const auto& c : rep.checks)
        if (!c.pass && !c.detail.empty()) named = true;
    CHECK(named);
}

TEST_CASE("parallel verification matches sequential") {
    Report seq = verify_commutativity(2, {}, 1);
    Report par = verify_commutativity(2, {}, 4);
    REQUIRE(seq.checks.size() == par.checks.size());
    for (std::size_t i = 0; i < seq.checks.size(); ++i) {
        CHECK(seq.checks[i].name == par.checks[i].name);
        CHECK(seq.checks[i].pass == par.checks[i].pass);
    }
    CHECK(seq.all_pass());
}

TEST_CASE("golden flow table") {
    std::ifstream f(std::string(OPENKDV_GOLDEN_DIR) + "/flows.txt");
    REQUIRE(f.good());
    std::ostringstream want;
    want << f.rdbuf();

    FlowTable t;
    std::ostringstream got;
    for (int n = 0; n <= 4; ++n) got << "K" << n << " = " << t.K(n).str() << "\n";
    for (int n = 0; n <= 3; ++n) got << "R" << n << " = " << t.R(n).str() << "\n";
    for (int n = 0; n <= 3; ++n) got << "Q" << n << " = " << t.Q(n).str() << "\n";
    CHECK(got.str() == want.str());
}
