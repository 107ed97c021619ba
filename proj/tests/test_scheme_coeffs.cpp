#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bdfcert/error.hpp"
#include "bdfcert/scheme_coeffs.hpp"

#include <string>

using namespace bdfcert;

namespace {

RationalVector R(std::initializer_list<std::pair<std::int64_t, std::int64_t>> v) {
    RationalVector out;
    for (auto [n, d] : v) out.emplace_back(n, d);
    return out;
}

/// A_i = l_i'(1) for the Lagrange basis on nodes 1, 0, -1, ..., 1-k (unit step).
RationalVector lagrange_bdf(int k) {
    RationalVector A(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        const Rational xi(1 - i);
        Rational deriv(0);
        for (int m = 0; m <= k; ++m) {
            if (m == i) continue;
            Rational term = Rational(1) / (xi - Rational(1 - m));
            for (int j = 0; j <= k; ++j) {
                if (j == i || j == m) continue;
                term *= (Rational(1) - Rational(1 - j)) / (xi - Rational(1 - j));
            }
            deriv += term;
        }
        A[static_cast<std::size_t>(i)] = deriv;
    }
    return A;
}

/// B_i = l_i(1) for the Lagrange basis on nodes 0, -1, ..., 1-k.
RationalVector lagrange_extrapolation(int k) {
    RationalVector B(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        Rational l(1);
        for (int j = 1; j <= k; ++j)
            if (j != i) l *= (Rational(1) - Rational(1 - j)) / (Rational(1 - i) - Rational(1 - j));
        B[static_cast<std::size_t>(i - 1)] = l;
    }
    return B;
}

Rational total(const RationalVector& v) {
    Rational s(0);
    for (const auto& x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("BDF3 table") {
    const auto t = scheme_table(3);
    CHECK(t.A == R({{11, 6}, {-3, 1}, {3, 2}, {-1, 3}}));
    CHECK(t.a == R({{11, 6}, {-7, 6}, {1, 3}}));
    CHECK(t.b == R({{2, 1}, {-1, 1}}));
}

TEST_CASE("BDF5 difference and extrapolation forms") {
    const auto t = scheme_table(5);
    CHECK(t.a == R({{137, 60}, {-163, 60}, {137, 60}, {-21, 20}, {1, 5}}));
    CHECK(t.b == R({{4, 1}, {-6, 1}, {4, 1}, {-1, 1}}));
}

TEST_CASE("BDF2 extrapolation reproduces constants") {
    const auto t = scheme_table(2);
    CHECK(t.B == R({{2, 1}, {-1, 1}}));
    CHECK(total(t.B) == Rational(1));
}

TEST_CASE("c_1 of BDF4 is half the b-row magnitude sum") {
    CHECK(scheme_table(4).c1() == Rational(7, 2));
    CHECK(scheme_table(2).c1() == Rational(1, 2));
    CHECK(scheme_table(3).c1() == Rational(3, 2));
    CHECK(scheme_table(5).c1() == Rational(15, 2));
}

TEST_CASE("delta_form examples") {
    CHECK(delta_form(R({{3, 2}, {-2, 1}, {1, 2}})) == R({{3, 2}, {-1, 2}}));
    CHECK(delta_form(scheme_table(4).A) == R({{25, 12}, {-23, 12}, {13, 12}, {-1, 4}}));
    CHECK(delta_form(R({{1, 1}, {-1, 1}})) == R({{1, 1}}));
}

TEST_CASE("delta_form rejects coefficients that do not sum to zero") {
    try {
        delta_form(R({{3, 2}, {-2, 1}, {1, 3}}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::inconsistent_input);
    }
}

TEST_CASE("order range") {
    for (int k : {0, 1, 8}) {
        try {
            scheme_table(k);
            FAIL("expected an error for k = " << k);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::order_out_of_range);
        }
    }
    const auto be = startup_table(1);
    CHECK(be.A == R({{1, 1}, {-1, 1}}));
    CHECK(be.B == R({{1, 1}}));
    CHECK(be.b.empty());
}

TEST_CASE("tables agree with Lagrange interpolation for every order") {
    for (int k = 1; k <= 7; ++k) {
        CAPTURE(k);
        const auto t = startup_table(k);
        CHECK(t.A == lagrange_bdf(k));
        CHECK(t.B == lagrange_extrapolation(k));
    }
}

TEST_CASE("table invariants") {
    for (int k = 2; k <= 7; ++k) {
        CAPTURE(k);
        const auto t = scheme_table(k);
        CHECK_NOTHROW(validate(t));
        CHECK(total(t.A) == Rational(0));
        CHECK(total(t.a) == Rational(1));
        CHECK(total(t.B) == Rational(1));
        CHECK(t.a[0] == t.A[0]);
        CHECK(t.c.back() == Rational(0));
        for (std::size_t i = 1; i < t.c.size(); ++i) CHECK(t.c[i] <= t.c[i - 1]);

        // First-order consistency: sum_i i A_i = -1.
        Rational moment(0);
        for (std::size_t i = 0; i < t.A.size(); ++i) moment += Rational(static_cast<std::int64_t>(i)) * t.A[i];
        CHECK(moment == Rational(-1));

        CHECK(standard_form(delta_form(t.A)) == t.A);
        CHECK(extrapolation_delta_form(t.B) == t.b);

        // u^n + sum_m b_m du^{n+1-m} expanded in u^{n+1-i} must give B_i.
        RationalVector expanded(static_cast<std::size_t>(k), Rational(0));
        expanded[0] += Rational(1);
        for (int m = 1; m < k; ++m) {
            expanded[static_cast<std::size_t>(m - 1)] += t.b[static_cast<std::size_t>(m - 1)];
            expanded[static_cast<std::size_t>(m)] -= t.b[static_cast<std::size_t>(m - 1)];
        }
        CHECK(expanded == t.B);
    }
}

TEST_CASE("validate catches a corrupted table") {
    auto t = scheme_table(3);
    t.c.back() = Rational(1, 7);
    CHECK_THROWS_AS(validate(t), Error);
}

TEST_CASE("CSV emission") {
    const std::string csv = coeffs_csv(scheme_table(3), CoeffForm::delta);
    CHECK(csv.rfind("k,family,index,value\n", 0) == 0);
    CHECK(csv.find("3,a,0,11/6\n") != std::string::npos);
    CHECK(csv.find("3,b,1,2\n") != std::string::npos);
    CHECK(csv.find("3,A,") == std::string::npos);

    const std::string std_csv = coeffs_csv(scheme_table(2), parse_coeff_form("std"));
    CHECK(std_csv.find("2,A,2,1/2\n") != std::string::npos);
    CHECK_THROWS_AS(parse_coeff_form("bogus"), Error);
}
