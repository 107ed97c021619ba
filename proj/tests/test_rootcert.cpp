#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bdfcert/error.hpp"
#include "bdfcert/polynomial.hpp"
#include "bdfcert/rootcert.hpp"
#include "bdfcert/scheme_coeffs.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace bdfcert;

namespace {

double a0(int k) { return to_double(scheme_table(k).A[0]); }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_config;
}

/// Discriminant of a x^4 + b x^3 + c x^2 + d x + e from the textbook coefficient formula.
double generic_quartic_discriminant(double a, double b, double c, double d, double e) {
    return 256 * a * a * a * e * e * e - 192 * a * a * b * d * e * e - 128 * a * a * c * c * e * e +
           144 * a * a * c * d * d * e - 27 * a * a * d * d * d * d + 144 * a * b * b * c * e * e -
           6 * a * b * b * d * d * e - 80 * a * b * c * c * d * e + 18 * a * b * c * d * d * d +
           16 * a * c * c * c * c * e - 4 * a * c * c * c * d * d - 27 * b * b * b * b * e * e +
           18 * b * b * b * c * d * e - 4 * b * b * b * d * d * d - 4 * b * b * c * c * c * e +
           b * b * c * c * d * d;
}

double generic_cubic_discriminant(double a, double b, double c, double d) {
    return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("char_poly examples") {
    const double s = 0.37;
    const auto p3 = char_poly(3, s);
    REQUIRE(p3.size() == 4);
    CHECK(p3[0] == 1.0);
    CHECK(p3[1] == doctest::Approx(-3 * s));
    CHECK(p3[2] == doctest::Approx(1.5 * s));
    CHECK(p3[3] == doctest::Approx(-s / 3));

    const auto z = char_poly(5, 0.0);
    CHECK(z[0] == 1.0);
    for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i] == 0.0);
    CHECK(max_root_modulus_unchecked(5, 0.0) == 0.0);

    CHECK(std::abs(evaluate(char_poly(3, 6.0 / 11.0), 1.0)) < 1e-15);
    CHECK(code_of([] { char_poly(8, 0.1); }) == ErrorCode::order_out_of_range);
}

TEST_CASE("BDF2 roots match the quadratic formula") {
    for (double s = 0.01; s < 2.0 / 3.0; s += 0.01) {
        // lambda^2 - 2 s lambda + s/2
        const std::complex<double> disc = std::sqrt(std::complex<double>(s * s - s / 2.0));
        const double expected = std::max(std::abs(s + disc), std::abs(s - disc));
        CHECK(max_root_modulus(2, s) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(max_root_modulus(2, s) < 1.0);
    }
}

TEST_CASE("BDF3 at s = 1/2") {
    const auto roots = companion_roots(char_poly(3, 0.5));
    int real = 0;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) < 1e-12) {
            ++real;
            CHECK(r.real() > 0.25);
            CHECK(r.real() < 1.0);
        } else {
            CHECK(std::abs(r) < std::sqrt(2.0 / 3.0));
        }
    }
    CHECK(real == 1);
}

TEST_CASE("domain of the checked root modulus") {
    CHECK(code_of([] { max_root_modulus(3, 0.0); }) == ErrorCode::domain_error);
    CHECK(code_of([] { max_root_modulus(3, 6.0 / 11.0); }) == ErrorCode::domain_error);
    CHECK(code_of([] { max_root_modulus(3, -0.1); }) == ErrorCode::domain_error);
    CHECK(max_root_modulus_unchecked(3, 0.6) >= 1.0);
}

TEST_CASE("product of roots equals the signed constant term") {
    for (int k = 2; k <= 7; ++k) {
        for (double frac : {0.1, 0.35, 0.6, 0.95}) {
            const double s = frac / a0(k);
            const auto roots = companion_roots(char_poly(k, s));
            std::complex<double> prod = 1.0;
            for (const auto& r : roots) prod *= r;
            const double expected = (k % 2 == 0 ? 1.0 : -1.0) * char_poly(k, s).back();
            CAPTURE(k);
            CAPTURE(s);
            CHECK(prod.real() == doctest::Approx(expected).epsilon(1e-10));
            CHECK(std::abs(prod.imag()) < 1e-12);
        }
    }
}

TEST_CASE("root scans: below one for k <= 6, above one for k = 7") {
    for (int k = 2; k <= 6; ++k) {
        CAPTURE(k);
        const auto report = scan_max_root(k, 1000);
        CHECK(report.s_grid.size() == 1000);
        CHECK(report.sup() < 1.0);
        CHECK(report.s_grid.front() > 0.0);
        CHECK(report.s_grid.back() < 1.0 / a0(k));
    }
    CHECK(scan_max_root(7, 1000).sup() > 1.0);
}

TEST_CASE("companion and Laguerre agree") {
    for (int k = 2; k <= 7; ++k) {
        const auto report = scan_max_root(k, 200);
        for (std::size_t i = 0; i < report.s_grid.size(); ++i) {
            const double s = report.s_grid[i];
            CHECK(std::abs(max_root_modulus_laguerre(k, s) - report.max_modulus[i]) <= 1e-8);
        }
    }
    // The double-root boundary of BDF4 is the ill-conditioned case.
    CHECK(std::abs(max_root_modulus_laguerre(4, 0.375) - max_root_modulus(4, 0.375)) <= 1e-7);
}

TEST_CASE("cubic discriminant") {
    CHECK(cubic_discriminant(0.3) == doctest::Approx(-0.3 * 0.3 * 3 + 13.5 * 0.027 - 15.75 * 0.0081));
    CHECK(cubic_discriminant(0.3) == doctest::Approx(-0.0331).epsilon(1e-3));
    CHECK(cubic_discriminant(0.0) == 0.0);
    const double s_max = 6.0 / 11.0;
    for (int i = 1; i < 10000; ++i) {
        const double s = s_max * i / 10000.0;
        const double d = cubic_discriminant(s);
        CHECK(d < 0.0);
        const auto p = char_poly(3, s);
        CHECK(d == doctest::Approx(generic_cubic_discriminant(p[0], p[1], p[2], p[3])).epsilon(1e-10));
    }
}

TEST_CASE("quartic discriminant") {
    CHECK(std::abs(quartic_discriminant(0.375)) < 1e-12);
    CHECK(quartic_discriminant(0.2) > 0.0);
    CHECK(quartic_discriminant(0.45) < 0.0);

    const double s_max = 12.0 / 25.0;
    int changes = 0;
    double prev = quartic_discriminant(s_max * 1e-6);
    for (int i = 1; i <= 100000; ++i) {
        const double s = s_max * (1e-6 + (1.0 - 2e-6) * i / 100000.0);
        const double d = quartic_discriminant(s);
        if ((d < 0.0) != (prev < 0.0)) {
            ++changes;
            CHECK(std::abs(s - 0.375) < 1e-5);
        }
        prev = d;
        const auto p = char_poly(4, s);
        CHECK(d == doctest::Approx(generic_quartic_discriminant(p[0], p[1], p[2], p[3], p[4])).epsilon(1e-9));
    }
    CHECK(changes == 1);
    CHECK(quartic_discriminant(0.375 - 1e-10) > 0.0);
    CHECK(quartic_discriminant(0.375 + 1e-10) < 0.0);
}

TEST_CASE("BDF4 real roots between lambda* and 1 on [3/8, 12/25)") {
    const double lambda_star = bdf4_lambda_star();
    CHECK(lambda_star == doctest::Approx(0.3814).epsilon(1e-4));
    CHECK(std::abs(evaluate(char_poly(4, 0.48), lambda_star)) < 1e-12);
    for (int i = 0; i < 200; ++i) {
        const double s = 0.375 + (0.48 - 0.375) * i / 200.0;
        const auto roots = companion_roots(char_poly(4, s));
        for (const auto& r : roots) {
            if (std::abs(r.imag()) < 1e-6) {
                CHECK(r.real() > lambda_star - 1e-9);
                CHECK(r.real() < 1.0);
            } else {
                CHECK(std::abs(r) < 0.92);
            }
        }
    }
}

TEST_CASE("BDF5 boundary matches its complex form on the unit circle") {
    for (int i = 0; i <= 64; ++i) {
        const double theta = std::numbers::pi * i / 64.0;
        const double x = std::cos(theta);
        const std::complex<double> z = std::polar(1.0, theta), zb = std::conj(z);
        for (double s : {0.05, 0.2, 0.4}) {
            const auto b = bdf5_boundary(x, s);
            const std::complex<double> left =
                1.0 - 5.0 * s * zb + 5.0 * s * zb * zb - 10.0 / 3.0 * s * std::pow(zb, 3) +
                1.25 * s * std::pow(zb, 4) - 0.2 * s * std::pow(zb, 5);
            const double expected = (left * (1.0 - 137.0 / 60.0 * s * z)).real();
            CHECK(b.value == doctest::Approx(expected).epsilon(1e-12));
            CHECK(b.disc == doctest::Approx(b.A * b.A - 4 * b.B));
        }
    }
    for (double s : {0.0, 0.1, 0.3, 60.0 / 137.0}) {
        const double e = 1.0 - 137.0 * s / 60.0;
        CHECK(bdf5_boundary(1.0, s).value == doctest::Approx(e * e).epsilon(1e-13));
    }
    const auto at_minus_one = bdf5_boundary(-1.0, 0.3);
    CHECK(at_minus_one.A > 0.0);
    CHECK(at_minus_one.B > 0.0);
}

TEST_CASE("BDF5 discriminant polynomial and roots") {
    const auto poly = bdf5_discriminant_polynomial();
    REQUIRE(poly.size() == 11);
    for (double x : {-1.0, -0.5, 0.0, 0.3, 0.9}) CHECK(evaluate(poly, x) == doctest::Approx(bdf5_boundary(x, 0).disc));
    const auto roots = bdf5_discriminant_roots();
    REQUIRE(roots.size() == 2);
    CHECK(roots[0] == doctest::Approx(-0.908).epsilon(1e-2));
    CHECK(std::abs(roots[1] - 1.0) < 1e-10);
}

TEST_CASE("BDF5 boundary positivity") {
    const double s_max = 60.0 / 137.0;
    double lowest = 1e300;
    for (int i = 0; i < 400; ++i) {
        const double x = -1.0 + 2.0 * i / 400.0;
        for (int j = 1; j < 400; ++j) lowest = std::min(lowest, bdf5_boundary(x, s_max * j / 400.0).value);
    }
    CHECK(lowest > 0.0);
}

TEST_CASE("companion matrix structure") {
    const double s = 0.2;
    const auto M = contraction_matrix(4, s);
    const auto p = char_poly(4, s);
    for (int j = 0; j < 4; ++j) CHECK(M(0, j) == doctest::Approx(-p[static_cast<std::size_t>(j) + 1]));
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(M(i, j) == (j == i - 1 ? 1.0 : 0.0));
}

TEST_CASE("contraction exponents") {
    const auto r2 = contraction_exponent(2, 0.01, 0.6, 200);
    CHECK(r2.n0 > 0);
    CHECK(r2.eps0 < 1.0);
    for (double s : {0.01, 0.2, 0.45, 0.6}) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2, 2);
        for (int n = 0; n < r2.n0; ++n) P = contraction_matrix(2, s) * P;
        CHECK(spectral_norm(P) <= r2.eps0 + 1e-12);
    }

    const auto r5 = contraction_exponent(5, 1e-3, 60.0 / 137.0 * 0.99, 200);
    CHECK(r5.n0 > 0);
    CHECK(r5.eps0 < 1.0);

    CHECK(code_of([] { contraction_exponent(3, 0.01, 0.6, 100); }) == ErrorCode::no_contraction);
    CHECK(code_of([] { contraction_exponent(3, 0.5, 0.1, 100); }) == ErrorCode::invalid_config);
}

TEST_CASE("small-s threshold") {
    const double s1 = small_s_threshold(3);
    CHECK(s1 > 0.0);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(3, 3);
    for (int n = 0; n < 3; ++n) P = contraction_matrix(3, s1 * 0.999) * P;
    CHECK(spectral_norm(P) <= 0.5 + 1e-9);
}

TEST_CASE("multiplier bounds") {
    const auto r = multiplier_bounds(3, 10.0, 10.0, 64);
    CHECK(r.ok);
    CHECK_FALSE(r.violating_j.has_value());
    // j = (1, 0) attains T = 1/(A_0 + tau0) when tau = tau0.
    CHECK(r.max_first_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.max_second_ratio <= 1.0);
    CHECK(multiplier_bounds(4, 100.0, 1.0, 32).max_first_ratio < 1.0);
    CHECK(code_of([] { multiplier_bounds(3, 0.5, 1.0, 8); }) == ErrorCode::invalid_config);
}
