#include "bdfcert/rootcert.hpp"

#include "bdfcert/error.hpp"
#include "bdfcert/scheme_coeffs.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace bdfcert {

namespace {

constexpr double kGridMargin = 1e-6;

double a0_of(int k) {
    return to_double(scheme_table(k).A0());
}

double s_max_of(int k) {
    return to_double(Rational(1) / scheme_table(k).A0());
}

double spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double horner_ascending(std::initializer_list<double> c, double x) {
    double acc = 0.0;
    for (auto it = std::rbegin(c); it != std::rend(c); ++it) acc = acc * x + *it;
    return acc;
}

}  // namespace

double RootScanReport::sup() const {
    return max_modulus.empty() ? 0.0 : *std::max_element(max_modulus.begin(), max_modulus.end());
}

std::vector<double> char_poly(int k, double s) {
    const SchemeTable t = scheme_table(k);
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    c[0] = 1.0;
    for (int i = 1; i <= k; ++i) c[static_cast<std::size_t>(i)] = to_double(t.A[static_cast<std::size_t>(i)]) * s;
    return c;
}

double max_root_modulus_unchecked(int k, double s) {
    return max_modulus(companion_roots(char_poly(k, s)));
}

double max_root_modulus(int k, double s) {
    const double s_max = s_max_of(k);
    if (!(s > 0.0 && s < s_max))
        throw Error(ErrorCode::domain_error,
                    "s = " + fmt(s) + " outside (0, 1/A_0) = (0, " + fmt(s_max) + ")");
    return max_root_modulus_unchecked(k, s);
}

double max_root_modulus_laguerre(int k, double s) {
    return max_modulus(laguerre_roots(char_poly(k, s)));
}

RootScanReport scan_max_root(int k, int n_points) {
    if (n_points < 2) throw Error(ErrorCode::invalid_config, "root scan needs at least two points");
    const double s_max = s_max_of(k);
    const double lo = kGridMargin * s_max;
    const double hi = (1.0 - kGridMargin) * s_max;
    RootScanReport r;
    r.k = k;
    r.s0 = hi;
    r.s_grid.resize(static_cast<std::size_t>(n_points));
    r.max_modulus.resize(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double s = (i == n_points - 1) ? hi : lo + (hi - lo) * i / (n_points - 1);
        r.s_grid[static_cast<std::size_t>(i)] = s;
        r.max_modulus[static_cast<std::size_t>(i)] = max_root_modulus(k, s);
    }
    return r;
}

std::string to_csv(const RootScanReport& r) {
    std::ostringstream out;
    out << "k,s,max_modulus\n";
    for (std::size_t i = 0; i < r.s_grid.size(); ++i)
        out << r.k << ',' << fmt(r.s_grid[i]) << ',' << fmt(r.max_modulus[i]) << '\n';
    return out.str();
}

double cubic_discriminant(double s) {
    return s * s * (-3.0 + s * (27.0 / 2.0 - 63.0 / 4.0 * s));
}

double quartic_discriminant(double s) {
    return s * s * s * (4.0 + s * (-88.0 / 3.0 + s * (220.0 / 3.0 - 1696.0 / 27.0 * s)));
}

double bdf4_lambda_star() {
    // The real roots at s = 12/25 are 1 and lambda_*.
    for (double r : real_roots(char_poly(4, 12.0 / 25.0)))
        if (std::abs(r - 1.0) > 1e-6) return r;
    throw Error(ErrorCode::search_failed, "BDF4 boundary polynomial has no second real root");
}

Bdf5Boundary bdf5_boundary(double x, double s) {
    Bdf5Boundary out;
    out.A = horner_ascending({-15.0 / 4.0, 103.0 / 60.0, 0.0, -28.0 / 3.0, 10.0, -16.0 / 5.0}, x);
    out.B = horner_ascending({959.0 / 225.0, -137.0 / 48.0, 2603.0 / 225.0, -137.0 / 12.0, 274.0 / 75.0}, x);
    out.disc = out.A * out.A - 4.0 * out.B;
    out.value = 1.0 + out.A * s + out.B * s * s;
    return out;
}

std::vector<double> bdf5_discriminant_polynomial() {
    return {256.0 / 25.0,      -64.0,           2396.0 / 15.0,  -560.0 / 3.0,
            17128.0 / 225.0,   175.0 / 3.0,     -27373.0 / 225.0, 347.0 / 3.0,
            -155983.0 / 3600.0, -35.0 / 24.0,   -10751.0 / 3600.0};
}

std::vector<double> bdf5_discriminant_roots() {
    return real_roots(bdf5_discriminant_polynomial());
}

std::string discriminant_csv(int k, int points) {
    if (points < 2) throw Error(ErrorCode::invalid_config, "discriminant trace needs at least two points");
    std::ostringstream out;
    if (k == 3 || k == 4) {
        const double s_max = s_max_of(k);
        out << "s,discriminant\n";
        for (int i = 0; i < points; ++i) {
            const double s = s_max * (kGridMargin + (1.0 - 2.0 * kGridMargin) * i / (points - 1));
            out << fmt(s) << ',' << fmt(k == 3 ? cubic_discriminant(s) : quartic_discriminant(s)) << '\n';
        }
    } else if (k == 5) {
        out << "x,A,B,disc\n";
        for (int i = 0; i < points; ++i) {
            const double x = -1.0 + 2.0 * i / (points - 1);
            const auto b = bdf5_boundary(x, 0.0);
            out << fmt(x) << ',' << fmt(b.A) << ',' << fmt(b.B) << ',' << fmt(b.disc) << '\n';
        }
    } else {
        throw Error(ErrorCode::order_out_of_range, "discriminant traces exist for k = 3, 4, 5");
    }
    return out.str();
}

Eigen::MatrixXd contraction_matrix(int k, double s) {
    return companion_matrix(char_poly(k, s));
}

ContractionReport contraction_exponent(int k, double s1, double s0, int grid, int max_power) {
    const double s_max = s_max_of(k);
    if (!(s1 > 0.0 && s1 < s0) || grid < 2)
        throw Error(ErrorCode::invalid_config, "contraction needs 0 < s1 < s0 and grid >= 2");

    std::vector<Eigen::MatrixXd> M(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const double s = s1 + (s0 - s1) * i / (grid - 1);
        M[static_cast<std::size_t>(i)] = contraction_matrix(k, s);
        const double rho = max_root_modulus_unchecked(k, s);
        if (rho >= 1.0)
            throw Error(ErrorCode::no_contraction,
                        "spectral radius " + fmt(rho) + " >= 1 at s = " + fmt(s));
    }
    if (s0 >= s_max)
        throw Error(ErrorCode::domain_error, "s0 = " + fmt(s0) + " must be below 1/A_0 = " + fmt(s_max));

    ContractionReport r;
    r.k = k;
    r.s1 = s1;
    r.s0 = s0;
    r.grid = grid;

    std::vector<Eigen::MatrixXd> P(M.size(), Eigen::MatrixXd::Identity(k, k));
    for (int n = 1; n <= max_power; ++n) {
        double sup = 0.0;
        for (std::size_t i = 0; i < M.size(); ++i) {
            P[i] = M[i] * P[i];
            sup = std::max(sup, spectral_norm(P[i]));
        }
        if (sup < 1.0) {
            r.n0 = n;
            r.eps0 = sup;
            break;
        }
    }
    if (r.n0 == 0)
        throw Error(ErrorCode::no_contraction,
                    "no power <= " + std::to_string(max_power) + " contracts on [s1, s0]");

    constexpr int kSmallGrid = 64;
    for (int i = 1; i <= kSmallGrid; ++i) {
        const double s = s1 * i / kSmallGrid;
        Eigen::MatrixXd Mk = Eigen::MatrixXd::Identity(k, k);
        const Eigen::MatrixXd m = contraction_matrix(k, s);
        for (int j = 0; j < k; ++j) Mk = m * Mk;
        r.small_s_norm = std::max(r.small_s_norm, spectral_norm(Mk));
    }
    r.small_s_ok = r.small_s_norm <= 0.5;
    return r;
}

double small_s_threshold(int k) {
    auto sup_norm = [k](double s1) {
        double sup = 0.0;
        for (int i = 1; i <= 64; ++i) {
            const Eigen::MatrixXd m = contraction_matrix(k, s1 * i / 64.0);
            Eigen::MatrixXd Mk = Eigen::MatrixXd::Identity(k, k);
            for (int j = 0; j < k; ++j) Mk = m * Mk;
            sup = std::max(sup, spectral_norm(Mk));
        }
        return sup;
    };
    double lo = 0.0, hi = s_max_of(k);
    if (sup_norm(hi * (1.0 - kGridMargin)) <= 0.5) return hi * (1.0 - kGridMargin);
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        (sup_norm(mid) <= 0.5 ? lo : hi) = mid;
    }
    return lo;
}

MultiplierReport multiplier_bounds(int k, double tau, double tau0, int jmax) {
    if (!(tau0 > 0.0 && tau >= tau0) || jmax < 1)
        throw Error(ErrorCode::invalid_config, "multiplier bounds need tau >= tau0 > 0 and jmax >= 1");
    const double A0 = a0_of(k);
    const double first_bound = 1.0 / (A0 + tau);
    const double outer_bound = 1.0 / (A0 + tau0);
    constexpr double kRel = 1e-15;
    MultiplierReport r;
    for (int jx = -jmax; jx <= jmax; ++jx) {
        for (int jy = -jmax; jy <= jmax; ++jy) {
            if (jx == 0 && jy == 0) continue;
            const double r2 = static_cast<double>(jx) * jx + static_cast<double>(jy) * jy;
            const double T = 1.0 / (A0 + tau * r2 * r2);
            const double second = tau * std::sqrt(r2) * T;
            r.max_first_ratio = std::max(r.max_first_ratio, T * (A0 + tau0));
            r.max_second_ratio = std::max(r.max_second_ratio, second);
            const bool ok = T > 0.0 && T <= first_bound * (1.0 + kRel) &&
                            first_bound <= outer_bound * (1.0 + kRel) && second <= 1.0;
            if (!ok && r.ok) {
                r.ok = false;
                r.violating_j = std::array<int, 2>{jx, jy};
            }
        }
    }
    return r;
}

}  // namespace bdfcert
