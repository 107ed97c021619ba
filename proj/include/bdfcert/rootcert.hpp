#pragma once

#include "bdfcert/polynomial.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace bdfcert {

/// max_i |lambda_i(s)| of the characteristic polynomial on a grid in (0, 1/A_0).
struct RootScanReport {
    int k = 0;
    std::vector<double> s_grid;
    std::vector<double> max_modulus;
    double s0 = 0.0;  // right end of the grid

    double sup() const;
};

struct ContractionReport {
    int k = 0;
    double s1 = 0.0;
    double s0 = 0.0;
    int n0 = 0;
    double eps0 = 0.0;
    int grid = 0;
    /// sup over (0, s1] of ||M(s)^k||_2 and whether it is <= 1/2.
    double small_s_norm = 0.0;
    bool small_s_ok = false;
};

struct MultiplierReport {
    bool ok = true;
    std::optional<std::array<int, 2>> violating_j;
    double max_first_ratio = 0.0;   // max_j T(j) (A_0 + tau0)
    double max_second_ratio = 0.0;  // max_j tau |j| T(j)
};

struct Bdf5Boundary {
    double A = 0.0;
    double B = 0.0;
    double disc = 0.0;   // A^2 - 4B
    double value = 0.0;  // 1 + A s + B s^2
};

/// Monic coefficients (1, A_1 s, ..., A_k s) in descending powers of lambda.
std::vector<double> char_poly(int k, double s);

/// Companion-eigenvalue max modulus; s must lie in (0, 1/A_0) (ErrorCode::domain_error).
double max_root_modulus(int k, double s);
/// Same without the domain check, for scans past 1/A_0.
double max_root_modulus_unchecked(int k, double s);
/// Independent route: Laguerre iteration with deflation.
double max_root_modulus_laguerre(int k, double s);

/// n_points uniform nodes on [eps, 1 - eps] / A_0 with relative margin eps = 1e-6.
RootScanReport scan_max_root(int k, int n_points);
std::string to_csv(const RootScanReport& report);

double cubic_discriminant(double s);
double quartic_discriminant(double s);

/// Non-unit real root of lambda^4 - 4 s lambda^3 + 3 s lambda^2 - 4/3 s lambda + 1/4 s at s = 12/25.
double bdf4_lambda_star();

Bdf5Boundary bdf5_boundary(double x, double s);
/// A^2 - 4B as the expanded degree-10 polynomial, descending powers of x.
std::vector<double> bdf5_discriminant_polynomial();
/// Real roots of the degree-10 discriminant.
std::vector<double> bdf5_discriminant_roots();

/// Discriminant traces for plotting: k = 3 and 4 sample s on (0, 1/A_0), k = 5 samples x on [-1, 1].
std::string discriminant_csv(int k, int points);

/// Companion matrix of the characteristic polynomial: first row -(A_1..A_k) s, shifted identity below.
Eigen::MatrixXd contraction_matrix(int k, double s);

/// Smallest n with sup_{s in grid of [s1, s0]} ||M(s)^n||_2 < 1.
ContractionReport contraction_exponent(int k, double s1, double s0, int grid, int max_power = 20000);

/// Largest s1 (to 1e-6 relative) with sup_{0 < s <= s1} ||M(s)^k||_2 <= 1/2.
double small_s_threshold(int k);

/// Checks 0 < T(j) <= 1/(A_0 + tau) <= 1/(A_0 + tau0) and tau |j| T(j) <= 1 for all
/// nonzero j with |j|_inf <= jmax, where T(j) = 1/(A_0 + tau |j|^4).
MultiplierReport multiplier_bounds(int k, double tau, double tau0, int jmax);

}  // namespace bdfcert
