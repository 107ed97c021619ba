#pragma once

#include "bdfcert/rational.hpp"
#include "bdfcert/scheme_coeffs.hpp"

#include <Eigen/Core>

#include <optional>
#include <utility>
#include <vector>

namespace bdfcert {

/// Bounds on f(z) = z / (1 + |z|^2): |f(x) - f(y)| <= |x - y| and -x^T Df(z) x <= L |x|^2.
struct NonlinearityBounds {
    static constexpr double lipschitz = 0.125;
    static Rational lipschitz_exact() { return Rational(1, 8); }
};

/// Exact form of a rank-2 certificate whose p is a rational vector times a common square root:
/// p = sqrt(scale_sq) * q. Available for k = 2 and k = 3.
struct ExactCertificate {
    Rational alpha;
    Rational scale_sq;
    RationalVector q;
    RationalMatrix U;
    RationalMatrix F;
    Rational beta;
};

/// One row of the threshold tables with its proof artifacts.
struct ModulationCertificate {
    int k = 0;
    double alpha = 0.0;
    Eigen::VectorXd p;
    Eigen::MatrixXd U;  // k x k, upper triangular
    Eigen::MatrixXd F;  // (k-1) x (k-1), upper triangular
    double beta = 0.0;
    double residual = 0.0;  // max |quadratic_residual|
    std::optional<ExactCertificate> exact;
};

/// U = [a; 0] - [F 0; 0 0] + [0 0; 0 F].
Eigen::MatrixXd assemble_U(const Eigen::MatrixXd& F, const RationalVector& a);
RationalMatrix assemble_U(const RationalMatrix& F, const RationalVector& a);

/// Inverts assemble_U row by row. Throws ErrorCode::infeasible when U violates the
/// anti-diagonal sums sum_{j-i=s} U_ij = a_s (or is not upper triangular) beyond tol.
Eigen::MatrixXd recover_F(const Eigen::MatrixXd& U, const RationalVector& a, double tol = 1e-10);
RationalMatrix recover_F(const RationalMatrix& U, const RationalVector& a);

/// U_ii = p_i^2 + alpha [i = 1], U_ij = 2 p_i p_j for i < j, zero below the diagonal.
Eigen::MatrixXd rank2_U(const Eigen::VectorXd& p, double alpha);
RationalMatrix rank2_U(const Rational& scale_sq, const RationalVector& q, const Rational& alpha);

/// Defects of the k quadratic equations: s = 0: sum p_i^2 - (a_0 - alpha);
/// s >= 1: 2 sum_j p_j p_{j+s} - a_s.
Eigen::VectorXd quadratic_residual(const Eigen::VectorXd& p, double alpha, const RationalVector& a);

/// ((sum p_i)^2 - (1 - alpha), (sum (-1)^{i-1} p_i)^2 - (sum (-1)^i a_i - alpha)).
std::pair<double, double> sum_identities(const Eigen::VectorXd& p, double alpha, const RationalVector& a);

/// beta = 2 alpha / (L/2 + 2 c_1)^2.
double beta_threshold(double alpha, double c1, double L = NonlinearityBounds::lipschitz);
Rational beta_threshold(const Rational& alpha, const Rational& c1,
                        const Rational& L = NonlinearityBounds::lipschitz_exact());

/// Largest admissible time step beta * nu for the certificate's alpha.
double tau_threshold(const ModulationCertificate& cert, double c1,
                     double L = NonlinearityBounds::lipschitz, double nu = 1.0);

/// Maximal alpha over the rank-2 family for 2 <= k <= 5. k = 2, 3 in closed form,
/// k = 4, 5 by a parameter scan plus golden-section refinement to tol on alpha.
ModulationCertificate alpha_max(int k, double tol = 1e-12);

/// The quadratic system is invariant under p -> (p_k, ..., p_1). The reversed vector is an
/// equally valid certificate with the same alpha and beta but a different U and F.
/// alpha_max returns the orientation with the smaller sum_i (i-1) p_i^2.
ModulationCertificate reversed(const ModulationCertificate& cert);

struct EigenReport {
    bool ok = false;
    double min_eigenvalue = 0.0;
};

/// Smallest eigenvalue of sym(U) - alpha e1 e1^T must be >= -tol.
EigenReport verify_coercivity(const Eigen::MatrixXd& U, double alpha, double tol = 1e-10);

/// Smallest eigenvalue of sym(F) must be >= -tol.
EigenReport check_F_psd(const Eigen::MatrixXd& F, double tol = 1e-10);

/// One sample of the alpha(a) profile that the k = 4, 5 searches maximise.
struct AlphaSample {
    double a = 0.0;
    int branch = 0;  // k = 4: +1 / -1 root of the quadratic in b; k = 5: index of the cubic root
    double alpha = 0.0;
};

/// Feasible points of the parameter scan on a uniform grid, for plotting and inspection.
std::vector<AlphaSample> alpha_profile(int k, double a_lo, double a_hi, int points);

/// Admissible-interval endpoints a_L < a_R of the BDF4 quartic discriminant
/// 529 + 754a + 343a^2 + 78a^3 + 9a^4.
std::pair<double, double> bdf4_interval_endpoints();

}  // namespace bdfcert
