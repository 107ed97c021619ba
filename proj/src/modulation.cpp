#include "bdfcert/modulation.hpp"

#include "bdfcert/error.hpp"
#include "bdfcert/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace bdfcert {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <typename Matrix, typename Scalar>
Matrix assemble_impl(const Matrix& F, const std::vector<Scalar>& a) {
    const auto k = static_cast<Eigen::Index>(a.size());
    if (k < 2 || F.rows() != k - 1 || F.cols() != k - 1)
        throw Error(ErrorCode::dimension_mismatch,
                    "F must be (k-1)x(k-1) for k = " + std::to_string(k));
    Matrix U = Matrix::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) U(0, j) = a[static_cast<std::size_t>(j)];
    U.topLeftCorner(k - 1, k - 1) -= F;
    U.bottomRightCorner(k - 1, k - 1) += F;
    return U;
}

template <typename Matrix, typename Scalar>
Matrix recover_impl(const Matrix& U, const std::vector<Scalar>& a) {
    const auto k = static_cast<Eigen::Index>(a.size());
    if (k < 2 || U.rows() != k || U.cols() != k)
        throw Error(ErrorCode::dimension_mismatch, "U must be k x k for k = " + std::to_string(k));
    Matrix F = Matrix::Zero(k - 1, k - 1);
    for (Eigen::Index j = 0; j < k - 1; ++j) F(0, j) = a[static_cast<std::size_t>(j)] - U(0, j);
    for (Eigen::Index i = 1; i < k - 1; ++i)
        for (Eigen::Index j = i; j < k - 1; ++j) F(i, j) = F(i - 1, j - 1) - U(i, j);
    return F;
}

std::vector<double> as_double(const RationalVector& a) {
    return to_double(a);
}

/// Flip to the front-loaded orientation (the system is reversal invariant), then make the
/// largest-magnitude entry positive.
Eigen::VectorXd canonical_orientation(const Eigen::VectorXd& p) {
    const Eigen::Index k = p.size();
    double front = 0.0, back = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        front += static_cast<double>(i) * p(i) * p(i);
        back += static_cast<double>(k - 1 - i) * p(i) * p(i);
    }
    Eigen::VectorXd out = (back < front - 1e-12) ? Eigen::VectorXd(p.reverse()) : p;
    Eigen::Index imax = 0;
    for (Eigen::Index i = 1; i < k; ++i)
        if (std::abs(out(i)) > std::abs(out(imax)) + 1e-12) imax = i;
    if (out(imax) < 0) out = -out;
    return out;
}

struct Candidate {
    double alpha = kNegInf;
    Eigen::VectorXd p;
};

double max_abs(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// --- BDF4: a = p2/p1, b = p3/p2, c = p4/p3 ------------------------------------------------

double bdf4_discriminant(double a) {
    return 529.0 + a * (754.0 + a * (343.0 + a * (78.0 + 9.0 * a)));
}

std::optional<Candidate> bdf4_point(double a, int branch, const RationalVector& coeffs) {
    if (a == 0.0 || 13.0 + 3.0 * a == 0.0) return std::nullopt;
    double disc = bdf4_discriminant(a);
    if (disc < 0.0) {
        if (disc > -1e-12) disc = 0.0;
        else return std::nullopt;
    }
    const double b = (23.0 + 13.0 * a + 3.0 * a * a + branch * std::sqrt(disc)) / (6.0 * a);
    const double c = -3.0 / (13.0 + 3.0 * a);
    const double abc = a * b * c;
    if (!(abc < 0.0) || b == 0.0 || !std::isfinite(abc)) return std::nullopt;
    Eigen::VectorXd p(4);
    p(3) = std::sqrt(-abc / 8.0);
    p(2) = p(3) / c;
    p(1) = p(2) / b;
    p(0) = p(1) / a;
    const double alpha = 25.0 / 12.0 + (1.0 / (abc) + a / (b * c) + a * b / c + abc) / 8.0;
    if (!p.allFinite() || !std::isfinite(alpha)) return std::nullopt;
    // The reduction divides by the ratios; reject points where it lost the original system.
    if (max_abs(quadratic_residual(p, alpha, coeffs)) > 1e-8 * (1.0 + p.squaredNorm()))
        return std::nullopt;
    return Candidate{alpha, p};
}

std::vector<AlphaSample> bdf4_samples(double a, const RationalVector& coeffs,
                                      std::vector<Candidate>* out) {
    std::vector<AlphaSample> samples;
    for (int branch : {+1, -1}) {
        if (auto cand = bdf4_point(a, branch, coeffs)) {
            samples.push_back({a, branch, cand->alpha});
            if (out) out->push_back(*cand);
        }
    }
    return samples;
}

// --- BDF5: a = p2/p1, b = p3/p2, c = p4/p3, d = p5/p4 --------------------------------------

using Poly = std::vector<double>;  // ascending powers of b

Poly poly_mul(const Poly& x, const Poly& y) {
    Poly out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return out;
}

Poly poly_add(Poly x, const Poly& y) {
    if (y.size() > x.size()) x.resize(y.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) x[i] += y[i];
    return x;
}

/// Cubic in b obtained by eliminating c and d from the BDF5 reduced system.
Poly bdf5_cubic(double a) {
    const double K = 137.0 / 12.0 + a * a + 21.0 / 4.0 * a;
    const double e = 21.0 / 4.0 + a;
    const Poly D{K, -a};                      // K - a b
    const Poly first{0.0, 163.0 / 12.0, -e * a};  // b (163/12 - e a b)
    const Poly one_plus_ab{1.0, a};
    const Poly last{0.0, 0.0, -e * a};        // -e a b^2
    return poly_add(poly_add(poly_mul(first, D), poly_mul(one_plus_ab, poly_mul(D, D))), last);
}

std::vector<double> cubic_real_roots(const Poly& ascending) {
    std::vector<double> desc(ascending.rbegin(), ascending.rend());
    return real_roots(desc, 1e-9);
}

std::vector<Candidate> bdf5_points(double a, const RationalVector& coeffs) {
    std::vector<Candidate> out;
    const double e = 21.0 / 4.0 + a;
    if (a == 0.0 || e == 0.0) return out;
    const double K = 137.0 / 12.0 + a * a + 21.0 / 4.0 * a;
    for (double b : cubic_real_roots(bdf5_cubic(a))) {
        const double D = K - a * b;
        if (!(a * b > 0.0 && D > 0.0)) continue;
        const double d = -1.0 / e;
        const double c = -e / D;
        const double abcd = a * b * c * d;
        if (!(abcd > 0.0) || !std::isfinite(abcd)) continue;
        Eigen::VectorXd p(5);
        p(4) = std::sqrt(abcd / 10.0);
        p(3) = p(4) / d;
        p(2) = p(3) / c;
        p(1) = p(2) / b;
        p(0) = p(1) / a;
        const double alpha =
            137.0 / 60.0 -
            (1.0 / abcd + a / (b * c * d) + a * b / (c * d) + a * b * c / d + abcd) / 10.0;
        if (!p.allFinite() || !std::isfinite(alpha)) continue;
        if (max_abs(quadratic_residual(p, alpha, coeffs)) > 1e-8 * (1.0 + p.squaredNorm())) continue;
        out.push_back({alpha, p});
    }
    return out;
}

// --- search driver ------------------------------------------------------------------------

using PointFn = std::function<std::vector<Candidate>(double)>;

Candidate best_of(const std::vector<Candidate>& cands) {
    Candidate best;
    for (const auto& c : cands)
        if (c.alpha > best.alpha) best = c;
    return best;
}

struct Interval {
    double lo, hi;
};

/// Uniform scan of each interval followed by golden-section refinement around the best node.
Candidate scan_and_polish(const PointFn& points, const std::vector<Interval>& pieces,
                          int nodes_per_piece, double tol) {
    Candidate best;
    double best_a = 0.0;
    Interval best_piece{0.0, 0.0};
    double h_best = 0.0;
    for (const auto& piece : pieces) {
        const double h = (piece.hi - piece.lo) / (nodes_per_piece - 1);
        for (int i = 0; i < nodes_per_piece; ++i) {
            const double a = piece.lo + h * i;
            const Candidate c = best_of(points(a));
            if (c.alpha > best.alpha) {
                best = c;
                best_a = a;
                best_piece = piece;
                h_best = h;
            }
        }
    }
    if (!std::isfinite(best.alpha))
        throw Error(ErrorCode::search_failed, "no feasible point on the parameter grid");

    auto objective = [&](double a) { return best_of(points(a)).alpha; };
    double lo = std::max(best_piece.lo, best_a - h_best);
    double hi = std::min(best_piece.hi, best_a + h_best);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int iter = 0; iter < 300; ++iter) {
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(best_a))) break;
        if (std::abs(f1 - f2) <= 0.01 * tol && hi - lo <= std::sqrt(tol)) break;
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    for (double a : {x1, x2, 0.5 * (lo + hi)}) {
        const Candidate c = best_of(points(a));
        if (c.alpha > best.alpha) best = c;
    }
    return best;
}

ModulationCertificate finish(int k, double alpha, const Eigen::VectorXd& p, const SchemeTable& table) {
    ModulationCertificate cert;
    cert.k = k;
    cert.alpha = alpha;
    cert.p = canonical_orientation(p);
    cert.U = rank2_U(cert.p, alpha);
    cert.F = recover_F(cert.U, table.a);
    cert.beta = beta_threshold(alpha, to_double(table.c1()));
    cert.residual = max_abs(quadratic_residual(cert.p, alpha, table.a));
    return cert;
}

ModulationCertificate finish_exact(int k, const ExactCertificate& ex, const SchemeTable& table) {
    const double scale = std::sqrt(to_double(ex.scale_sq));
    Eigen::VectorXd p(k);
    for (int i = 0; i < k; ++i) p(i) = scale * to_double(ex.q[static_cast<std::size_t>(i)]);
    ModulationCertificate cert = finish(k, to_double(ex.alpha), p, table);
    cert.U = to_double(ex.U);
    cert.F = to_double(ex.F);
    cert.beta = to_double(ex.beta);
    cert.exact = ex;
    return cert;
}

ExactCertificate make_exact(const Rational& alpha, const Rational& scale_sq, RationalVector q,
                            const SchemeTable& table) {
    ExactCertificate ex;
    ex.alpha = alpha;
    ex.scale_sq = scale_sq;
    ex.q = std::move(q);
    ex.U = rank2_U(ex.scale_sq, ex.q, ex.alpha);
    ex.F = recover_F(ex.U, table.a);
    ex.beta = beta_threshold(ex.alpha, table.c1());
    return ex;
}

/// BDF3 same-sign case: p1 = p3 = R/4, p2 = -D/(2R) with R^2 = 8 a_2, D = (a_0 - a_1 + a_2) - 1,
/// alpha = 1 - (R^2 - D)^2 / (4 R^2). Everything except R is rational, so p = q / R.
ExactCertificate bdf3_exact(const SchemeTable& t) {
    const Rational R2 = 8 * t.a[2];
    const Rational D = (t.a[0] - t.a[1] + t.a[2]) - 1;
    const Rational alpha = 1 - (R2 - D) * (R2 - D) / (4 * R2);
    const Rational scale_sq = 1 / R2;
    RationalVector q{R2 / 4, -D / 2, R2 / 4};
    return make_exact(alpha, scale_sq, std::move(q), t);
}

}  // namespace

Eigen::MatrixXd assemble_U(const Eigen::MatrixXd& F, const RationalVector& a) {
    return assemble_impl<Eigen::MatrixXd>(F, as_double(a));
}

RationalMatrix assemble_U(const RationalMatrix& F, const RationalVector& a) {
    return assemble_impl<RationalMatrix>(F, a);
}

Eigen::MatrixXd recover_F(const Eigen::MatrixXd& U, const RationalVector& a, double tol) {
    const auto ad = as_double(a);
    Eigen::MatrixXd F = recover_impl<Eigen::MatrixXd>(U, ad);
    const double defect = (assemble_impl<Eigen::MatrixXd>(F, ad) - U).cwiseAbs().maxCoeff();
    if (defect > tol)
        throw Error(ErrorCode::infeasible,
                    "U violates the anti-diagonal sums (defect " + std::to_string(defect) + ")");
    return F;
}

RationalMatrix recover_F(const RationalMatrix& U, const RationalVector& a) {
    RationalMatrix F = recover_impl<RationalMatrix>(U, a);
    if (assemble_impl<RationalMatrix>(F, a) != U)
        throw Error(ErrorCode::infeasible, "U violates the anti-diagonal sums exactly");
    return F;
}

Eigen::MatrixXd rank2_U(const Eigen::VectorXd& p, double alpha) {
    const Eigen::Index k = p.size();
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        U(i, i) = p(i) * p(i);
        for (Eigen::Index j = i + 1; j < k; ++j) U(i, j) = 2.0 * p(i) * p(j);
    }
    if (k > 0) U(0, 0) += alpha;
    return U;
}

RationalMatrix rank2_U(const Rational& scale_sq, const RationalVector& q, const Rational& alpha) {
    const auto k = static_cast<Eigen::Index>(q.size());
    RationalMatrix U = RationalMatrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const auto qi = q[static_cast<std::size_t>(i)];
        U(i, i) = scale_sq * qi * qi;
        for (Eigen::Index j = i + 1; j < k; ++j)
            U(i, j) = 2 * scale_sq * qi * q[static_cast<std::size_t>(j)];
    }
    if (k > 0) U(0, 0) += alpha;
    return U;
}

Eigen::VectorXd quadratic_residual(const Eigen::VectorXd& p, double alpha, const RationalVector& a) {
    const Eigen::Index k = p.size();
    if (static_cast<Eigen::Index>(a.size()) != k)
        throw Error(ErrorCode::dimension_mismatch, "p and a must have the same length");
    Eigen::VectorXd r(k);
    r(0) = p.squaredNorm() - (to_double(a[0]) - alpha);
    for (Eigen::Index s = 1; s < k; ++s) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j + s < k; ++j) acc += p(j) * p(j + s);
        r(s) = 2.0 * acc - to_double(a[static_cast<std::size_t>(s)]);
    }
    return r;
}

std::pair<double, double> sum_identities(const Eigen::VectorXd& p, double alpha, const RationalVector& a) {
    double plain = 0.0, alternating = 0.0, alt_a = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        plain += p(i);
        alternating += (i % 2 == 0 ? 1.0 : -1.0) * p(i);
    }
    for (std::size_t i = 0; i < a.size(); ++i) alt_a += (i % 2 == 0 ? 1.0 : -1.0) * to_double(a[i]);
    return {plain * plain - (1.0 - alpha), alternating * alternating - (alt_a - alpha)};
}

double beta_threshold(double alpha, double c1, double L) {
    const double denom = L / 2.0 + 2.0 * c1;
    return 2.0 * alpha / (denom * denom);
}

Rational beta_threshold(const Rational& alpha, const Rational& c1, const Rational& L) {
    const Rational denom = L / 2 + 2 * c1;
    return 2 * alpha / (denom * denom);
}

double tau_threshold(const ModulationCertificate& cert, double c1, double L, double nu) {
    return beta_threshold(cert.alpha, c1, L) * nu;
}

std::pair<double, double> bdf4_interval_endpoints() {
    const double inner = std::sqrt(-179.0 + 24.0 * std::sqrt(78.0));
    return {(-13.0 - inner) / 6.0, (-13.0 + inner) / 6.0};
}

ModulationCertificate alpha_max(int k, double tol) {
    if (k == 6)
        throw Error(ErrorCode::order_out_of_range,
                    "rank-2 certificates do not exist for BDF6 (alpha_max < 0); only 2 <= k <= 5");
    if (k < 2 || k > 5)
        throw Error(ErrorCode::order_out_of_range,
                    "alpha_max is defined for 2 <= k <= 5, got " + std::to_string(k));
    if (!(tol > 0.0)) throw Error(ErrorCode::invalid_config, "tolerance must be positive");
    const SchemeTable table = scheme_table(k);

    if (k == 2) {
        // p = (1/2, -1/2): p1^2 + p2^2 = a0 - 1, 2 p1 p2 = a1.
        return finish_exact(2, make_exact(Rational(1), Rational(1, 4), {Rational(1), Rational(-1)}, table),
                            table);
    }
    if (k == 3) return finish_exact(3, bdf3_exact(table), table);

    constexpr int kNodes = 100000;
    Candidate best;
    if (k == 4) {
        const auto [aL, aR] = bdf4_interval_endpoints();
        constexpr double kReach = 100.0;
        constexpr double kGap = 1e-9;
        const std::vector<Interval> pieces{{-kReach, -13.0 / 3.0 - kGap},
                                           {-13.0 / 3.0 + kGap, aL},
                                           {aR, -kGap},
                                           {kGap, kReach}};
        PointFn points = [&](double a) {
            std::vector<Candidate> out;
            bdf4_samples(a, table.a, &out);
            return out;
        };
        best = scan_and_polish(points, pieces, kNodes, tol);
    } else {
        constexpr double kGap = 1e-9;
        const std::vector<Interval> pieces{{-30.0, -21.0 / 4.0 - kGap}, {-21.0 / 4.0 + kGap, 30.0}};
        PointFn points = [&](double a) { return bdf5_points(a, table.a); };
        best = scan_and_polish(points, pieces, kNodes, tol);
    }
    return finish(k, best.alpha, best.p, table);
}

std::vector<AlphaSample> alpha_profile(int k, double a_lo, double a_hi, int points) {
    if (k != 4 && k != 5)
        throw Error(ErrorCode::order_out_of_range, "alpha profiles exist for k = 4 and k = 5");
    if (points < 2 || !(a_hi > a_lo)) throw Error(ErrorCode::invalid_config, "bad profile grid");
    const SchemeTable table = scheme_table(k);
    std::vector<AlphaSample> out;
    const double h = (a_hi - a_lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double a = a_lo + h * i;
        if (k == 4) {
            for (const auto& s : bdf4_samples(a, table.a, nullptr)) out.push_back(s);
        } else {
            const auto cands = bdf5_points(a, table.a);
            for (std::size_t r = 0; r < cands.size(); ++r)
                out.push_back({a, static_cast<int>(r), cands[r].alpha});
        }
    }
    return out;
}

ModulationCertificate reversed(const ModulationCertificate& cert) {
    const SchemeTable table = scheme_table(cert.k);
    ModulationCertificate out = cert;
    out.p = cert.p.reverse();
    out.U = rank2_U(out.p, out.alpha);
    out.F = recover_F(out.U, table.a);
    out.residual = max_abs(quadratic_residual(out.p, out.alpha, table.a));
    if (cert.exact) {
        RationalVector q(cert.exact->q.rbegin(), cert.exact->q.rend());
        out.exact = make_exact(cert.exact->alpha, cert.exact->scale_sq, std::move(q), table);
        out.U = to_double(out.exact->U);
        out.F = to_double(out.exact->F);
    }
    return out;
}

EigenReport verify_coercivity(const Eigen::MatrixXd& U, double alpha, double tol) {
    if (U.rows() != U.cols() || U.rows() == 0)
        throw Error(ErrorCode::dimension_mismatch, "U must be square and non-empty");
    Eigen::MatrixXd S = 0.5 * (U + U.transpose());
    S(0, 0) -= alpha;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    return {lo >= -tol, lo};
}

EigenReport check_F_psd(const Eigen::MatrixXd& F, double tol) {
    if (F.rows() != F.cols())
        throw Error(ErrorCode::dimension_mismatch, "F must be square");
    if (F.rows() == 0) return {true, 0.0};
    const Eigen::MatrixXd S = 0.5 * (F + F.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    return {lo >= -tol, lo};
}

}  // namespace bdfcert
