#include "bdfcert/polynomial.hpp"

#include "bdfcert/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace bdfcert {

namespace {

std::vector<double> trimmed(std::span<const double> coeffs) {
    std::size_t first = 0;
    while (first < coeffs.size() && coeffs[first] == 0.0) ++first;
    return {coeffs.begin() + static_cast<std::ptrdiff_t>(first), coeffs.end()};
}

template <typename T>
T horner(std::span<const T> c, T z) {
    T acc = 0;
    for (const auto& x : c) acc = acc * z + x;
    return acc;
}

Complex laguerre(std::span<const Complex> c, Complex z) {
    const int n = static_cast<int>(c.size()) - 1;
    constexpr int kMaxIter = 200;
    // Fractional steps break the rare limit cycles of the plain iteration.
    static constexpr double kFrac[] = {0.5, 0.25, 0.75, 0.13, 0.38, 0.62, 0.88, 1.0};
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        Complex p = c[0], d1 = 0, d2 = 0;
        double err = std::abs(p);
        const double az = std::abs(z);
        for (int j = 1; j <= n; ++j) {
            d2 = z * d2 + d1;
            d1 = z * d1 + p;
            p = z * p + c[j];
            err = std::abs(p) + az * err;
        }
        err *= 1e-16;
        if (std::abs(p) <= err) return z;
        d2 *= 2.0;
        const Complex g = d1 / p;
        const Complex g2 = g * g;
        const Complex h = g2 - d2 / p;
        const Complex sq = std::sqrt(static_cast<double>(n - 1) * (static_cast<double>(n) * h - g2));
        const Complex gp = g + sq, gm = g - sq;
        const double abp = std::abs(gp), abm = std::abs(gm);
        const Complex denom = abp < abm ? gm : gp;
        const Complex dx = std::max(abp, abm) > 0
                               ? static_cast<double>(n) / denom
                               : std::polar(1.0 + az, static_cast<double>(iter));
        const Complex next = z - dx;
        if (next == z) return z;
        z = (iter % 10 != 0) ? next : z - kFrac[(iter / 10) % 8] * dx;
    }
    return z;
}

Complex newton_polish(std::span<const double> c, Complex z) {
    for (int iter = 0; iter < 8; ++iter) {
        Complex p = c[0], d = 0;
        for (std::size_t j = 1; j < c.size(); ++j) {
            d = d * z + p;
            p = p * z + c[j];
        }
        if (d == Complex(0)) break;
        const Complex step = p / d;
        const Complex next = z - step;
        if (!(std::isfinite(next.real()) && std::isfinite(next.imag()))) break;
        if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(z))) {
            z = next;
            break;
        }
        // Accept only steps that do not increase the residual.
        Complex pn = c[0];
        for (std::size_t j = 1; j < c.size(); ++j) pn = pn * next + c[j];
        if (std::abs(pn) > std::abs(p)) break;
        z = next;
    }
    return z;
}

}  // namespace

Complex evaluate(std::span<const double> coeffs, Complex z) {
    Complex acc = 0;
    for (double x : coeffs) acc = acc * z + x;
    return acc;
}

double evaluate(std::span<const double> coeffs, double x) {
    return horner<double>(coeffs, x);
}

Eigen::MatrixXd companion_matrix(std::span<const double> c) {
    if (c.size() < 2 || c[0] != 1.0)
        throw Error(ErrorCode::dimension_mismatch, "companion matrix needs a monic polynomial of degree >= 1");
    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) m(0, j) = -c[static_cast<std::size_t>(j + 1)];
    for (Eigen::Index i = 1; i < n; ++i) m(i, i - 1) = 1.0;
    return m;
}

std::vector<Complex> companion_roots(std::span<const double> coeffs) {
    auto c = trimmed(coeffs);
    if (c.size() < 2) return {};
    const double lead = c[0];
    for (auto& x : c) x /= lead;
    const Eigen::MatrixXd m = companion_matrix(c);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::search_failed, "companion eigenvalue iteration did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<Complex> laguerre_roots(std::span<const double> coeffs) {
    const auto c = trimmed(coeffs);
    if (c.size() < 2) return {};
    std::vector<Complex> work(c.begin(), c.end());
    std::vector<Complex> roots;
    roots.reserve(c.size() - 1);
    while (work.size() > 1) {
        Complex z = laguerre(work, Complex(0.0, 0.0));
        z = newton_polish(c, z);
        if (std::abs(z.imag()) <= 1e-14 * std::abs(z.real())) z = Complex(z.real(), 0.0);
        roots.push_back(z);
        // Synthetic division by (x - z).
        std::vector<Complex> q(work.size() - 1);
        Complex carry = 0;
        for (std::size_t j = 0; j + 1 < work.size(); ++j) {
            carry = carry * z + work[j];
            q[j] = carry;
        }
        work = std::move(q);
    }
    return roots;
}

std::vector<double> real_roots(std::span<const double> coeffs, double imag_tol) {
    const auto c = trimmed(coeffs);
    std::vector<double> out;
    for (const Complex& z : companion_roots(c)) {
        if (std::abs(z.imag()) > imag_tol * std::max(1.0, std::abs(z))) continue;
        out.push_back(newton_polish(c, Complex(z.real(), 0.0)).real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

double max_modulus(const std::vector<Complex>& roots) {
    double m = 0.0;
    for (const auto& z : roots) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace bdfcert
