#pragma once

#include <Eigen/Core>

#include <complex>
#include <span>
#include <vector>

namespace bdfcert {

/// Polynomials are coefficient vectors in descending powers: c[0] x^n + c[1] x^{n-1} + ... + c[n].
using Complex = std::complex<double>;

Complex evaluate(std::span<const double> coeffs, Complex z);
double evaluate(std::span<const double> coeffs, double x);

/// Top-row companion matrix of the monic polynomial x^n + c[1] x^{n-1} + ... + c[n]:
/// first row -c[1..n], identity on the sub-diagonal. Requires c[0] == 1.
Eigen::MatrixXd companion_matrix(std::span<const double> monic_coeffs);

/// Roots as eigenvalues of the companion matrix. Leading zero coefficients are dropped.
std::vector<Complex> companion_roots(std::span<const double> coeffs);

/// Laguerre iteration with deflation, each root polished against the undeflated polynomial.
/// Shares no code with companion_roots; used to cross-check it.
std::vector<Complex> laguerre_roots(std::span<const double> coeffs);

/// Real roots (|imag| <= imag_tol * max(1, |root|)) sorted ascending, Newton-polished.
std::vector<double> real_roots(std::span<const double> coeffs, double imag_tol = 1e-9);

double max_modulus(const std::vector<Complex>& roots);

}  // namespace bdfcert
