#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace bdfcert {

using Complex = std::complex<double>;

/// Periodic square [origin, origin + domain_length)^2 sampled on N x N points.
struct GridSpec {
    int N = 64;
    double domain_length = 2.0 * std::numbers::pi;
    double origin = -std::numbers::pi;
    bool dealias = true;  // 2/3-rule truncation of the nonlinear term

    static GridSpec torus_2pi(int N, bool dealias = true) { return {N, 2.0 * std::numbers::pi, -std::numbers::pi, dealias}; }
    static GridSpec unit_square(int N, bool dealias = true) { return {N, 1.0, 0.0, dealias}; }

    std::string domain_name() const;
    void validate() const;
};

/// Normalised half-spectrum of a real field: u(x) = sum_j c_j exp(i k_j . x), stored as
/// N rows (first wavenumber, FFT order) by N/2 + 1 columns (second wavenumber, 0..N/2).
struct SpectralField {
    int N = 0;
    std::vector<Complex> coeffs;

    SpectralField() = default;
    explicit SpectralField(int n) : N(n), coeffs(static_cast<std::size_t>(n) * (n / 2 + 1)) {}

    int cols() const { return N / 2 + 1; }
    Complex& at(int i, int j) { return coeffs[static_cast<std::size_t>(i) * cols() + j]; }
    const Complex& at(int i, int j) const { return coeffs[static_cast<std::size_t>(i) * cols() + j]; }
    Complex mean() const { return coeffs.front(); }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    /// this += s * o
    SpectralField& axpy(double s, const SpectralField& o);
};

SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator+(SpectralField a, const SpectralField& b);

/// Transforms, derivative multipliers and Parseval norms on one grid. Owns the FFTW plans.
class SpectralGrid {
public:
    explicit SpectralGrid(GridSpec spec);
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;
    SpectralGrid(SpectralGrid&&) noexcept;
    SpectralGrid& operator=(SpectralGrid&&) noexcept;

    const GridSpec& spec() const { return spec_; }
    int N() const { return spec_.N; }
    double area() const { return spec_.domain_length * spec_.domain_length; }
    double cell_area() const { return area() / (static_cast<double>(N()) * N()); }

    /// Grid coordinate of index i along either axis.
    double coordinate(int i) const { return spec_.origin + spec_.domain_length * i / N(); }

    SpectralField forward(std::span<const double> values) const;
    std::vector<double> inverse(const SpectralField& field) const;

    /// Physical gradient components (d/dx1, d/dx2).
    void gradient(const SpectralField& field, std::vector<double>& gx, std::vector<double>& gy) const;
    /// Spectral divergence of a physical vector field.
    SpectralField divergence(std::span<const double> fx, std::span<const double> fy) const;

    /// Scaled wavenumbers; first-derivative multipliers vanish on the Nyquist index.
    double k1(int i) const { return k_row_[static_cast<std::size_t>(i)]; }
    double k2(int j) const { return k_col_[static_cast<std::size_t>(j)]; }
    double k1_derivative(int i) const { return kd_row_[static_cast<std::size_t>(i)]; }
    double k2_derivative(int j) const { return kd_col_[static_cast<std::size_t>(j)]; }
    double k_squared(int i, int j) const { return k1(i) * k1(i) + k2(j) * k2(j); }

    /// Whether mode (i, j) survives the 2/3 rule (always true when dealiasing is off).
    bool kept(int i, int j) const;
    void truncate(SpectralField& field) const;

    /// L2 inner product and norms over the domain via Parseval.
    double inner(const SpectralField& f, const SpectralField& g) const;
    double l2_norm_sq(const SpectralField& f) const { return inner(f, f); }
    double grad_norm_sq(const SpectralField& f) const;
    double laplacian_norm_sq(const SpectralField& f) const;

    /// Weight of column j in Parseval sums over the half-spectrum.
    double column_weight(int j) const { return (j == 0 || 2 * j == N()) ? 1.0 : 2.0; }

private:
    struct Plans;
    GridSpec spec_;
    std::unique_ptr<Plans> plans_;
    std::vector<double> k_row_, k_col_, kd_row_, kd_col_;
};

}  // namespace bdfcert
