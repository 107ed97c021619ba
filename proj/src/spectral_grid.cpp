#include "bdfcert/spectral_grid.hpp"

#include "bdfcert/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace bdfcert {

std::string GridSpec::domain_name() const {
    if (std::abs(domain_length - 2.0 * std::numbers::pi) < 1e-14 && std::abs(origin + std::numbers::pi) < 1e-14)
        return "[-pi,pi]^2";
    if (domain_length == 1.0 && origin == 0.0) return "[0,1]^2";
    return "[" + std::to_string(origin) + "," + std::to_string(origin + domain_length) + "]^2";
}

void GridSpec::validate() const {
    if (N < 8 || (N & (N - 1)) != 0)
        throw Error(ErrorCode::invalid_config, "grid size must be a power of two >= 8, got " + std::to_string(N));
    if (!(domain_length > 0.0)) throw Error(ErrorCode::invalid_config, "domain length must be positive");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs) c *= s;
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += s * o.coeffs[i];
    return *this;
}

SpectralField operator-(SpectralField a, const SpectralField& b) {
    return a -= b;
}

SpectralField operator+(SpectralField a, const SpectralField& b) {
    return a += b;
}

// FFTW buffers are planned once; execution copies through them so callers keep plain vectors.
struct SpectralGrid::Plans {
    int N = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit Plans(int n) : N(n) {
        const std::size_t nr = static_cast<std::size_t>(n) * n;
        const std::size_t nc = static_cast<std::size_t>(n) * (n / 2 + 1);
        real = fftw_alloc_real(nr);
        spec = fftw_alloc_complex(nc);
        r2c = fftw_plan_dft_r2c_2d(n, n, real, spec, FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_2d(n, n, spec, real, FFTW_ESTIMATE);
        if (!real || !spec || !r2c || !c2r) throw Error(ErrorCode::invalid_config, "FFTW planning failed");
    }
    ~Plans() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        fftw_free(real);
        fftw_free(spec);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

SpectralGrid::SpectralGrid(GridSpec spec) : spec_(spec) {
    spec_.validate();
    plans_ = std::make_unique<Plans>(spec_.N);
    const int n = spec_.N;
    const double scale = 2.0 * std::numbers::pi / spec_.domain_length;
    k_row_.resize(static_cast<std::size_t>(n));
    kd_row_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int m = (i <= n / 2) ? i : i - n;
        k_row_[static_cast<std::size_t>(i)] = scale * m;
        kd_row_[static_cast<std::size_t>(i)] = (2 * i == n) ? 0.0 : scale * m;
    }
    k_col_.resize(static_cast<std::size_t>(n / 2 + 1));
    kd_col_.resize(static_cast<std::size_t>(n / 2 + 1));
    for (int j = 0; j <= n / 2; ++j) {
        k_col_[static_cast<std::size_t>(j)] = scale * j;
        kd_col_[static_cast<std::size_t>(j)] = (2 * j == n) ? 0.0 : scale * j;
    }
}

SpectralGrid::~SpectralGrid() = default;
SpectralGrid::SpectralGrid(SpectralGrid&&) noexcept = default;
SpectralGrid& SpectralGrid::operator=(SpectralGrid&&) noexcept = default;

SpectralField SpectralGrid::forward(std::span<const double> values) const {
    const int n = N();
    if (values.size() != static_cast<std::size_t>(n) * n)
        throw Error(ErrorCode::dimension_mismatch, "field size does not match the grid");
    std::copy(values.begin(), values.end(), plans_->real);
    fftw_execute(plans_->r2c);
    SpectralField out(n);
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = Complex(plans_->spec[i][0], plans_->spec[i][1]) * norm;
    return out;
}

std::vector<double> SpectralGrid::inverse(const SpectralField& field) const {
    const int n = N();
    if (field.N != n) throw Error(ErrorCode::dimension_mismatch, "spectral field belongs to another grid");
    for (std::size_t i = 0; i < field.coeffs.size(); ++i) {
        plans_->spec[i][0] = field.coeffs[i].real();
        plans_->spec[i][1] = field.coeffs[i].imag();
    }
    // The Nyquist row/column of a real field must be real-symmetric; c2r assumes it.
    fftw_execute(plans_->c2r);
    return {plans_->real, plans_->real + static_cast<std::ptrdiff_t>(n) * n};
}

void SpectralGrid::gradient(const SpectralField& field, std::vector<double>& gx, std::vector<double>& gy) const {
    const int n = N();
    SpectralField dx(n), dy(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= n / 2; ++j) {
            const Complex c = field.at(i, j);
            dx.at(i, j) = Complex(0.0, k1_derivative(i)) * c;
            dy.at(i, j) = Complex(0.0, k2_derivative(j)) * c;
        }
    }
    gx = inverse(dx);
    gy = inverse(dy);
}

SpectralField SpectralGrid::divergence(std::span<const double> fx, std::span<const double> fy) const {
    const SpectralField hx = forward(fx);
    const SpectralField hy = forward(fy);
    const int n = N();
    SpectralField out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j)
            out.at(i, j) = Complex(0.0, k1_derivative(i)) * hx.at(i, j) + Complex(0.0, k2_derivative(j)) * hy.at(i, j);
    return out;
}

bool SpectralGrid::kept(int i, int j) const {
    if (!spec_.dealias) return true;
    const int n = N();
    const int m = (i <= n / 2) ? i : n - i;
    return 3 * m < n && 3 * j < n;
}

void SpectralGrid::truncate(SpectralField& field) const {
    const int n = N();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j)
            if (!kept(i, j)) field.at(i, j) = 0.0;
}

double SpectralGrid::inner(const SpectralField& f, const SpectralField& g) const {
    const int n = N();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j)
            acc += column_weight(j) * std::real(f.at(i, j) * std::conj(g.at(i, j)));
    return acc * area();
}

double SpectralGrid::grad_norm_sq(const SpectralField& f) const {
    const int n = N();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j)
            acc += column_weight(j) * (k1_derivative(i) * k1_derivative(i) + k2_derivative(j) * k2_derivative(j)) *
                   std::norm(f.at(i, j));
    return acc * area();
}

double SpectralGrid::laplacian_norm_sq(const SpectralField& f) const {
    const int n = N();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= n / 2; ++j) {
            const double k2sum = k_squared(i, j);
            acc += column_weight(j) * k2sum * k2sum * std::norm(f.at(i, j));
        }
    return acc * area();
}

}  // namespace bdfcert
