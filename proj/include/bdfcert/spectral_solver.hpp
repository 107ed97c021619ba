#pragma once

#include "bdfcert/modulation.hpp"
#include "bdfcert/scheme_coeffs.hpp"
#include "bdfcert/spectral_grid.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bdfcert {

/// f(z) = z / (1 + |z|^2).
std::array<double, 2> f_nonlinear(double z1, double z2);
/// Df(z) = ((1 + |z|^2) I - 2 z z^T) / (1 + |z|^2)^2.
Eigen::Matrix2d f_jacobian(double z1, double z2);
/// Pointwise f over a sampled vector field.
void f_nonlinear(std::span<const double> gx, std::span<const double> gy, std::span<double> fx, std::span<double> fy);

/// Ring of the last k iterates, newest first: history[0] = u^n, history[k-1] = u^{n-k+1}.
struct SolverState {
    std::vector<SpectralField> history;
    double tau = 0.0;
    double nu = 0.0;
    SchemeTable table;
    std::int64_t step_index = 0;  // n of history[0]

    int k() const { return table.k; }
};

struct BootstrapReport {
    std::vector<double> means;      // mean of u^0..u^{k-1}
    double sum_increment_sq = 0.0;  // sum_{i=1}^{k-1} ||du^i||^2
    double implied_alpha = 0.0;     // sum_increment_sq / tau
};

/// Per-step diagnostics of one run. Columns are aligned by index.
struct EnergySeries {
    std::vector<std::int64_t> step;
    std::vector<double> time;
    std::vector<double> E;
    std::vector<double> E_F;
    std::vector<double> H2;
    std::vector<double> mean;
    std::vector<double> du_l2;
    std::vector<double> grad_du_l2;
    std::vector<int> violation;        // E_F increased beyond the relative slack
    std::vector<int> sharp_violation;  // per-step bound from the dissipation argument failed
    BootstrapReport bootstrap;

    std::size_t size() const { return step.size(); }
    int violations() const;
    int sharp_violations() const;
    double sup_H2() const;
};

/// Pseudo-spectral BDFk / EPk integrator for u_t = -nu Lap^2 u - div f(grad u) on a periodic square.
class MbeSolver {
public:
    explicit MbeSolver(GridSpec spec, bool nonlinear = true);

    const SpectralGrid& grid() const { return grid_; }

    /// Order-escalation start-up: u^i from BDFi/EPi for i = 1..k-1, all at step tau.
    SolverState bootstrap(const SpectralField& u0, const SchemeTable& table, double tau, double nu,
                          BootstrapReport* report = nullptr) const;

    /// State from externally supplied iterates (newest first, exactly k of them).
    SolverState seeded(std::vector<SpectralField> history, const SchemeTable& table, double tau, double nu,
                       std::int64_t step_index) const;

    /// One step of the scheme; rotates the history. Throws ErrorCode::non_finite on overflow.
    void advance(SolverState& state) const;
    SolverState step(SolverState state) const;

    double energy(const SpectralField& u, double nu) const;
    double modulated_energy(const SolverState& state, const Eigen::MatrixXd& F, std::span<const double> c) const;
    double h2_norm(const SpectralField& u) const;

    /// Named profile ("zero", "mode", "cos", "mound") times amplitude, or for a decimal seed a
    /// random field with modes up to `band`, rescaled to RMS amplitude. Dealiased, mean zero.
    SpectralField initial_condition(const std::string& name_or_seed, double amplitude = 1.0, int band = 4) const;

private:
    void advance_with(SolverState& state, const SchemeTable& scheme) const;

    SpectralGrid grid_;
    bool nonlinear_;
};

struct RunConfig {
    GridSpec grid = GridSpec::torus_2pi(64);
    int k = 3;
    double nu = 1.0;
    double tau = 0.1;
    int steps = 100;
    std::string ic = "1";
    double amplitude = 1.0;
    int band = 4;
    double rel_slack = 1e-10;
    bool nonlinear = true;
};

/// Bootstraps, then steps while recording the energy series. The certificate's F and alpha
/// (k = 2..5) drive the modulated energy and the per-step bound.
EnergySeries run(const RunConfig& config);
EnergySeries run(const RunConfig& config, const ModulationCertificate& cert);

/// CSV columns: step,time,E,E_F,H2,mean,d_u_l2,grad_du_l2,violation_flag
std::string to_csv(const EnergySeries& series);

}  // namespace bdfcert
