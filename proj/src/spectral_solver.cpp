#include "bdfcert/spectral_solver.hpp"

#include "bdfcert/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace bdfcert {

std::array<double, 2> f_nonlinear(double z1, double z2) {
    const double w = 1.0 / (1.0 + z1 * z1 + z2 * z2);
    return {z1 * w, z2 * w};
}

Eigen::Matrix2d f_jacobian(double z1, double z2) {
    const double q = 1.0 + z1 * z1 + z2 * z2;
    Eigen::Matrix2d J;
    J << q - 2.0 * z1 * z1, -2.0 * z1 * z2, -2.0 * z1 * z2, q - 2.0 * z2 * z2;
    return J / (q * q);
}

void f_nonlinear(std::span<const double> gx, std::span<const double> gy, std::span<double> fx, std::span<double> fy) {
    if (gx.size() != gy.size() || fx.size() != gx.size() || fy.size() != gx.size())
        throw Error(ErrorCode::dimension_mismatch, "vector field components differ in length");
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double w = 1.0 / (1.0 + gx[i] * gx[i] + gy[i] * gy[i]);
        fx[i] = gx[i] * w;
        fy[i] = gy[i] * w;
    }
}

int EnergySeries::violations() const {
    return static_cast<int>(std::count(violation.begin(), violation.end(), 1));
}

int EnergySeries::sharp_violations() const {
    return static_cast<int>(std::count(sharp_violation.begin(), sharp_violation.end(), 1));
}

double EnergySeries::sup_H2() const {
    return H2.empty() ? 0.0 : *std::max_element(H2.begin(), H2.end());
}

MbeSolver::MbeSolver(GridSpec spec, bool nonlinear) : grid_(spec), nonlinear_(nonlinear) {}

SolverState MbeSolver::seeded(std::vector<SpectralField> history, const SchemeTable& table, double tau, double nu,
                              std::int64_t step_index) const {
    if (!(tau > 0.0) || !(nu > 0.0)) throw Error(ErrorCode::invalid_config, "tau and nu must be positive");
    if (history.size() != static_cast<std::size_t>(table.k))
        throw Error(ErrorCode::incomplete_history,
                    "need " + std::to_string(table.k) + " iterates, got " + std::to_string(history.size()));
    for (const auto& h : history)
        if (h.N != grid_.N()) throw Error(ErrorCode::dimension_mismatch, "iterate belongs to another grid");
    SolverState s;
    s.history = std::move(history);
    s.tau = tau;
    s.nu = nu;
    s.table = table;
    s.step_index = step_index;
    return s;
}

SolverState MbeSolver::bootstrap(const SpectralField& u0, const SchemeTable& table, double tau, double nu,
                                 BootstrapReport* report) const {
    if (!(tau > 0.0) || !(nu > 0.0)) throw Error(ErrorCode::invalid_config, "tau and nu must be positive");
    if (u0.N != grid_.N()) throw Error(ErrorCode::dimension_mismatch, "initial field belongs to another grid");
    SolverState s;
    s.history = {u0};
    s.tau = tau;
    s.nu = nu;
    s.table = table;
    s.step_index = 0;
    for (int order = 1; order < table.k; ++order) advance_with(s, startup_table(order));

    if (report) {
        report->means.clear();
        for (auto it = s.history.rbegin(); it != s.history.rend(); ++it) report->means.push_back(it->mean().real());
        report->sum_increment_sq = 0.0;
        for (std::size_t i = 0; i + 1 < s.history.size(); ++i)
            report->sum_increment_sq += grid_.l2_norm_sq(s.history[i] - s.history[i + 1]);
        report->implied_alpha = report->sum_increment_sq / tau;
    }
    return s;
}

void MbeSolver::advance(SolverState& state) const {
    if (state.history.size() != static_cast<std::size_t>(state.k()))
        throw Error(ErrorCode::incomplete_history, "state is not bootstrapped");
    advance_with(state, state.table);
}

SolverState MbeSolver::step(SolverState state) const {
    advance(state);
    return state;
}

void MbeSolver::advance_with(SolverState& state, const SchemeTable& scheme) const {
    const int n = grid_.N();
    const int ks = scheme.k;
    const auto& hist = state.history;
    const double tau = state.tau;

    SpectralField rhs(n);
    for (int i = 1; i <= ks; ++i) rhs.axpy(-to_double(scheme.A[static_cast<std::size_t>(i)]) / tau, hist[static_cast<std::size_t>(i - 1)]);

    if (nonlinear_) {
        SpectralField extrapolated(n);
        for (int i = 1; i <= ks; ++i)
            extrapolated.axpy(to_double(scheme.B[static_cast<std::size_t>(i - 1)]), hist[static_cast<std::size_t>(i - 1)]);
        std::vector<double> gx, gy;
        grid_.gradient(extrapolated, gx, gy);
        std::vector<double> fx(gx.size()), fy(gy.size());
        f_nonlinear(gx, gy, fx, fy);
        SpectralField div = grid_.divergence(fx, fy);
        grid_.truncate(div);
        rhs -= div;
    }

    const double a0 = to_double(scheme.A0()) / tau;
    SpectralField next(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= n / 2; ++j) {
            const double k2 = grid_.k_squared(i, j);
            next.at(i, j) = rhs.at(i, j) / (a0 + state.nu * k2 * k2);
        }
    }
    next.at(0, 0) = hist.front().mean();

    for (const auto& c : next.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw Error(ErrorCode::non_finite, "non-finite field at step " + std::to_string(state.step_index + 1));

    state.history.insert(state.history.begin(), std::move(next));
    if (state.history.size() > static_cast<std::size_t>(state.table.k)) state.history.pop_back();
    ++state.step_index;
}

double MbeSolver::energy(const SpectralField& u, double nu) const {
    std::vector<double> gx, gy;
    grid_.gradient(u, gx, gy);
    double log_sum = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) log_sum += std::log1p(gx[i] * gx[i] + gy[i] * gy[i]);
    return 0.5 * nu * grid_.laplacian_norm_sq(u) - 0.5 * log_sum * grid_.cell_area();
}

double MbeSolver::modulated_energy(const SolverState& state, const Eigen::MatrixXd& F, std::span<const double> c) const {
    const int k = state.k();
    if (state.history.size() != static_cast<std::size_t>(k))
        throw Error(ErrorCode::incomplete_history, "modulated energy needs k iterates");
    if (F.rows() != k - 1 || F.cols() != k - 1 || c.size() + 1 < static_cast<std::size_t>(k))
        throw Error(ErrorCode::dimension_mismatch, "F must be (k-1)x(k-1) and c must hold c_1..c_{k-1}");

    std::vector<SpectralField> v;
    v.reserve(static_cast<std::size_t>(k - 1));
    for (int i = 0; i + 1 < k; ++i)
        v.push_back(state.history[static_cast<std::size_t>(i)] - state.history[static_cast<std::size_t>(i + 1)]);

    double quad = 0.0;
    for (int i = 0; i < k - 1; ++i) {
        for (int j = 0; j < k - 1; ++j) {
            if (F(i, j) == 0.0) continue;
            quad += F(i, j) * grid_.inner(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
        }
    }
    double grad_terms = 0.0;
    for (int i = 0; i < k - 1; ++i) grad_terms += c[static_cast<std::size_t>(i)] * grid_.grad_norm_sq(v[static_cast<std::size_t>(i)]);
    return energy(state.history.front(), state.nu) + quad / state.tau + grad_terms;
}

double MbeSolver::h2_norm(const SpectralField& u) const {
    return std::sqrt(grid_.l2_norm_sq(u)) + std::sqrt(grid_.laplacian_norm_sq(u));
}

namespace {

bool is_seed(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

/// Uniform in [-1, 1) from the raw 64-bit engine, independent of the library's distributions.
double symmetric_unit(std::mt19937_64& gen) {
    return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

SpectralField MbeSolver::initial_condition(const std::string& name, double amplitude, int band) const {
    const int n = grid_.N();
    const double kappa = 2.0 * std::numbers::pi / grid_.spec().domain_length;
    std::vector<double> u(static_cast<std::size_t>(n) * n, 0.0);
    auto sample = [&](auto&& profile) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                u[static_cast<std::size_t>(i) * n + j] = amplitude * profile(grid_.coordinate(i), grid_.coordinate(j));
    };

    if (name == "zero") {
        // all zeros
    } else if (name == "mode") {
        sample([&](double x, double y) { return std::sin(kappa * (x + y)); });
    } else if (name == "cos") {
        sample([&](double x, double) { return std::cos(kappa * x); });
    } else if (name == "mound") {
        sample([&](double x, double y) {
            return std::cos(kappa * x) * std::cos(kappa * y) + 0.25 * std::cos(2.0 * kappa * x) * std::cos(2.0 * kappa * y);
        });
    } else if (is_seed(name)) {
        if (band < 1 || 3 * band >= n)
            throw Error(ErrorCode::invalid_config, "random band must satisfy 1 <= band < N/3");
        std::mt19937_64 gen(std::stoull(name));
        struct Mode {
            int m1, m2;
            double a, b;
        };
        std::vector<Mode> modes;
        for (int m2 = 0; m2 <= band; ++m2) {
            for (int m1 = -band; m1 <= band; ++m1) {
                if (m2 == 0 && m1 <= 0) continue;
                const double decay = 1.0 / (1.0 + m1 * m1 + m2 * m2);
                const double a = symmetric_unit(gen) * decay;
                const double b = symmetric_unit(gen) * decay;
                modes.push_back({m1, m2, a, b});
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double x = grid_.coordinate(i), y = grid_.coordinate(j);
                double acc = 0.0;
                for (const auto& m : modes) {
                    const double phase = kappa * (m.m1 * x + m.m2 * y);
                    acc += m.a * std::cos(phase) + m.b * std::sin(phase);
                }
                u[static_cast<std::size_t>(i) * n + j] = acc;
            }
        }
        double rms = 0.0;
        for (double x : u) rms += x * x;
        rms = std::sqrt(rms / static_cast<double>(u.size()));
        if (rms > 0.0)
            for (double& x : u) x *= amplitude / rms;
    } else {
        throw Error(ErrorCode::invalid_config, "unknown initial condition '" + name + "'");
    }

    SpectralField field = grid_.forward(u);
    grid_.truncate(field);
    field.at(0, 0) = 0.0;
    return field;
}

EnergySeries run(const RunConfig& config) {
    return run(config, alpha_max(config.k));
}

EnergySeries run(const RunConfig& config, const ModulationCertificate& cert) {
    if (config.steps < 0) throw Error(ErrorCode::invalid_config, "steps must be non-negative");
    if (cert.k != config.k) throw Error(ErrorCode::invalid_config, "certificate order differs from run order");
    const SchemeTable table = scheme_table(config.k);
    const MbeSolver solver(config.grid, config.nonlinear);
    const auto& grid = solver.grid();

    EnergySeries series;
    SolverState state = solver.bootstrap(solver.initial_condition(config.ic, config.amplitude, config.band), table,
                                         config.tau, config.nu, &series.bootstrap);

    const std::vector<double> c = to_double(table.c);
    const double alpha = cert.alpha;
    const double gradient_weight = NonlinearityBounds::lipschitz / 2.0 + 2.0 * to_double(table.c1());

    double previous = 0.0;
    auto record = [&](bool first) {
        const SpectralField du = state.history[0] - state.history[1];
        const double EF = solver.modulated_energy(state, cert.F, c);
        const double du_sq = grid.l2_norm_sq(du);
        const double grad_sq = grid.grad_norm_sq(du);
        series.step.push_back(state.step_index);
        series.time.push_back(static_cast<double>(state.step_index) * config.tau);
        series.E.push_back(solver.energy(state.history.front(), config.nu));
        series.E_F.push_back(EF);
        series.H2.push_back(solver.h2_norm(state.history.front()));
        series.mean.push_back(state.history.front().mean().real());
        series.du_l2.push_back(std::sqrt(du_sq));
        series.grad_du_l2.push_back(std::sqrt(grad_sq));
        int flag = 0, sharp = 0;
        if (!first) {
            const double slack = config.rel_slack * (1.0 + std::abs(previous));
            const double increase = EF - previous;
            flag = increase > slack ? 1 : 0;
            const double bound = -alpha / config.tau * du_sq - 0.5 * config.nu * grid.laplacian_norm_sq(du) +
                                 gradient_weight * grad_sq;
            sharp = increase > bound + slack ? 1 : 0;
        }
        series.violation.push_back(flag);
        series.sharp_violation.push_back(sharp);
        previous = EF;
    };

    record(true);
    for (int s = 0; s < config.steps; ++s) {
        solver.advance(state);
        record(false);
    }
    return series;
}

std::string to_csv(const EnergySeries& s) {
    std::ostringstream out;
    out << "step,time,E,E_F,H2,mean,d_u_l2,grad_du_l2,violation_flag\n";
    char buf[512];
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      static_cast<long long>(s.step[i]), s.time[i], s.E[i], s.E_F[i], s.H2[i], s.mean[i], s.du_l2[i],
                      s.grad_du_l2[i], s.violation[i]);
        out << buf;
    }
    return out.str();
}

}  // namespace bdfcert
