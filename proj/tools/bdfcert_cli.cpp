// Command-line front end: coefficient tables, certificates, root scans, simulations and suites.

#include "bdfcert/error.hpp"
#include "bdfcert/harness.hpp"
#include "bdfcert/modulation.hpp"
#include "bdfcert/rootcert.hpp"
#include "bdfcert/scheme_coeffs.hpp"
#include "bdfcert/spectral_solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace bdfcert;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error(ErrorCode::invalid_config, "cannot write " + path);
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// ---------------------------------------------------------------------------------------------
// certify

void certificate_rows(std::ostream& out, const ModulationCertificate& cert, const SchemeTable& table) {
    const int k = cert.k;
    auto row = [&](const char* q, int i, int j, double v, const std::string& exact) {
        out << k << ',' << q << ',';
        if (i > 0) out << i;
        out << ',';
        if (j > 0) out << j;
        out << ',' << fmt(v) << ',' << exact << '\n';
    };
    const auto& ex = cert.exact;
    row("alpha", 0, 0, cert.alpha, ex ? to_string(ex->alpha) : "");
    row("beta", 0, 0, cert.beta, ex ? to_string(ex->beta) : "");
    row("tau_max_over_nu", 0, 0, cert.beta, ex ? to_string(ex->beta) : "");
    row("c1", 0, 0, to_double(table.c1()), to_string(table.c1()));
    for (int i = 0; i < k; ++i) row("p", i + 1, 0, cert.p(i), "");
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) row("U", i + 1, j + 1, cert.U(i, j), ex ? to_string(ex->U(i, j)) : "");
    for (int i = 0; i < k - 1; ++i)
        for (int j = i; j < k - 1; ++j) row("F", i + 1, j + 1, cert.F(i, j), ex ? to_string(ex->F(i, j)) : "");
}

std::string certificate_csv(const std::vector<int>& ks, double tol, bool with_residuals) {
    std::ostringstream out;
    out << "k,quantity,i,j,value,exact\n";
    for (int k : ks) {
        const ModulationCertificate cert = alpha_max(k, tol);
        const SchemeTable table = scheme_table(k);
        certificate_rows(out, cert, table);
        if (with_residuals) {
            const Eigen::VectorXd res = quadratic_residual(cert.p, cert.alpha, table.a);
            for (int i = 0; i < res.size(); ++i) out << k << ",residual," << i << ",," << fmt(res(i)) << ",\n";
            const auto [s1, s2] = sum_identities(cert.p, cert.alpha, table.a);
            out << k << ",sum_identity,1,," << fmt(s1) << ",\n" << k << ",sum_identity,2,," << fmt(s2) << ",\n";
            out << k << ",coercivity_min_eig,,," << fmt(verify_coercivity(cert.U, cert.alpha).min_eigenvalue) << ",\n";
            out << k << ",F_min_eig,,," << fmt(check_F_psd(cert.F).min_eigenvalue) << ",\n";
        }
    }
    return out.str();
}

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        auto r = nlohmann::ordered_json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

nlohmann::ordered_json matrix_json(const RationalMatrix& m) {
    auto rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
        auto r = nlohmann::ordered_json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(to_string(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

std::string certificate_json(int k, double tol) {
    const ModulationCertificate cert = alpha_max(k, tol);
    const SchemeTable table = scheme_table(k);
    nlohmann::ordered_json j;
    j["k"] = k;
    j["alpha"] = cert.alpha;
    j["beta"] = cert.beta;
    j["c1"] = to_double(table.c1());
    j["p"] = std::vector<double>(cert.p.data(), cert.p.data() + cert.p.size());
    j["U"] = matrix_json(cert.U);
    j["F"] = matrix_json(cert.F);
    const Eigen::VectorXd res = quadratic_residual(cert.p, cert.alpha, table.a);
    j["residuals"] = std::vector<double>(res.data(), res.data() + res.size());
    const auto [s1, s2] = sum_identities(cert.p, cert.alpha, table.a);
    j["sum_identities"] = {s1, s2};
    const EigenReport coercive = verify_coercivity(cert.U, cert.alpha);
    const EigenReport psd = check_F_psd(cert.F);
    j["coercivity"] = {{"ok", coercive.ok}, {"min_eigenvalue", coercive.min_eigenvalue}};
    j["F_psd"] = {{"ok", psd.ok}, {"min_eigenvalue", psd.min_eigenvalue}};
    if (cert.exact) {
        const auto& ex = *cert.exact;
        nlohmann::ordered_json e;
        e["alpha"] = to_string(ex.alpha);
        e["beta"] = to_string(ex.beta);
        e["p_scale_squared"] = to_string(ex.scale_sq);
        std::vector<std::string> q;
        for (const auto& v : ex.q) q.push_back(to_string(v));
        e["p_over_scale"] = q;
        e["U"] = matrix_json(ex.U);
        e["F"] = matrix_json(ex.F);
        j["exact"] = e;
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------------------------
// simulate

using KeyValues = std::map<std::string, std::string>;

/// JSON object, or `key = value` / `key: value` lines with # comments.
KeyValues read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::invalid_config, "cannot read config file " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string text = buf.str();
    KeyValues kv;
    if (trim(text).rfind('{', 0) == 0) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::invalid_config, path + ": " + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_string())
                kv[it.key()] = it->get<std::string>();
            else if (it->is_boolean())
                kv[it.key()] = it->get<bool>() ? "true" : "false";
            else if (it->is_number_integer())
                kv[it.key()] = std::to_string(it->get<long long>());
            else if (it->is_number())
                kv[it.key()] = fmt(it->get<double>());
            else
                throw Error(ErrorCode::invalid_config, path + ": value of '" + it.key() + "' must be a scalar");
        }
        return kv;
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        auto sep = line.find('=');
        if (sep == std::string::npos) sep = line.find(':');
        if (sep == std::string::npos)
            throw Error(ErrorCode::invalid_config, path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string value = trim(line.substr(sep + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        kv[trim(line.substr(0, sep))] = value;
    }
    return kv;
}

struct SimulateArgs {
    int k = 3;
    double nu = 1.0;
    double tau = 0.1;
    int grid = 64;
    int steps = 100;
    std::string ic = "1";
    std::string out = "-";
    std::string domain = "torus";
    double amplitude = 1.0;
    int band = 4;
    bool dealias = true;
    bool linear = false;
};

void apply_keys(SimulateArgs& a, const KeyValues& kv) {
    auto num = [](const std::string& key, const std::string& v) {
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) throw Error(ErrorCode::invalid_config, "'" + key + "' is not a number: " + v);
        return d;
    };
    auto integer = [&](const std::string& key, const std::string& v) {
        const double d = num(key, v);
        if (d != static_cast<int>(d)) throw Error(ErrorCode::invalid_config, "'" + key + "' must be an integer");
        return static_cast<int>(d);
    };
    auto boolean = [](const std::string& key, std::string v) {
        for (auto& ch : v) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "off" || v == "no") return false;
        throw Error(ErrorCode::invalid_config, "'" + key + "' must be a boolean");
    };
    for (const auto& [key, v] : kv) {
        if (key == "k") a.k = integer(key, v);
        else if (key == "nu") a.nu = num(key, v);
        else if (key == "tau") a.tau = num(key, v);
        else if (key == "grid") a.grid = integer(key, v);
        else if (key == "steps") a.steps = integer(key, v);
        else if (key == "ic") a.ic = v;
        else if (key == "out") a.out = v;
        else if (key == "domain") a.domain = v;
        else if (key == "amplitude") a.amplitude = num(key, v);
        else if (key == "band") a.band = integer(key, v);
        else if (key == "dealias") a.dealias = boolean(key, v);
        else if (key == "linear") a.linear = boolean(key, v);
        else throw Error(ErrorCode::invalid_config, "unknown simulate key '" + key + "'");
    }
}

int simulate(const SimulateArgs& a) {
    RunConfig rc;
    if (a.domain == "torus")
        rc.grid = GridSpec::torus_2pi(a.grid, a.dealias);
    else if (a.domain == "unit")
        rc.grid = GridSpec::unit_square(a.grid, a.dealias);
    else
        throw Error(ErrorCode::invalid_config, "domain must be 'torus' or 'unit'");
    rc.grid.validate();
    rc.k = a.k;
    rc.nu = a.nu;
    rc.tau = a.tau;
    rc.steps = a.steps;
    rc.ic = a.ic;
    rc.amplitude = a.amplitude;
    rc.band = a.band;
    rc.nonlinear = !a.linear;
    const ModulationCertificate cert = alpha_max(a.k);
    const EnergySeries s = run(rc, cert);
    emit(to_csv(s), a.out);
    std::fprintf(stderr, "k=%d domain=%s N=%d tau=%.6g beta*nu=%.6g steps=%d E_F_increases=%d sharp_failures=%d sup_H2=%.6g\n",
                 a.k, rc.grid.domain_name().c_str(), a.grid, a.tau, cert.beta * a.nu, a.steps, s.violations(),
                 s.sharp_violations(), s.sup_H2());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"F-modulated energy certificates and root bounds for BDFk/EPk schemes, with a 2D MBE solver"};
    app.require_subcommand(1);

    int coeff_k = 3;
    std::string coeff_form = "all";
    auto* coeffs = app.add_subcommand("coeffs", "Exact coefficient tables as CSV");
    coeffs->add_option("--k", coeff_k, "Order, 2..7")->required();
    coeffs->add_option("--form", coeff_form, "std | delta | ep | all");

    int cert_k = 0;
    double cert_tol = 1e-10;
    std::string cert_emit = "csv";
    bool cert_table = false;
    auto* certify = app.add_subcommand("certify", "Rank-2 certificate: alpha, p, U, F, beta, residuals");
    certify->add_option("--k", cert_k, "Order, 2..5");
    certify->add_option("--tol", cert_tol, "Tolerance on alpha for the k = 4, 5 searches");
    certify->add_option("--emit", cert_emit, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    certify->add_flag("--table", cert_table, "All orders 2..5 as one CSV");

    int roots_k = 3, roots_points = 10000;
    std::string roots_out = "-";
    auto* roots = app.add_subcommand("roots", "Max characteristic-root modulus on (0, 1/A_0)");
    roots->add_option("--k", roots_k, "Order, 2..7")->required();
    roots->add_option("--points", roots_points, "Grid points");
    roots->add_option("--out", roots_out, "CSV path, - for stdout");

    int disc_k = 5, disc_points = 1001;
    std::string disc_out = "-";
    auto* discs = app.add_subcommand("discriminants", "Discriminant traces for k = 3, 4 and the BDF5 boundary");
    discs->add_option("--k", disc_k, "3 | 4 | 5")->required();
    discs->add_option("--points", disc_points, "Samples");
    discs->add_option("--out", disc_out, "CSV path, - for stdout");

    int con_k = 3, con_grid = 1000, con_cap = 20000;
    double con_s1 = 0.0, con_s0 = 0.0;
    auto* contract = app.add_subcommand("contract", "Power n0 at which the companion matrix contracts on [s1, s0]");
    contract->add_option("--k", con_k, "Order")->required();
    contract->add_option("--s1", con_s1, "Left end")->required();
    contract->add_option("--s0", con_s0, "Right end, below 1/A_0")->required();
    contract->add_option("--grid", con_grid, "Sample points");
    contract->add_option("--max-power", con_cap, "Power cap");

    SimulateArgs sim;
    std::string sim_config;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the MBE solver and write the energy series");
    simulate_cmd->add_option("--config", sim_config, "JSON or key = value file with the same keys as the flags");
    simulate_cmd->add_option("--k", sim.k, "Order, 2..5");
    simulate_cmd->add_option("--nu", sim.nu, "Diffusion coefficient");
    simulate_cmd->add_option("--tau", sim.tau, "Time step");
    simulate_cmd->add_option("--grid", sim.grid, "Points per dimension (power of two)");
    simulate_cmd->add_option("--steps", sim.steps, "Steps after start-up");
    simulate_cmd->add_option("--ic", sim.ic, "zero | mode | cos | mound | <seed>");
    simulate_cmd->add_option("--out", sim.out, "CSV path, - for stdout");
    simulate_cmd->add_option("--domain", sim.domain, "torus ([-pi,pi]^2) | unit ([0,1]^2)");
    simulate_cmd->add_option("--amplitude", sim.amplitude, "Profile scale, or RMS for seeded data");
    simulate_cmd->add_option("--band", sim.band, "Highest wavenumber of seeded data");
    simulate_cmd->add_option("--dealias", sim.dealias, "2/3-rule truncation (true/false)");
    simulate_cmd->add_option("--linear", sim.linear, "Drop the nonlinear term (true/false)");

    auto* bench = app.add_subcommand("bench", "Golden-record suites");
    bench->require_subcommand(1);
    std::string bench_suite = "all", bench_out = "bench_out";
    std::uint64_t bench_seed = 1;
    std::vector<std::string> bench_params;
    auto* bench_run = bench->add_subcommand("run", "Run a suite and write CSVs plus summary.json");
    bench_run->add_option("--suite", bench_suite, "all | tables | rootscan | discriminants | dissipation | "
                                                  "boundedness | multipliers | convergence");
    bench_run->add_option("--out", bench_out, "Output directory (BDFCERT_OUT_DIR overrides)");
    bench_run->add_option("--seed", bench_seed, "Seed for random initial data");
    bench_run->add_option("--set", bench_params, "Suite parameter key=value (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*coeffs) {
            emit(coeffs_csv(scheme_table(coeff_k), parse_coeff_form(coeff_form)), "-");
        } else if (*certify) {
            if (cert_table) {
                emit(certificate_csv({2, 3, 4, 5}, cert_tol, false), "-");
            } else {
                if (cert_k == 0) throw Error(ErrorCode::invalid_config, "certify needs --k or --table");
                emit(cert_emit == "json" ? certificate_json(cert_k, cert_tol) : certificate_csv({cert_k}, cert_tol, true),
                     "-");
            }
        } else if (*roots) {
            emit(to_csv(scan_max_root(roots_k, roots_points)), roots_out);
        } else if (*discs) {
            emit(discriminant_csv(disc_k, disc_points), disc_out);
        } else if (*contract) {
            const ContractionReport r = contraction_exponent(con_k, con_s1, con_s0, con_grid, con_cap);
            std::cout << "k,s1,s0,grid,n0,eps0,small_s_norm,small_s_ok\n"
                      << r.k << ',' << fmt(r.s1) << ',' << fmt(r.s0) << ',' << r.grid << ',' << r.n0 << ','
                      << fmt(r.eps0) << ',' << fmt(r.small_s_norm) << ',' << (r.small_s_ok ? "true" : "false") << '\n';
        } else if (*simulate_cmd) {
            SimulateArgs args;
            if (!sim_config.empty()) apply_keys(args, read_config_file(sim_config));
            // Flags given on the command line win over the file.
            KeyValues flags;
            for (const auto* opt : simulate_cmd->get_options()) {
                const std::string name = opt->get_single_name();
                if (name == "config" || name == "help" || opt->count() == 0) continue;
                flags[name] = opt->as<std::string>();
            }
            apply_keys(args, flags);
            return simulate(args);
        } else if (*bench_run) {
            ExperimentConfig cfg = ExperimentConfig::defaults(bench_suite);
            cfg.seed = bench_seed;
            for (const auto& p : bench_params) {
                const auto eq = p.find('=');
                if (eq == std::string::npos) throw Error(ErrorCode::invalid_config, "--set expects key=value");
                cfg.params[trim(p.substr(0, eq))] = trim(p.substr(eq + 1));
            }
            cfg.validate();
            cfg.output = resolve_output_dir(bench_out);
            const SuiteResult result = run_suite(cfg);
            write_suite(result, cfg.output);
            for (const auto& r : result.records)
                if (!r.pass) std::fprintf(stderr, "FAIL %s: expected %.10g, produced %.10g %s\n", r.name.c_str(),
                                          r.expected, r.produced, r.note.c_str());
            std::printf("%s: %zu records, %d failed, written to %s\n", result.suite.c_str(), result.records.size(),
                        result.failures(), cfg.output.string().c_str());
            return result.ok() ? 0 : 1;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
