#include "bdfcert/harness.hpp"

#include "bdfcert/error.hpp"
#include "bdfcert/modulation.hpp"
#include "bdfcert/rootcert.hpp"
#include "bdfcert/scheme_coeffs.hpp"
#include "bdfcert/spectral_solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bdfcert {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

GoldenRecord exact_record(std::string name, const Rational& expected, const Rational& produced, Provenance prov) {
    GoldenRecord r;
    r.name = std::move(name);
    r.kind = CheckKind::exact;
    r.expected = to_double(expected);
    r.produced = to_double(produced);
    r.provenance = prov;
    r.pass = expected == produced;
    r.note = "expected " + to_string(expected) + ", produced " + to_string(produced);
    return r;
}

std::string key(int k) {
    return "k" + std::to_string(k);
}

struct ReferenceRow {
    int k;
    double alpha;
    double beta;
    std::vector<double> p;
    std::vector<std::vector<double>> F;  // upper triangle, row by row
};

/// Reference values at six printed digits: alpha, beta, p and the upper triangle of F.
const std::vector<ReferenceRow>& reference_rows() {
    static const std::vector<ReferenceRow> rows = {
        {2, 1.0, 512.0 / 289.0, {0.5, -0.5}, {{0.25}}},
        {3,
         95.0 / 96.0,
         1520.0 / 7203.0,
         {1.0 / std::sqrt(6.0), -7.0 / (4.0 * std::sqrt(6.0)), 1.0 / std::sqrt(6.0)},
         {{65.0 / 96.0, -7.0 / 12.0}, {1.0 / 6.0}}},
        {4,
         0.814139,
         0.032644,
         {-0.223519, 0.719240, -0.623843, 0.559237},
         {{1.219233, -1.595139, 0.804452}, {0.701927, -0.697753}, {0.312746}}},
        {5,
         0.185545,
         0.001635,
         {0.868686, -0.448459, 0.912060, -0.544932, 0.115116},
         {{1.343172, -1.937526, 0.698746, -0.10325}, {1.142056, -1.119483, 0.209986}, {0.310203, -0.125461}, {0.013251}}},
    };
    return rows;
}

constexpr double kPrinted = 1e-5;
constexpr double kReferenceP = 1e-4;

}  // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::paper: return "PAPER";
        case Provenance::trivial: return "TRIVIAL";
        case Provenance::derived: return "DERIVED";
    }
    return "?";
}

std::string to_string(CheckKind kind) {
    switch (kind) {
        case CheckKind::exact: return "exact";
        case CheckKind::abs: return "abs";
        case CheckKind::le: return "le";
        case CheckKind::lt: return "lt";
        case CheckKind::ge: return "ge";
        case CheckKind::gt: return "gt";
        case CheckKind::flag: return "flag";
    }
    return "?";
}

GoldenRecord compare(std::string name, double expected, double produced, double tolerance, Provenance provenance,
                     std::string note) {
    GoldenRecord r;
    r.name = std::move(name);
    r.kind = CheckKind::abs;
    r.expected = expected;
    r.produced = produced;
    r.tolerance = tolerance;
    r.provenance = provenance;
    r.pass = std::isfinite(produced) && std::abs(produced - expected) <= tolerance;
    r.note = std::move(note);
    return r;
}

GoldenRecord bound(std::string name, CheckKind kind, double limit, double produced, Provenance provenance,
                   std::string note) {
    GoldenRecord r;
    r.name = std::move(name);
    r.kind = kind;
    r.expected = limit;
    r.produced = produced;
    r.provenance = provenance;
    r.note = std::move(note);
    switch (kind) {
        case CheckKind::le: r.pass = produced <= limit; break;
        case CheckKind::lt: r.pass = produced < limit; break;
        case CheckKind::ge: r.pass = produced >= limit; break;
        case CheckKind::gt: r.pass = produced > limit; break;
        default: throw Error(ErrorCode::invalid_config, "bound() takes le, lt, ge or gt");
    }
    return r;
}

GoldenRecord flag(std::string name, bool ok, Provenance provenance, std::string note) {
    GoldenRecord r;
    r.name = std::move(name);
    r.kind = CheckKind::flag;
    r.expected = 1.0;
    r.produced = ok ? 1.0 : 0.0;
    r.provenance = provenance;
    r.pass = ok;
    r.note = std::move(note);
    return r;
}

// ---------------------------------------------------------------------------------------------
// Configuration

const std::vector<std::string>& ExperimentConfig::suite_ids() {
    static const std::vector<std::string> ids = {"tables",      "rootscan",    "discriminants", "dissipation",
                                                 "boundedness", "multipliers", "convergence"};
    return ids;
}

ExperimentConfig ExperimentConfig::defaults(const std::string& id) {
    ExperimentConfig c;
    c.id = id;
    if (id == "tables") {
        c.params = {};
    } else if (id == "rootscan") {
        c.params = {{"points", "10000"}, {"k_min", "2"}, {"k_max", "7"}};
    } else if (id == "discriminants") {
        c.params = {{"points", "1001"}, {"grid", "1000"}};
    } else if (id == "dissipation") {
        c.params = {{"grid", "64"}, {"steps", "500"}, {"nu", "1"}, {"tau_factor", "0.99"},
                    {"amplitude", "1"}, {"band", "4"}, {"ks", "2,3,4,5"}};
    } else if (id == "boundedness") {
        c.params = {{"grid", "64"}, {"steps", "2000"}, {"nu", "1"}, {"taus", "1,10,100"}, {"window", "100"},
                    {"amplitude", "1"}, {"band", "4"}, {"ks", "2,3,4,5"}};
    } else if (id == "multipliers") {
        c.params = {{"jmax", "128"}, {"tau_multiples", "1,2,100"}, {"ks", "2,3,4,5"}};
    } else if (id == "convergence") {
        c.params = {{"grid", "32"}, {"final_time", "0.64"}, {"taus", "0.04,0.02,0.01"}, {"ref_factor", "64"},
                    {"amplitude", "1"}, {"band", "1"}, {"nu", "1"}, {"ks", "2,3"}, {"order_slack", "0.2"}};
    } else if (id == "all") {
        c.params = {};
    } else {
        throw Error(ErrorCode::invalid_config, "unknown suite '" + id + "'");
    }
    return c;
}

void ExperimentConfig::validate() const {
    const ExperimentConfig d = defaults(id);
    for (const auto& [k, v] : params)
        if (!d.params.count(k)) throw Error(ErrorCode::invalid_config, "suite '" + id + "' has no parameter '" + k + "'");
}

namespace {

std::string lookup(const ExperimentConfig& c, const std::string& key) {
    if (auto it = c.params.find(key); it != c.params.end()) return it->second;
    const ExperimentConfig d = ExperimentConfig::defaults(c.id);
    if (auto it = d.params.find(key); it != d.params.end()) return it->second;
    throw Error(ErrorCode::invalid_config, "suite '" + c.id + "' needs parameter '" + key + "'");
}

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw Error(ErrorCode::invalid_config, "parameter '" + key + "' is not a number: '" + text + "'");
    return v;
}

}  // namespace

int ExperimentConfig::get_int(const std::string& key) const {
    const double v = parse_double(key, lookup(*this, key));
    if (v != std::floor(v)) throw Error(ErrorCode::invalid_config, "parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
}

double ExperimentConfig::get_double(const std::string& key) const {
    return parse_double(key, lookup(*this, key));
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(lookup(*this, key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw Error(ErrorCode::invalid_config, "parameter '" + key + "' is empty");
    return out;
}

bool SuiteResult::ok() const {
    return failures() == 0;
}

int SuiteResult::failures() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.pass; }));
}

// ---------------------------------------------------------------------------------------------
// Suites

SuiteResult reproduce_tables(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "tables";
    std::ostringstream csv;
    csv << "k,quantity,i,j,value\n";

    for (const ReferenceRow& row : reference_rows()) {
        const int k = row.k;
        const SchemeTable table = scheme_table(k);
        const Eigen::VectorXd printed = Eigen::Map<const Eigen::VectorXd>(row.p.data(), k);
        // Compare in the orientation of the printed p; both orientations certify the same alpha.
        const ModulationCertificate found = alpha_max(k);
        const ModulationCertificate flipped = reversed(found);
        auto distance = [&](const Eigen::VectorXd& p) { return std::min((p - printed).norm(), (p + printed).norm()); };
        const bool use_flipped = distance(flipped.p) < distance(found.p);
        const ModulationCertificate& cert = use_flipped ? flipped : found;
        const std::string orientation = use_flipped ? "reversed orientation" : "returned orientation";
        const std::string tag = key(k);

        if (cert.exact) {
            const Rational alpha_expected = k == 2 ? Rational(1) : Rational(95, 96);
            const Rational beta_expected = k == 2 ? Rational(512, 289) : Rational(1520, 7203);
            out.records.push_back(exact_record(tag + ".alpha", alpha_expected, cert.exact->alpha, Provenance::paper));
            out.records.push_back(exact_record(tag + ".beta", beta_expected, cert.exact->beta, Provenance::paper));
            const Rational f00 = k == 2 ? Rational(1, 4) : Rational(65, 96);
            out.records.push_back(exact_record(tag + ".F(1,1)", f00, cert.exact->F(0, 0), Provenance::paper));
            if (k == 3) {
                out.records.push_back(exact_record(tag + ".F(1,2)", Rational(-7, 12), cert.exact->F(0, 1), Provenance::paper));
                out.records.push_back(exact_record(tag + ".F(2,2)", Rational(1, 6), cert.exact->F(1, 1), Provenance::paper));
            }
        } else {
            out.records.push_back(compare(tag + ".alpha", row.alpha, cert.alpha, kPrinted, Provenance::paper));
            out.records.push_back(compare(tag + ".beta", row.beta, cert.beta, kPrinted, Provenance::paper));
            for (int i = 0; i < k - 1; ++i)
                for (int j = i; j < k - 1; ++j)
                    out.records.push_back(compare(tag + ".F(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                                                  row.F[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)],
                                                  cert.F(i, j), kPrinted, Provenance::paper, orientation));
            // The same recovery applied to the printed p and alpha, whose residual is rounding-sized.
            const Eigen::MatrixXd printed_F = recover_F(rank2_U(printed, row.alpha), table.a, kPrinted);
            double worst = 0.0;
            for (int i = 0; i < k - 1; ++i)
                for (int j = i; j < k - 1; ++j)
                    worst = std::max(worst, std::abs(printed_F(i, j) -
                                                     row.F[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i)]));
            out.records.push_back(bound(tag + ".F_from_printed_p_max_error", CheckKind::le, kPrinted, worst,
                                        Provenance::paper, "recover_F on rank2_U(printed p, printed alpha)"));
        }

        // p is determined up to a global sign.
        const double sign = printed.dot(cert.p) >= 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < k; ++i)
            out.records.push_back(compare(tag + ".p" + std::to_string(i + 1), row.p[static_cast<std::size_t>(i)],
                                          sign * cert.p(i), kReferenceP, Provenance::paper, "up to global sign; " + orientation));

        const EigenReport coercive = verify_coercivity(cert.U, cert.alpha);
        const EigenReport psd = check_F_psd(cert.F);
        out.records.push_back(flag(tag + ".coercivity", coercive.ok, Provenance::derived,
                                   "min eig " + short_fmt(coercive.min_eigenvalue)));
        out.records.push_back(flag(tag + ".F_psd", psd.ok, Provenance::derived, "min eig " + short_fmt(psd.min_eigenvalue)));
        out.records.push_back(bound(tag + ".residual", CheckKind::le, 1e-10, cert.residual, Provenance::derived,
                                    "quadratic system defect"));

        csv << k << ",alpha,,," << fmt(cert.alpha) << '\n';
        csv << k << ",beta,,," << fmt(cert.beta) << '\n';
        csv << k << ",c1,,," << fmt(to_double(table.c1())) << '\n';
        for (int i = 0; i < k; ++i) csv << k << ",p," << i + 1 << ",," << fmt(cert.p(i)) << '\n';
        for (int i = 0; i < k - 1; ++i)
            for (int j = i; j < k - 1; ++j) csv << k << ",F," << i + 1 << ',' << j + 1 << ',' << fmt(cert.F(i, j)) << '\n';
    }
    out.records.push_back(compare("k2.tau_max", 1.771626, to_double(beta_threshold(Rational(1), scheme_table(2).c1())),
                                  kPrinted, Provenance::paper, "nu = 1"));
    out.files["certificates.csv"] = csv.str();
    return out;
}

SuiteResult rootscan_suite(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "rootscan";
    const int points = config.get_int("points");
    for (int k = config.get_int("k_min"); k <= config.get_int("k_max"); ++k) {
        const RootScanReport scan = scan_max_root(k, points);
        double disagreement = 0.0;
        for (std::size_t i = 0; i < scan.s_grid.size(); ++i)
            disagreement = std::max(disagreement,
                                    std::abs(scan.max_modulus[i] - max_root_modulus_laguerre(k, scan.s_grid[i])));
        const std::string tag = key(k);
        if (k <= 6)
            out.records.push_back(bound(tag + ".sup_modulus", CheckKind::lt, 1.0, scan.sup(), Provenance::paper,
                                        "zero-stable on (0, 1/A_0)"));
        else
            out.records.push_back(bound(tag + ".sup_modulus", CheckKind::gt, 1.0, scan.sup(), Provenance::paper,
                                        "BDF7 is not zero-stable"));
        out.records.push_back(bound(tag + ".root_finder_agreement", CheckKind::le, 1e-8, disagreement,
                                    Provenance::derived, "companion eigenvalues vs Laguerre"));
        out.files["rootscan_k" + std::to_string(k) + ".csv"] = to_csv(scan);
    }
    return out;
}

SuiteResult discriminant_suite(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "discriminants";
    const int points = config.get_int("points");
    const int grid = config.get_int("grid");

    const double s3 = 6.0 / 11.0;
    double max_d3 = -1e300;
    for (int i = 1; i < grid; ++i) max_d3 = std::max(max_d3, cubic_discriminant(s3 * i / grid));
    out.records.push_back(bound("k3.discriminant_max", CheckKind::lt, 0.0, max_d3, Provenance::paper,
                                "sampled on (0, 6/11)"));

    out.records.push_back(compare("k4.discriminant_at_3/8", 0.0, quartic_discriminant(0.375), 1e-10, Provenance::paper));
    const double left = quartic_discriminant(0.375 - 1e-3), right = quartic_discriminant(0.375 + 1e-3);
    out.records.push_back(flag("k4.sign_change_at_3/8", left * right < 0.0, Provenance::paper,
                               "left " + short_fmt(left) + ", right " + short_fmt(right)));

    const std::vector<double> roots = bdf5_discriminant_roots();
    std::ostringstream rcsv;
    rcsv << "root\n";
    for (double r : roots) rcsv << fmt(r) << '\n';
    out.files["bdf5_discriminant_roots.csv"] = rcsv.str();
    out.records.push_back(compare("k5.real_root_count", 2.0, static_cast<double>(roots.size()), 0.0, Provenance::paper));
    if (roots.size() == 2) {
        out.records.push_back(compare("k5.root_low", -0.908, roots[0], 1e-2, Provenance::paper));
        out.records.push_back(compare("k5.root_one", 1.0, roots[1], 1e-10, Provenance::paper));
    }
    const double s5 = 60.0 / 137.0;
    double min_value = 1e300;
    for (int i = 0; i < grid; ++i) {
        const double x = -1.0 + 2.0 * i / grid;
        for (int j = 1; j <= grid; ++j) {
            const double s = s5 * j / (grid + 1);
            min_value = std::min(min_value, bdf5_boundary(x, s).value);
        }
    }
    out.records.push_back(bound("k5.boundary_min", CheckKind::gt, 0.0, min_value, Provenance::paper,
                                "1 + A s + B s^2 on [-1,1) x (0, 60/137)"));

    for (int k : {3, 4, 5}) out.files["discriminant_k" + std::to_string(k) + ".csv"] = discriminant_csv(k, points);
    return out;
}

SuiteResult dissipation_suite(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "dissipation";
    for (double kd : config.get_list("ks")) {
        const int k = static_cast<int>(kd);
        const ModulationCertificate cert = alpha_max(k);
        RunConfig rc;
        rc.grid = GridSpec::torus_2pi(config.get_int("grid"));
        rc.k = k;
        rc.nu = config.get_double("nu");
        rc.tau = config.get_double("tau_factor") * cert.beta * rc.nu;
        rc.steps = config.get_int("steps");
        rc.ic = std::to_string(config.seed);
        rc.amplitude = config.get_double("amplitude");
        rc.band = config.get_int("band");
        const EnergySeries s = run(rc, cert);

        double max_mean = 0.0;
        for (double m : s.mean) max_mean = std::max(max_mean, std::abs(m));
        const std::string tag = key(k);
        const std::string where = "tau = " + short_fmt(rc.tau) + ", " + std::to_string(rc.steps) + " steps";
        out.records.push_back(bound(tag + ".E_F_increases", CheckKind::le, 0.0, s.violations(), Provenance::derived, where));
        out.records.push_back(bound(tag + ".sharp_bound_failures", CheckKind::le, 0.0, s.sharp_violations(),
                                    Provenance::derived, where));
        out.records.push_back(bound(tag + ".max_abs_mean", CheckKind::le, 1e-12, max_mean, Provenance::trivial));
        out.files["dissipation_k" + std::to_string(k) + ".csv"] = to_csv(s);
    }
    return out;
}

SuiteResult boundedness_suite(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "boundedness";
    const int window = config.get_int("window");
    for (double kd : config.get_list("ks")) {
        const int k = static_cast<int>(kd);
        const ModulationCertificate cert = alpha_max(k);
        for (double tau : config.get_list("taus")) {
            RunConfig rc;
            rc.grid = GridSpec::torus_2pi(config.get_int("grid"));
            rc.k = k;
            rc.nu = config.get_double("nu");
            rc.tau = tau;
            rc.steps = config.get_int("steps");
            rc.ic = std::to_string(config.seed);
            rc.amplitude = config.get_double("amplitude");
            rc.band = config.get_int("band");
            const std::string tag = key(k) + ".tau" + short_fmt(tau);
            EnergySeries s;
            try {
                s = run(rc, cert);
            } catch (const Error& e) {
                out.records.push_back(flag(tag + ".finite", false, Provenance::derived, e.what()));
                continue;
            }
            const auto w = static_cast<std::ptrdiff_t>(std::min<std::size_t>(static_cast<std::size_t>(window), s.size()));
            const double lead = *std::max_element(s.H2.begin(), s.H2.begin() + w);
            const double trail = *std::max_element(s.H2.end() - w, s.H2.end());
            out.records.push_back(flag(tag + ".finite", std::isfinite(s.sup_H2()), Provenance::derived,
                                       "sup H2 = " + short_fmt(s.sup_H2())));
            out.records.push_back(bound(tag + ".trailing_max_H2", CheckKind::le, lead, trail, Provenance::derived,
                                        "leading-window max is the limit"));
            out.files["boundedness_k" + std::to_string(k) + "_tau" + short_fmt(tau) + ".csv"] = to_csv(s);
        }
    }
    return out;
}

SuiteResult multiplier_suite(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "multipliers";
    const int jmax = config.get_int("jmax");
    std::ostringstream csv;
    csv << "k,tau0,tau,ok,max_first_ratio,max_second_ratio\n";
    for (double kd : config.get_list("ks")) {
        const int k = static_cast<int>(kd);
        const double tau0 = alpha_max(k).beta;
        for (double m : config.get_list("tau_multiples")) {
            const MultiplierReport r = multiplier_bounds(k, m * tau0, tau0, jmax);
            std::string note = "max T(A_0+tau0) = " + short_fmt(r.max_first_ratio) +
                               ", max tau|j|T = " + short_fmt(r.max_second_ratio);
            if (r.violating_j)
                note += ", first failure at j = (" + std::to_string((*r.violating_j)[0]) + "," +
                        std::to_string((*r.violating_j)[1]) + ")";
            out.records.push_back(flag(key(k) + ".tau" + short_fmt(m) + "tau0", r.ok, Provenance::derived, note));
            csv << k << ',' << fmt(tau0) << ',' << fmt(m * tau0) << ',' << (r.ok ? 1 : 0) << ','
                << fmt(r.max_first_ratio) << ',' << fmt(r.max_second_ratio) << '\n';
        }
    }
    out.files["multipliers.csv"] = csv.str();
    return out;
}

ConvergenceResult self_convergence(int k, int N, double T, const std::vector<double>& taus, int ref_factor,
                                   const std::string& ic, double amplitude, int band, double nu) {
    if (taus.size() < 2 || ref_factor < 1 || !(T > 0.0))
        throw Error(ErrorCode::invalid_config, "convergence study needs two or more steps, ref_factor >= 1 and T > 0");
    const double tau_min = *std::min_element(taus.begin(), taus.end());
    const double tau_ref = tau_min / ref_factor;
    const auto n_ref = std::llround(T / tau_ref);
    std::vector<long long> ratio;
    for (double tau : taus) {
        const auto m = std::llround(tau / tau_ref);
        const auto steps = std::llround(T / tau);
        if (std::abs(m * tau_ref - tau) > 1e-9 * tau || std::abs(steps * tau - T) > 1e-9 * T || steps < k)
            throw Error(ErrorCode::invalid_config, "every tau must be a multiple of the reference step and divide T");
        ratio.push_back(m);
    }

    const SchemeTable table = scheme_table(k);
    const MbeSolver solver(GridSpec::torus_2pi(N));
    SolverState ref = solver.bootstrap(solver.initial_condition(ic, amplitude, band), table, tau_ref, nu);

    // Keep only the reference iterates the coarse runs are seeded with.
    std::map<long long, SpectralField> seeds;
    auto keep = [&](long long n, const SpectralField& u) {
        for (long long m : ratio)
            if (n % m == 0 && n / m < k) seeds.emplace(n, u);
    };
    for (int i = 0; i < k; ++i) keep(k - 1 - i, ref.history[static_cast<std::size_t>(i)]);
    for (long long n = k; n <= n_ref; ++n) {
        solver.advance(ref);
        keep(n, ref.history.front());
    }
    const SpectralField& reference = ref.history.front();

    ConvergenceResult out;
    out.k = k;
    for (std::size_t t = 0; t < taus.size(); ++t) {
        std::vector<SpectralField> history;
        for (int i = k - 1; i >= 0; --i) history.push_back(seeds.at(i * ratio[t]));
        SolverState s = solver.seeded(std::move(history), table, taus[t], nu, k - 1);
        const auto steps = std::llround(T / taus[t]);
        while (s.step_index < steps) solver.advance(s);
        out.taus.push_back(taus[t]);
        out.errors.push_back(std::sqrt(solver.grid().l2_norm_sq(s.history.front() - reference)));
        if (t > 0) out.orders.push_back(std::log(out.errors[t - 1] / out.errors[t]) / std::log(taus[t - 1] / taus[t]));
    }
    return out;
}

SuiteResult convergence_suite(const ExperimentConfig& config) {
    config.validate();
    SuiteResult out;
    out.suite = "convergence";
    std::ostringstream csv;
    csv << "k,tau,error,order\n";
    const double slack = config.get_double("order_slack");
    for (double kd : config.get_list("ks")) {
        const int k = static_cast<int>(kd);
        const ConvergenceResult r =
            self_convergence(k, config.get_int("grid"), config.get_double("final_time"), config.get_list("taus"),
                             config.get_int("ref_factor"), std::to_string(config.seed), config.get_double("amplitude"),
                             config.get_int("band"), config.get_double("nu"));
        for (std::size_t i = 0; i < r.taus.size(); ++i) {
            csv << k << ',' << fmt(r.taus[i]) << ',' << fmt(r.errors[i]) << ',';
            if (i > 0) csv << fmt(r.orders[i - 1]);
            csv << '\n';
        }
        for (std::size_t i = 0; i < r.orders.size(); ++i)
            out.records.push_back(bound(key(k) + ".order_" + short_fmt(r.taus[i]) + "_" + short_fmt(r.taus[i + 1]),
                                        CheckKind::ge, k - slack, r.orders[i], Provenance::derived,
                                        "error " + short_fmt(r.errors[i + 1])));
    }
    out.files["convergence.csv"] = csv.str();
    return out;
}

SuiteResult run_suite(const ExperimentConfig& config) {
    const std::string& id = config.id;
    if (id == "tables") return reproduce_tables(config);
    if (id == "rootscan") return rootscan_suite(config);
    if (id == "discriminants") return discriminant_suite(config);
    if (id == "dissipation") return dissipation_suite(config);
    if (id == "boundedness") return boundedness_suite(config);
    if (id == "multipliers") return multiplier_suite(config);
    if (id == "convergence") return convergence_suite(config);
    if (id == "all") {
        config.validate();
        SuiteResult all;
        all.suite = "all";
        for (const auto& sub : ExperimentConfig::suite_ids()) {
            ExperimentConfig c = ExperimentConfig::defaults(sub);
            c.seed = config.seed;
            SuiteResult r = run_suite(c);
            for (auto& rec : r.records) {
                rec.name = sub + "." + rec.name;
                all.records.push_back(std::move(rec));
            }
            for (auto& [name, content] : r.files) all.files[sub + "/" + name] = std::move(content);
        }
        return all;
    }
    throw Error(ErrorCode::invalid_config, "unknown suite '" + id + "'");
}

// ---------------------------------------------------------------------------------------------
// Output

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

std::string summary_csv(const SuiteResult& result) {
    std::ostringstream out;
    out << "name,kind,provenance,expected,produced,tolerance,pass,note\n";
    for (const auto& r : result.records) {
        out << csv_field(r.name) << ',' << to_string(r.kind) << ',' << to_string(r.provenance) << ',' << fmt(r.expected) << ','
            << fmt(r.produced) << ',' << fmt(r.tolerance) << ',' << (r.pass ? "pass" : "FAIL") << ',' << csv_field(r.note) << '\n';
    }
    return out.str();
}

std::string summary_json(const SuiteResult& result) {
    nlohmann::ordered_json j;
    j["suite"] = result.suite;
    j["ok"] = result.ok();
    j["records_total"] = result.records.size();
    j["failures"] = result.failures();
    auto& recs = j["records"] = nlohmann::ordered_json::array();
    for (const auto& r : result.records) {
        nlohmann::ordered_json o;
        o["name"] = r.name;
        o["kind"] = to_string(r.kind);
        o["provenance"] = to_string(r.provenance);
        o["expected"] = r.expected;
        o["produced"] = std::isfinite(r.produced) ? nlohmann::ordered_json(r.produced) : nlohmann::ordered_json(nullptr);
        o["tolerance"] = r.tolerance;
        o["pass"] = r.pass;
        o["note"] = r.note;
        recs.push_back(std::move(o));
    }
    auto& files = j["files"] = nlohmann::ordered_json::array();
    for (const auto& [name, content] : result.files) files.push_back(name);
    return j.dump(2) + "\n";
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& requested) {
    if (const char* env = std::getenv("BDFCERT_OUT_DIR"); env && *env) return env;
    return requested;
}

void write_suite(const SuiteResult& result, const std::filesystem::path& dir) {
    auto write = [&](const std::filesystem::path& rel, const std::string& content) {
        const std::filesystem::path path = dir / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw Error(ErrorCode::invalid_config, "cannot write " + path.string());
    };
    for (const auto& [name, content] : result.files) write(name, content);
    write("summary.csv", summary_csv(result));
    write("summary.json", summary_json(result));
}

}  // namespace bdfcert
