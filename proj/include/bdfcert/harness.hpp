#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdfcert {

/// Where an expected value comes from.
enum class Provenance { paper, trivial, derived };

std::string to_string(Provenance p);

/// How `produced` is judged against `expected`.
///   exact: rational equality (tolerance 0)   abs: |produced - expected| <= tolerance
///   le / lt / ge / gt: one-sided bounds       flag: produced is 1 (true) or 0 (false)
enum class CheckKind { exact, abs, le, lt, ge, gt, flag };

std::string to_string(CheckKind kind);

struct GoldenRecord {
    std::string name;
    CheckKind kind = CheckKind::abs;
    double expected = 0.0;
    double produced = 0.0;
    double tolerance = 0.0;
    Provenance provenance = Provenance::derived;
    bool pass = false;
    std::string note;
};

GoldenRecord compare(std::string name, double expected, double produced, double tolerance, Provenance provenance,
                     std::string note = {});
GoldenRecord bound(std::string name, CheckKind kind, double limit, double produced, Provenance provenance,
                   std::string note = {});
GoldenRecord flag(std::string name, bool ok, Provenance provenance, std::string note = {});

/// A suite id plus a flat parameter map. Unknown keys are rejected; missing keys take defaults.
struct ExperimentConfig {
    std::string id;
    std::map<std::string, std::string> params;
    std::filesystem::path output;
    std::uint64_t seed = 1;

    /// tables | rootscan | discriminants | dissipation | boundedness | multipliers | convergence
    static const std::vector<std::string>& suite_ids();
    static ExperimentConfig defaults(const std::string& id);
    void validate() const;

    int get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;
};

struct SuiteResult {
    std::string suite;
    std::vector<GoldenRecord> records;
    /// Data files keyed by relative file name.
    std::map<std::string, std::string> files;

    bool ok() const;
    int failures() const;
};

SuiteResult reproduce_tables(const ExperimentConfig& config);
SuiteResult rootscan_suite(const ExperimentConfig& config);
SuiteResult discriminant_suite(const ExperimentConfig& config);
SuiteResult dissipation_suite(const ExperimentConfig& config);
SuiteResult boundedness_suite(const ExperimentConfig& config);
SuiteResult multiplier_suite(const ExperimentConfig& config);

struct ConvergenceResult {
    int k = 0;
    std::vector<double> taus;
    std::vector<double> errors;  // L2 error at the final time against the reference
    std::vector<double> orders;  // log2(e(tau_{i-1}) / e(tau_i)), one per successive pair
};

/// Temporal self-convergence against a reference run at tau_min / ref_factor. Coarse runs are
/// seeded with the reference iterates at t = 0, tau, ..., (k-1) tau, so start-up error does not
/// mask the asymptotic order.
ConvergenceResult self_convergence(int k, int N, double T, const std::vector<double>& taus, int ref_factor,
                                   const std::string& ic, double amplitude, int band, double nu = 1.0);
SuiteResult convergence_suite(const ExperimentConfig& config);

/// Dispatches on config.id; "all" runs every suite and concatenates the records.
SuiteResult run_suite(const ExperimentConfig& config);

/// name,kind,provenance,expected,produced,tolerance,pass,note
std::string summary_csv(const SuiteResult& result);
std::string summary_json(const SuiteResult& result);

/// The environment variable BDFCERT_OUT_DIR, when set and non-empty, overrides `requested`.
std::filesystem::path resolve_output_dir(const std::filesystem::path& requested);

/// Writes every data file plus summary.csv and summary.json under dir (created if needed).
void write_suite(const SuiteResult& result, const std::filesystem::path& dir);

}  // namespace bdfcert
