// Runs every harness suite at its default (full-size) configuration and prints one verdict per
// acceptance criterion. Exit status is the number of failed criteria.

#include "bdfcert/error.hpp"
#include "bdfcert/harness.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace bdfcert;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::string suite;
    std::function<bool(const std::string&)> selects;
};

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "certificates: alpha and p", "tables",
         [](const std::string& n) { return contains(n, ".alpha") || contains(n, ".p") || contains(n, ".residual"); }},
        {2, "step thresholds beta", "tables",
         [](const std::string& n) { return contains(n, ".beta") || contains(n, ".tau_max"); }},
        {3, "F matrices, F PSD, coercivity", "tables",
         [](const std::string& n) {
             return (contains(n, ".F(") || contains(n, ".F_psd") || contains(n, ".coercivity"));
         }},
        {4, "root scans", "rootscan", [](const std::string&) { return true; }},
        {5, "discriminants", "discriminants", [](const std::string&) { return true; }},
        {6, "modulated energy dissipation", "dissipation", [](const std::string&) { return true; }},
        {7, "large-step boundedness", "boundedness", [](const std::string&) { return true; }},
        {8, "Fourier multiplier bounds", "multipliers", [](const std::string&) { return true; }},
        {9, "temporal self-convergence", "convergence", [](const std::string&) { return true; }},
    };

    std::map<std::string, SuiteResult> results;
    for (const auto& id : ExperimentConfig::suite_ids()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            results[id] = run_suite(ExperimentConfig::defaults(id));
        } catch (const Error& e) {
            SuiteResult broken;
            broken.suite = id;
            broken.records.push_back(flag("suite_error", false, Provenance::derived, e.what()));
            results[id] = broken;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("suite %-13s %4zu records, %3d failed, %.2f s\n", id.c_str(), results[id].records.size(),
                    results[id].failures(), secs);
    }
    std::printf("\n");

    int failed = 0;
    for (const auto& c : criteria) {
        int total = 0;
        std::vector<const GoldenRecord*> bad;
        for (const auto& r : results[c.suite].records) {
            if (!c.selects(r.name)) continue;
            ++total;
            if (!r.pass) bad.push_back(&r);
        }
        const bool pass = total > 0 && bad.empty();
        failed += pass ? 0 : 1;
        std::printf("criterion %d: %s  %s (%d/%d records)\n", c.id, pass ? "PASS" : "FAIL", c.title.c_str(),
                    total - static_cast<int>(bad.size()), total);
        for (const auto* r : bad)
            std::printf("    %s.%s: %s expected %.10g produced %.10g tol %.3g %s\n", c.suite.c_str(), r->name.c_str(),
                        to_string(r->kind).c_str(), r->expected, r->produced, r->tolerance, r->note.c_str());
    }
    std::printf("\n%d of %zu criteria failed\n", failed, criteria.size());
    return failed;
}
