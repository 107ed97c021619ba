#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bdfcert/error.hpp"
#include "bdfcert/harness.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bdfcert;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_config;
}

}  // namespace

TEST_CASE("record builders") {
    CHECK(compare("a", 1.0, 1.0 + 1e-6, 1e-5, Provenance::paper).pass);
    CHECK_FALSE(compare("a", 1.0, 1.0 + 2e-5, 1e-5, Provenance::paper).pass);
    CHECK_FALSE(compare("a", 1.0, std::nan(""), 1e300, Provenance::paper).pass);
    CHECK(bound("b", CheckKind::lt, 1.0, 0.999, Provenance::derived).pass);
    CHECK_FALSE(bound("b", CheckKind::lt, 1.0, 1.0, Provenance::derived).pass);
    CHECK(bound("b", CheckKind::le, 1.0, 1.0, Provenance::derived).pass);
    CHECK(bound("b", CheckKind::gt, 1.0, 1.5, Provenance::derived).pass);
    CHECK_FALSE(bound("b", CheckKind::ge, 1.0, 0.5, Provenance::derived).pass);
    CHECK(code_of([] { bound("b", CheckKind::abs, 1.0, 1.0, Provenance::derived); }) == ErrorCode::invalid_config);
    const auto f = flag("c", false, Provenance::trivial, "note");
    CHECK_FALSE(f.pass);
    CHECK(f.produced == 0.0);
    CHECK(to_string(Provenance::paper) == "PAPER");
    CHECK(to_string(CheckKind::le) == "le");
}

TEST_CASE("config validation") {
    for (const auto& id : ExperimentConfig::suite_ids()) CHECK_NOTHROW(ExperimentConfig::defaults(id).validate());
    CHECK(code_of([] { ExperimentConfig::defaults("nope"); }) == ErrorCode::invalid_config);

    ExperimentConfig c = ExperimentConfig::defaults("dissipation");
    CHECK(c.get_int("grid") == 64);
    CHECK(c.get_double("tau_factor") == 0.99);
    CHECK(c.get_list("ks") == std::vector<double>{2, 3, 4, 5});
    c.params["grid"] = "32";
    CHECK(c.get_int("grid") == 32);
    c.params["gird"] = "32";
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::invalid_config);
    c.params.erase("gird");
    c.params["steps"] = "12x";
    CHECK(code_of([&] { c.get_int("steps"); }) == ErrorCode::invalid_config);
}

TEST_CASE("tables suite is deterministic") {
    const ExperimentConfig c = ExperimentConfig::defaults("tables");
    const SuiteResult a = run_suite(c);
    const SuiteResult b = run_suite(c);
    CHECK(summary_csv(a) == summary_csv(b));
    CHECK(summary_json(a) == summary_json(b));
    CHECK(a.files.count("certificates.csv") == 1);
    CHECK(summary_csv(a).rfind("name,kind,provenance,expected,produced,tolerance,pass,note\n", 0) == 0);

    const auto j = nlohmann::json::parse(summary_json(a));
    CHECK(j["suite"] == "tables");
    CHECK(j["records"].size() == a.records.size());

    int failures = 0;
    for (const auto& r : a.records) failures += r.pass ? 0 : 1;
    CHECK(a.failures() == failures);
    CHECK(a.ok() == (failures == 0));
}

TEST_CASE("exact records for the rational certificates") {
    const SuiteResult r = reproduce_tables(ExperimentConfig::defaults("tables"));
    int exact = 0;
    for (const auto& rec : r.records) {
        if (rec.kind != CheckKind::exact) continue;
        ++exact;
        CAPTURE(rec.name);
        CHECK(rec.pass);
        CHECK(rec.tolerance == 0.0);
    }
    CHECK(exact >= 6);
}

TEST_CASE("small suites pass") {
    ExperimentConfig roots = ExperimentConfig::defaults("rootscan");
    roots.params["points"] = "500";
    CHECK(run_suite(roots).ok());

    ExperimentConfig disc = ExperimentConfig::defaults("discriminants");
    disc.params["grid"] = "100";
    CHECK(run_suite(disc).ok());

    ExperimentConfig mult = ExperimentConfig::defaults("multipliers");
    mult.params["jmax"] = "16";
    CHECK(run_suite(mult).ok());

    ExperimentConfig diss = ExperimentConfig::defaults("dissipation");
    diss.params["grid"] = "16";
    diss.params["steps"] = "40";
    const SuiteResult d = run_suite(diss);
    CHECK(d.ok());
    CHECK(d.files.count("dissipation_k5.csv") == 1);
}

TEST_CASE("output directory override and file layout") {
    const auto tmp = std::filesystem::temp_directory_path() / "bdfcert_harness_test";
    std::filesystem::remove_all(tmp);

    ::unsetenv("BDFCERT_OUT_DIR");
    CHECK(resolve_output_dir("requested") == std::filesystem::path("requested"));
    ::setenv("BDFCERT_OUT_DIR", "", 1);
    CHECK(resolve_output_dir("requested") == std::filesystem::path("requested"));
    ::setenv("BDFCERT_OUT_DIR", tmp.c_str(), 1);
    const auto dir = resolve_output_dir("requested");
    CHECK(dir == tmp);
    ::unsetenv("BDFCERT_OUT_DIR");

    ExperimentConfig mult = ExperimentConfig::defaults("multipliers");
    mult.params["jmax"] = "8";
    const SuiteResult r = run_suite(mult);
    write_suite(r, dir);
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    for (const auto& [name, content] : r.files) CHECK(slurp(dir / name) == content);
    CHECK(slurp(dir / "summary.csv") == summary_csv(r));
    std::filesystem::remove_all(tmp);
}

TEST_CASE("self-convergence reaches the scheme order") {
    const ConvergenceResult c = self_convergence(2, 16, 0.16, {0.02, 0.01}, 16, "1", 1.0, 1);
    REQUIRE(c.orders.size() == 1);
    CHECK(c.errors[1] < c.errors[0]);
    CHECK(c.orders[0] > 1.8);
}
