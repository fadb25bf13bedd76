#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nsfix/pipeline.hpp"

using namespace nsfix;

namespace {

RunConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

std::string config_error(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

RunConfig small_run(const std::string& extra = {})
{
    return parse("modes = 8\ngrid.nodes = 512\n" + extra);
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("nsfix_test_pipeline_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing")
{
    const RunConfig c = parse("# comment\n"
                              "background = polynomial\n"
                              "background.coefficients = 1 -0.5 0.25\n"
                              "perturbation = 2 rational 0.1 -0.2   # trailing\n"
                              "perturbation = 0 gaussian 0.3\n"
                              "alpha = 1e-4\n"
                              "grid.grading = uniform\n");
    CHECK(c.background == BackgroundKind::Polynomial);
    REQUIRE(c.coefficients.size() == 3);
    CHECK(c.coefficients[1] == -0.5);
    REQUIRE(c.perturbation.size() == 2);
    CHECK(c.perturbation[0].n == 2);
    CHECK(c.perturbation[0].family == PerturbationFamily::Rational);
    CHECK(c.perturbation[0].amplitude == Complex{0.1, -0.2});
    CHECK(c.perturbation[1].amplitude == Complex{0.3, 0.0});
    REQUIRE(c.alpha.has_value());
    CHECK(*c.alpha == 1e-4);
    CHECK(c.grading == Grading::Uniform);
    CHECK_FALSE(parse("alpha = auto\n").alpha.has_value());

    CHECK(config_error("modes = 8\nbogus = 1\n").find("test.cfg:2:") != std::string::npos);
    CHECK(config_error("tol = 1e-10\ntol = 1e-9\n").find("test.cfg:2:") != std::string::npos);
    CHECK(config_error("modes = eight\n").find("test.cfg:1:") != std::string::npos);
    CHECK(config_error("no equals sign\n").find("test.cfg:1:") != std::string::npos);
    CHECK(config_error("perturbation = 1 lorentzian 1\n").find("test.cfg:1:") != std::string::npos);
    CHECK_FALSE(config_error("grid.nodes = 12.5\n").empty());
}

TEST_CASE("canonical config round trip")
{
    RunConfig c = parse("perturbation = 1 gaussian 0.1 0.30000000000000004\n"
                        "perturbation = 3 algebraic 0 -1e-7\n"
                        "alpha = 3.3e-4\ntol = 1e-12\ngrid.r_max = 40\n");
    const std::string text = format_config(c);
    const RunConfig back = parse(text);
    CHECK(format_config(back) == text);
    CHECK(back.perturbation[0].amplitude == c.perturbation[0].amplitude);
    CHECK(*back.alpha == *c.alpha);
}

TEST_CASE("admissibility is a config error")
{
    CHECK_THROWS_AS(run_pipeline(small_run("alpha = 0.3\n")), ConfigError);
    CHECK_THROWS_AS(run_pipeline(small_run("alpha = -1e-4\n")), ConfigError);
    CHECK_THROWS_AS(run_pipeline(small_run("background.r_star = 0\n")), ConfigError);
    CHECK_THROWS_AS(run_pipeline(small_run("perturbation = 9 gaussian 1\n")), ConfigError);
    CHECK_THROWS_AS(run_pipeline(small_run("perturbation = 0 gaussian 0 1\n")), ConfigError);
}

TEST_CASE("background only run")
{
    const PipelineResult r = run_pipeline(small_run());
    CHECK(r.exit_status == kExitOk);
    CHECK(r.picard.report.converged);
    CHECK(r.solution_norm == 0.0);
    REQUIRE(r.residuals.has_value());
    CHECK(r.residuals->vorticity == 0.0);
}

TEST_CASE("report, tables and determinism")
{
    const RunConfig c = small_run("perturbation = 1 gaussian 1e-3\nperturbation = 2 gaussian 0 5e-4\n");
    const PipelineResult r = run_pipeline(c);
    REQUIRE(r.exit_status == kExitOk);

    const auto j = report_json(r);
    for (const char* key : {"schema", "config", "background", "zeta", "alpha", "kappa", "norms",
                            "iteration", "residuals", "consistency", "matching_gaps", "decay",
                            "exit_status", "verdict"}) {
        CHECK_MESSAGE(j.contains(key), key);
    }
    CHECK(j["exit_status"] == 0);
    CHECK(j["zeta"].size() == static_cast<std::size_t>(c.modes) + 1);
    CHECK(j["config"].get<std::string>() == format_config(c));

    const auto a = scratch("a");
    const auto b = scratch("b");
    emit_report(r, a);
    emit_report(run_pipeline(c), b);
    for (const char* f : {"report.json", "modes.csv", "field.csv"}) {
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }

    const auto checks = verify_tables(a);
    CHECK(checks.size() == 5);
    for (const auto& t : checks) {
        CHECK_MESSAGE(t.pass, t.name);
    }
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST_CASE("divergent data exits 2")
{
    const PipelineResult r = run_pipeline(small_run("perturbation = 1 gaussian 50\nmax_iter = 10\n"));
    CHECK(r.exit_status == kExitDiverged);
    CHECK(r.picard.report.diverged);
    CHECK(r.verdict.find("diverged") != std::string::npos);
    CHECK_FALSE(r.residuals.has_value());
    CHECK(report_json(r)["residuals"].is_null());
}
