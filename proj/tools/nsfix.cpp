#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "nsfix/oracles.hpp"
#include "nsfix/pipeline.hpp"

using namespace nsfix;

namespace {

int solve(const std::string& config_path, const std::string& out_dir)
{
    const RunConfig config = load_config(config_path);
    const PipelineResult r = run_pipeline(config);
    for (const auto& w : r.background.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    emit_report(r, out_dir);
    const auto& it = r.picard.report;
    std::printf("mu* = %.6g  rho* = %.6g  alpha = %.6g\n", r.background.mu_star,
                r.background.rho_star, r.settings.alpha);
    for (const auto& s : it.steps) {
        std::printf("  %3d  norm %.6e  increment %.6e  ratio %.4f\n", s.index, s.norm, s.increment,
                    s.ratio);
    }
    if (r.residuals) {
        std::printf("residuals %.3e / %.3e  matching %.3e / %.3e  decay slope %.3f\n",
                    r.residuals->vorticity_relative(), r.residuals->source_relative(),
                    r.matching->value, r.matching->slope, r.decay->fitted_slope);
    }
    std::printf("%s (exit %d)\n", r.verdict.c_str(), r.exit_status);
    return r.exit_status;
}

int verify(const std::string& out_dir)
{
    const auto checks = verify_tables(out_dir);
    bool ok = true;
    for (const auto& c : checks) {
        std::printf("%s  %-44s reported %.3e  recomputed %.3e  (bound %.1e)\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.reported, c.recomputed,
                    c.tolerance);
        ok = ok && c.pass;
    }
    return ok ? kExitOk : kExitDiverged;
}

int oracle(const std::vector<int>& ids)
{
    bool ok = true;
    for (const auto& r : run_acceptance(ids)) {
        std::printf("%s\n", format_result(r).c_str());
        std::fflush(stdout);
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady Navier-Stokes perturbations of a radial vortex: solver and verifier"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", verify_dir = "out";
    auto* solve_cmd = app.add_subcommand("solve", "run background, Picard iteration and checks");
    solve_cmd->add_option("--config", config_path, "key = value run description")->required();
    solve_cmd->add_option("--out", out_dir, "output directory");

    auto* verify_cmd = app.add_subcommand("verify", "recompute metrics from emitted tables");
    verify_cmd->add_option("--out", verify_dir, "directory written by solve");

    std::vector<int> ids;
    auto* oracle_cmd = app.add_subcommand("oracle", "run the acceptance battery");
    oracle_cmd->add_option("--only", ids, "criterion ids to run");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*solve_cmd) {
            return solve(config_path, out_dir);
        }
        if (*verify_cmd) {
            return verify(verify_dir);
        }
        return oracle(ids);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
