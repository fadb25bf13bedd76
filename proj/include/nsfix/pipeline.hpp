#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsfix/perturbation.hpp"
#include "nsfix/verify.hpp"

namespace nsfix {

/// Bad configuration: unparseable input or inadmissible parameters (exit 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class BackgroundKind { Bump, Polynomial };

/// Flat `key = value` run description; every quantity is dimensionless.
struct RunConfig {
    BackgroundKind background = BackgroundKind::Bump;
    double r_star = 1.0;
    double amplitude = 0.8;
    int power = 3;
    std::vector<double> coefficients; ///< polynomial background, ascending powers

    std::vector<PerturbationTerm> perturbation;

    std::optional<double> alpha; ///< unset: 0.9 min(1/2, rho*)
    double kappa = 2.0;
    int modes = 16;
    Index nodes = 1024;
    double r_max = 32.0;
    Grading grading = Grading::Quadratic;
    double tol = 1e-10;
    int max_iter = 30;
    double delta = 0.1;
    double epsilon = 1.0;
    double residual_tol = 1e-5;
    double matching_tol = 1e-6;
    Index decay_angles = 64;
    Index field_stride = 8;
    Index field_angles = 32;
};

/// Throws ConfigError with `source:line:` anchors.
RunConfig parse_config(std::istream& in, const std::string& source);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& config);

enum ExitStatus : int { kExitOk = 0, kExitConfig = 1, kExitDiverged = 2 };

struct PipelineResult {
    RunConfig config;
    GridPtr grid;
    BackgroundFlow background;
    SolverSettings settings;
    FourierVector phi;
    PicardResult picard;
    std::optional<SolutionFields> fields;
    std::optional<ResidualReport> residuals;
    std::optional<ConsistencyReport> consistency;
    std::optional<MatchingGap> matching;
    std::optional<DecayMetric> decay;
    double data_norm = 0.0;
    double solution_norm = 0.0;
    int exit_status = kExitOk;
    std::string verdict;
};

/// Background, solve, verify. Exit 0 only for a converged run whose residuals
/// and matching gaps pass their tolerances; 2 otherwise. Throws ConfigError
/// for inadmissible parameters.
PipelineResult run_pipeline(const RunConfig& config);

nlohmann::ordered_json report_json(const PipelineResult& result);

/// modes.csv, field.csv and report.json in `dir` (created if missing).
void emit_report(const PipelineResult& result, const std::filesystem::path& dir);

struct TableCheck {
    std::string name;
    double reported = 0.0;
    double recomputed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Rebuilds w from modes.csv and the config stored in report.json, then
/// recomputes residuals, matching and consistency against the emitted numbers.
std::vector<TableCheck> verify_tables(const std::filesystem::path& dir);

} // namespace nsfix
