#pragma once

#include <string>
#include <vector>

#include "cdis/grid.hpp"
#include "cdis/model.hpp"
#include "cdis/su2.hpp"

namespace cdis {

enum class RunMode { matrix, su2_scalar };

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitPass = 0,
    kExitCheckFailed = 1,
    kExitSchemaError = 2,
    kExitNumericalError = 3,
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fully validated run description. Parsed from the version-1 JSON schema;
/// complex numbers are two-element [re, im] arrays.
struct Scenario {
    RunMode mode = RunMode::su2_scalar;
    SystemConfig system;
    std::vector<ScalarSpectralPoint> scalar_points;  // su2-scalar mode
    std::vector<SpectralStep> steps;                 // matrix mode
    Grid grid{-10, 10, 41, -5, 5, 21};
    std::vector<std::string> checks;
    SignConvention sign = SignConvention::oracle;
    Complex probe_lambda{0.37, 0.29};  // zero-curvature probe, clear of spectra
};

Scenario parse_scenario_json(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

/// In-memory result of one scenario run.
struct RunResult {
    std::vector<ResidualReport> reports;
    bool all_pass = true;
    std::string csv;
    std::string report_json;
    std::string summary;
    double peak_abs_r = 0.0;  // scalar mode; 0 otherwise
};

/// Runs all requested checks. grid_refine > 0 adds a ladder of
/// spacing-halved grids and records per-level reports plus refinement
/// ratios in the JSON report. Throws EvaluationError when the solution
/// cannot be sampled anywhere.
RunResult run_scenario(const Scenario& s, int grid_refine = 0);

/// Runs and writes fields.csv, report.json, summary.txt under out_dir.
/// Returns the process exit code.
int run_scenario_to_files(const std::string& scenario_path, const std::string& out_dir,
                          int grid_refine, const std::string& sign_override);

/// One run per value of the addressed scalar (dot path into the scenario
/// JSON, e.g. "spectral.0.lambda.1" or "grid.nx"), plus an index.json with
/// per-run verdicts, peak |r|, and consecutive residual ratios.
int sweep_to_files(const std::string& scenario_path, const std::string& param,
                   const std::vector<double>& values, const std::string& out_dir,
                   int grid_refine, const std::string& sign_override);

}  // namespace cdis
