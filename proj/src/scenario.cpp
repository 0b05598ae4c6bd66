#include "cdis/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cdis/darboux.hpp"
#include "cdis/verify.hpp"

namespace cdis {

namespace {

using nlohmann::json;

const std::vector<std::string> kScalarChecks = {"cd", "circle", "sine_gordon", "sg_relations"};
const std::vector<std::string> kMatrixChecks = {"eom", "zero_curvature", "m_conditions",
                                                "reduction"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Complex parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ScenarioError(where + ": complex numbers are [re, im] arrays");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Complex> parse_complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ScenarioError(where + ": expected an array");
    std::vector<Complex> out;
    for (const auto& e : j) out.push_back(parse_complex(e, where));
    return out;
}

const json& require_field(const json& j, const std::string& name, const std::string& where) {
    auto it = j.find(name);
    if (it == j.end()) throw ScenarioError(where + ": missing field \"" + name + "\"");
    return *it;
}

SystemConfig parse_system(const json& j) {
    SystemConfig c;
    c.n = require_field(j, "n", "system").get<int>();
    c.g_diag = parse_complex_list(require_field(j, "g_diag", "system"), "system.g_diag");
    c.k_diag = parse_complex_list(require_field(j, "k_diag", "system"), "system.k_diag");
    c.unitary_reduction = j.value("unitary_reduction", true);
    return c;
}

bool is_canonical_su2(const SystemConfig& c) {
    const SystemConfig ref = su2_canonical_config();
    if (c.n != 2 || !c.unitary_reduction) return false;
    for (int i = 0; i < 2; ++i)
        if (std::abs(c.g_diag[i] - ref.g_diag[i]) > 1e-12 ||
            std::abs(c.k_diag[i] - ref.k_diag[i]) > 1e-12)
            return false;
    return true;
}

}  // namespace

namespace {
Scenario parse_scenario_checked(const json& j);
}  // namespace

Scenario parse_scenario_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        return parse_scenario_checked(j);
    } catch (const json::exception& e) {
        // wrong JSON types are schema errors, not numerical ones
        throw ScenarioError(std::string("scenario schema: ") + e.what());
    }
}

namespace {
Scenario parse_scenario_checked(const json& j) {
    if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != 1)
        throw ScenarioError("scenario requires \"version\": 1");

    Scenario s;
    const std::string mode = require_field(j, "mode", "scenario").get<std::string>();
    if (mode == "matrix") s.mode = RunMode::matrix;
    else if (mode == "su2-scalar") s.mode = RunMode::su2_scalar;
    else throw ScenarioError("mode must be \"matrix\" or \"su2-scalar\"");

    s.system = j.contains("system") ? parse_system(j["system"]) : su2_canonical_config();
    {
        auto bad = validate_config(s.system);
        if (!bad.empty()) {
            std::string msg = "invalid system:";
            for (const auto& b : bad) msg += " " + b + ";";
            throw ScenarioError(msg);
        }
    }
    if (s.mode == RunMode::su2_scalar && !is_canonical_su2(s.system))
        throw ScenarioError(
            "su2-scalar mode requires the canonical SU(2) system "
            "(n=2, g_diag=[[0,-0.5],[0,0.5]], k_diag=[[0,1],[0,-1]], unitary_reduction)");

    const json& grid = require_field(j, "grid", "scenario");
    try {
        s.grid = Grid(require_field(grid, "x0", "grid").get<double>(),
                      require_field(grid, "x1", "grid").get<double>(),
                      require_field(grid, "nx", "grid").get<int>(),
                      require_field(grid, "t0", "grid").get<double>(),
                      require_field(grid, "t1", "grid").get<double>(),
                      require_field(grid, "nt", "grid").get<int>());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("grid: ") + e.what());
    }
    if (s.grid.nx % 2 == 0 || s.grid.nt % 2 == 0 || s.grid.nx < 5 || s.grid.nt < 5)
        throw ScenarioError("grid: nx and nt must be odd and >= 5 (coarsened-grid verdicts)");

    const json spectral = j.value("spectral", json::array());
    if (!spectral.is_array()) throw ScenarioError("spectral must be an array");
    if (s.mode == RunMode::su2_scalar) {
        for (const auto& p : spectral) {
            ScalarSpectralPoint sp;
            sp.lambda = parse_complex(require_field(p, "lambda", "spectral point"),
                                      "spectral.lambda");
            sp.alpha = parse_complex(require_field(p, "alpha", "spectral point"),
                                     "spectral.alpha");
            sp.beta =
                parse_complex(require_field(p, "beta", "spectral point"), "spectral.beta");
            s.scalar_points.push_back(sp);
        }
        auto bad = validate_points(s.scalar_points, true);
        if (!bad.empty()) {
            std::string msg = "invalid spectral data:";
            for (const auto& b : bad) msg += " " + b + ";";
            throw ScenarioError(msg);
        }
    } else {
        for (const auto& p : spectral) {
            SpectralStep step;
            if (p.contains("lambda") && p.contains("e")) {
                if (s.system.n != 2)
                    throw ScenarioError("paired stage shorthand requires n = 2");
                const Complex lam = parse_complex(p["lambda"], "spectral.lambda");
                const auto e1 = parse_complex_list(p["e"], "spectral.e");
                if (e1.size() != 2) throw ScenarioError("spectral.e must have 2 entries");
                step = su2_paired_step(lam, e1);
            } else if (p.contains("lambdas") && p.contains("vectors")) {
                step.lambdas = parse_complex_list(p["lambdas"], "spectral.lambdas");
                if (!p["vectors"].is_array())
                    throw ScenarioError("spectral.vectors must be an array");
                for (const auto& v : p["vectors"])
                    step.vectors.push_back(parse_complex_list(v, "spectral.vectors entry"));
            } else {
                throw ScenarioError(
                    "matrix stage needs either {lambda, e} or {lambdas, vectors}");
            }
            auto bad = validate_step(step, s.system);
            if (!bad.empty()) {
                std::string msg = "invalid stage:";
                for (const auto& b : bad) msg += " " + b + ";";
                throw ScenarioError(msg);
            }
            s.steps.push_back(std::move(step));
        }
    }

    if (j.contains("checks")) {
        if (!j["checks"].is_array()) throw ScenarioError("checks must be an array of names");
        for (const auto& c : j["checks"]) s.checks.push_back(c.get<std::string>());
    } else {
        s.checks = s.mode == RunMode::su2_scalar ? kScalarChecks : kMatrixChecks;
    }
    const auto& valid = s.mode == RunMode::su2_scalar ? kScalarChecks : kMatrixChecks;
    for (const auto& c : s.checks) {
        if (std::find(valid.begin(), valid.end(), c) == valid.end())
            throw ScenarioError("check \"" + c + "\" is not valid for this mode");
        if (c == "reduction" && !s.system.unitary_reduction)
            throw ScenarioError("reduction check requires unitary_reduction");
    }

    if (j.contains("sign_convention")) {
        if (s.mode != RunMode::su2_scalar)
            throw ScenarioError("sign_convention applies to su2-scalar mode only");
        const std::string sc = j["sign_convention"].get<std::string>();
        if (sc == "oracle") s.sign = SignConvention::oracle;
        else if (sc == "paper") s.sign = SignConvention::paper;
        else throw ScenarioError("sign_convention must be \"oracle\" or \"paper\"");
    }

    if (j.contains("probe_lambda"))
        s.probe_lambda = parse_complex(j["probe_lambda"], "probe_lambda");
    if (std::abs(s.probe_lambda) < 1e-10)
        throw ScenarioError("probe_lambda must be nonzero");
    for (const auto& st : s.steps)
        for (const Complex& l : st.lambdas)
            if (std::abs(s.probe_lambda - l) < kLambdaCollisionTol)
                throw ScenarioError("probe_lambda collides with a stage eigenvalue");

    return s;
}
}  // namespace

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot read scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str());
}

namespace {

struct ScalarSamples {
    FieldGrid<Complex> q, r;
    SineGordonField sg;
    int unmasked = 0;
};

ScalarSamples sample_scalar(const ScalarSolution& sol, const Grid& g) {
    ScalarSamples out{FieldGrid<Complex>(g), FieldGrid<Complex>(g),
                      sample_sine_gordon(sol, g), 0};
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const ScalarSolution::Value v = sol.eval(g.x(ix), g.t(it));
            if (v.pole) {
                out.q.set_masked(ix, it);
                out.r.set_masked(ix, it);
                continue;
            }
            out.q.at(ix, it) = v.q;
            out.r.at(ix, it) = v.r;
            ++out.unmasked;
        }
    if (out.unmasked == 0) throw EvaluationError("solution is singular on the whole grid");
    return out;
}

std::vector<std::pair<double, double>> grid_points(const Grid& g) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<size_t>(g.nx) * g.nt);
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) pts.emplace_back(g.x(ix), g.t(it));
    return pts;
}

std::vector<ResidualReport> run_scalar_checks(const Scenario& s, const ScalarSolution& sol,
                                              const Grid& g) {
    std::vector<ResidualReport> reports;
    const ScalarSamples fine = sample_scalar(sol, g);
    for (const std::string& name : s.checks) {
        if (name == "cd") {
            const ResidualReport coarse =
                check_cd_system(fine.q.coarsened(), fine.r.coarsened(), 0.0);
            reports.push_back(
                ch2_verdict(check_cd_system(fine.q, fine.r, 0.0), coarse.max_norm));
        } else if (name == "circle") {
            auto derivs = [&sol](double x, double t) {
                const ScalarSolution::Value v = sol.eval(x, t);
                return DerivSample{v.dq_dx.real(), v.dr_dx.real(), v.pole};
            };
            ResidualReport rep = check_circle_invariant(derivs, grid_points(g), 1e-8);
            rep.hx = g.hx();
            rep.ht = g.ht();
            reports.push_back(rep);
        } else if (name == "sine_gordon") {
            const ResidualReport coarse = check_sine_gordon(fine.sg.phi.coarsened(), 0.0);
            reports.push_back(
                ch2_verdict(check_sine_gordon(fine.sg.phi, 0.0), coarse.max_norm));
        } else if (name == "sg_relations") {
            ResidualReport rep;
            rep.name = "sg_relations";
            rep.tolerance = 1e-8;
            rep.hx = g.hx();
            rep.ht = g.ht();
            double sum = 0.0;
            long count = 0;
            const double sgn = sign_factor(s.sign);
            for (int it = 0; it < g.nt; ++it)
                for (int ix = 0; ix < g.nx; ++ix) {
                    const ScalarSolution::Value v = sol.eval(g.x(ix), g.t(it));
                    if (v.pole) {
                        ++rep.masked_points;
                        continue;
                    }
                    double e = std::abs(v.dq_dx.real() - std::cos(v.phi_principal));
                    e = std::max(e, std::abs(v.r.real() - sgn * 0.5 * v.dphi_dt.real()));
                    // exp(-i phi) equals the squared determinant ratio exactly
                    // when the ratio is unimodular and unwrapping added only
                    // full periods; check both halves
                    e = std::max(e, v.unimodularity_defect);
                    if (!fine.sg.phi.masked(ix, it)) {
                        const Complex w = std::exp(Complex(0, -1) * v.phi_principal);
                        const Complex w2 =
                            std::exp(Complex(0, -1) * fine.sg.phi.at(ix, it));
                        e = std::max(e, std::abs(w - w2));
                    }
                    rep.max_norm = std::max(rep.max_norm, e);
                    sum += e;
                    ++count;
                }
            rep.mean_norm = count > 0 ? sum / count : 0.0;
            rep.verdict = rep.max_norm <= rep.tolerance;
            reports.push_back(rep);
        }
    }
    return reports;
}

std::vector<ResidualReport> run_matrix_checks(const Scenario& s, const SolutionHandle& handle,
                                              const Grid& g) {
    std::vector<ResidualReport> reports;
    const FieldGrid<Matrix> S_grid = handle.sample_S(g);
    {
        int unmasked = 0;
        for (int it = 0; it < g.nt; ++it)
            for (int ix = 0; ix < g.nx; ++ix)
                if (!S_grid.masked(ix, it)) ++unmasked;
        if (unmasked == 0) throw EvaluationError("solution is singular on the whole grid");
    }
    const Matrix G = handle.seed().G();
    for (const std::string& name : s.checks) {
        if (name == "eom") {
            const ResidualReport coarse = eom_residual(S_grid.coarsened(), G, 0.0);
            reports.push_back(ch2_verdict(eom_residual(S_grid, G, 0.0), coarse.max_norm));
        } else if (name == "zero_curvature") {
            const FieldGrid<Matrix> U = handle.sample_U(s.probe_lambda, g);
            const FieldGrid<Matrix> V = handle.sample_V(s.probe_lambda, g);
            const ResidualReport coarse =
                zero_curvature_residual(U.coarsened(), V.coarsened(), 0.0);
            reports.push_back(
                ch2_verdict(zero_curvature_residual(U, V, 0.0), coarse.max_norm));
        } else if (name == "m_conditions") {
            for (int k = 0; k < handle.order(); ++k) {
                const FieldGrid<Matrix> M_grid = handle.sample_M(k, g);
                const FieldGrid<Matrix> bg = handle.sample_S_before(k, g);
                auto [m1c, m2c] =
                    m_condition_residuals(M_grid.coarsened(), bg.coarsened(), G, 0.0);
                auto [m1f, m2f] = m_condition_residuals(M_grid, bg, G, 0.0);
                ResidualReport r1 = ch2_verdict(std::move(m1f), m1c.max_norm);
                ResidualReport r2 = ch2_verdict(std::move(m2f), m2c.max_norm);
                r1.name = "m1_stage" + std::to_string(k);
                r2.name = "m2_stage" + std::to_string(k);
                reports.push_back(std::move(r1));
                reports.push_back(std::move(r2));
            }
        } else if (name == "reduction") {
            auto field = [&handle](double x, double t) {
                const SolutionHandle::FieldValue v = handle.eval(x, t);
                ReductionSample out;
                out.pole = v.pole;
                if (!v.pole) {
                    out.S = v.S;
                    out.M = v.M;
                }
                return out;
            };
            reports.push_back(check_reduction(field, g, 1e-9));
        }
    }
    return reports;
}

std::string scalar_csv(const ScalarSolution& sol, const SineGordonField& sg, const Grid& g,
                       double* peak_abs_r) {
    std::ostringstream os;
    os << "x,t,q,dq_dx,r,phi,pole\n";
    double peak = 0.0;
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x(ix), t = g.t(it);
            const ScalarSolution::Value v = sol.eval(x, t);
            os << fmt(x) << "," << fmt(t) << ",";
            if (v.pole) {
                os << "nan,nan,nan,nan,1\n";
                continue;
            }
            peak = std::max(peak, std::abs(v.r));
            os << fmt(v.q.real()) << "," << fmt(v.dq_dx.real()) << "," << fmt(v.r.real())
               << ",";
            if (sg.phi.masked(ix, it)) os << "nan";
            else os << fmt(sg.phi.at(ix, it));
            os << ",0\n";
        }
    if (peak_abs_r) *peak_abs_r = peak;
    return os.str();
}

std::string matrix_csv(const SolutionHandle& handle, const Grid& g) {
    const int n = handle.seed().config().n;
    std::ostringstream os;
    os << "x,t";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) os << ",re_S" << i << j << ",im_S" << i << j;
    os << ",pole\n";
    for (int it = 0; it < g.nt; ++it)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x(ix), t = g.t(it);
            const SolutionHandle::FieldValue v = handle.eval(x, t);
            os << fmt(x) << "," << fmt(t);
            if (v.pole) {
                for (int k = 0; k < 2 * n * n; ++k) os << ",nan";
                os << ",1\n";
                continue;
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    os << "," << fmt(v.S(i, j).real()) << "," << fmt(v.S(i, j).imag());
            os << ",0\n";
        }
    return os.str();
}

json report_json_obj(const ResidualReport& r) {
    json j;
    j["name"] = r.name;
    j["max_norm"] = r.max_norm;
    j["mean_norm"] = r.mean_norm;
    j["hx"] = r.hx;
    j["ht"] = r.ht;
    j["tolerance"] = r.tolerance;
    j["verdict"] = r.verdict ? "pass" : "fail";
    j["masked_points"] = r.masked_points;
    return j;
}

}  // namespace

RunResult run_scenario(const Scenario& s, int grid_refine) {
    if (grid_refine < 0 || grid_refine > 6)
        throw ScenarioError("grid refine count must be between 0 and 6");
    RunResult out;

    std::vector<std::vector<ResidualReport>> levels;
    if (s.mode == RunMode::su2_scalar) {
        const ScalarSolution sol(s.scalar_points, s.sign);
        for (int lvl = 0; lvl <= grid_refine; ++lvl)
            levels.push_back(run_scalar_checks(s, sol, s.grid.refined(lvl)));
        const SineGordonField sg = sample_sine_gordon(sol, s.grid);
        out.csv = scalar_csv(sol, sg, s.grid, &out.peak_abs_r);
    } else {
        const SeedSolution seed(s.system);
        const SolutionHandle handle = darboux_iterate(seed, s.steps);
        for (int lvl = 0; lvl <= grid_refine; ++lvl)
            levels.push_back(run_matrix_checks(s, handle, s.grid.refined(lvl)));
        out.csv = matrix_csv(handle, s.grid);
    }

    out.reports = levels[0];
    for (const auto& lvl : levels)
        for (const auto& r : lvl) out.all_pass = out.all_pass && r.verdict;

    json j;
    j["version"] = 1;
    j["mode"] = s.mode == RunMode::su2_scalar ? "su2-scalar" : "matrix";
    if (s.mode == RunMode::su2_scalar) {
        j["sign_convention"] = s.sign == SignConvention::oracle ? "oracle" : "paper";
        j["sg_sign"] = sign_factor(s.sign) > 0 ? "+" : "-";
        j["peak_abs_r"] = out.peak_abs_r;
    }
    j["all_pass"] = out.all_pass;
    j["reports"] = json::array();
    for (const auto& r : out.reports) j["reports"].push_back(report_json_obj(r));
    if (grid_refine > 0) {
        j["refinement"] = json::array();
        for (size_t lvl = 0; lvl < levels.size(); ++lvl) {
            const Grid g = s.grid.refined(static_cast<int>(lvl));
            json e;
            e["level"] = lvl;
            e["nx"] = g.nx;
            e["nt"] = g.nt;
            e["reports"] = json::array();
            for (const auto& r : levels[lvl]) e["reports"].push_back(report_json_obj(r));
            j["refinement"].push_back(e);
        }
        json ratios = json::object();
        for (const auto& r0 : levels[0]) {
            json seq = json::array();
            for (size_t lvl = 0; lvl + 1 < levels.size(); ++lvl) {
                const auto& a = levels[lvl];
                const auto& b = levels[lvl + 1];
                auto fa = std::find_if(a.begin(), a.end(),
                                       [&](const ResidualReport& r) { return r.name == r0.name; });
                auto fb = std::find_if(b.begin(), b.end(),
                                       [&](const ResidualReport& r) { return r.name == r0.name; });
                if (fa != a.end() && fb != b.end())
                    seq.push_back(refinement_ratio(*fa, *fb));
            }
            ratios[r0.name] = seq;
        }
        j["ratios"] = ratios;
    }
    out.report_json = j.dump(2) + "\n";

    std::ostringstream sum;
    for (const auto& r : out.reports)
        sum << (r.verdict ? "[PASS] " : "[FAIL] ") << r.name << "  max=" << fmt(r.max_norm)
            << "  mean=" << fmt(r.mean_norm) << "  tol=" << fmt(r.tolerance)
            << "  masked=" << r.masked_points << "\n";
    sum << (out.all_pass ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    out.summary = sum.str();
    return out;
}

namespace {

int exit_code_for_run(const std::string& scenario_text, const std::string& out_dir,
                      int grid_refine, const std::string& sign_override,
                      json* index_entry) {
    Scenario s;
    try {
        s = parse_scenario_json(scenario_text);
        if (!sign_override.empty()) {
            if (s.mode != RunMode::su2_scalar)
                throw ScenarioError("--sign-convention applies to su2-scalar mode only");
            if (sign_override == "oracle") s.sign = SignConvention::oracle;
            else if (sign_override == "paper") s.sign = SignConvention::paper;
            else throw ScenarioError("--sign-convention must be oracle or paper");
        }
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitSchemaError;
    }

    RunResult res;
    try {
        res = run_scenario(s, grid_refine);
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitSchemaError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    }

    try {
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir + "/fields.csv") << res.csv;
        std::ofstream(out_dir + "/report.json") << res.report_json;
        std::ofstream(out_dir + "/summary.txt") << res.summary;
    } catch (const std::exception& e) {
        std::cerr << "cannot write outputs: " << e.what() << "\n";
        return kExitNumericalError;
    }
    std::cout << res.summary;

    if (index_entry) {
        (*index_entry)["out_dir"] = out_dir;
        (*index_entry)["all_pass"] = res.all_pass;
        (*index_entry)["peak_abs_r"] = res.peak_abs_r;
        json reps = json::array();
        for (const auto& r : res.reports) {
            json e;
            e["name"] = r.name;
            e["max_norm"] = r.max_norm;
            e["verdict"] = r.verdict ? "pass" : "fail";
            reps.push_back(e);
        }
        (*index_entry)["reports"] = reps;
    }
    return res.all_pass ? kExitPass : kExitCheckFailed;
}

json* navigate(json& root, const std::vector<std::string>& tokens, size_t upto) {
    json* cur = &root;
    for (size_t i = 0; i < upto; ++i) {
        const std::string& tok = tokens[i];
        if (cur->is_array()) {
            size_t idx = 0;
            try {
                idx = std::stoul(tok);
            } catch (...) {
                return nullptr;
            }
            if (idx >= cur->size()) return nullptr;
            cur = &(*cur)[idx];
        } else if (cur->is_object()) {
            if (!cur->contains(tok)) return nullptr;
            cur = &(*cur)[tok];
        } else {
            return nullptr;
        }
    }
    return cur;
}

}  // namespace

int run_scenario_to_files(const std::string& scenario_path, const std::string& out_dir,
                          int grid_refine, const std::string& sign_override) {
    std::ifstream in(scenario_path);
    if (!in) {
        std::cerr << "scenario error: cannot read " << scenario_path << "\n";
        return kExitSchemaError;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return exit_code_for_run(ss.str(), out_dir, grid_refine, sign_override, nullptr);
}

int sweep_to_files(const std::string& scenario_path, const std::string& param,
                   const std::vector<double>& values, const std::string& out_dir,
                   int grid_refine, const std::string& sign_override) {
    if (values.empty()) {
        std::cerr << "sweep error: empty value list\n";
        return kExitSchemaError;
    }
    std::ifstream in(scenario_path);
    if (!in) {
        std::cerr << "scenario error: cannot read " << scenario_path << "\n";
        return kExitSchemaError;
    }
    json base;
    try {
        std::ostringstream ss;
        ss << in.rdbuf();
        base = json::parse(ss.str());
    } catch (const json::exception& e) {
        std::cerr << "scenario error: not valid JSON: " << e.what() << "\n";
        return kExitSchemaError;
    }

    std::vector<std::string> tokens;
    {
        std::istringstream ps(param);
        std::string tok;
        while (std::getline(ps, tok, '.')) tokens.push_back(tok);
    }
    if (tokens.empty()) {
        std::cerr << "sweep error: empty parameter path\n";
        return kExitSchemaError;
    }

    json index;
    index["param"] = param;
    index["values"] = values;
    index["runs"] = json::array();
    int worst = kExitPass;
    for (size_t i = 0; i < values.size(); ++i) {
        json run = base;
        json* parent = navigate(run, tokens, tokens.size() - 1);
        if (!parent) {
            std::cerr << "sweep error: path \"" << param << "\" not found\n";
            return kExitSchemaError;
        }
        const std::string& last = tokens.back();
        json* slot = nullptr;
        if (parent->is_array()) {
            size_t idx = 0;
            try {
                idx = std::stoul(last);
            } catch (...) {
                std::cerr << "sweep error: bad array index in path\n";
                return kExitSchemaError;
            }
            if (idx >= parent->size()) {
                std::cerr << "sweep error: array index out of range\n";
                return kExitSchemaError;
            }
            slot = &(*parent)[idx];
        } else if (parent->is_object() && parent->contains(last)) {
            slot = &(*parent)[last];
        } else {
            std::cerr << "sweep error: path \"" << param << "\" not found\n";
            return kExitSchemaError;
        }
        if (!slot->is_number()) {
            std::cerr << "sweep error: path must address one scalar number\n";
            return kExitSchemaError;
        }
        // keep integer slots integer only when the value actually is one
        if (slot->is_number_integer() && std::round(values[i]) == values[i])
            *slot = static_cast<long long>(std::llround(values[i]));
        else
            *slot = values[i];

        json entry;
        entry["value"] = values[i];
        const std::string run_dir = out_dir + "/run_" + std::to_string(i);
        const int code = exit_code_for_run(run.dump(), run_dir, grid_refine, sign_override,
                                           &entry);
        entry["exit_code"] = code;
        index["runs"].push_back(entry);
        worst = std::max(worst, code);
    }

    // consecutive max-norm ratios per check, useful for spacing sweeps
    json ratios = json::object();
    if (index["runs"].size() >= 2) {
        const auto& first = index["runs"][0]["reports"];
        for (const auto& rep : first) {
            const std::string name = rep["name"].get<std::string>();
            json seq = json::array();
            for (size_t i = 0; i + 1 < index["runs"].size(); ++i) {
                double a = 0.0, b = 0.0;
                for (const auto& r : index["runs"][i]["reports"])
                    if (r["name"] == name) a = r["max_norm"].get<double>();
                for (const auto& r : index["runs"][i + 1]["reports"])
                    if (r["name"] == name) b = r["max_norm"].get<double>();
                seq.push_back(b > 0 ? a / b : 0.0);
            }
            ratios[name] = seq;
        }
    }
    index["consecutive_max_ratios"] = ratios;

    try {
        std::filesystem::create_directories(out_dir);
        std::ofstream(out_dir + "/index.json") << index.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "cannot write index: " << e.what() << "\n";
        return kExitNumericalError;
    }
    return worst;
}

}  // namespace cdis
