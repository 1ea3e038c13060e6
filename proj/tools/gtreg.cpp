// gtreg: batch front end for Gaussian-transform distributional regression.
// Subcommands: fit, select, eval, diagnose, simulate.
// Exit codes: 0 success, 2 config error, 3 data error, 4 non-convergence,
// 5 QGM failure after the allowed repair rounds.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gtreg/csv.hpp"
#include "gtreg/drf.hpp"
#include "gtreg/duality.hpp"
#include "gtreg/errors.hpp"
#include "gtreg/gauss.hpp"
#include "gtreg/inference.hpp"
#include "gtreg/model_select.hpp"
#include "gtreg/objective.hpp"
#include "gtreg/report.hpp"
#include "gtreg/simulate.hpp"
#include "gtreg/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gtreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConverge = 4;
constexpr int kExitQgm = 5;

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// "a,b,c" or "lo:hi:step"
Vector parse_grid(const std::string& s) {
    Vector out;
    if (s.find(':') != std::string::npos) {
        double lo, hi, step;
        if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
            throw SpecError("bad grid '" + s + "', expected lo:hi:step");
        for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
        return out;
    }
    for (const auto& item : split_csv_list(s)) out.push_back(std::stod(item));
    if (out.empty()) throw SpecError("empty grid '" + s + "'");
    return out;
}

struct DataArgs {
    std::string path;
    std::string outcome = "y";
    std::string covariates;  // comma-separated
    bool lag = false;
};

DataSet load_data(const DataArgs& args) {
    const CsvTable table = read_csv(args.path);
    std::vector<std::string> covs = split_csv_list(args.covariates);
    if (!args.lag && covs.empty()) {
        // default: every non-outcome column is a covariate
        for (const auto& name : table.names)
            if (name != args.outcome) covs.push_back(name);
    }
    return dataset_from_csv(table, args.outcome, covs, args.lag);
}

struct BasisArgs {
    std::string kind = "linear";
    int dim = 0;
    int degree = 3;
};

BasisSpec make_basis(const BasisArgs& a, bool is_y) {
    BasisSpec spec;
    if (a.kind == "linear") {
        spec.kind = BasisKind::linear;
    } else if (a.kind == "bspline") {
        spec.kind = BasisKind::bspline;
        spec.degree = a.degree;
        spec.dim = a.dim > 0 ? a.dim : (is_y ? 5 : 6);
    } else {
        throw SpecError("basis kind must be linear or bspline, got '" + a.kind + "'");
    }
    return spec;
}

BasisSpec basis_from_config(const json& j) {
    BasisArgs a;
    a.kind = j.value("kind", "linear");
    a.dim = j.value("dim", 0);
    a.degree = j.value("degree", 3);
    BasisSpec spec = make_basis(a, false);
    if (j.contains("knots")) spec.knots = j.at("knots").get<Vector>();
    return spec;
}

DictionarySpec probe_spec_default() {
    DictionarySpec probe;
    probe.y_basis = {BasisKind::bspline, 2, 5, {}};
    return probe;
}

void covariate_hull(const DataSet& data, Vector& lo, Vector& hi) {
    lo.assign(data.x.cols(), 0.0);
    hi.assign(data.x.cols(), 0.0);
    for (int c = 0; c < data.x.cols(); ++c) {
        lo[c] = hi[c] = data.x(0, c);
        for (int i = 1; i < data.n(); ++i) {
            lo[c] = std::min(lo[c], data.x(i, c));
            hi[c] = std::max(hi[c], data.x(i, c));
        }
    }
}

Vector to_raw_coefficients(const Dictionary& dict, const Vector& b_std) {
    const Matrix m = coefficient_map_std_to_raw(dict);
    Vector raw(b_std.size(), 0.0);
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) raw[c] += m(r, c) * b_std[r];
    return raw;
}

FitArtifact make_artifact(const Dictionary& dict, const DataSet& data, const Vector& b,
                          const std::optional<Matrix>& cov, const DesignMatrices& design) {
    FitArtifact art;
    art.spec = dict.resolved_spec();
    art.standardization = dict.standardization();
    art.n_covariates = dict.n_covariates();
    art.n = data.n();
    art.b_std = b;
    art.b_raw = to_raw_coefficients(dict, b);
    art.cov_std = cov;
    covariate_hull(data, art.x_lo, art.x_hi);

    DualCertificate cert = recover_dual(b, design);
    art.primal_value = cert.primal_value;
    art.dual_value = cert.dual_value;
    art.dual_gap = cert.gap;
    art.dual_constraint_residual = cert.constraint_residual;
    art.info_matrix_gap = info_matrix_gap(b, design);
    return art;
}

void print_fit_summary(const FitArtifact& art) {
    std::printf("fit: %s, n=%d, JK=%d\n", art.kind.c_str(), art.n, int(art.b_std.size()));
    std::printf("  Q_n = %.8f  score_norm = %.3e  iterations = %d  converged = %s\n", art.value,
                art.score_norm, art.iterations, art.converged ? "yes" : "no");
    std::printf("  duality gap = %.3e  dual residual = %.3e\n", art.dual_gap,
                art.dual_constraint_residual);
    std::printf("  info-matrix gap = %.4f  QGM = %s\n", art.info_matrix_gap,
                art.qgm_ok ? "pass" : "FAIL");
    if (art.kind == "adaptive_lasso")
        std::printf("  lambda_sum = %.5f  active = %zu/%zu  BIC = %.2f\n", art.lambda,
                    art.active_set.size(), art.b_std.size(), art.bic);
}

json stein_to_json(const SteinReport& rep) {
    return json{{"moments", rep.moments}, {"studentized", rep.studentized}};
}

// ---------------------------------------------------------------- fit

struct FitCmd {
    DataArgs data;
    BasisArgs xb, yb;
    bool no_standardize = false;
    bool qgm_repair = false;
    std::string out = "gtreg-out";
    SolverConfig solver;
    int qgm_x_points = 201;
};

int cmd_fit(const FitCmd& cmd) {
    DataSet data = load_data(cmd.data);
    DictionarySpec spec;
    spec.x_basis = make_basis(cmd.xb, false);
    spec.y_basis = make_basis(cmd.yb, true);
    spec.standardize = !cmd.no_standardize;
    BuildResult built = build_dictionary(spec, data);

    FitResult fit;
    QgmReport qgm;
    int rounds = 0;
    if (cmd.qgm_repair) {
        QgmRepairResult rep = fit_with_qgm_repair(built.design, built.dict, data, cmd.solver);
        fit = std::move(rep.fit);
        qgm = std::move(rep.report);
        rounds = rep.rounds;
    } else {
        fit = fit_ml(built.design, cmd.solver);
        if (fit.converged) {
            DrfEvaluator ev(built.dict, fit.b_hat);
            qgm = qgm_check(ev, default_qgm_x_grid(data, cmd.qgm_x_points),
                            default_qgm_u_grid());
            fit.qgm_ok = qgm.passed;
        }
    }
    if (!fit.converged) {
        std::fprintf(stderr, "fit did not converge after %d iterations (score %.3e)\n",
                     fit.iterations, fit.score_norm);
        return kExitNoConverge;
    }

    Sandwich cov = sandwich(fit, built.design);
    if (cov.pseudo_inverse_used)
        std::fprintf(stderr,
                     "warning: hessian numerically singular, covariance uses a pseudo-inverse "
                     "(near-collinear dictionary; min design eigenvalue %.3e)\n",
                     fit.design_min_eig);
    FitArtifact art = make_artifact(built.dict, data, fit.b_hat, cov.full_cov(built.design.jk),
                                    built.design);
    art.kind = "ml";
    art.value = fit.value;
    art.score_norm = fit.score_norm;
    art.iterations = fit.iterations;
    art.converged = fit.converged;
    art.qgm_ok = fit.qgm_ok;
    art.qgm_repair_rounds = rounds;
    art.constraints_added = int(fit.constraints_added.size());

    fs::create_directories(cmd.out);
    save_fit_artifact(cmd.out + "/fit.json", art);
    print_fit_summary(art);
    for (const auto& note : fit.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
    std::printf("artifact: %s/fit.json\n", cmd.out.c_str());
    if (!art.qgm_ok) {
        std::fprintf(stderr, "QGM violated at %zu grid points%s\n", qgm.violations.size(),
                     cmd.qgm_repair ? " after repair rounds" : " (run with --qgm-repair)");
        return kExitQgm;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- select

struct SelectCmd {
    DataArgs data;
    std::string candidates_file;
    std::string lambda_grid;
    std::string out = "gtreg-out";
    SolverConfig solver;
    int qgm_x_points = 201;
    double qgm_u_step = 0.01;
    bool no_standardize = false;
};

std::vector<Candidate> default_candidates(bool standardize) {
    // one representative of each specification class at desk sizes
    std::vector<Candidate> out(4);
    out[0].spec.name = "class1-linear-linear";
    out[1].spec.name = "class2-splinex-k6";
    out[1].spec.x_basis = {BasisKind::bspline, 3, 6, {}};
    out[2].spec.name = "class3-spliney-j5";
    out[2].spec.y_basis = {BasisKind::bspline, 2, 5, {}};
    out[3].spec.name = "class4-spline-spline-j5-k6";
    out[3].spec.x_basis = {BasisKind::bspline, 3, 6, {}};
    out[3].spec.y_basis = {BasisKind::bspline, 2, 5, {}};
    for (auto& c : out) c.spec.standardize = standardize;
    return out;
}

std::vector<Candidate> candidates_from_file(const std::string& path, bool standardize) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open candidates file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw SpecError("malformed candidates file: " + std::string(ex.what()));
    }
    std::vector<Candidate> out;
    for (const auto& jc : j.at("candidates")) {
        Candidate c;
        c.spec.name = jc.value("name", "");
        if (jc.contains("x_basis")) c.spec.x_basis = basis_from_config(jc.at("x_basis"));
        if (jc.contains("y_basis")) c.spec.y_basis = basis_from_config(jc.at("y_basis"));
        c.spec.standardize = jc.value("standardize", standardize);
        if (jc.contains("lambda_grid")) c.lambda_grid = jc.at("lambda_grid").get<Vector>();
        out.push_back(std::move(c));
    }
    if (out.empty()) throw SpecError("candidates file lists no candidates");
    return out;
}

int cmd_select(const SelectCmd& cmd) {
    DataSet data = load_data(cmd.data);
    std::vector<Candidate> candidates =
        cmd.candidates_file.empty()
            ? default_candidates(!cmd.no_standardize)
            : candidates_from_file(cmd.candidates_file, !cmd.no_standardize);
    if (!cmd.lambda_grid.empty()) {
        const Vector grid = parse_grid(cmd.lambda_grid);
        for (auto& c : candidates)
            if (c.lambda_grid.empty()) c.lambda_grid = grid;
    }

    SelectOptions opts;
    opts.solver = cmd.solver;
    opts.qgm_x_points = cmd.qgm_x_points;
    for (double u = cmd.qgm_u_step; u < 1.0 - 1e-9; u += cmd.qgm_u_step)
        opts.qgm_u_grid.push_back(u);

    SelectionReport report = select_model(candidates, data, opts);

    fs::create_directories(cmd.out);
    {
        std::ofstream out(cmd.out + "/select.json");
        out << selection_report_json(report, cmd.data.path) << "\n";
    }

    for (const auto& c : report.candidates) {
        std::printf("%-30s ", c.name.c_str());
        if (!c.fitted) {
            std::printf("failed: %s\n", c.error.c_str());
            continue;
        }
        if (c.best < 0) {
            std::printf("all lambda excluded\n");
            continue;
        }
        const auto& lf = c.path[c.best];
        std::printf("best lambda=%.4g bic=%.2f active=%zu qgm=%s\n", lf.lambda, lf.fit.bic,
                    lf.fit.active_set.size(), lf.qgm_pass ? "pass" : "fail");
    }

    if (report.best_candidate < 0) {
        std::fprintf(stderr, "no candidate passed the QGM screen on any lambda\n");
        return kExitQgm;
    }

    // full artifact with covariance for the winner
    const auto& winner = report.candidates[report.best_candidate];
    const auto& best = winner.path[report.best_lambda];
    BuildResult built = build_dictionary(candidates[report.best_candidate].spec, data);
    Sandwich cov = sandwich(best.fit, built.design);
    FitArtifact art = make_artifact(built.dict, data, best.fit.b_al,
                                    cov.full_cov(built.design.jk), built.design);
    art.kind = "adaptive_lasso";
    art.value = best.fit.value;
    art.score_norm = best.fit.kkt_residual / data.n();
    art.iterations = best.fit.iterations;
    art.converged = best.fit.converged;
    art.qgm_ok = best.qgm_pass;
    art.lambda = best.lambda_sum;
    art.weights = best.fit.weights;
    art.active_set = best.fit.active_set;
    art.bic = best.fit.bic;
    art.kkt_residual = best.fit.kkt_residual;
    save_fit_artifact(cmd.out + "/best_fit.json", art);

    std::printf("winner: %s (lambda=%.4g, bic=%.2f, %zu of %zu coefficients nonzero)\n",
                winner.name.c_str(), best.lambda, best.fit.bic, best.fit.active_set.size(),
                art.b_std.size());
    std::printf("reports: %s/select.json, %s/best_fit.json\n", cmd.out.c_str(), cmd.out.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalCmd {
    std::string fit_path;
    std::string kind = "quantile";
    std::string x_values;
    std::string grid;
    double level = 0.95;
    std::string out = "bands.csv";
};

int cmd_eval(const EvalCmd& cmd) {
    FitArtifact art = load_fit_artifact(cmd.fit_path);
    Dictionary dict = artifact_dictionary(art);
    if (!art.cov_std) throw SpecError("artifact has no stored covariance, bands unavailable");
    DrfEvaluator ev(dict, art.b_std, art.cov_std);

    const Vector xs = parse_grid(cmd.x_values);
    const Vector grid = parse_grid(cmd.grid);
    if (dict.n_covariates() != 1)
        throw SpecError("eval currently expects a single-covariate dictionary");
    Matrix x_rows(int(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x_rows(int(i), 0) = xs[i];
        if (!art.x_lo.empty() && (xs[i] < art.x_lo[0] || xs[i] > art.x_hi[0]))
            std::fprintf(stderr,
                         "warning: x=%g lies outside the observed covariate hull [%g, %g]\n",
                         xs[i], art.x_lo[0], art.x_hi[0]);
    }

    const auto rows = band_grid(ev, x_rows, grid, cmd.kind, cmd.level);
    std::ofstream out(cmd.out);
    if (!out) throw DataError("cannot write '" + cmd.out + "'");
    out.precision(12);
    out << "x,grid,estimate,lower,upper,kind\n";
    for (const auto& r : rows) {
        out << r.x[0] << ',' << r.at << ',' << r.estimate << ',' << r.lower << ',' << r.upper
            << ',' << r.kind << "\n";
    }
    std::printf("wrote %zu rows to %s\n", rows.size(), cmd.out.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseCmd {
    std::string fit_path;
    DataArgs data;
    std::string out = "diagnostics.json";
    int qgm_x_points = 201;
    std::string matrices_prefix;  // dump gamma/psi/cov as CSV when set
};

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::vector<std::string> names;
    std::vector<Vector> cols(m.cols());
    for (int c = 0; c < m.cols(); ++c) {
        names.push_back("c" + std::to_string(c + 1));
        cols[c].resize(m.rows());
        for (int r = 0; r < m.rows(); ++r) cols[c][r] = m(r, c);
    }
    write_csv(path, names, cols);
}

int cmd_diagnose(const DiagnoseCmd& cmd) {
    FitArtifact art = load_fit_artifact(cmd.fit_path);
    Dictionary dict = artifact_dictionary(art);
    DataSet data = load_data(cmd.data);
    DesignMatrices design = evaluate_design(dict, data);

    DualCertificate cert = recover_dual(art.b_std, design);
    const double gap = info_matrix_gap(art.b_std, design);

    if (!cmd.matrices_prefix.empty()) {
        Sandwich s = sandwich(art.b_std, design);
        write_matrix_csv(cmd.matrices_prefix + ".gamma.csv", s.gamma_hat);
        write_matrix_csv(cmd.matrices_prefix + ".psi.csv", s.psi_hat);
        write_matrix_csv(cmd.matrices_prefix + ".cov.csv", s.cov);
    }

    FitResult pseudo;
    pseudo.b_hat = art.b_std;
    pseudo.converged = true;
    SteinReport stein = stein_diagnostics(pseudo, design, data, probe_spec_default());

    DrfEvaluator ev(dict, art.b_std);
    QgmReport qgm = qgm_check(ev, default_qgm_x_grid(data, cmd.qgm_x_points),
                              default_qgm_u_grid());

    json j;
    j["schema"] = "gtreg-diagnostics/1";
    j["fit"] = cmd.fit_path;
    j["duality"] = {{"primal_value", cert.primal_value},
                    {"dual_value", cert.dual_value},
                    {"gap", cert.gap},
                    {"constraint_residual", cert.constraint_residual}};
    j["info_matrix_gap"] = gap;
    j["stein"] = stein_to_json(stein);
    j["qgm"] = {{"passed", qgm.passed},
                {"violations", qgm.violations.size()},
                {"grid", qgm.grid}};
    std::ofstream out(cmd.out);
    if (!out) throw DataError("cannot write '" + cmd.out + "'");
    out << j.dump(2) << "\n";

    double worst = 0.0;
    for (double s : stein.studentized) worst = std::max(worst, std::abs(s));
    std::printf("duality gap = %.3e, info-matrix gap = %.4f, max |stein t| = %.2f, qgm = %s\n",
                cert.gap, gap, worst, qgm.passed ? "pass" : "FAIL");
    std::printf("diagnostics: %s\n", cmd.out.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateCmd {
    std::string kind = "baseline";
    int n = 1000;
    std::uint64_t seed = 1;
    std::string out = "sample.csv";
    std::string dgp_file;
};

DgpSpec dgp_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dgp file '" + path + "'");
    json j;
    in >> j;
    DgpSpec spec;
    const std::string kind = j.value("kind", "custom-b0");
    if (kind != "custom-b0") throw SpecError("dgp file currently supports kind=custom-b0");
    spec.kind = DgpKind::custom_b0;
    spec.n_covariates = j.value("n_covariates", 1);
    spec.x_lo = j.value("x_lo", 0.0);
    spec.x_hi = j.value("x_hi", 1.0);
    spec.b0 = j.at("b0").get<Vector>();
    spec.custom_dict.standardize = false;
    if (j.contains("x_basis")) spec.custom_dict.x_basis = basis_from_config(j.at("x_basis"));
    if (j.contains("y_basis")) spec.custom_dict.y_basis = basis_from_config(j.at("y_basis"));
    return spec;
}

int cmd_simulate(const SimulateCmd& cmd) {
    if (cmd.kind == "melbourne") {
        const Vector series = melbourne_like(cmd.n, cmd.seed);
        write_csv(cmd.out, {"y"}, {series});
        // quantile fan by lagged-temperature bins, the first-look diagnostic
        DataSet pairs = lag_pairs(series);
        Vector bin_centers, fan_u, fan_q;
        const int nbins = 10;
        double xlo = series[0], xhi = series[0];
        for (double v : series) {
            xlo = std::min(xlo, v);
            xhi = std::max(xhi, v);
        }
        for (int b = 0; b < nbins; ++b) {
            const double lo = xlo + (xhi - xlo) * b / nbins;
            const double hi = xlo + (xhi - xlo) * (b + 1) / nbins;
            Vector ys;
            for (int i = 0; i < pairs.n(); ++i)
                if (pairs.x(i, 0) >= lo && pairs.x(i, 0) < hi) ys.push_back(pairs.y[i]);
            if (ys.size() < 20) continue;
            std::sort(ys.begin(), ys.end());
            for (double u : {0.05, 0.25, 0.5, 0.75, 0.95}) {
                bin_centers.push_back(0.5 * (lo + hi));
                fan_u.push_back(u);
                fan_q.push_back(ys[std::size_t(u * (ys.size() - 1))]);
            }
        }
        write_csv(cmd.out + ".fan.csv", {"lag_bin", "u", "empirical_quantile"},
                  {bin_centers, fan_u, fan_q});
        std::printf("wrote %d observations to %s (+ %s.fan.csv)\n", cmd.n, cmd.out.c_str(),
                    cmd.out.c_str());
        return kExitOk;
    }

    DgpSpec spec;
    spec.n = cmd.n;
    spec.seed = cmd.seed;
    if (cmd.kind == "baseline") {
        spec.kind = DgpKind::baseline_gaussian;
    } else if (cmd.kind == "location-scale") {
        spec.kind = DgpKind::linear_location_scale;
    } else if (cmd.kind == "bimodal") {
        spec.kind = DgpKind::bimodal_misspec;
    } else if (cmd.kind == "custom-b0") {
        if (cmd.dgp_file.empty()) throw SpecError("kind=custom-b0 needs --dgp <file>");
        spec = dgp_from_file(cmd.dgp_file);
        spec.n = cmd.n;
        spec.seed = cmd.seed;
    } else {
        throw SpecError("unknown kind '" + cmd.kind +
                        "' (baseline|location-scale|bimodal|custom-b0|melbourne)");
    }

    DataSet data = generate(spec);
    write_dataset_csv(cmd.out, data);

    if (spec.kind == DgpKind::linear_location_scale) {
        // true coefficients on the raw (1, y, x, xy) dictionary
        json truth;
        truth["b0_raw"] = {spec.beta1_0, spec.beta2_0, spec.beta1_1, spec.beta2_1};
        truth["beta1"] = {spec.beta1_0, spec.beta1_1};
        truth["beta2"] = {spec.beta2_0, spec.beta2_1};
        std::ofstream out(cmd.out + ".truth.json");
        out << truth.dump(2) << "\n";
    } else if (spec.kind == DgpKind::custom_b0) {
        json truth;
        truth["b0"] = spec.b0;
        std::ofstream out(cmd.out + ".truth.json");
        out << truth.dump(2) << "\n";
    }
    std::printf("wrote %d observations to %s\n", spec.n, cmd.out.c_str());
    return kExitOk;
}

// ---------------------------------------------------------------- config file

// flags override config-file values: only fields untouched on the command
// line are filled from the file
void apply_config(const std::string& path, CLI::App* sub, DataArgs& data, std::string& out) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw SpecError("malformed config: " + std::string(ex.what()));
    }
    auto fill = [&](const char* flag, const char* key, std::string& target) {
        if (sub->count(flag) == 0 && j.contains(key)) target = j.at(key).get<std::string>();
    };
    fill("--data", "data", data.path);
    fill("--outcome", "outcome", data.outcome);
    if (sub->count("--covariates") == 0 && j.contains("covariates")) {
        std::string joined;
        for (const auto& c : j.at("covariates"))
            joined += (joined.empty() ? "" : ",") + c.get<std::string>();
        data.covariates = joined;
    }
    if (sub->count("--lag") == 0 && j.contains("lag")) data.lag = j.at("lag").get<bool>();
    fill("--out", "out", out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-transform distributional regression"};
    app.require_subcommand(1);

    FitCmd fit;
    std::string fit_config;
    auto* sub_fit = app.add_subcommand("fit", "maximum-likelihood fit with certificates");
    sub_fit->add_option("--data", fit.data.path, "input CSV");
    sub_fit->add_option("--outcome", fit.data.outcome, "outcome column name");
    sub_fit->add_option("--covariates", fit.data.covariates, "comma-separated covariate columns");
    sub_fit->add_flag("--lag", fit.data.lag, "use lagged outcome as the single covariate");
    sub_fit->add_option("--x-basis", fit.xb.kind, "x basis: linear|bspline");
    sub_fit->add_option("--x-dim", fit.xb.dim, "x basis dimension K");
    sub_fit->add_option("--x-degree", fit.xb.degree, "x spline degree");
    sub_fit->add_option("--y-basis", fit.yb.kind, "y basis: linear|bspline");
    sub_fit->add_option("--y-dim", fit.yb.dim, "y basis dimension J");
    sub_fit->add_option("--y-degree", fit.yb.degree, "y spline degree");
    sub_fit->add_flag("--no-standardize", fit.no_standardize, "fit in raw coordinates");
    sub_fit->add_flag("--qgm-repair", fit.qgm_repair,
                      "re-estimate under derivative constraints when QGM fails");
    sub_fit->add_option("--out", fit.out, "output directory");
    sub_fit->add_option("--max-iter", fit.solver.max_iter, "Newton iteration cap");
    sub_fit->add_option("--grad-tol", fit.solver.grad_tol, "score sup-norm tolerance");
    sub_fit->add_option("--qgm-x-points", fit.qgm_x_points, "QGM x-grid size");
    sub_fit->add_option("--config", fit_config, "JSON config (flags override)");

    SelectCmd sel;
    std::string sel_config;
    auto* sub_sel = app.add_subcommand("select", "penalization path + QGM screen + BIC selection");
    sub_sel->add_option("--data", sel.data.path, "input CSV");
    sub_sel->add_option("--outcome", sel.data.outcome, "outcome column name");
    sub_sel->add_option("--covariates", sel.data.covariates, "comma-separated covariate columns");
    sub_sel->add_flag("--lag", sel.data.lag, "use lagged outcome as the single covariate");
    sub_sel->add_option("--candidates", sel.candidates_file, "JSON candidate list");
    sub_sel->add_option("--lambda-grid", sel.lambda_grid,
                        "per-observation lambda grid (list or lo:hi:step)");
    sub_sel->add_option("--out", sel.out, "output directory");
    sub_sel->add_option("--max-iter", sel.solver.max_iter, "iteration cap");
    sub_sel->add_option("--grad-tol", sel.solver.grad_tol, "tolerance");
    sub_sel->add_option("--qgm-x-points", sel.qgm_x_points, "QGM x-grid size");
    sub_sel->add_option("--qgm-u-step", sel.qgm_u_step, "QGM u-grid step");
    sub_sel->add_flag("--no-standardize", sel.no_standardize, "fit in raw coordinates");
    sub_sel->add_option("--config", sel_config, "JSON config (flags override)");

    EvalCmd ev;
    auto* sub_ev = app.add_subcommand("eval", "band grids from a stored fit");
    sub_ev->add_option("--fit", ev.fit_path, "fit artifact")->required();
    sub_ev->add_option("--kind", ev.kind, "cdf|pdf|quantile");
    sub_ev->add_option("--x", ev.x_values, "x values (list or lo:hi:step)")->required();
    sub_ev->add_option("--grid", ev.grid, "y grid (cdf/pdf) or u grid (quantile)")->required();
    sub_ev->add_option("--level", ev.level, "band level");
    sub_ev->add_option("--out", ev.out, "output CSV");

    DiagnoseCmd diag;
    auto* sub_diag = app.add_subcommand("diagnose", "certificates and misspecification checks");
    sub_diag->add_option("--fit", diag.fit_path, "fit artifact")->required();
    sub_diag->add_option("--data", diag.data.path, "input CSV")->required();
    sub_diag->add_option("--outcome", diag.data.outcome, "outcome column name");
    sub_diag->add_option("--covariates", diag.data.covariates, "covariate columns");
    sub_diag->add_flag("--lag", diag.data.lag, "lagged-outcome covariate");
    sub_diag->add_option("--out", diag.out, "output JSON");
    sub_diag->add_option("--qgm-x-points", diag.qgm_x_points, "QGM x-grid size");
    sub_diag->add_option("--matrices-out", diag.matrices_prefix,
                         "prefix for gamma/psi/cov CSV dumps");

    SimulateCmd sim;
    auto* sub_sim = app.add_subcommand("simulate", "generate oracle datasets");
    sub_sim->add_option("--kind", sim.kind,
                        "baseline|location-scale|bimodal|custom-b0|melbourne");
    sub_sim->add_option("--n", sim.n, "sample size / series length");
    sub_sim->add_option("--seed", sim.seed, "rng seed");
    sub_sim->add_option("--out", sim.out, "output CSV");
    sub_sim->add_option("--dgp", sim.dgp_file, "JSON spec for custom-b0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sub_fit) {
            apply_config(fit_config, sub_fit, fit.data, fit.out);
            if (fit.data.path.empty()) throw SpecError("--data is required");
            return cmd_fit(fit);
        }
        if (*sub_sel) {
            apply_config(sel_config, sub_sel, sel.data, sel.out);
            if (sel.data.path.empty()) throw SpecError("--data is required");
            return cmd_select(sel);
        }
        if (*sub_ev) return cmd_eval(ev);
        if (*sub_diag) return cmd_diagnose(diag);
        if (*sub_sim) return cmd_simulate(sim);
    } catch (const SpecError& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return kExitConfig;
    } catch (const DimensionError& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return kExitConfig;
    } catch (const DataError& ex) {
        std::fprintf(stderr, "data error: %s\n", ex.what());
        return kExitData;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitData;
    }
    return kExitConfig;
}
