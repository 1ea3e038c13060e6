#include "gtreg/report.hpp"

#include <fstream>

#include <json.hpp>

#include "gtreg/errors.hpp"

namespace gtreg {

using nlohmann::json;

namespace {

json basis_to_json(const BasisSpec& b) {
    json j;
    j["kind"] = b.kind == BasisKind::linear ? "linear" : "bspline";
    if (b.kind == BasisKind::bspline) {
        j["degree"] = b.degree;
        j["dim"] = b.dim;
        j["knots"] = b.knots;
    }
    return j;
}

BasisSpec basis_from_json(const json& j) {
    BasisSpec b;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        b.kind = BasisKind::linear;
    } else if (kind == "bspline") {
        b.kind = BasisKind::bspline;
        b.degree = j.at("degree").get<int>();
        b.dim = j.value("dim", 0);
        if (j.contains("knots")) b.knots = j.at("knots").get<Vector>();
    } else {
        throw SpecError("unknown basis kind '" + kind + "'");
    }
    return b;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const int rows = int(j.size());
    const int cols = rows > 0 ? int(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    return m;
}

}  // namespace

void save_fit_artifact(const std::string& path, const FitArtifact& art) {
    json j;
    j["schema"] = art.schema;
    j["kind"] = art.kind;
    j["dictionary"] = {{"name", art.spec.name},
                       {"x_basis", basis_to_json(art.spec.x_basis)},
                       {"y_basis", basis_to_json(art.spec.y_basis)},
                       {"standardize", art.spec.standardize}};
    j["standardization"] = {{"y_mean", art.standardization.y_mean},
                            {"y_sd", art.standardization.y_sd},
                            {"x_means", art.standardization.x_means},
                            {"x_sds", art.standardization.x_sds}};
    j["n_covariates"] = art.n_covariates;
    j["n"] = art.n;
    j["coefficients_std"] = art.b_std;
    j["coefficients_raw"] = art.b_raw;
    j["x_hull"] = {{"lo", art.x_lo}, {"hi", art.x_hi}};
    if (art.cov_std) j["covariance_std"] = matrix_to_json(*art.cov_std);
    j["fit"] = {{"value", art.value},
                {"score_norm", art.score_norm},
                {"iterations", art.iterations},
                {"converged", art.converged},
                {"qgm_ok", art.qgm_ok},
                {"qgm_repair_rounds", art.qgm_repair_rounds},
                {"constraints_added", art.constraints_added}};
    j["duality"] = {{"primal_value", art.primal_value},
                    {"dual_value", art.dual_value},
                    {"gap", art.dual_gap},
                    {"constraint_residual", art.dual_constraint_residual}};
    j["diagnostics"] = {{"info_matrix_gap", art.info_matrix_gap}};
    if (art.kind == "adaptive_lasso") {
        j["penalty"] = {{"lambda_sum", art.lambda},
                        {"weights", art.weights},
                        {"active_set", art.active_set},
                        {"bic", art.bic},
                        {"kkt_residual", art.kkt_residual}};
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

FitArtifact load_fit_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw DataError("malformed artifact '" + path + "': " + ex.what());
    }
    FitArtifact art;
    art.schema = j.value("schema", "");
    if (art.schema != kFitSchema)
        throw DataError("artifact schema '" + art.schema + "' does not match " + kFitSchema);
    art.kind = j.value("kind", "ml");
    const json& d = j.at("dictionary");
    art.spec.name = d.value("name", "");
    art.spec.x_basis = basis_from_json(d.at("x_basis"));
    art.spec.y_basis = basis_from_json(d.at("y_basis"));
    art.spec.standardize = d.value("standardize", true);
    const json& s = j.at("standardization");
    art.standardization.y_mean = s.at("y_mean").get<double>();
    art.standardization.y_sd = s.at("y_sd").get<double>();
    art.standardization.x_means = s.at("x_means").get<Vector>();
    art.standardization.x_sds = s.at("x_sds").get<Vector>();
    art.n_covariates = j.at("n_covariates").get<int>();
    art.n = j.at("n").get<int>();
    art.b_std = j.at("coefficients_std").get<Vector>();
    art.b_raw = j.at("coefficients_raw").get<Vector>();
    if (j.contains("x_hull")) {
        art.x_lo = j.at("x_hull").at("lo").get<Vector>();
        art.x_hi = j.at("x_hull").at("hi").get<Vector>();
    }
    if (j.contains("covariance_std")) art.cov_std = matrix_from_json(j.at("covariance_std"));
    const json& f = j.at("fit");
    art.value = f.at("value").get<double>();
    art.score_norm = f.at("score_norm").get<double>();
    art.iterations = f.at("iterations").get<int>();
    art.converged = f.at("converged").get<bool>();
    art.qgm_ok = f.at("qgm_ok").get<bool>();
    art.qgm_repair_rounds = f.value("qgm_repair_rounds", 0);
    art.constraints_added = f.value("constraints_added", 0);
    const json& du = j.at("duality");
    art.primal_value = du.at("primal_value").get<double>();
    art.dual_value = du.at("dual_value").get<double>();
    art.dual_gap = du.at("gap").get<double>();
    art.dual_constraint_residual = du.at("constraint_residual").get<double>();
    art.info_matrix_gap = j.at("diagnostics").at("info_matrix_gap").get<double>();
    if (j.contains("penalty")) {
        const json& p = j.at("penalty");
        art.lambda = p.at("lambda_sum").get<double>();
        art.weights = p.at("weights").get<Vector>();
        art.active_set = p.at("active_set").get<std::vector<int>>();
        art.bic = p.at("bic").get<double>();
        art.kkt_residual = p.at("kkt_residual").get<double>();
    }
    return art;
}

Dictionary artifact_dictionary(const FitArtifact& art) {
    return resolve_dictionary(art.spec, art.standardization, art.n_covariates);
}

std::string selection_report_json(const SelectionReport& report, const std::string& data_path) {
    json j;
    j["schema"] = kSelectSchema;
    j["data"] = data_path;
    json cands = json::array();
    for (const auto& c : report.candidates) {
        json jc;
        jc["name"] = c.name;
        jc["fitted"] = c.fitted;
        if (!c.error.empty()) jc["error"] = c.error;
        if (c.fitted) {
            jc["first_step"] = {{"value", c.first_step.value},
                                {"score_norm", c.first_step.score_norm},
                                {"converged", c.first_step.converged}};
        }
        json path = json::array();
        for (const auto& lf : c.path) {
            path.push_back({{"lambda", lf.lambda},
                            {"lambda_sum", lf.lambda_sum},
                            {"bic", lf.fit.bic},
                            {"active", lf.fit.active_set.size()},
                            {"qgm_pass", lf.qgm_pass},
                            {"converged", lf.fit.converged},
                            {"excluded", lf.excluded}});
        }
        jc["path"] = std::move(path);
        jc["best_lambda_index"] = c.best;
        cands.push_back(std::move(jc));
    }
    j["candidates"] = std::move(cands);
    j["best_candidate_index"] = report.best_candidate;
    j["best_lambda_index"] = report.best_lambda;
    return j.dump(2);
}

}  // namespace gtreg
