#include "gtreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gtreg/errors.hpp"
#include "gtreg/simulate.hpp"

namespace gtreg {

int CsvTable::find(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return int(i);
    return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim spaces and CR
        std::size_t a = cell.find_first_not_of(" \t\r");
        std::size_t b = cell.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
    if (cell.empty())
        throw DataError("missing value in column '" + col + "' at data row " + std::to_string(row));
    double value;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError("non-numeric cell '" + cell + "' in column '" + col + "' at data row " +
                        std::to_string(row));
    if (!std::isfinite(value))
        throw DataError("non-finite value in column '" + col + "' at data row " +
                        std::to_string(row));
    return value;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    CsvTable table;
    table.names = split_line(line);
    if (table.names.empty()) throw DataError("'" + path + "' has no header columns");
    table.cols.resize(table.names.size());
    int row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != table.names.size())
            throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(table.names.size()));
        for (std::size_t c = 0; c < cells.size(); ++c)
            table.cols[c].push_back(parse_cell(cells[c], row, table.names[c]));
        ++row;
    }
    if (table.n_rows() == 0) throw DataError("'" + path + "' has no data rows");
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<Vector>& cols) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.precision(17);
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << "\n";
    const int n = cols.empty() ? 0 : int(cols[0].size());
    for (int i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c][i];
        out << "\n";
    }
}

DataSet dataset_from_csv(const CsvTable& table, const std::string& outcome,
                         const std::vector<std::string>& covariates, bool lag) {
    const int yc = table.find(outcome);
    if (yc < 0) throw SpecError("outcome column '" + outcome + "' not found");
    if (lag) {
        if (!covariates.empty())
            throw SpecError("--lag and explicit covariates are mutually exclusive");
        return lag_pairs(table.cols[yc]);
    }
    if (covariates.empty()) throw SpecError("no covariate columns given");
    DataSet out;
    out.y = table.cols[yc];
    out.x = Matrix(table.n_rows(), int(covariates.size()));
    for (std::size_t c = 0; c < covariates.size(); ++c) {
        if (covariates[c] == outcome)
            throw SpecError("column '" + outcome + "' cannot be both outcome and covariate");
        const int xc = table.find(covariates[c]);
        if (xc < 0) throw SpecError("covariate column '" + covariates[c] + "' not found");
        for (int i = 0; i < table.n_rows(); ++i) out.x(i, int(c)) = table.cols[xc][i];
        out.x_names.push_back(covariates[c]);
    }
    return out;
}

void write_dataset_csv(const std::string& path, const DataSet& data,
                       const std::string& outcome_name) {
    std::vector<std::string> names{outcome_name};
    std::vector<Vector> cols{data.y};
    for (int c = 0; c < data.x.cols(); ++c) {
        names.push_back(c < int(data.x_names.size()) ? data.x_names[c]
                                                     : "x" + std::to_string(c + 1));
        Vector col(data.n());
        for (int i = 0; i < data.n(); ++i) col[i] = data.x(i, c);
        cols.push_back(std::move(col));
    }
    write_csv(path, names, cols);
}

}  // namespace gtreg
