#pragma once

#include <string>
#include <vector>

#include "gtreg/dictionary.hpp"

namespace gtreg {

/// Strict CSV: header row, UTF-8, '.' decimal separator, no missing cells.
/// Rows with non-numeric or missing cells are rejected with their row
/// numbers rather than imputed.
struct CsvTable {
    std::vector<std::string> names;
    std::vector<Vector> cols;
    int n_rows() const { return cols.empty() ? 0 : int(cols[0].size()); }
    int find(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<Vector>& cols);

/// Column selection: one outcome, remaining roles as covariates. With
/// `lag`, the file must carry a single series column and (y_t, y_{t-1})
/// pairs are constructed.
DataSet dataset_from_csv(const CsvTable& table, const std::string& outcome,
                         const std::vector<std::string>& covariates, bool lag);

void write_dataset_csv(const std::string& path, const DataSet& data,
                       const std::string& outcome_name = "y");

}  // namespace gtreg
