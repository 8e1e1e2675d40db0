#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace msk {

/// Minimal CSV table: a header row plus a numeric matrix, one row per record.
struct CsvTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd data;  // rows x columns.size()

    int col(const std::string& name) const;      // -1 if absent
    int col_required(const std::string& name) const;  // throws ConfigError
};

CsvTable read_csv(const std::string& path);

/// Writes with round-trip-exact float formatting (%.17g). Deterministic.
void write_csv(const std::string& path, const CsvTable& table);

void append_csv_row(const std::string& path,
                    const std::vector<std::string>& columns,
                    const Eigen::VectorXd& row);

std::string format_double(double v);

}  // namespace msk
