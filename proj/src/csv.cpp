#include "msk/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "msk/errors.hpp"

namespace msk {

int CsvTable::col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::col_required(const std::string& name) const {
    int c = col(name);
    if (c < 0) throw ConfigError("csv: missing required column '" + name + "'");
    return c;
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.columns = split_line(line);

    std::vector<double> values;
    size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != t.columns.size())
            throw ConfigError("csv: row " + std::to_string(rows + 1) + " of '" + path +
                              "' has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(t.columns.size()));
        for (auto& f : fields) {
            try {
                values.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw ConfigError("csv: non-numeric field '" + f + "' in '" + path + "'");
            }
        }
        ++rows;
    }
    t.data.resize(rows, t.columns.size());
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < t.columns.size(); ++c)
            t.data(r, c) = values[r * t.columns.size() + c];
    return t;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("csv: cannot write '" + path + "'");
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < table.data.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.data.cols(); ++c) {
            if (c) out << ',';
            out << format_double(table.data(r, c));
        }
        out << '\n';
    }
}

void append_csv_row(const std::string& path, const std::vector<std::string>& columns,
                    const Eigen::VectorXd& row) {
    if (static_cast<size_t>(row.size()) != columns.size())
        throw ContractError("append_csv_row: row size mismatch");
    bool exists = false;
    {
        std::ifstream probe(path);
        exists = probe.good();
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("csv: cannot append to '" + path + "'");
    if (!exists) {
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) out << ',';
            out << columns[i];
        }
        out << '\n';
    }
    for (Eigen::Index c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        out << format_double(row[c]);
    }
    out << '\n';
}

}  // namespace msk
