// csv.hpp
//
// Minimal numeric-CSV reading for dataset and feature files: a header row
// followed by comma-separated numeric rows, last column being the target.

#ifndef QADSE_CSV_HPP
#define QADSE_CSV_HPP

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "qadse/common.hpp"

namespace qadse {

struct FeatureTable {
    std::vector<std::string> columns;              // including the target column
    std::vector<std::vector<double>> features;     // all but the last column
    std::vector<double> targets;                   // the last column
};

inline FeatureTable read_feature_csv(std::istream& in) {
    FeatureTable table;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty CSV");
    {
        std::istringstream header(line);
        std::string col;
        while (std::getline(header, col, ',')) table.columns.push_back(col);
    }
    if (table.columns.size() < 2)
        throw ValidationError("CSV needs at least one feature column and a target");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(fields, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ValidationError("CSV line " + std::to_string(line_no) +
                                      ": non-numeric cell \"" + cell + "\"");
            }
        }
        if (row.size() != table.columns.size())
            throw ValidationError("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.columns.size()) + " cells, got " +
                                  std::to_string(row.size()));
        table.targets.push_back(row.back());
        row.pop_back();
        table.features.push_back(std::move(row));
    }
    if (table.features.empty()) throw ValidationError("CSV has no data rows");
    return table;
}

} // namespace qadse

#endif
