#pragma once

#include <string>
#include <variant>
#include <vector>

namespace gadgetforge {

using CsvCell = std::variant<double, long long, std::string>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<CsvCell>>& rows() const { return rows_; }
    void add_row(std::vector<CsvCell> row);

    // Header row, %.12g numbers, LF line endings.
    std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<CsvCell>> rows_;
};

std::string format_number(double v);

// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);
void write_csv(const CsvTable& table, const std::string& path);

} // namespace gadgetforge
