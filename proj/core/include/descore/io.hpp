#pragma once

#include <string>
#include <vector>

#include "descore/model.hpp"

namespace descore {

struct CsvTable {
    std::vector<std::string> header;
    Matrix values;  // rows x columns
};

/// Headered, comma-separated numeric table. Missing or non-numeric cells raise
/// DataError naming the 1-based data row and the column.
CsvTable read_csv(const std::string& path);

/// Columns other than the response become Q in file order. Interest entries are
/// column names, or 0-based indices into Q when every entry is an integer that
/// is not also a column name.
Dataset read_dataset(const std::string& path, const std::string& response, const std::vector<std::string>& interest);

/// Writes via a temporary file in the same directory followed by rename.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Response column first, then Q; values printed with 17 significant digits.
std::string format_dataset_csv(const Dataset& data, const std::string& response = "y",
                               const std::string& prefix = "x");

}  // namespace descore
