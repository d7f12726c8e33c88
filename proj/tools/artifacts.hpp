#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace prbfn::cli {

// Shortest decimal representation that round-trips to the same double.
std::string format_number(double v);

struct CsvRow {
    std::vector<std::string> cells;
};

// Header + rows, comma separated, one trailing newline. Overwrites.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows);

// (i, j, value) triplets with 1-based indices, row-major.
void write_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& m);

void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

}  // namespace prbfn::cli
