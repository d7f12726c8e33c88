#include "artifacts.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prbfn::cli {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            out << (i ? "," : "") << row.cells[i];
        }
        out << "\n";
    }
}

void write_matrix_csv(const std::filesystem::path& file, const Eigen::MatrixXd& m) {
    std::vector<CsvRow> rows;
    rows.reserve(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rows.push_back({{std::to_string(i + 1), std::to_string(j + 1), format_number(m(i, j))}});
        }
    }
    write_csv(file, {"i", "j", "value"}, rows);
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace prbfn::cli
