#include "varinfer/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace varinfer {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              std::size_t lineno) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t next = line.find(',', pos);
        if (next == std::string::npos) next = line.size();
        const std::string cell = line.substr(pos, next - pos);
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            throw IoError(path + ": line " + std::to_string(lineno) + ", column " +
                          std::to_string(row.size() + 1) + ": bad numeric cell '" +
                          cell + "'");
        }
        row.push_back(v);
        pos = next + 1;
        if (next == line.size()) break;
    }
    return row;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        rows.push_back(parse_row(line, path, lineno));
        if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
            throw IoError(path + ": line " + std::to_string(lineno) +
                          ": ragged row (expected " +
                          std::to_string(rows.front().size()) + " columns)");
        }
    }
    if (rows.empty()) throw IoError(path + ": empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.front().size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_series_csv(const std::string& path, const VarSample& sample) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << 't';
    for (int j = 1; j <= sample.p; ++j) out << ",x" << j;
    out << '\n';
    for (int i = 0; i <= sample.n; ++i) {
        out << i;
        for (int j = 0; j < sample.p; ++j) out << ',' << format_double(sample.series(i, j));
        out << '\n';
    }
}

VarSample read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty series file");
    line = strip_cr(line);
    if (line.rfind("t,", 0) != 0) {
        throw IoError(path + ": expected header starting with 't,'");
    }
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto row = parse_row(line, path, lineno);
        if (row.size() < 2) throw IoError(path + ": line " + std::to_string(lineno) +
                                          ": need at least t and one coordinate");
        rows.push_back(std::move(row));
        if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
            throw IoError(path + ": line " + std::to_string(lineno) + ": ragged row");
        }
    }
    if (rows.size() < 2) throw IoError(path + ": need at least two observations");
    VarSample s;
    s.n = static_cast<int>(rows.size()) - 1;
    s.p = static_cast<int>(rows.front().size()) - 1;
    s.series.resize(s.n + 1, s.p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < s.p; ++j) {
            s.series(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j) + 1];
        }
    }
    if (!s.series.allFinite()) throw IoError(path + ": non-finite entries in series");
    return s;
}

}  // namespace varinfer
