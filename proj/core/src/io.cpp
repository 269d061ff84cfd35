#include "descore/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "descore/errors.hpp"

namespace descore {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_index(const std::string& s, Index& out) {
    if (s.empty()) return false;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return false;
    out = static_cast<Index>(v);
    return true;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    CsvTable t;
    t.header = split(line);
    const std::size_t cols = t.header.size();
    for (std::size_t j = 0; j < cols; ++j)
        if (t.header[j].empty()) throw DataError("header column " + std::to_string(j + 1) + " has no name");

    std::vector<double> vals;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++rows;
        std::vector<std::string> cells = split(line);
        if (cells.size() != cols)
            throw DataError("row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                            " fields, expected " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j) {
            const std::string& c = cells[j];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (c.empty() || ec != std::errc() || ptr != c.data() + c.size() || !std::isfinite(v))
                throw DataError("row " + std::to_string(rows) + ", column '" + t.header[j] +
                                "': non-numeric or missing value '" + c + "'");
            vals.push_back(v);
        }
    }
    t.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            t.values(static_cast<Index>(i), static_cast<Index>(j)) = vals[i * cols + j];
    return t;
}

Dataset read_dataset(const std::string& path, const std::string& response, const std::vector<std::string>& interest) {
    if (interest.empty()) throw InvalidArgument("at least one interest column is required");
    for (const std::string& name : interest)
        if (name == response) throw InvalidArgument("interest column '" + name + "' is the response column");

    CsvTable t = read_csv(path);
    if (t.values.rows() < 2) throw DataError("'" + path + "' needs at least 2 data rows");
    Index ycol = -1;
    std::vector<std::string> qnames;
    IndexList qcols;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (t.header[j] == response && ycol < 0)
            ycol = static_cast<Index>(j);
        else {
            qnames.push_back(t.header[j]);
            qcols.push_back(static_cast<Index>(j));
        }
    }
    if (ycol < 0) throw InvalidArgument("response column '" + response + "' not found");
    if (qcols.empty()) throw DataError("no covariate columns besides the response");

    IndexList idx;
    for (const std::string& name : interest) {
        auto it = std::find(qnames.begin(), qnames.end(), name);
        Index k = -1;
        if (it != qnames.end()) {
            k = static_cast<Index>(it - qnames.begin());
        } else if (parse_index(name, k)) {
            if (k < 0 || k >= static_cast<Index>(qnames.size()))
                throw InvalidArgument("interest index " + name + " is out of range");
        } else {
            throw InvalidArgument("interest column '" + name + "' not found");
        }
        idx.push_back(k);
    }
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw InvalidArgument("duplicate interest columns");

    Vector y = t.values.col(ycol);
    Matrix Q = t.values(Eigen::all, qcols);
    return Dataset(std::move(y), std::move(Q), std::move(idx));
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw DataError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot move output into place at '" + path + "'");
    }
}

std::string format_dataset_csv(const Dataset& data, const std::string& response, const std::string& prefix) {
    std::ostringstream out;
    out << response;
    for (Index j = 0; j < data.d(); ++j) out << ',' << prefix << j;
    out << '\n';
    char buf[64];
    for (Index i = 0; i < data.n(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", data.y()(i));
        out << buf;
        for (Index j = 0; j < data.d(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.Q()(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace descore
