#include "ocksr/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ocksr/errors.hpp"

namespace ocksr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || cell.empty())
        throw CsvParseError("cannot parse '" + cell + "' as a number", row, col);
    if (!std::isfinite(v))
        throw CsvParseError("non-finite value '" + cell + "'", row, col);
    return v;
}

}  // namespace

CsvData load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    CsvData out;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> label_col = opts.label_index;

    if (opts.header) {
        if (!std::getline(in, line)) throw CsvParseError("empty file", 1, 1);
        ++lineno;
        out.column_names = split_csv(line);
        if (opts.label_name) {
            for (std::size_t c = 0; c < out.column_names.size(); ++c)
                if (out.column_names[c] == *opts.label_name) label_col = c;
            if (!label_col)
                throw CsvParseError("label column '" + *opts.label_name + "' not found", 1, 1);
        }
    } else if (opts.label_name) {
        throw IoError("a label column name needs --header");
    }

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (width == 0) {
            width = cells.size();
            if (label_col && *label_col >= width)
                throw CsvParseError("label column index out of range", lineno, *label_col + 1);
        } else if (cells.size() != width) {
            throw CsvParseError("expected " + std::to_string(width) + " columns, found " +
                                    std::to_string(cells.size()),
                                lineno, cells.size());
        }
        std::vector<double> feat;
        feat.reserve(width);
        for (std::size_t c = 0; c < width; ++c) {
            const double v = parse_cell(cells[c], lineno, c + 1);
            if (label_col && c == *label_col) {
                if (v != 0.0 && v != 1.0)
                    throw NonBinaryLabel("label at row " + std::to_string(lineno) +
                                         " is not 0 or 1");
                labels.push_back(static_cast<int>(v));
            } else {
                feat.push_back(v);
            }
        }
        rows.push_back(std::move(feat));
    }
    if (rows.empty()) throw CsvParseError("no data rows", lineno + 1, 1);

    const std::size_t d = rows.front().size();
    if (d == 0) throw CsvParseError("no feature columns", 2, 1);
    out.samples = SampleMatrix(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) out.samples.rows(i, j) = rows[i][j];
    if (label_col) out.labels = std::move(labels);
    return out;
}

void write_csv(const std::string& path, const SampleMatrix& samples,
               const std::vector<int>* labels, bool header) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    if (header) {
        for (std::size_t j = 0; j < samples.d; ++j) out << (j ? "," : "") << "f" << j;
        if (labels != nullptr) out << ",label";
        out << '\n';
    }
    char buf[40];
    for (std::size_t i = 0; i < samples.n; ++i) {
        for (std::size_t j = 0; j < samples.d; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", samples.rows(i, j));
            out << (j ? "," : "") << buf;
        }
        if (labels != nullptr) out << ',' << (*labels)[i];
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace ocksr
