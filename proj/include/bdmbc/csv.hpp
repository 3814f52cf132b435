#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"

namespace bdmbc {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

inline std::optional<double> parse_real(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc() || ptr != end || cell.empty()) return std::nullopt;
    return value;
}

} // namespace detail

/// Shortest decimal text that round-trips to the same double.
inline std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Reads a comma-delimited numeric table. `label_column` is a zero-based
/// column index; negative values count from the end (-1 is the last column).
/// Label cells must be exact non-negative integers, or else all be
/// non-numeric tokens, which are coded 0, 1, ... in order of first appearance.
inline Dataset load_csv(const std::string& path, bool has_header,
                        std::optional<int> label_column = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::vector<double> coords;
    std::vector<std::string> raw_labels;
    std::size_t width = 0, rows = 0, line_no = 0, label_at = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        if (has_header && line_no == 1) continue;
        const auto cells = detail::split_commas(line);
        if (width == 0) {
            width = cells.size();
            if (label_column) {
                const int c = *label_column < 0 ? static_cast<int>(width) + *label_column : *label_column;
                if (c < 0 || c >= static_cast<int>(width))
                    throw ParameterError("label_column", "label column out of range for " +
                                                             std::to_string(width) + " columns");
                label_at = static_cast<std::size_t>(c);
            }
        } else if (cells.size() != width) {
            throw ParseError(path + ": row " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " columns, expected " + std::to_string(width));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (label_column && c == label_at) {
                raw_labels.emplace_back(cells[c]);
                continue;
            }
            const auto v = detail::parse_real(cells[c]);
            if (!v || !std::isfinite(*v))
                throw ParseError(path + ": row " + std::to_string(line_no) + ", column " +
                                 std::to_string(c) + ": cannot parse '" + std::string(cells[c]) +
                                 "' as a finite real");
            coords.push_back(*v);
        }
        ++rows;
    }
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    if (rows == 0) throw ParseError(path + ": no data rows");
    const std::size_t d = width - (label_column ? 1 : 0);
    if (d == 0) throw ParseError(path + ": no feature columns");

    std::optional<std::vector<Label>> labels;
    if (label_column) {
        std::vector<Label> out(rows);
        bool any_numeric = false, all_integer = true;
        for (std::size_t i = 0; i < rows; ++i) {
            const auto v = detail::parse_real(raw_labels[i]);
            if (!v) {
                all_integer = false;
                continue;
            }
            any_numeric = true;
            if (*v < 0 || std::floor(*v) != *v || *v > 2147483647.0) {
                throw ParseError(path + ": label '" + raw_labels[i] + "' on data row " +
                                 std::to_string(i + 1) + " is not an exact non-negative integer");
            }
            out[i] = static_cast<Label>(*v);
        }
        if (!all_integer || !any_numeric) {
            std::map<std::string, Label> codes;
            for (std::size_t i = 0; i < rows; ++i) {
                auto [it, inserted] = codes.try_emplace(raw_labels[i], static_cast<Label>(codes.size()));
                out[i] = it->second;
            }
        }
        labels = std::move(out);
    }
    return Dataset(rows, d, std::move(coords), std::move(labels));
}

/// Writes points with a header row `x0,...,x{d-1}[,label]`; labels, when
/// present, go in the last column.
inline void write_dataset_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (std::size_t j = 0; j < ds.dim(); ++j) out << (j ? "," : "") << 'x' << j;
    if (ds.has_labels()) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dim(); ++j) out << (j ? "," : "") << format_real(ds(i, j));
        if (ds.has_labels()) out << ',' << ds.labels()[i];
        out << '\n';
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

/// Reads a label vector from a one-column file or from column `column` of a
/// CSV. A first row whose selected cell is not an integer is treated as a
/// header.
inline std::vector<Label> load_labels(const std::string& path, int column = -1) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<Label> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        const int c = column < 0 ? static_cast<int>(cells.size()) + column : column;
        if (c < 0 || c >= static_cast<int>(cells.size()))
            throw ParseError(path + ": row " + std::to_string(line_no) + " has no column " +
                             std::to_string(column));
        const auto v = detail::parse_real(cells[static_cast<std::size_t>(c)]);
        if (!v) {
            if (labels.empty() && line_no == 1) continue;
            throw ParseError(path + ": row " + std::to_string(line_no) + ": label '" +
                             std::string(cells[static_cast<std::size_t>(c)]) + "' is not a number");
        }
        if (std::floor(*v) != *v)
            throw ParseError(path + ": row " + std::to_string(line_no) + ": label is not an integer");
        labels.push_back(static_cast<Label>(*v));
    }
    return labels;
}

} // namespace bdmbc
