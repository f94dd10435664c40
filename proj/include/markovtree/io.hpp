#ifndef MARKOVTREE_IO_HPP
#define MARKOVTREE_IO_HPP

// Matrix files. CSV: one row per line, comma-separated, no header.
// JSON: {"n": int, "rows": [[...]], "mode": "strict"|"generalized"}.
// Entries are decimal literals or "p/q" rationals; any rational entry
// selects exact arithmetic unless the caller forces float.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "error.hpp"
#include "scalar.hpp"

namespace markovtree::io {

enum class FileFormat { Csv, Json };

struct MatrixText {
    FileFormat format = FileFormat::Csv;
    // Entry texts plus their 1-based (line, column) for diagnostics.
    std::vector<std::vector<std::string>> cells;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> positions;
    std::optional<Mode> mode;

    bool has_fraction() const {
        for (const auto& row : cells)
            for (const auto& c : row)
                if (is_fraction_literal(c)) return true;
        return false;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline Mode parse_mode(std::string_view s) {
    if (s == "strict") return Mode::Strict;
    if (s == "generalized") return Mode::Generalized;
    throw InvalidArgument("unknown mode '" + std::string(s) + "'");
}

} // namespace detail

inline MatrixText parse_csv(std::string_view content) {
    MatrixText out;
    out.format = FileFormat::Csv;
    std::size_t line_no = 0;
    while (!content.empty()) {
        ++line_no;
        std::size_t eol = content.find('\n');
        std::string_view line = content.substr(0, eol);
        content = eol == std::string_view::npos ? std::string_view{} : content.substr(eol + 1);
        if (detail::trim(line).empty()) continue;

        std::vector<std::string> row;
        std::vector<std::pair<std::size_t, std::size_t>> pos;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
            std::string_view value = detail::trim(field);
            if (value.empty()) throw ParseError(line_no, start + 1, "empty entry");
            std::size_t column = start + 1 + field.find_first_not_of(" \t");
            row.emplace_back(value);
            pos.emplace_back(line_no, column);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (!out.cells.empty() && row.size() != out.cells.front().size())
            throw ParseError(line_no, 1,
                             "row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(out.cells.front().size()));
        out.cells.push_back(std::move(row));
        out.positions.push_back(std::move(pos));
    }
    if (out.cells.empty()) throw ParseError(1, 1, "no matrix rows");
    if (out.cells.size() != out.cells.front().size())
        throw ParseError(line_no, 1,
                         std::to_string(out.cells.size()) + " rows but " +
                             std::to_string(out.cells.front().size()) + " columns");
    return out;
}

inline MatrixText parse_json(std::string_view content) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(1, e.byte, e.what());
    }
    if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
        throw ParseError(1, 1, "expected an object with a \"rows\" array");

    MatrixText out;
    out.format = FileFormat::Json;
    const auto& rows = doc["rows"];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].is_array()) throw ParseError(r + 1, 1, "rows[" + std::to_string(r) + "] is not an array");
        std::vector<std::string> row;
        std::vector<std::pair<std::size_t, std::size_t>> pos;
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            const auto& v = rows[r][c];
            if (v.is_string())
                row.push_back(std::string(detail::trim(v.get<std::string>())));
            else if (v.is_number_integer())
                row.push_back(v.dump());
            else if (v.is_number_float())
                row.push_back(to_string(v.get<double>()));
            else
                throw ParseError(r + 1, c + 1, "entry is neither a number nor a string");
            pos.emplace_back(r + 1, c + 1);
        }
        if (row.size() != rows.size())
            throw ParseError(r + 1, 1,
                             "row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(rows.size()));
        out.cells.push_back(std::move(row));
        out.positions.push_back(std::move(pos));
    }
    if (out.cells.empty()) throw ParseError(1, 1, "no matrix rows");
    if (doc.contains("n")) {
        if (!doc["n"].is_number_unsigned() || doc["n"].get<std::size_t>() != out.cells.size())
            throw ParseError(1, 1, "\"n\" does not match the number of rows");
    }
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string()) throw ParseError(1, 1, "\"mode\" must be a string");
        try {
            out.mode = detail::parse_mode(doc["mode"].get<std::string>());
        } catch (const InvalidArgument& e) {
            throw ParseError(1, 1, e.what());
        }
    }
    return out;
}

// JSON when the first non-blank character is '{', CSV otherwise.
inline MatrixText parse_matrix_text(std::string_view content) {
    std::string_view t = detail::trim(content);
    if (!t.empty() && t.front() == '{') return parse_json(content);
    return parse_csv(content);
}

inline MatrixText read_matrix_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_matrix_text(ss.str());
}

template <Scalar T>
DenseMatrix<T> to_matrix(const MatrixText& text) {
    const std::size_t n = text.cells.size();
    DenseMatrix<T> m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            try {
                m(i, j) = parse_scalar<T>(text.cells[i][j]);
            } catch (const InvalidArgument& e) {
                auto [line, col] = text.positions[i][j];
                throw ParseError(line, col, e.what());
            }
        }
    return m;
}

} // namespace markovtree::io

#endif // MARKOVTREE_IO_HPP
