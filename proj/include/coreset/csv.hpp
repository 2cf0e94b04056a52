// Copyright 2026 The Coreset Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal RFC-4180-ish CSV reading/writing: comma separated, optional double
// quotes with "" escapes, no embedded newlines.

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "coreset/error.hpp"

namespace coreset::csv {

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) detail::fail("csv: unterminated quote in line: " + std::string(line));
    out.push_back(std::move(cur));
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

/// Reads a whole table; blank lines are skipped, every row must match the header width.
inline Table read(std::istream& in, std::string_view what) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto fields = split_line(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            detail::fail(std::string(what) + ": line " + std::to_string(lineno) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header) detail::fail(std::string(what) + ": empty file");
    return t;
}

inline void expect_header(const Table& t, const std::vector<std::string>& expected, std::string_view what) {
    if (t.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        detail::fail(std::string(what) + ": expected header '" + want + "'");
    }
}

inline double parse_double(std::string_view s, std::string_view what) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        detail::fail(std::string(what) + ": not a finite number: '" + std::string(s) + "'");
    }
    return v;
}

inline bool parse_flag(std::string_view s, std::string_view what) {
    if (s == "0") return false;
    if (s == "1") return true;
    detail::fail(std::string(what) + ": expected 0 or 1, got '" + std::string(s) + "'");
}

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw InternalError("csv: cannot format number");
    return {buf, ptr};
}

inline std::string escape(std::string_view s) {
    if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

} // namespace coreset::csv
