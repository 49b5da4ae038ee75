// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef METAMETRICS_DETAIL_TEXT_HPP
#define METAMETRICS_DETAIL_TEXT_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace metametrics::detail {

/// Shortest decimal string that round-trips to the same double.
inline std::string fmt_shortest(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

/// Integer-looking doubles print without a fraction, others round-trip.
inline std::string fmt_number(double value) {
    if (std::isfinite(value) && value == std::floor(value) && std::fabs(value) < 0x1p53) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", value);
        return buf;
    }
    return fmt_shortest(value);
}

inline std::string fmt_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

inline std::string fmt_g6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

/// RFC 4180 field quoting: quote when the field holds a comma, quote, CR or LF.
inline std::string csv_field(const std::string& field) {
    const bool needs_quoting = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quoting) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Escapes pipes so artifact ids and situation names survive markdown tables.
inline std::string md_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '|') out += "\\|";
        else out.push_back(c);
    }
    return out;
}

}  // namespace metametrics::detail

#endif  // METAMETRICS_DETAIL_TEXT_HPP
