#pragma once
// Small TOML reader covering what the pipeline config needs: comments,
// [section] tables one level deep, and string / integer / float / boolean
// values. Arrays, inline tables, and multi-line strings are rejected with a
// clear message rather than half-parsed.

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "ideascope/common.hpp"

namespace ideascope {

struct TomlValue {
    std::variant<std::string, std::int64_t, double, bool> value;
    int line = 0;

    bool is_string() const { return std::holds_alternative<std::string>(value); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(value); }
    bool is_float() const { return std::holds_alternative<double>(value); }
    bool is_bool() const { return std::holds_alternative<bool>(value); }

    const std::string& as_string() const { return std::get<std::string>(value); }
    std::int64_t as_int() const { return std::get<std::int64_t>(value); }
    double as_number() const {
        return is_int() ? static_cast<double>(std::get<std::int64_t>(value))
                        : std::get<double>(value);
    }
    bool as_bool() const { return std::get<bool>(value); }
};

// Keys are flattened to "section.key" ("key" at top level), insertion order
// not preserved (std::map) — callers validate against a known key set anyway.
inline std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;

    auto fail = [&](const std::string& msg) {
        throw ValidationError("config line " + std::to_string(line_no) + ": " + msg);
    };

    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        // Strip comments outside strings.
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (c == '#' && !in_string) {
                line.resize(i);
                break;
            }
        }
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated table header");
            section = line.substr(1, line.size() - 2);
            if (section.empty()) fail("empty table name");
            for (char c : section)
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
                    fail("unsupported table name '" + section + "'");
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        std::string key = line.substr(0, eq);
        auto key_end = key.find_last_not_of(" \t");
        key = key.substr(0, key_end == std::string::npos ? 0 : key_end + 1);
        if (key.empty()) fail("empty key");
        for (char c : key)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
                fail("unsupported key '" + key + "'");

        std::string raw = line.substr(eq + 1);
        auto vstart = raw.find_first_not_of(" \t");
        if (vstart == std::string::npos) fail("missing value for '" + key + "'");
        raw = raw.substr(vstart);

        TomlValue v;
        v.line = line_no;
        if (raw.front() == '"') {
            std::string s;
            bool closed = false;
            for (std::size_t i = 1; i < raw.size(); ++i) {
                char c = raw[i];
                if (c == '\\') {
                    if (i + 1 >= raw.size()) fail("dangling escape");
                    char e = raw[++i];
                    switch (e) {
                        case 'n': s += '\n'; break;
                        case 't': s += '\t'; break;
                        case 'r': s += '\r'; break;
                        case '"': s += '"'; break;
                        case '\\': s += '\\'; break;
                        default: fail(std::string("unsupported escape \\") + e);
                    }
                } else if (c == '"') {
                    if (raw.find_first_not_of(" \t", i + 1) != std::string::npos)
                        fail("trailing characters after string");
                    closed = true;
                    break;
                } else {
                    s += c;
                }
            }
            if (!closed) fail("unterminated string");
            v.value = s;
        } else if (raw == "true" || raw == "false") {
            v.value = raw == "true";
        } else if (raw.front() == '[' || raw.front() == '{') {
            fail("arrays and inline tables are not supported in this config format");
        } else {
            bool is_float = raw.find_first_of(".eE") != std::string::npos;
            try {
                std::size_t used = 0;
                if (is_float) {
                    v.value = std::stod(raw, &used);
                } else {
                    v.value = static_cast<std::int64_t>(std::stoll(raw, &used, 10));
                }
                if (used != raw.size()) fail("malformed number '" + raw + "'");
            } catch (const std::exception&) {
                fail("cannot parse value '" + raw + "'");
            }
        }

        std::string full = section.empty() ? key : section + "." + key;
        if (out.count(full)) fail("duplicate key '" + full + "'");
        out.emplace(std::move(full), std::move(v));
    }
    return out;
}

}  // namespace ideascope
