#pragma once
// RFC 3339 timestamp parsing/formatting. Instants are UTC milliseconds since
// the Unix epoch (int64); offsets in the input are normalized to UTC.

#include <cctype>
#include <cstdint>
#include <string>

#include "ideascope/common.hpp"

namespace ideascope {

using Millis = std::int64_t;

namespace detail {

// Days from civil date (proleptic Gregorian), Howard Hinnant's algorithm.
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

inline bool two_digits(const std::string& s, std::size_t at, int& out) {
    if (at + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[at])) ||
        !std::isdigit(static_cast<unsigned char>(s[at + 1])))
        return false;
    out = (s[at] - '0') * 10 + (s[at + 1] - '0');
    return true;
}

inline int days_in_month(int y, int m) {
    static const int table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return table[m - 1];
}

}  // namespace detail

// Parse "YYYY-MM-DDTHH:MM:SS[.fff...][Z|+HH:MM|-HH:MM]" into UTC millis.
// Throws ValidationError with `what` naming the defect.
inline Millis parse_rfc3339(const std::string& s) {
    auto fail = [&](const std::string& why) -> Millis {
        throw ValidationError("timestamp \"" + s + "\": " + why);
    };
    if (s.size() < 20) return fail("too short for RFC 3339");
    for (std::size_t i : {4u, 7u})
        if (s[i] != '-') return fail("expected '-' in date");
    int year = 0;
    for (int i = 0; i < 4; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return fail("bad year");
        year = year * 10 + (s[i] - '0');
    }
    int month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!detail::two_digits(s, 5, month) || !detail::two_digits(s, 8, day))
        return fail("bad month/day");
    if (s[10] != 'T' && s[10] != 't') return fail("expected 'T' separator");
    if (!detail::two_digits(s, 11, hour)) return fail("bad hour");
    if (s[13] != ':') return fail("expected ':' after hour");
    if (!detail::two_digits(s, 14, minute)) return fail("bad minute");
    if (s[16] != ':') return fail("expected ':' after minute");
    if (!detail::two_digits(s, 17, second)) return fail("bad second");
    if (month < 1 || month > 12) return fail("month out of range");
    if (day < 1 || day > detail::days_in_month(year, month)) return fail("day out of range");
    if (hour > 23 || minute > 59 || second > 60) return fail("time out of range");
    if (second == 60) second = 59;  // fold leap second

    std::size_t pos = 19;
    long millis = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        long frac = 0;
        int digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (digits < 3) frac = frac * 10 + (s[pos] - '0');
            ++digits;
            ++pos;
        }
        if (pos == start) return fail("empty fractional seconds");
        while (digits < 3 && digits > 0) {
            frac *= 10;
            ++digits;
        }
        millis = frac;
    }
    if (pos >= s.size()) return fail("missing UTC offset");
    int offset_min = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int sign = s[pos] == '+' ? 1 : -1;
        int oh = 0, om = 0;
        if (!detail::two_digits(s, pos + 1, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !detail::two_digits(s, pos + 4, om))
            return fail("bad numeric offset");
        if (oh > 23 || om > 59) return fail("offset out of range");
        offset_min = sign * (oh * 60 + om);
        pos += 6;
    } else {
        return fail("bad UTC offset");
    }
    if (pos != s.size()) return fail("trailing characters");

    std::int64_t days = detail::days_from_civil(year, month, day);
    std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second;
    secs -= static_cast<std::int64_t>(offset_min) * 60;
    return secs * 1000 + millis;
}

// Format UTC millis as RFC 3339 with 'Z'; fractional part only when nonzero.
inline std::string format_rfc3339(Millis t) {
    std::int64_t ms = ((t % 1000) + 1000) % 1000;
    std::int64_t secs = (t - ms) / 1000;
    std::int64_t days = secs / 86400;
    std::int64_t sod = secs % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y, m, d;
    detail::civil_from_days(days, y, m, d);
    int hh = static_cast<int>(sod / 3600);
    int mm = static_cast<int>((sod % 3600) / 60);
    int ss = static_cast<int>(sod % 60);
    char buf[40];
    if (ms == 0)
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d, hh, mm, ss);
    else
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", y, m, d, hh, mm,
                      ss, static_cast<int>(ms));
    return buf;
}

}  // namespace ideascope
