#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace cadejo {

// All timestamps in the system are UTC seconds since the epoch.
using utc_seconds = std::chrono::sys_seconds;
using utc_date = std::chrono::year_month_day;

inline utc_date date_of(utc_seconds t) {
    return utc_date{std::chrono::floor<std::chrono::days>(t)};
}

inline utc_seconds start_of_day(utc_date d) {
    return utc_seconds{std::chrono::sys_days{d}.time_since_epoch()};
}

namespace detail {

inline bool parse_uint(std::string_view s, std::size_t& i, int digits, int& out) {
    if (i + static_cast<std::size_t>(digits) > s.size()) return false;
    int v = 0;
    for (int k = 0; k < digits; ++k) {
        char c = s[i + k];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    i += digits;
    out = v;
    return true;
}

inline std::optional<utc_seconds> make_utc(int y, int mo, int d, int h, int mi,
                                           int se, int offset_min) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    if (h > 23 || mi > 59 || se > 60) return std::nullopt;
    if (se == 60) se = 59;  // fold leap seconds
    std::chrono::year_month_day ymd{std::chrono::year{y},
                                    std::chrono::month{unsigned(mo)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    auto t = std::chrono::sys_days{ymd} + std::chrono::hours{h} +
             std::chrono::minutes{mi} + std::chrono::seconds{se} -
             std::chrono::minutes{offset_min};
    return std::chrono::time_point_cast<std::chrono::seconds>(t);
}

}  // namespace detail

// RFC 3339, e.g. "2008-10-28T14:30:00Z" or "2008-10-28T08:30:00-06:00".
// Fractional seconds are accepted and discarded.
inline std::optional<utc_seconds> parse_rfc3339(std::string_view s) {
    std::size_t i = 0;
    int y, mo, d, h, mi, se;
    if (!detail::parse_uint(s, i, 4, y)) return std::nullopt;
    if (i >= s.size() || s[i] != '-') return std::nullopt;
    ++i;
    if (!detail::parse_uint(s, i, 2, mo)) return std::nullopt;
    if (i >= s.size() || s[i] != '-') return std::nullopt;
    ++i;
    if (!detail::parse_uint(s, i, 2, d)) return std::nullopt;
    if (i >= s.size() || (s[i] != 'T' && s[i] != 't' && s[i] != ' '))
        return std::nullopt;
    ++i;
    if (!detail::parse_uint(s, i, 2, h)) return std::nullopt;
    if (i >= s.size() || s[i] != ':') return std::nullopt;
    ++i;
    if (!detail::parse_uint(s, i, 2, mi)) return std::nullopt;
    if (i >= s.size() || s[i] != ':') return std::nullopt;
    ++i;
    if (!detail::parse_uint(s, i, 2, se)) return std::nullopt;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    }
    if (i >= s.size()) return std::nullopt;
    int offset_min = 0;
    if (s[i] == 'Z' || s[i] == 'z') {
        ++i;
    } else if (s[i] == '+' || s[i] == '-') {
        int sign = (s[i] == '-') ? -1 : 1;
        ++i;
        int oh, om;
        if (!detail::parse_uint(s, i, 2, oh)) return std::nullopt;
        if (i >= s.size() || s[i] != ':') return std::nullopt;
        ++i;
        if (!detail::parse_uint(s, i, 2, om)) return std::nullopt;
        offset_min = sign * (oh * 60 + om);
    } else {
        return std::nullopt;
    }
    if (i != s.size()) return std::nullopt;
    return detail::make_utc(y, mo, d, h, mi, se, offset_min);
}

// RFC 822/1123 as used by RSS pubDate, e.g. "Tue, 28 Oct 2008 14:30:00 GMT".
inline std::optional<utc_seconds> parse_rfc822(std::string_view s) {
    // strip leading "Day, "
    if (auto comma = s.find(','); comma != std::string_view::npos)
        s.remove_prefix(comma + 1);
    auto skip_ws = [&](std::size_t& i) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    };
    std::size_t i = 0;
    skip_ws(i);
    int d = 0;
    std::size_t dstart = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        d = d * 10 + (s[i] - '0');
        ++i;
    }
    if (i == dstart || i - dstart > 2) return std::nullopt;
    skip_ws(i);
    static constexpr std::string_view months[] = {"jan", "feb", "mar", "apr",
                                                  "may", "jun", "jul", "aug",
                                                  "sep", "oct", "nov", "dec"};
    if (i + 3 > s.size()) return std::nullopt;
    std::string mon;
    for (int k = 0; k < 3; ++k)
        mon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i + k]))));
    int mo = 0;
    for (int k = 0; k < 12; ++k)
        if (months[k] == mon) mo = k + 1;
    if (mo == 0) return std::nullopt;
    i += 3;
    skip_ws(i);
    int y = 0;
    std::size_t ystart = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        y = y * 10 + (s[i] - '0');
        ++i;
    }
    std::size_t ydigits = i - ystart;
    if (ydigits == 2) y += (y < 50) ? 2000 : 1900;
    else if (ydigits != 4) return std::nullopt;
    skip_ws(i);
    int h, mi_, se = 0;
    if (!detail::parse_uint(s, i, 2, h)) return std::nullopt;
    if (i >= s.size() || s[i] != ':') return std::nullopt;
    ++i;
    if (!detail::parse_uint(s, i, 2, mi_)) return std::nullopt;
    if (i < s.size() && s[i] == ':') {
        ++i;
        if (!detail::parse_uint(s, i, 2, se)) return std::nullopt;
    }
    skip_ws(i);
    int offset_min = 0;
    if (i < s.size()) {
        if (s[i] == '+' || s[i] == '-') {
            int sign = (s[i] == '-') ? -1 : 1;
            ++i;
            int hhmm;
            if (!detail::parse_uint(s, i, 4, hhmm)) return std::nullopt;
            offset_min = sign * ((hhmm / 100) * 60 + hhmm % 100);
        } else {
            std::string zone;
            while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i])))
                zone.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(s[i++]))));
            if (zone == "GMT" || zone == "UT" || zone == "UTC" || zone == "Z") offset_min = 0;
            else if (zone == "EST") offset_min = -5 * 60;
            else if (zone == "EDT") offset_min = -4 * 60;
            else if (zone == "CST") offset_min = -6 * 60;
            else if (zone == "CDT") offset_min = -5 * 60;
            else if (zone == "MST") offset_min = -7 * 60;
            else if (zone == "MDT") offset_min = -6 * 60;
            else if (zone == "PST") offset_min = -8 * 60;
            else if (zone == "PDT") offset_min = -7 * 60;
            else if (zone.empty()) offset_min = 0;
            else return std::nullopt;
        }
    }
    return detail::make_utc(y, mo, d, h, mi_, se, offset_min);
}

inline std::string format_rfc3339(utc_seconds t) {
    auto days = std::chrono::floor<std::chrono::days>(t);
    std::chrono::year_month_day ymd{days};
    auto tod = std::chrono::hh_mm_ss{t - days};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  long(tod.hours().count()), long(tod.minutes().count()),
                  long(tod.seconds().count()));
    return buf;
}

inline std::string format_date(utc_date d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(d.year()),
                  unsigned(d.month()), unsigned(d.day()));
    return buf;
}

}  // namespace cadejo
