#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cadejo/unicode.hpp"

namespace cadejo {

namespace detail {

// HTML 4 named entities for the Latin-1 block, indexed by code point - 160.
inline constexpr const char* kLatin1Entities[96] = {
    "nbsp",   "iexcl",  "cent",   "pound",  "curren", "yen",    "brvbar",
    "sect",   "uml",    "copy",   "ordf",   "laquo",  "not",    "shy",
    "reg",    "macr",   "deg",    "plusmn", "sup2",   "sup3",   "acute",
    "micro",  "para",   "middot", "cedil",  "sup1",   "ordm",   "raquo",
    "frac14", "frac12", "frac34", "iquest", "Agrave", "Aacute", "Acirc",
    "Atilde", "Auml",   "Aring",  "AElig",  "Ccedil", "Egrave", "Eacute",
    "Ecirc",  "Euml",   "Igrave", "Iacute", "Icirc",  "Iuml",   "ETH",
    "Ntilde", "Ograve", "Oacute", "Ocirc",  "Otilde", "Ouml",   "times",
    "Oslash", "Ugrave", "Uacute", "Ucirc",  "Uuml",   "Yacute", "THORN",
    "szlig",  "agrave", "aacute", "acirc",  "atilde", "auml",   "aring",
    "aelig",  "ccedil", "egrave", "eacute", "ecirc",  "euml",   "igrave",
    "iacute", "icirc",  "iuml",   "eth",    "ntilde", "ograve", "oacute",
    "ocirc",  "otilde", "ouml",   "divide", "oslash", "ugrave", "uacute",
    "ucirc",  "uuml",   "yacute", "thorn",  "yuml"};

inline char32_t named_entity(std::string_view name) {
    if (name == "amp") return '&';
    if (name == "lt") return '<';
    if (name == "gt") return '>';
    if (name == "quot") return '"';
    if (name == "apos") return '\'';
    for (int i = 0; i < 96; ++i)
        if (name == kLatin1Entities[i]) return char32_t(160 + i);
    struct extra { const char* n; char32_t cp; };
    static constexpr extra kExtra[] = {
        {"ndash", 0x2013},  {"mdash", 0x2014},  {"lsquo", 0x2018},
        {"rsquo", 0x2019},  {"sbquo", 0x201A},  {"ldquo", 0x201C},
        {"rdquo", 0x201D},  {"bdquo", 0x201E},  {"dagger", 0x2020},
        {"Dagger", 0x2021}, {"bull", 0x2022},   {"hellip", 0x2026},
        {"permil", 0x2030}, {"prime", 0x2032},  {"Prime", 0x2033},
        {"lsaquo", 0x2039}, {"rsaquo", 0x203A}, {"oline", 0x203E},
        {"frasl", 0x2044},  {"euro", 0x20AC},   {"trade", 0x2122},
        {"minus", 0x2212},  {"OElig", 0x0152},  {"oelig", 0x0153},
        {"Scaron", 0x0160}, {"scaron", 0x0161}, {"Yuml", 0x0178},
        {"tilde", 0x02DC},  {"circ", 0x02C6},   {"ensp", 0x2002},
        {"emsp", 0x2003},   {"thinsp", 0x2009}};
    for (const auto& e : kExtra)
        if (name == e.n) return e.cp;
    return 0;
}

// Feeds emit numeric references in the 0x80-0x9F gap assuming Windows-1252;
// map them to the characters the author meant.
inline char32_t fix_c1_cp1252(char32_t cp) {
    static constexpr char32_t table[32] = {
        0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
        0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x8D,   0x017D, 0x8F,
        0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
        0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178};
    if (cp >= 0x80 && cp <= 0x9F) return table[cp - 0x80];
    return cp;
}

}  // namespace detail

// Decodes character references in-place-ish; unknown or unterminated
// references are kept literally rather than rejected.
inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi == i + 1 || semi > i + 32) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view body = s.substr(i + 1, semi - i - 1);
        char32_t cp = 0;
        if (body[0] == '#') {
            bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
            std::string_view digits = body.substr(hex ? 2 : 1);
            if (digits.empty() || digits.size() > 8) {
                out.push_back(s[i++]);
                continue;
            }
            bool ok = true;
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else { ok = false; break; }
                cp = cp * (hex ? 16 : 10) + char32_t(v);
            }
            if (!ok || cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
                out.push_back(s[i++]);
                continue;
            }
            cp = detail::fix_c1_cp1252(cp);
        } else {
            cp = detail::named_entity(body);
            if (cp == 0) {
                out.push_back(s[i++]);
                continue;
            }
        }
        append_utf8(out, cp);
        i = semi + 1;
    }
    return out;
}

}  // namespace cadejo
