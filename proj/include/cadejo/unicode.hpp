#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cadejo {

// UTF-8 / Latin character utilities tuned for Spanish-language text.
// Coverage is deliberately limited to the Latin ranges that show up in
// Salvadoran news copy; anything else passes through untouched (or acts
// as a word separator in the tokenizer).

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// Decodes the code point at `i`, advancing `i`. Malformed bytes decode to
// U+FFFD one byte at a time, so iteration always terminates.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<std::uint8_t>(s[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
        ++i;
        return b0;
    } else if ((b0 >> 5) == 0x6) {
        len = 2;
        cp = b0 & 0x1f;
    } else if ((b0 >> 4) == 0xe) {
        len = 3;
        cp = b0 & 0x0f;
    } else if ((b0 >> 3) == 0x1e) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<std::uint8_t>(s[i + k]);
        if ((b >> 6) != 0x2) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3f);
    }
    // overlong / out-of-range forms
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return 0xFFFD;
    }
    i += len;
    return cp;
}

inline std::u32string utf8_to_u32(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) out.push_back(decode_utf8(s, i));
    return out;
}

inline std::string u32_to_utf8(const std::u32string& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) append_utf8(out, cp);
    return out;
}

inline bool is_valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t before = i;
        if (decode_utf8(s, i) == 0xFFFD &&
            static_cast<std::uint8_t>(s[before]) >= 0x80)
            return false;
    }
    return true;
}

inline std::string latin1_to_utf8(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) append_utf8(out, static_cast<std::uint8_t>(c));
    return out;
}

// -- classification ------------------------------------------------------

inline bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

inline bool is_word_letter(char32_t cp) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
    if (cp >= 0x00C0 && cp <= 0x00FF) return cp != 0x00D7 && cp != 0x00F7;
    if (cp >= 0x0100 && cp <= 0x017F) return true;  // Latin Extended-A
    return false;
}

inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
    if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x0178) return 0x00FF;  // Ÿ
    if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

// -- NFC (restricted) ----------------------------------------------------

// Composes base letter + combining mark pairs for the marks that occur in
// Spanish text (grave, acute, circumflex, tilde, diaeresis, cedilla).
// Precomposed input passes through unchanged, which makes this an NFC
// normalization over the supported repertoire.
inline char32_t compose_pair(char32_t base, char32_t mark) {
    struct entry { char32_t base, mark, composed; };
    static constexpr entry table[] = {
        {'a', 0x0300, 0x00E0}, {'a', 0x0301, 0x00E1}, {'a', 0x0302, 0x00E2},
        {'a', 0x0303, 0x00E3}, {'a', 0x0308, 0x00E4},
        {'e', 0x0300, 0x00E8}, {'e', 0x0301, 0x00E9}, {'e', 0x0302, 0x00EA},
        {'e', 0x0308, 0x00EB},
        {'i', 0x0300, 0x00EC}, {'i', 0x0301, 0x00ED}, {'i', 0x0302, 0x00EE},
        {'i', 0x0308, 0x00EF},
        {'o', 0x0300, 0x00F2}, {'o', 0x0301, 0x00F3}, {'o', 0x0302, 0x00F4},
        {'o', 0x0303, 0x00F5}, {'o', 0x0308, 0x00F6},
        {'u', 0x0300, 0x00F9}, {'u', 0x0301, 0x00FA}, {'u', 0x0302, 0x00FB},
        {'u', 0x0308, 0x00FC},
        {'n', 0x0303, 0x00F1}, {'c', 0x0327, 0x00E7}, {'y', 0x0301, 0x00FD},
        {'A', 0x0300, 0x00C0}, {'A', 0x0301, 0x00C1}, {'A', 0x0302, 0x00C2},
        {'A', 0x0303, 0x00C3}, {'A', 0x0308, 0x00C4},
        {'E', 0x0300, 0x00C8}, {'E', 0x0301, 0x00C9}, {'E', 0x0302, 0x00CA},
        {'E', 0x0308, 0x00CB},
        {'I', 0x0300, 0x00CC}, {'I', 0x0301, 0x00CD}, {'I', 0x0302, 0x00CE},
        {'I', 0x0308, 0x00CF},
        {'O', 0x0300, 0x00D2}, {'O', 0x0301, 0x00D3}, {'O', 0x0302, 0x00D4},
        {'O', 0x0303, 0x00D5}, {'O', 0x0308, 0x00D6},
        {'U', 0x0300, 0x00D9}, {'U', 0x0301, 0x00DA}, {'U', 0x0302, 0x00DB},
        {'U', 0x0308, 0x00DC},
        {'N', 0x0303, 0x00D1}, {'C', 0x0327, 0x00C7}, {'Y', 0x0301, 0x00DD},
    };
    for (const auto& e : table)
        if (e.base == base && e.mark == mark) return e.composed;
    return 0;
}

inline std::string nfc(std::string_view s) {
    std::u32string cps = utf8_to_u32(s);
    std::u32string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        if (!out.empty() && cp >= 0x0300 && cp <= 0x036F) {
            if (char32_t comp = compose_pair(out.back(), cp); comp != 0) {
                out.back() = comp;
                continue;
            }
        }
        out.push_back(cp);
    }
    return u32_to_utf8(out);
}

// -- transliteration -----------------------------------------------------

// Maps a Latin-1 / Extended-A letter to its bare ASCII skeleton for use in
// URL slugs. Returns empty for code points without a sensible mapping.
inline std::string ascii_translit(char32_t cp) {
    cp = to_lower(cp);
    if (cp < 0x80) return std::string(1, static_cast<char>(cp));
    switch (cp) {
        case 0x00E0: case 0x00E1: case 0x00E2: case 0x00E3:
        case 0x00E4: case 0x00E5: return "a";
        case 0x00E6: return "ae";
        case 0x00E7: return "c";
        case 0x00E8: case 0x00E9: case 0x00EA: case 0x00EB: return "e";
        case 0x00EC: case 0x00ED: case 0x00EE: case 0x00EF: return "i";
        case 0x00F1: return "n";
        case 0x00F2: case 0x00F3: case 0x00F4: case 0x00F5:
        case 0x00F6: case 0x00F8: return "o";
        case 0x00F9: case 0x00FA: case 0x00FB: case 0x00FC: return "u";
        case 0x00FD: case 0x00FF: return "y";
        case 0x00DF: return "ss";
        default: break;
    }
    if (cp >= 0x0100 && cp <= 0x017F) {
        switch (cp) {
            case 0x0101: case 0x0103: case 0x0105: return "a";
            case 0x0107: case 0x0109: case 0x010B: case 0x010D: return "c";
            case 0x010F: case 0x0111: return "d";
            case 0x0113: case 0x0115: case 0x0117: case 0x0119: case 0x011B: return "e";
            case 0x011D: case 0x011F: case 0x0121: case 0x0123: return "g";
            case 0x0125: case 0x0127: return "h";
            case 0x0129: case 0x012B: case 0x012D: case 0x012F: case 0x0131: return "i";
            case 0x0135: return "j";
            case 0x0137: return "k";
            case 0x013A: case 0x013C: case 0x013E: case 0x0142: return "l";
            case 0x0144: case 0x0146: case 0x0148: return "n";
            case 0x014D: case 0x014F: case 0x0151: return "o";
            case 0x0153: return "oe";
            case 0x0155: case 0x0157: case 0x0159: return "r";
            case 0x015B: case 0x015D: case 0x015F: case 0x0161: return "s";
            case 0x0163: case 0x0165: case 0x0167: return "t";
            case 0x0169: case 0x016B: case 0x016D: case 0x016F:
            case 0x0171: case 0x0173: return "u";
            case 0x0175: return "w";
            case 0x0177: return "y";
            case 0x017A: case 0x017C: case 0x017E: return "z";
            default: return "";
        }
    }
    return "";
}

}  // namespace cadejo
