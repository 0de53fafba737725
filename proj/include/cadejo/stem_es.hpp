#pragma once

#include <string>
#include <string_view>

#include "cadejo/unicode.hpp"

namespace cadejo {

// Snowball stemming algorithm for Spanish. Operates on NFC lowercase
// input; anything else is stemmed as-is, garbage in, garbage out.
//
// The implementation follows the published algorithm exactly: RV/R1/R2
// region marking, attached-pronoun removal, standard-suffix removal,
// y- and regular verb suffixes, residual suffixes, acute-accent removal.
namespace stem_detail {

inline bool is_vowel(char32_t c) {
    switch (c) {
        case U'a': case U'e': case U'i': case U'o': case U'u':
        case U'á': case U'é': case U'í': case U'ó':
        case U'ú': case U'ü':
            return true;
        default:
            return false;
    }
}

struct regions {
    std::size_t pV, p1, p2;
};

// forward-mode gopast: consume until just past a character matching `want_vowel`
inline bool gopast(const std::u32string& w, std::size_t& i, bool want_vowel) {
    while (i < w.size()) {
        if (is_vowel(w[i]) == want_vowel) {
            ++i;
            return true;
        }
        ++i;
    }
    return false;
}

inline regions mark_regions(const std::u32string& w) {
    const std::size_t n = w.size();
    regions r{n, n, n};
    // pV
    if (!w.empty()) {
        std::size_t i = 1;
        bool ok = false;
        if (is_vowel(w[0])) {
            // v ( (non-v gopast v) or (v gopast non-v) )
            if (i < n && !is_vowel(w[i])) {
                std::size_t j = i + 1;
                if (gopast(w, j, true)) { i = j; ok = true; }
            }
            if (!ok && i < n && is_vowel(w[i])) {
                std::size_t j = i + 1;
                if (gopast(w, j, false)) { i = j; ok = true; }
            }
        } else {
            // non-v ( (non-v gopast v) or (v next) )
            if (i < n && !is_vowel(w[i])) {
                std::size_t j = i + 1;
                if (gopast(w, j, true)) { i = j; ok = true; }
            }
            if (!ok && i < n && is_vowel(w[i]) && i + 1 < n) {
                i += 2;  // v next
                ok = true;
            }
        }
        if (ok) r.pV = i;
    }
    // p1 / p2
    {
        std::size_t i = 0;
        if (gopast(w, i, true) && gopast(w, i, false)) {
            r.p1 = i;
            if (gopast(w, i, true) && gopast(w, i, false)) r.p2 = i;
        }
    }
    return r;
}

inline bool ends_with(const std::u32string& w, std::u32string_view suf) {
    return w.size() >= suf.size() &&
           w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
}

struct among_entry {
    std::u32string_view suffix;
    int group;
};

// Longest suffix match whose start index is >= limit; -1 when none.
// Matches snowball `among` semantics: the longest match wins and there is
// no backtracking to shorter patterns if its action later fails.
inline int longest_among(const std::u32string& w, std::size_t limit,
                         const among_entry* entries, std::size_t count) {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const auto& e = entries[k];
        if (e.suffix.size() < best_len || e.suffix.size() > w.size()) continue;
        if (w.size() - e.suffix.size() < limit) continue;
        if (ends_with(w, e.suffix) && e.suffix.size() > best_len) {
            best = static_cast<int>(k);
            best_len = e.suffix.size();
        }
    }
    return best;
}

inline void drop(std::u32string& w, std::size_t count) {
    w.resize(w.size() - count);
}

// step 0: attached pronoun
inline void attached_pronoun(std::u32string& w, const regions& r) {
    static constexpr among_entry pronouns[] = {
        {U"me", 0},  {U"se", 0},  {U"sela", 0}, {U"selo", 0}, {U"selas", 0},
        {U"selos", 0}, {U"la", 0}, {U"le", 0},  {U"lo", 0},   {U"las", 0},
        {U"les", 0}, {U"los", 0}, {U"nos", 0}};
    int p = longest_among(w, 0, pronouns, std::size(pronouns));
    if (p < 0) return;
    const std::size_t plen = pronouns[p].suffix.size();

    std::u32string rest = w.substr(0, w.size() - plen);
    // group 1: accented gerund/infinitive (de-accent after deletion)
    // group 2: plain gerund/infinitive
    // group 3: yendo preceded by u (the u may sit outside RV)
    static constexpr among_entry stems[] = {
        {U"iéndo", 1}, {U"ándo", 1}, {U"ár", 1},
        {U"ér", 1},    {U"ír", 1},   {U"ando", 2},
        {U"iendo", 2},      {U"ar", 2},        {U"er", 2},
        {U"ir", 2},         {U"yendo", 3}};
    int s = longest_among(rest, r.pV, stems, std::size(stems));
    if (s < 0) return;
    const auto& hit = stems[s];
    if (hit.group == 3) {
        std::size_t start = rest.size() - hit.suffix.size();
        if (start == 0 || rest[start - 1] != U'u') return;
        drop(w, plen);
        return;
    }
    drop(w, plen);
    if (hit.group == 1) {
        // iéndo->iendo, ándo->ando, ár->ar, ér->er, ír->ir
        std::size_t start = w.size() - hit.suffix.size();
        for (std::size_t i = start; i < w.size(); ++i) {
            switch (w[i]) {
                case U'á': w[i] = U'a'; break;
                case U'é': w[i] = U'e'; break;
                case U'í': w[i] = U'i'; break;
                case U'ó': w[i] = U'o'; break;
                case U'ú': w[i] = U'u'; break;
                default: break;
            }
        }
    }
}

// step 1: standard suffixes; true when a suffix was removed
inline bool standard_suffix(std::u32string& w, const regions& r) {
    enum {
        kDelete = 1,       // delete if in R2
        kAdorIc = 2,       // delete if in R2, then try preceding ic in R2
        kLogia = 3,        // replace with log if in R2
        kUcion = 4,        // replace with u if in R2
        kEncia = 5,        // replace with ente if in R2
        kAmente = 6,       // delete if in R1, then iv(at)/os/ic/ad in R2
        kMente = 7,        // delete if in R2, then ante/able/ible in R2
        kIdad = 8,         // delete if in R2, then abil/ic/iv in R2
        kIva = 9,          // delete if in R2, then at in R2
    };
    static constexpr among_entry table[] = {
        {U"anza", kDelete},    {U"anzas", kDelete},  {U"ico", kDelete},
        {U"ica", kDelete},     {U"icos", kDelete},   {U"icas", kDelete},
        {U"ismo", kDelete},    {U"ismos", kDelete},  {U"able", kDelete},
        {U"ables", kDelete},   {U"ible", kDelete},   {U"ibles", kDelete},
        {U"ista", kDelete},    {U"istas", kDelete},  {U"oso", kDelete},
        {U"osa", kDelete},     {U"osos", kDelete},   {U"osas", kDelete},
        {U"amiento", kDelete}, {U"amientos", kDelete},
        {U"imiento", kDelete}, {U"imientos", kDelete},
        {U"adora", kAdorIc},   {U"ador", kAdorIc},   {U"ación", kAdorIc},
        {U"adoras", kAdorIc},  {U"adores", kAdorIc}, {U"aciones", kAdorIc},
        {U"ante", kAdorIc},    {U"antes", kAdorIc},  {U"ancia", kAdorIc},
        {U"ancias", kAdorIc},
        {U"logía", kLogia}, {U"logías", kLogia},
        {U"ución", kUcion}, {U"uciones", kUcion},
        {U"encia", kEncia},    {U"encias", kEncia},
        {U"amente", kAmente},  {U"mente", kMente},
        {U"idad", kIdad},      {U"idades", kIdad},
        {U"iva", kIva},        {U"ivo", kIva},
        {U"ivas", kIva},       {U"ivos", kIva}};
    int s = longest_among(w, 0, table, std::size(table));
    if (s < 0) return false;
    const auto& hit = table[s];
    const std::size_t start = w.size() - hit.suffix.size();
    auto in_r1 = [&](std::size_t pos) { return pos >= r.p1; };
    auto in_r2 = [&](std::size_t pos) { return pos >= r.p2; };
    auto try_drop_in_r2 = [&](std::u32string_view suf) {
        if (ends_with(w, suf) && w.size() >= suf.size() &&
            in_r2(w.size() - suf.size()))
            drop(w, suf.size());
    };

    switch (hit.group) {
        case kDelete:
            if (!in_r2(start)) return false;
            drop(w, hit.suffix.size());
            return true;
        case kAdorIc:
            if (!in_r2(start)) return false;
            drop(w, hit.suffix.size());
            try_drop_in_r2(U"ic");
            return true;
        case kLogia:
            if (!in_r2(start)) return false;
            w.resize(start);
            w += U"log";
            return true;
        case kUcion:
            if (!in_r2(start)) return false;
            w.resize(start);
            w += U"u";
            return true;
        case kEncia:
            if (!in_r2(start)) return false;
            w.resize(start);
            w += U"ente";
            return true;
        case kAmente: {
            if (!in_r1(start)) return false;
            drop(w, hit.suffix.size());
            static constexpr among_entry inner[] = {
                {U"iv", 1}, {U"os", 2}, {U"ic", 2}, {U"ad", 2}};
            int k = longest_among(w, 0, inner, std::size(inner));
            if (k >= 0 && in_r2(w.size() - inner[k].suffix.size())) {
                bool was_iv = inner[k].group == 1;
                drop(w, inner[k].suffix.size());
                if (was_iv) try_drop_in_r2(U"at");
            }
            return true;
        }
        case kMente: {
            if (!in_r2(start)) return false;
            drop(w, hit.suffix.size());
            static constexpr among_entry inner[] = {
                {U"ante", 0}, {U"able", 0}, {U"ible", 0}};
            int k = longest_among(w, 0, inner, std::size(inner));
            if (k >= 0 && in_r2(w.size() - inner[k].suffix.size()))
                drop(w, inner[k].suffix.size());
            return true;
        }
        case kIdad: {
            if (!in_r2(start)) return false;
            drop(w, hit.suffix.size());
            static constexpr among_entry inner[] = {
                {U"abil", 0}, {U"ic", 0}, {U"iv", 0}};
            int k = longest_among(w, 0, inner, std::size(inner));
            if (k >= 0 && in_r2(w.size() - inner[k].suffix.size()))
                drop(w, inner[k].suffix.size());
            return true;
        }
        case kIva:
            if (!in_r2(start)) return false;
            drop(w, hit.suffix.size());
            try_drop_in_r2(U"at");
            return true;
        default:
            return false;
    }
}

// step 2a: verb suffixes beginning with y, valid only after u
inline bool y_verb_suffix(std::u32string& w, const regions& r) {
    static constexpr among_entry table[] = {
        {U"ya", 0},  {U"ye", 0},   {U"yan", 0},  {U"yen", 0},
        {U"yeron", 0}, {U"yendo", 0}, {U"yo", 0}, {U"yó", 0},
        {U"yas", 0}, {U"yes", 0},  {U"yais", 0}, {U"yamos", 0}};
    int s = longest_among(w, r.pV, table, std::size(table));
    if (s < 0) return false;
    std::size_t start = w.size() - table[s].suffix.size();
    if (start == 0 || w[start - 1] != U'u') return false;
    drop(w, table[s].suffix.size());
    return true;
}

// step 2b: other verb suffixes
inline bool verb_suffix(std::u32string& w, const regions& r) {
    // group 1: en/es/éis/emos additionally swallow a preceding gu's u
    static constexpr among_entry table[] = {
        {U"en", 1}, {U"es", 1}, {U"éis", 1}, {U"emos", 1},
        {U"arían", 2}, {U"arías", 2}, {U"arán", 2},
        {U"arás", 2},  {U"aríais", 2}, {U"aría", 2},
        {U"aréis", 2}, {U"aríamos", 2}, {U"aremos", 2},
        {U"ará", 2},   {U"aré", 2},
        {U"erían", 2}, {U"erías", 2}, {U"erán", 2},
        {U"erás", 2},  {U"eríais", 2}, {U"ería", 2},
        {U"eréis", 2}, {U"eríamos", 2}, {U"eremos", 2},
        {U"erá", 2},   {U"eré", 2},
        {U"irían", 2}, {U"irías", 2}, {U"irán", 2},
        {U"irás", 2},  {U"iríais", 2}, {U"iría", 2},
        {U"iréis", 2}, {U"iríamos", 2}, {U"iremos", 2},
        {U"irá", 2},   {U"iré", 2},
        {U"aba", 2},   {U"ada", 2},   {U"ida", 2},   {U"ía", 2},
        {U"ara", 2},   {U"iera", 2},  {U"ad", 2},    {U"ed", 2},
        {U"id", 2},    {U"ase", 2},   {U"iese", 2},  {U"aste", 2},
        {U"iste", 2},  {U"an", 2},    {U"aban", 2},  {U"ían", 2},
        {U"aran", 2},  {U"ieran", 2}, {U"asen", 2},  {U"iesen", 2},
        {U"aron", 2},  {U"ieron", 2}, {U"ado", 2},   {U"ido", 2},
        {U"ando", 2},  {U"iendo", 2}, {U"ió", 2}, {U"ar", 2},
        {U"er", 2},    {U"ir", 2},    {U"as", 2},    {U"abas", 2},
        {U"adas", 2},  {U"idas", 2},  {U"ías", 2}, {U"aras", 2},
        {U"ieras", 2}, {U"ases", 2},  {U"ieses", 2}, {U"ís", 2},
        {U"áis", 2}, {U"abais", 2}, {U"íais", 2}, {U"arais", 2},
        {U"ierais", 2}, {U"aseis", 2}, {U"ieseis", 2}, {U"asteis", 2},
        {U"isteis", 2}, {U"ados", 2},  {U"idos", 2},  {U"amos", 2},
        {U"ábamos", 2}, {U"íamos", 2}, {U"imos", 2},
        {U"áramos", 2}, {U"iéramos", 2}, {U"iésemos", 2},
        {U"ásemos", 2}};
    int s = longest_among(w, r.pV, table, std::size(table));
    if (s < 0) return false;
    std::size_t len = table[s].suffix.size();
    if (table[s].group == 1) {
        std::size_t start = w.size() - len;
        if (start >= 2 && w[start - 1] == U'u' && w[start - 2] == U'g') ++len;
    }
    drop(w, len);
    return true;
}

// step 3: residual suffix
inline void residual_suffix(std::u32string& w, const regions& r) {
    static constexpr among_entry table[] = {
        {U"os", 1}, {U"a", 1}, {U"o", 1}, {U"á", 1},
        {U"í", 1}, {U"ó", 1}, {U"e", 2}, {U"é", 2}};
    int s = longest_among(w, 0, table, std::size(table));
    if (s < 0) return;
    std::size_t start = w.size() - table[s].suffix.size();
    if (start < r.pV) return;
    bool e_group = table[s].group == 2;
    drop(w, table[s].suffix.size());
    if (e_group && ends_with(w, U"gu") && w.size() - 1 >= r.pV)
        drop(w, 1);  // the u, only when it lies in RV
}

}  // namespace stem_detail

inline std::string stem_spanish(std::string_view surface) {
    std::u32string w = utf8_to_u32(surface);
    if (w.empty()) return std::string(surface);
    auto r = stem_detail::mark_regions(w);
    stem_detail::attached_pronoun(w, r);
    if (!stem_detail::standard_suffix(w, r))
        if (!stem_detail::y_verb_suffix(w, r))
            stem_detail::verb_suffix(w, r);
    stem_detail::residual_suffix(w, r);
    for (auto& c : w) {
        switch (c) {
            case U'á': c = U'a'; break;
            case U'é': c = U'e'; break;
            case U'í': c = U'i'; break;
            case U'ó': c = U'o'; break;
            case U'ú': c = U'u'; break;
            default: break;
        }
    }
    return u32_to_utf8(w);
}

}  // namespace cadejo
