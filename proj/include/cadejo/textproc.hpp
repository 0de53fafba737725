#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cadejo/errors.hpp"
#include "cadejo/stem_es.hpp"
#include "cadejo/stopwords_data.hpp"
#include "cadejo/unicode.hpp"

namespace cadejo {

struct token {
    std::string surface;  // NFC, lowercase
    std::string stem;
};

// Splits text into maximal alphanumeric runs: NFC-normalized, case-folded,
// diacritics kept. Single-character tokens are noise unless they are digits.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::u32string cps = utf8_to_u32(nfc(text));
    std::vector<std::string> out;
    std::u32string run;
    bool has_non_digit = false;
    auto flush = [&] {
        if (run.empty()) return;
        if (run.size() > 1 || !has_non_digit) out.push_back(u32_to_utf8(run));
        run.clear();
        has_non_digit = false;
    };
    for (char32_t cp : cps) {
        if (is_word_letter(cp)) {
            run.push_back(to_lower(cp));
            has_non_digit = true;
        } else if (is_ascii_digit(cp)) {
            run.push_back(cp);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

inline std::vector<std::string> remove_stopwords(
    const std::vector<std::string>& tokens,
    const std::unordered_set<std::string>& stopset) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stopset.count(t)) out.push_back(t);
    return out;
}

// Parses a stopword list: one token per line, '#' comments, blank lines ok.
inline std::unordered_set<std::string> parse_stopword_list(std::string_view text) {
    std::unordered_set<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::size_t b = 0, e = line.size();
        while (b < e && (line[b] == ' ' || line[b] == '\t' || line[b] == '\r')) ++b;
        while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
        if (e > b) out.emplace(line.substr(b, e - b));
    }
    return out;
}

inline const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> set =
        parse_stopword_list(detail::kDefaultStopwordsEs);
    return set;
}

// -- vocabulary / vectors --------------------------------------------------

struct vocabulary {
    std::vector<std::string> terms;  // unique stems, bytewise sorted
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::size_t> doc_freq;  // aligned with terms
    std::size_t n_docs = 0;

    std::size_t size() const { return terms.size(); }

    std::optional<std::size_t> position(std::string_view term) const {
        auto it = index.find(std::string(term));
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

// Terms kept when min_df <= doc_freq <= ceil(max_df_ratio * n_docs).
inline vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                                   std::size_t min_df, double max_df_ratio) {
    if (min_df < 1) min_df = 1;
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::unordered_set<std::string> uniq(doc.begin(), doc.end());
        for (const auto& t : uniq) ++df[t];
    }
    vocabulary v;
    v.n_docs = docs.size();
    const auto max_df = static_cast<std::size_t>(
        std::ceil(max_df_ratio * static_cast<double>(v.n_docs)));
    for (const auto& [term, freq] : df)
        if (freq >= min_df && freq <= max_df) v.terms.push_back(term);
    std::sort(v.terms.begin(), v.terms.end());
    v.doc_freq.resize(v.terms.size());
    for (std::size_t i = 0; i < v.terms.size(); ++i) {
        v.index.emplace(v.terms[i], i);
        v.doc_freq[i] = df[v.terms[i]];
    }
    if (v.terms.empty())
        throw empty_vocabulary_error("no terms survive df thresholds (min_df=" +
                                     std::to_string(min_df) + ")");
    return v;
}

struct sparse_vector {
    // (term position, weight), positions strictly increasing, weights > 0
    std::vector<std::pair<std::size_t, double>> entries;

    bool empty() const { return entries.empty(); }

    double norm() const {
        double s = 0.0;
        for (const auto& [_, w] : entries) s += w * w;
        return std::sqrt(s);
    }
};

// TF x ln(N/df), L2-normalized. Out-of-vocabulary terms are ignored and a
// document of only ubiquitous terms yields the empty vector.
inline sparse_vector tfidf_vector(const std::vector<std::string>& doc,
                                  const vocabulary& vocab) {
    std::unordered_map<std::size_t, double> tf;
    for (const auto& t : doc)
        if (auto pos = vocab.position(t)) ++tf[*pos];
    sparse_vector v;
    for (const auto& [pos, count] : tf) {
        double idf = std::log(static_cast<double>(vocab.n_docs) /
                              static_cast<double>(vocab.doc_freq[pos]));
        double w = count * idf;
        if (w > 0.0) v.entries.emplace_back(pos, w);
    }
    std::sort(v.entries.begin(), v.entries.end());
    double n = v.norm();
    if (n > 0.0)
        for (auto& [_, w] : v.entries) w /= n;
    else
        v.entries.clear();
    return v;
}

inline double dot(const sparse_vector& a, const sparse_vector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        if (a.entries[i].first < b.entries[j].first) ++i;
        else if (a.entries[i].first > b.entries[j].first) ++j;
        else s += a.entries[i++].second * b.entries[j++].second;
    }
    return s;
}

inline double cosine_similarity(const sparse_vector& a, const sparse_vector& b) {
    if (a.empty() || b.empty()) return 0.0;
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    double sim = dot(a, b) / (na * nb);
    if (sim < 0.0) return 0.0;
    return sim > 1.0 ? 1.0 : sim;
}

// Full preprocessing for one document: tokenize, drop stopwords, stem.
inline std::vector<std::string> stem_terms(std::string_view text,
                                           const std::unordered_set<std::string>& stopset) {
    std::vector<std::string> stems;
    for (const auto& surface : remove_stopwords(tokenize(text), stopset))
        stems.push_back(stem_spanish(surface));
    return stems;
}

}  // namespace cadejo
