#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cadejo/model.hpp"
#include "cadejo/textproc.hpp"
#include "cadejo/unicode.hpp"

namespace cadejo {

struct cluster_params {
    double tau = 0.3;                  // merge threshold on average similarity
    std::size_t min_cluster_size = 1;
    std::size_t max_label_terms = 4;
};

struct story_cluster {
    std::vector<std::string> member_ids;  // article content-hash hex ids
    std::vector<std::string> label_terms;
    sparse_vector centroid;               // L2-normalized mean of member vectors
    bool below_min_size = false;
};

// Average-linkage agglomerative clustering under cosine similarity.
//
// The merge loop is defined operationally and tests pin it exactly: maintain
// a cluster list (initially singletons in input order); the pair (i, j) with
// the highest average pairwise similarity merges while that maximum is >= tau,
// ties resolved by the smallest (i, j); the merge replaces position i and
// erases position j. Averages are computed by summing pairwise similarities
// in member order so results are bit-reproducible against a brute-force
// reference.
inline std::vector<story_cluster> cluster_articles(
    const std::vector<std::pair<std::string, sparse_vector>>& vectors,
    const cluster_params& params) {
    const std::size_t n = vectors.size();
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sim[i][j] = sim[j][i] =
                cosine_similarity(vectors[i].second, vectors[j].second);

    std::vector<std::vector<std::size_t>> clusters;
    clusters.reserve(n);
    for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});

    auto avg_sim = [&](const std::vector<std::size_t>& a,
                       const std::vector<std::size_t>& b) {
        double s = 0.0;
        for (std::size_t x : a)
            for (std::size_t y : b) s += sim[x][y];
        return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    };

    while (clusters.size() > 1) {
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                double s = avg_sim(clusters[i], clusters[j]);
                if (s > best) {
                    best = s;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < params.tau) break;
        auto& dst = clusters[bi];
        dst.insert(dst.end(), clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    std::vector<story_cluster> out;
    out.reserve(clusters.size());
    for (const auto& members : clusters) {
        story_cluster c;
        std::map<std::size_t, double> sum;
        for (std::size_t idx : members) {
            c.member_ids.push_back(vectors[idx].first);
            for (const auto& [pos, w] : vectors[idx].second.entries)
                sum[pos] += w;
        }
        for (const auto& [pos, w] : sum) {
            double mean = w / static_cast<double>(members.size());
            if (mean > 0.0) c.centroid.entries.emplace_back(pos, mean);
        }
        double norm = c.centroid.norm();
        if (norm > 0.0)
            for (auto& [_, w] : c.centroid.entries) w /= norm;
        c.below_min_size = members.size() < params.min_cluster_size;
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const story_cluster& a, const story_cluster& b) {
                         if (a.member_ids.size() != b.member_ids.size())
                             return a.member_ids.size() > b.member_ids.size();
                         return a.member_ids.front() < b.member_ids.front();
                     });
    return out;
}

// Remembers which surface form produced each stem so labels and tags can be
// shown as real words instead of stems.
class surface_registry {
public:
    void observe(std::string_view stem, std::string_view surface) {
        ++counts_[std::string(stem)][std::string(surface)];
    }

    // most frequent surface; ties go to the lexicographically smaller one
    std::string display(const std::string& stem) const {
        auto it = counts_.find(stem);
        if (it == counts_.end() || it->second.empty()) return stem;
        const std::string* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [surface, count] : it->second) {
            if (count > best_count) {
                best = &surface;
                best_count = count;
            }
        }
        return *best;
    }

private:
    std::map<std::string, std::map<std::string, std::size_t>> counts_;
};

// Top-k centroid terms by weight (ties lexicographic), rendered through the
// surface registry.
inline std::vector<std::string> label_cluster(const story_cluster& cluster,
                                              const vocabulary& vocab,
                                              const surface_registry& surfaces,
                                              std::size_t k) {
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [pos, w] : cluster.centroid.entries)
        ranked.emplace_back(w, vocab.terms[pos]);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> labels;
    for (const auto& [w, stem] : ranked) {
        if (labels.size() >= k) break;
        labels.push_back(surfaces.display(stem));
    }
    return labels;
}

namespace detail {

inline bool is_upper_letter(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return true;
    return cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7;
}

// common Spanish abbreviations that end with a period mid-sentence
inline bool is_abbreviation(const std::u32string& word) {
    static const std::u32string kAbbrevs[] = {
        U"sr",   U"sra",  U"srta", U"dr",    U"dra",  U"d",    U"da",
        U"prof", U"lic",  U"ing",  U"arq",   U"gral", U"cnel", U"tte",
        U"av",   U"avda", U"blvd", U"dpto",  U"depto", U"núm", U"pág",
        U"tel",  U"ud",   U"uds",  U"ee",    U"uu",   U"mons", U"pbro",
        U"art",  U"inc"};
    std::u32string lower;
    lower.reserve(word.size());
    for (char32_t c : word) lower.push_back(to_lower(c));
    for (const auto& a : kAbbrevs)
        if (lower == a) return true;
    return false;
}

}  // namespace detail

// Splits on '.', '?' or '!' followed by whitespace and an upper-case start
// (closing/opening quotes allowed in between); a dot after a known
// abbreviation does not end a sentence.
inline std::vector<std::string> split_sentences(const std::string& text) {
    std::u32string cps = utf8_to_u32(text);
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        char32_t c = cps[i];
        if (c != U'.' && c != U'?' && c != U'!') continue;
        if (c == U'.') {
            std::u32string word;
            for (std::size_t k = i; k-- > start;) {
                if (is_word_letter(cps[k]))
                    word.insert(word.begin(), cps[k]);
                else
                    break;
            }
            if (detail::is_abbreviation(word)) continue;
        }
        std::size_t j = i + 1;
        while (j < cps.size() && (cps[j] == U'"' || cps[j] == U'\'' ||
                                  cps[j] == 0x00BB || cps[j] == 0x201D ||
                                  cps[j] == 0x2019 || cps[j] == U')'))
            ++j;
        std::size_t after_quotes = j;
        while (j < cps.size() && (cps[j] == U' ' || cps[j] == U'\t' ||
                                  cps[j] == U'\n' || cps[j] == U'\r'))
            ++j;
        bool had_space = j > after_quotes;
        if (j >= cps.size()) {
            out.push_back(u32_to_utf8(cps.substr(start, j - start)));
            start = j;
            break;
        }
        if (!had_space) continue;
        while (j < cps.size() && (cps[j] == 0x00BF || cps[j] == 0x00A1 ||
                                  cps[j] == 0x00AB || cps[j] == 0x201C ||
                                  cps[j] == U'"' || cps[j] == U'\''))
            ++j;
        if (j < cps.size() && (detail::is_upper_letter(cps[j]) ||
                               is_ascii_digit(cps[j]))) {
            out.push_back(u32_to_utf8(cps.substr(start, after_quotes - start)));
            start = after_quotes;
            while (start < cps.size() && (cps[start] == U' ' || cps[start] == U'\t' ||
                                          cps[start] == U'\n' || cps[start] == U'\r'))
                ++start;
            i = start == 0 ? 0 : start - 1;
        }
    }
    if (start < cps.size()) {
        std::u32string rest = cps.substr(start);
        std::string tail = u32_to_utf8(rest);
        if (!tail.empty()) out.push_back(tail);
    }
    return out;
}

// Lead-based extractive summary: the first max_sentences sentences of the
// body, truncated to max_chars code points on a word boundary with an
// ellipsis when cut.
inline std::string summarize_article(const article& a, std::size_t max_sentences,
                                     std::size_t max_chars) {
    std::string text;
    for (const auto& p : a.body) {
        if (!text.empty()) text += " ";
        text += p;
    }
    auto sentences = split_sentences(text);
    std::string lead;
    for (std::size_t i = 0; i < sentences.size() && i < max_sentences; ++i) {
        if (!lead.empty()) lead += " ";
        lead += sentences[i];
    }
    std::u32string cps = utf8_to_u32(lead);
    if (cps.size() <= max_chars) return lead;
    // word-boundary prefix of at most max_chars - 1 code points, then "…"
    std::size_t cut = 0;
    for (std::size_t i = 0; i < cps.size() && i <= max_chars - 1; ++i)
        if (cps[i] == U' ') cut = i;
    if (cut == 0) cut = max_chars - 1;
    std::u32string head = cps.substr(0, cut);
    while (!head.empty() && head.back() == U' ') head.pop_back();
    return u32_to_utf8(head) + "…";
}

}  // namespace cadejo
