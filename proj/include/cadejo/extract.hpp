#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cadejo/errors.hpp"
#include "cadejo/html.hpp"
#include "cadejo/model.hpp"
#include "cadejo/unicode.hpp"

namespace cadejo {

struct extracted_article {
    std::string title;
    std::vector<std::string> paragraphs;
};

namespace detail {

inline std::optional<std::string> charset_of(std::string_view content_type) {
    auto lower = html::detail::lower_ascii(content_type);
    auto pos = lower.find("charset=");
    if (pos == std::string::npos) return std::nullopt;
    pos += 8;
    std::string out;
    while (pos < lower.size() && lower[pos] != ';' && lower[pos] != ' ' &&
           lower[pos] != '"' && lower[pos] != '\'')
        out.push_back(lower[pos++]);
    if (out.empty()) return std::nullopt;
    return out;
}

inline std::optional<std::string> meta_charset(std::string_view bytes) {
    // cheap textual scan of the head; enough for real-world pages
    auto head = html::detail::lower_ascii(bytes.substr(0, std::min<std::size_t>(bytes.size(), 4096)));
    std::size_t pos = 0;
    while ((pos = head.find("charset", pos)) != std::string::npos) {
        std::size_t j = pos + 7;
        while (j < head.size() && head[j] == ' ') ++j;
        if (j < head.size() && head[j] == '=') {
            ++j;
            while (j < head.size() && head[j] == ' ') ++j;
            if (j < head.size() && (head[j] == '"' || head[j] == '\'')) ++j;
            std::string out;
            while (j < head.size() &&
                   (std::isalnum(static_cast<unsigned char>(head[j])) ||
                    head[j] == '-' || head[j] == '_'))
                out.push_back(head[j++]);
            if (!out.empty()) return out;
        }
        pos += 7;
    }
    return std::nullopt;
}

inline bool is_utf8_name(std::string_view n) {
    return n == "utf-8" || n == "utf8" || n == "us-ascii" || n == "ascii";
}

inline bool is_latin1_family(std::string_view n) {
    return n == "iso-8859-1" || n == "iso8859-1" || n == "latin1" ||
           n == "latin-1" || n == "windows-1252" || n == "cp1252" ||
           n == "iso-8859-15";
}

inline std::string decode_cp1252(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size());
    for (char c : bytes)
        append_utf8(out, fix_c1_cp1252(static_cast<unsigned char>(c)));
    return out;
}

// hint -> meta charset -> UTF-8 -> Latin-1. A declared charset outside the
// supported repertoire raises encoding_error unless the bytes happen to be
// clean UTF-8 anyway.
inline std::string decode_html_bytes(std::string_view bytes,
                                     const std::optional<std::string>& hint) {
    std::optional<std::string> declared;
    if (hint) declared = charset_of(*hint);
    if (!declared) declared = meta_charset(bytes);
    if (declared) {
        if (is_latin1_family(*declared)) return decode_cp1252(bytes);
        if (is_utf8_name(*declared)) {
            if (is_valid_utf8(bytes)) return std::string(bytes);
            return decode_cp1252(bytes);
        }
        if (is_valid_utf8(bytes)) return std::string(bytes);
        throw encoding_error("unsupported charset '" + *declared + "'");
    }
    if (is_valid_utf8(bytes)) return std::string(bytes);
    return decode_cp1252(bytes);
}

inline void append_collapsed(std::string& out, std::string_view text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
}

inline std::string collapsed_trimmed(std::string_view text) {
    std::string out;
    append_collapsed(out, text);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    std::size_t b = 0;
    while (b < out.size() && out[b] == ' ') ++b;
    return out.substr(b);
}

inline std::size_t codepoints(std::string_view s) {
    std::size_t n = 0;
    for (char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    return n;
}

// rebuild the tree without elements matched by any strip selector
inline html::element strip_tree(const html::element& el,
                                const std::unordered_set<const html::element*>& kill) {
    html::element out;
    out.tag = el.tag;
    out.text = el.text;
    out.attrs = el.attrs;
    for (const auto& c : el.children) {
        if (!c.is_text() && kill.count(&c)) continue;
        out.children.push_back(strip_tree(c, kill));
    }
    return out;
}

struct subtree_stats {
    std::size_t text_cps = 0;
    std::size_t tags = 0;
};

struct density_candidate {
    const html::element* el = nullptr;
    double score = 0.0;
    std::size_t order = 0;
};

inline bool is_container_tag(std::string_view t) {
    return t == "body" || t == "main" || t == "article" || t == "section" ||
           t == "div" || t == "td" || t == "table";
}

inline subtree_stats density_scan(const html::element& el, std::size_t& order,
                                  std::vector<density_candidate>& cands) {
    subtree_stats st;
    if (el.is_text()) {
        st.text_cps = codepoints(collapsed_trimmed(el.text));
        return st;
    }
    if (html::detail::is_raw_text_tag(el.tag) && el.tag != "title") return st;  // script/style
    std::size_t my_order = order++;
    for (const auto& c : el.children) {
        subtree_stats cs = density_scan(c, order, cands);
        st.text_cps += cs.text_cps;
        st.tags += cs.tags + (c.is_text() ? 0 : 1);
    }
    if (is_container_tag(el.tag) && st.text_cps > 0)
        cands.push_back({&el, double(st.text_cps) / double(1 + st.tags), my_order});
    return st;
}

inline void collect_paragraphs(const html::element& el, std::string& cur,
                               std::vector<std::string>& out) {
    auto flush = [&] {
        std::string p = collapsed_trimmed(cur);
        cur.clear();
        if (!p.empty()) out.push_back(std::move(p));
    };
    for (const auto& c : el.children) {
        if (c.is_text()) {
            append_collapsed(cur, c.text);
            continue;
        }
        if (html::detail::is_raw_text_tag(c.tag)) continue;
        bool block = html::detail::is_block_tag(c.tag);
        if (block) flush();
        collect_paragraphs(c, cur, out);
        if (block) flush();
    }
}

inline std::vector<std::string> paragraphs_of(const html::element& el) {
    std::vector<std::string> out;
    std::string cur;
    collect_paragraphs(el, cur, out);
    std::string last = collapsed_trimmed(cur);
    if (!last.empty()) out.push_back(std::move(last));
    return out;
}

inline std::string strip_site_suffix(const std::string& title) {
    std::size_t best = std::string::npos;
    for (std::string_view sep : {" | ", " - "}) {
        auto pos = title.rfind(sep);
        if (pos != std::string::npos && (best == std::string::npos || pos > best))
            best = pos;
    }
    if (best == std::string::npos) return title;
    std::string head = collapsed_trimmed(title.substr(0, best));
    return head.empty() ? title : head;
}

}  // namespace detail

// Recovers title and body text from an article page. With selectors, the
// matched elements win; without, the title tag and a text-density scan do.
inline extracted_article extract_article(std::string_view html_bytes,
                                         const std::optional<std::string>& content_type_hint,
                                         const extraction_rules& rules) {
    std::string text = detail::decode_html_bytes(html_bytes, content_type_hint);
    html::element root = html::parse(text);

    // strip chrome before any scoring
    std::unordered_set<const html::element*> kill;
    for (const auto& sel_text : rules.strip_selectors) {
        if (!html::is_valid_selector(sel_text)) continue;
        for (const html::element* e : html::find_all(root, html::parse_selector(sel_text)))
            kill.insert(e);
    }
    html::element tree = detail::strip_tree(root, kill);

    extracted_article out;

    if (rules.title_selector) {
        if (const auto* el = html::find_first(tree, html::parse_selector(*rules.title_selector)))
            out.title = detail::collapsed_trimmed(el->text_content());
    } else if (const auto* t = html::find_first(tree, html::parse_selector("title"))) {
        out.title = detail::strip_site_suffix(detail::collapsed_trimmed(t->text_content()));
    }
    if (out.title.empty()) throw extraction_error("no title found");

    const html::element* body_root = nullptr;
    bool rule_mode = false;
    if (rules.body_selector) {
        body_root = html::find_first(tree, html::parse_selector(*rules.body_selector));
        rule_mode = body_root != nullptr;
    }
    if (!body_root) {
        std::vector<detail::density_candidate> cands;
        std::size_t order = 0;
        detail::density_scan(tree, order, cands);
        double best = -1.0;
        std::size_t best_order = 0;
        for (const auto& c : cands) {
            if (c.score > best || (c.score == best && c.order < best_order)) {
                best = c.score;
                best_order = c.order;
                body_root = c.el;
            }
        }
        if (!body_root) body_root = &tree;
    }

    std::vector<std::string> paras = detail::paragraphs_of(*body_root);
    if (!rule_mode) {
        // fallback mode drops short crumbs (menus, captions) unless that
        // would leave nothing at all
        std::vector<std::string> kept;
        for (auto& p : paras)
            if (detail::codepoints(p) >= 25) kept.push_back(p);
        if (!kept.empty()) paras = std::move(kept);
    }
    if (paras.empty()) throw extraction_error("no body text found");
    out.paragraphs = std::move(paras);
    return out;
}

}  // namespace cadejo
