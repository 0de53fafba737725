#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cadejo/entities.hpp"
#include "cadejo/errors.hpp"
#include "cadejo/model.hpp"
#include "cadejo/seen.hpp"
#include "cadejo/time.hpp"
#include "cadejo/unicode.hpp"
#include "cadejo/xml.hpp"

namespace cadejo {

struct raw_feed_document {
    std::string outlet_id;
    std::string bytes;
    std::optional<std::string> content_type;
    utc_seconds fetched_at{};
    bool not_modified = false;  // conditional GET answered 304
};

namespace detail {

inline std::string collapse_ws(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            if (!out.empty()) pending = true;
        } else {
            if (pending) out.push_back(' ');
            pending = false;
            out.push_back(c);
        }
    }
    return out;
}

inline bool is_latin1_name(std::string_view enc) {
    return enc == "iso-8859-1" || enc == "iso8859-1" || enc == "latin1" ||
           enc == "latin-1" || enc == "windows-1252" || enc == "cp1252";
}

// Honor the XML declaration, default to UTF-8, fall back to Latin-1 when
// the bytes do not decode.
inline std::string decode_feed_bytes(const std::string& bytes) {
    auto enc = xml::declared_encoding(bytes);
    if (enc && is_latin1_name(*enc)) {
        std::string out;
        out.reserve(bytes.size());
        for (char c : bytes) {
            auto b = static_cast<unsigned char>(c);
            append_utf8(out, fix_c1_cp1252(b));
        }
        return out;
    }
    if (is_valid_utf8(bytes)) return bytes;
    return latin1_to_utf8(bytes);
}

inline std::string node_text(const xml::node& n) {
    // feeds double-encode routinely, so titles get one extra entity pass
    return decode_entities(collapse_ws(n.text_content()));
}

inline std::optional<utc_seconds> parse_feed_date(const std::string& s) {
    if (auto t = parse_rfc3339(s)) return t;
    if (auto t = parse_rfc822(s)) return t;
    return std::nullopt;
}

inline std::vector<feed_item> parse_rss2(const xml::node& rss,
                                         const std::string& outlet_id) {
    const xml::node* channel = rss.first_child("channel");
    std::vector<feed_item> items;
    if (!channel) return items;
    for (const auto& child : channel->children) {
        if (child.is_text() || child.local_name() != "item") continue;
        feed_item it;
        it.outlet_id = outlet_id;
        if (const auto* t = child.first_child("title")) it.title = node_text(*t);
        if (const auto* l = child.first_child("link")) it.link = node_text(*l);
        if (const auto* g = child.first_child("guid")) {
            std::string guid = node_text(*g);
            if (!guid.empty()) it.guid = guid;
            if (it.link.empty()) {
                const std::string* perma = g->attr("isPermaLink");
                if ((!perma || *perma != "false") && is_valid_absolute_url(guid))
                    it.link = guid;
            }
        }
        if (const auto* d = child.first_child("pubDate"))
            it.published = parse_feed_date(node_text(*d));
        if (!it.link.empty() && !it.title.empty()) items.push_back(std::move(it));
    }
    return items;
}

inline std::vector<feed_item> parse_atom(const xml::node& feed,
                                         const std::string& outlet_id) {
    std::vector<feed_item> items;
    for (const auto& entry : feed.children) {
        if (entry.is_text() || entry.local_name() != "entry") continue;
        feed_item it;
        it.outlet_id = outlet_id;
        if (const auto* t = entry.first_child("title")) it.title = node_text(*t);
        for (const auto& l : entry.children) {
            if (l.is_text() || l.local_name() != "link") continue;
            const std::string* rel = l.attr("rel");
            if (rel && *rel != "alternate") continue;
            if (const std::string* href = l.attr("href")) {
                it.link = *href;
                break;
            }
        }
        if (const auto* id = entry.first_child("id")) {
            std::string guid = node_text(*id);
            if (!guid.empty()) it.guid = guid;
        }
        if (const auto* d = entry.first_child("published"))
            it.published = parse_feed_date(node_text(*d));
        if (!it.published)
            if (const auto* d = entry.first_child("updated"))
                it.published = parse_feed_date(node_text(*d));
        if (!it.link.empty() && !it.title.empty()) items.push_back(std::move(it));
    }
    return items;
}

}  // namespace detail

// Parses an RSS 2.0 or Atom 1.0 document into headline items, in document
// order. Items without a usable link or title are dropped.
inline std::vector<feed_item> parse_feed(const raw_feed_document& raw) {
    if (raw.not_modified) return {};
    std::string text = detail::decode_feed_bytes(raw.bytes);
    xml::node root = xml::parse(text);
    std::string name = root.local_name();
    if (name == "rss") return detail::parse_rss2(root, raw.outlet_id);
    if (name == "feed") return detail::parse_atom(root, raw.outlet_id);
    throw feed_parse_error("document root <" + root.name +
                           "> is neither RSS 2.0 nor Atom 1.0");
}

// Keeps items whose link has not been seen, preserving order; repeated
// links within the batch keep only the first occurrence.
inline std::vector<feed_item> filter_new(const std::vector<feed_item>& items,
                                         const seen_index& seen) {
    std::vector<feed_item> out;
    std::unordered_set<std::string> batch;
    for (const auto& it : items) {
        std::string key = normalize_url(it.link);
        if (seen.has_link(it.link)) continue;
        if (!batch.insert(key).second) continue;
        out.push_back(it);
    }
    return out;
}

}  // namespace cadejo
