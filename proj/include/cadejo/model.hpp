#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cadejo/errors.hpp"
#include "cadejo/sha256.hpp"
#include "cadejo/time.hpp"
#include "cadejo/unicode.hpp"

namespace cadejo {

using json = nlohmann::ordered_json;

// 256-bit content identity. `hex` is always the lowercase rendering of
// `bytes`; construct through one of the factories to keep them in sync.
struct hash_id {
    std::array<std::uint8_t, 32> bytes{};
    std::string hex;

    static hash_id from_bytes(const std::array<std::uint8_t, 32>& b) {
        hash_id h;
        h.bytes = b;
        h.hex = hex_lower(b.data(), b.size());
        return h;
    }

    static std::optional<hash_id> from_hex(std::string_view hx) {
        if (hx.size() != 64) return std::nullopt;
        hash_id h;
        for (std::size_t i = 0; i < 32; ++i) {
            auto nib = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                return -1;
            };
            int hi = nib(hx[2 * i]), lo = nib(hx[2 * i + 1]);
            if (hi < 0 || lo < 0) return std::nullopt;
            h.bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
        }
        h.hex = std::string(hx);
        return h;
    }

    bool operator==(const hash_id& o) const { return bytes == o.bytes; }
    bool operator<(const hash_id& o) const { return bytes < o.bytes; }
};

struct extraction_rules {
    std::optional<std::string> title_selector;
    std::optional<std::string> body_selector;
    std::vector<std::string> strip_selectors{"script", "style", "nav",
                                             "footer", "aside"};
};

struct outlet_config {
    std::string id;
    std::string name;
    std::string feed_url;
    extraction_rules rules;
    std::string leaning_note;  // free text, informational only
};

struct feed_item {
    std::string outlet_id;
    std::string title;
    std::string link;
    std::optional<utc_seconds> published;
    std::optional<std::string> guid;
};

struct article {
    std::string outlet_id;
    std::string url;
    std::string title;
    std::vector<std::string> body;  // paragraphs, each non-empty
    utc_seconds fetched_at{};
    std::optional<utc_seconds> published;
    hash_id content_hash;
};

namespace detail {

inline std::string trim_ws(std::string_view s) {
    // ASCII whitespace plus NBSP (UTF-8 c2 a0), which HTML leaks constantly.
    auto is_ws_at = [&](std::size_t i, std::size_t& len) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            len = 1;
            return true;
        }
        if (static_cast<unsigned char>(c) == 0xC2 && i + 1 < s.size() &&
            static_cast<unsigned char>(s[i + 1]) == 0xA0) {
            len = 2;
            return true;
        }
        return false;
    };
    std::size_t b = 0;
    while (b < s.size()) {
        std::size_t len;
        if (!is_ws_at(b, len)) break;
        b += len;
    }
    std::size_t e = s.size();
    while (e > b) {
        // scan back: try 1-byte ws, then 2-byte NBSP ending at e
        char c = s[e - 1];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            --e;
            continue;
        }
        if (e - b >= 2 && static_cast<unsigned char>(s[e - 2]) == 0xC2 &&
            static_cast<unsigned char>(s[e - 1]) == 0xA0) {
            e -= 2;
            continue;
        }
        break;
    }
    return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Canonical byte string hashed for content identity: NFC title, then each
// paragraph, newline-separated, every line trimmed. The layout is part of
// the on-disk contract; do not change it without migrating stored hashes.
inline std::string canonical_content(const std::string& title,
                                     const std::vector<std::string>& body) {
    std::string canon = detail::trim_ws(nfc(title));
    canon.push_back('\n');
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i > 0) canon.push_back('\n');
        canon += detail::trim_ws(nfc(body[i]));
    }
    return canon;
}

inline hash_id content_hash(const std::string& title,
                            const std::vector<std::string>& body) {
    return hash_id::from_bytes(sha256_digest(canonical_content(title, body)));
}

// -- newline-delimited JSON serialization --------------------------------

inline json article_to_json(const article& a) {
    json j;
    j["outlet_id"] = a.outlet_id;
    j["url"] = a.url;
    j["title"] = a.title;
    j["body"] = a.body;
    j["fetched_at"] = format_rfc3339(a.fetched_at);
    j["published"] = a.published ? json(format_rfc3339(*a.published)) : json(nullptr);
    j["content_hash"] = a.content_hash.hex;
    return j;
}

inline article article_from_json(const json& j) {
    article a;
    a.outlet_id = j.at("outlet_id").get<std::string>();
    a.url = j.at("url").get<std::string>();
    a.title = j.at("title").get<std::string>();
    a.body = j.at("body").get<std::vector<std::string>>();
    auto fetched = parse_rfc3339(j.at("fetched_at").get<std::string>());
    if (!fetched) throw error("bad fetched_at timestamp");
    a.fetched_at = *fetched;
    if (j.contains("published") && !j.at("published").is_null()) {
        a.published = parse_rfc3339(j.at("published").get<std::string>());
        if (!a.published) throw error("bad published timestamp");
    }
    auto h = hash_id::from_hex(j.at("content_hash").get<std::string>());
    if (!h) throw error("bad content_hash");
    a.content_hash = *h;
    return a;
}

inline std::string article_to_line(const article& a) {
    return article_to_json(a).dump();
}

}  // namespace cadejo
