#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace cadejo {

struct url_parts {
    std::string scheme;      // lowercased
    std::string host;        // lowercased
    int port = 0;            // 0 when not explicit
    std::string path;        // includes query, starts with '/' or empty
    std::string fragment;    // without '#'

    int effective_port() const {
        if (port != 0) return port;
        return scheme == "https" ? 443 : 80;
    }

    // Base address for an HTTP client, e.g. "http://example.com:8080".
    std::string origin() const {
        std::string o = scheme + "://" + host;
        if (port != 0) o += ":" + std::to_string(port);
        return o;
    }
};

inline std::optional<url_parts> parse_url(std::string_view s) {
    auto scheme_end = s.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    url_parts u;
    for (char c : s.substr(0, scheme_end)) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return std::nullopt;
        u.scheme.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    std::size_t i = scheme_end + 3;
    std::size_t host_end = i;
    while (host_end < s.size() && s[host_end] != '/' && s[host_end] != '?' &&
           s[host_end] != '#')
        ++host_end;
    std::string_view authority = s.substr(i, host_end - i);
    if (auto at = authority.rfind('@'); at != std::string_view::npos)
        authority.remove_prefix(at + 1);  // userinfo dropped
    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        int port = 0;
        if (colon + 1 == authority.size()) return std::nullopt;
        for (char c : authority.substr(colon + 1)) {
            if (c < '0' || c > '9') return std::nullopt;
            port = port * 10 + (c - '0');
            if (port > 65535) return std::nullopt;
        }
        u.port = port;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) return std::nullopt;
    for (char c : authority)
        u.host.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::string_view rest = s.substr(host_end);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) {
        u.fragment = std::string(rest.substr(hash + 1));
        rest = rest.substr(0, hash);
    }
    u.path = std::string(rest);
    return u;
}

inline bool is_valid_absolute_url(std::string_view s) {
    auto u = parse_url(s);
    return u.has_value() && (u->scheme == "http" || u->scheme == "https");
}

// Canonical form used by the seen-index: lowercase scheme and host, no
// fragment, no trailing slash.
inline std::string normalize_url(std::string_view s) {
    auto u = parse_url(s);
    if (!u) {
        // Not parseable; fall back to dropping any fragment verbatim.
        auto hash = s.find('#');
        std::string out(s.substr(0, hash));
        while (!out.empty() && out.back() == '/') out.pop_back();
        return out;
    }
    std::string path = u->path;
    auto q = path.find('?');
    std::string query = (q == std::string::npos) ? "" : path.substr(q);
    std::string p = (q == std::string::npos) ? path : path.substr(0, q);
    while (!p.empty() && p.back() == '/') p.pop_back();
    return u->origin() + p + query;
}

}  // namespace cadejo
