#pragma once

// Single include point for cpp-httplib so the redirect cap and TLS support
// are configured identically everywhere.
#define CPPHTTPLIB_REDIRECT_MAX_COUNT 5
#ifndef CADEJO_NO_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <chrono>
#include <optional>
#include <string>
#include <thread>

#include "cadejo/errors.hpp"
#include "cadejo/feed.hpp"
#include "cadejo/model.hpp"
#include "cadejo/time.hpp"
#include "cadejo/url.hpp"

namespace cadejo {

struct fetch_policy {
    double timeout_s = 30.0;
    int max_retries = 2;
    double retry_backoff_s = 5.0;  // doubles after each failed attempt
    std::size_t max_body_bytes = 5 * 1024 * 1024;
    std::string user_agent = "cadejo/0.1 (+news-digest-bot)";
};

// ETag / Last-Modified pair remembered per outlet between runs.
struct conditional_state {
    std::string etag;
    std::string last_modified;
    bool empty() const { return etag.empty() && last_modified.empty(); }
};

struct fetch_result {
    std::string body;
    std::optional<std::string> content_type;
    bool not_modified = false;
    conditional_state validators;
};

namespace detail {

inline void configure_client(httplib::Client& cli, const fetch_policy& policy) {
    auto whole = std::chrono::duration<double>(policy.timeout_s);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(whole);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(whole - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    cli.set_follow_location(true);
}

inline fetch_result http_get(const std::string& url, const fetch_policy& policy,
                             const conditional_state* cond) {
    auto parts = parse_url(url);
    if (!parts || (parts->scheme != "http" && parts->scheme != "https"))
        throw network_error("unsupported URL: " + url);

    httplib::Headers headers{{"User-Agent", policy.user_agent},
                             {"Accept", "*/*"}};
    if (cond) {
        if (!cond->etag.empty()) headers.emplace("If-None-Match", cond->etag);
        if (!cond->last_modified.empty())
            headers.emplace("If-Modified-Since", cond->last_modified);
    }
    std::string path = parts->path.empty() ? "/" : parts->path;

    std::string last_failure;
    double backoff = policy.retry_backoff_s;
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff *= 2;
        }
        httplib::Client cli(parts->origin());
        configure_client(cli, policy);

        fetch_result out;
        bool oversize = false;
        int status = 0;
        auto res = cli.Get(
            path, headers,
            [&](const httplib::Response& response) {
                status = response.status;
                if (auto it = response.headers.find("ETag");
                    it != response.headers.end())
                    out.validators.etag = it->second;
                if (auto it = response.headers.find("Last-Modified");
                    it != response.headers.end())
                    out.validators.last_modified = it->second;
                if (auto it = response.headers.find("Content-Type");
                    it != response.headers.end())
                    out.content_type = it->second;
                return true;
            },
            [&](const char* data, std::size_t len) {
                if (status < 200 || status >= 300) return true;  // redirect hop body
                if (out.body.size() + len > policy.max_body_bytes) {
                    oversize = true;
                    return false;
                }
                out.body.append(data, len);
                return true;
            });

        if (oversize)
            throw oversize_error(url + ": body exceeds " +
                                 std::to_string(policy.max_body_bytes) + " bytes");
        if (!res) {
            last_failure = httplib::to_string(res.error());
            continue;  // transport error: retry
        }
        status = res->status;
        if (status == 304) {
            out.not_modified = true;
            return out;
        }
        if (status >= 200 && status < 300) return out;
        if (status >= 500 && status < 600) {
            last_failure = "http status " + std::to_string(status);
            continue;  // server error: retry
        }
        throw http_error(status, url);
    }
    throw network_error(url + ": " + (last_failure.empty() ? "request failed"
                                                           : last_failure) +
                        " after " + std::to_string(policy.max_retries + 1) +
                        " attempts");
}

}  // namespace detail

// Fetches an outlet's feed. 2xx yields the body bytes; 304 (when cached
// validators were supplied) yields an empty not-modified document.
inline raw_feed_document fetch_feed(const outlet_config& outlet,
                                    const fetch_policy& policy,
                                    utc_seconds fetched_at,
                                    const conditional_state* cond = nullptr,
                                    conditional_state* cond_out = nullptr) {
    fetch_result r = detail::http_get(outlet.feed_url, policy, cond);
    if (cond_out) *cond_out = r.validators;
    raw_feed_document doc;
    doc.outlet_id = outlet.id;
    doc.bytes = std::move(r.body);
    doc.content_type = std::move(r.content_type);
    doc.fetched_at = fetched_at;
    doc.not_modified = r.not_modified;
    return doc;
}

// Plain GET for article pages.
inline fetch_result fetch_url(const std::string& url, const fetch_policy& policy) {
    return detail::http_get(url, policy, nullptr);
}

}  // namespace cadejo
