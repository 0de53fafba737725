#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "cadejo/http.hpp"

using namespace cadejo;

namespace {

// httplib server bound to a free loopback port, torn down on destruction
class fixture_server {
public:
    fixture_server() = default;

    int start() {
        port_ = srv.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { srv.listen_after_bind(); });
        srv.wait_until_ready();
        return port_;
    }

    ~fixture_server() {
        srv.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

    httplib::Server srv;

private:
    int port_ = 0;
    std::thread thread_;
};

outlet_config outlet_for(const fixture_server& server, const std::string& path) {
    outlet_config o;
    o.id = "fx";
    o.name = "Fixture";
    o.feed_url = server.url(path);
    return o;
}

fetch_policy fast_policy() {
    fetch_policy p;
    p.timeout_s = 5;
    p.retry_backoff_s = 0;  // no sleeping in tests
    return p;
}

}  // namespace

TEST_CASE("fetch_feed returns 2xx body bytes") {
    fixture_server server;
    const std::string rss = "<rss version=\"2.0\"><channel></channel></rss>";
    server.srv.Get("/feed", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(rss, "application/rss+xml");
    });
    server.start();

    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    auto doc = fetch_feed(outlet_for(server, "/feed"), fast_policy(), now);
    CHECK(doc.bytes == rss);
    CHECK(doc.outlet_id == "fx");
    CHECK(doc.fetched_at == now);
    REQUIRE(doc.content_type.has_value());
    CHECK(doc.content_type->find("rss") != std::string::npos);
}

TEST_CASE("non-2xx yields http_error with the status") {
    fixture_server server;
    std::atomic<int> hits{0};
    server.srv.Get("/gone", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 404;
    });
    server.start();

    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    try {
        fetch_feed(outlet_for(server, "/gone"), fast_policy(), now);
        FAIL("expected http_error");
    } catch (const http_error& e) {
        CHECK(e.status == 404);
    }
    CHECK(hits == 1);  // client errors are not retried
}

TEST_CASE("transient failures are retried; third attempt succeeds") {
    fixture_server server;
    std::atomic<int> hits{0};
    server.srv.Get("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        int n = ++hits;
        if (n <= 2) {
            res.status = 500;
        } else {
            res.set_content("ok", "text/plain");
        }
    });
    server.start();

    auto policy = fast_policy();
    policy.max_retries = 2;
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    auto doc = fetch_feed(outlet_for(server, "/flaky"), policy, now);
    CHECK(doc.bytes == "ok");
    CHECK(hits == 3);
}

TEST_CASE("retries exhausted becomes network_error") {
    fixture_server server;
    std::atomic<int> hits{0};
    server.srv.Get("/down", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    server.start();

    auto policy = fast_policy();
    policy.max_retries = 1;
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    CHECK_THROWS_AS(fetch_feed(outlet_for(server, "/down"), policy, now),
                    network_error);
    CHECK(hits == 2);
}

TEST_CASE("bodies over max_body_bytes raise oversize_error") {
    fixture_server server;
    server.srv.Get("/big", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(std::string(4096, 'x'), "text/plain");
    });
    server.start();

    auto policy = fast_policy();
    policy.max_body_bytes = 1000;
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    CHECK_THROWS_AS(fetch_feed(outlet_for(server, "/big"), policy, now),
                    oversize_error);
}

TEST_CASE("redirects are followed") {
    fixture_server server;
    server.srv.Get("/old", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 302;
        res.set_header("Location", "/new");
    });
    server.srv.Get("/new", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("moved here", "text/plain");
    });
    server.start();

    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    auto doc = fetch_feed(outlet_for(server, "/old"), fast_policy(), now);
    CHECK(doc.bytes == "moved here");
}

TEST_CASE("redirect chains beyond the cap fail") {
    fixture_server server;
    for (int i = 0; i < 8; ++i) {
        server.srv.Get("/hop" + std::to_string(i),
                       [i](const httplib::Request&, httplib::Response& res) {
                           res.status = 302;
                           res.set_header("Location", "/hop" + std::to_string(i + 1));
                       });
    }
    server.srv.Get("/hop8", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("end", "text/plain");
    });
    server.start();

    auto policy = fast_policy();
    policy.max_retries = 0;
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    CHECK_THROWS_AS(fetch_feed(outlet_for(server, "/hop0"), policy, now),
                    network_error);
}

TEST_CASE("conditional GET round trip") {
    fixture_server server;
    std::atomic<int> unconditional{0};
    server.srv.Get("/cond", [&](const httplib::Request& req, httplib::Response& res) {
        if (req.get_header_value("If-None-Match") == "\"v1\"") {
            res.status = 304;
            return;
        }
        ++unconditional;
        res.set_header("ETag", "\"v1\"");
        res.set_header("Last-Modified", "Tue, 28 Oct 2008 12:00:00 GMT");
        res.set_content("<rss version=\"2.0\"><channel></channel></rss>",
                        "application/rss+xml");
    });
    server.start();

    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    conditional_state validators;
    auto first = fetch_feed(outlet_for(server, "/cond"), fast_policy(), now,
                            nullptr, &validators);
    CHECK_FALSE(first.not_modified);
    CHECK(validators.etag == "\"v1\"");
    CHECK(validators.last_modified == "Tue, 28 Oct 2008 12:00:00 GMT");

    auto second = fetch_feed(outlet_for(server, "/cond"), fast_policy(), now,
                             &validators, nullptr);
    CHECK(second.not_modified);
    CHECK(second.bytes.empty());
    CHECK(parse_feed(second).empty());
    CHECK(unconditional == 1);
}
