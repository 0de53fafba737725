#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include "cadejo/publish.hpp"
#include "cadejo/xml.hpp"
#include "helpers.hpp"

using namespace cadejo;

namespace {

article mk_article(const std::string& outlet, const std::string& url,
                   const std::string& title) {
    article a;
    a.outlet_id = outlet;
    a.url = url;
    a.title = title;
    a.body = {"Cuerpo de la nota con suficiente texto."};
    a.content_hash = content_hash(title, a.body);
    return a;
}

utc_date day(const char* iso) {
    return date_of(*parse_rfc3339(std::string(iso) + "T00:00:00Z"));
}

blog_post sample_post() {
    story_cluster c;
    c.member_ids = {"h1", "h2"};
    c.label_terms = {"elección", "tribunal"};
    std::vector<article> arts{
        mk_article("lpg", "http://lpg.test/nota1", "Tribunal define fecha"),
        mk_article("edh", "http://edh.test/nota2", "Elección en puerta")};
    std::vector<std::string> summaries{"Resumen uno.", "Resumen dos."};
    return compose_post(c, arts, summaries, {"voto-urna-tribunal"},
                        day("2008-10-28"), {{"lpg", "La Prensa"}, {"edh", "El Diario"}},
                        {});
}

}  // namespace

TEST_CASE("compose_post") {
    SECTION("two articles from two outlets become two linked sections") {
        auto post = sample_post();
        REQUIRE(post.sections.size() == 2);
        CHECK(post.sections[0].outlet_name == "El Diario");  // edh < lpg
        CHECK(post.sections[0].source_url == "http://edh.test/nota2");
        CHECK(post.sections[1].outlet_name == "La Prensa");
        CHECK(post.sections[1].source_url == "http://lpg.test/nota1");
        CHECK(post.title == "elección · tribunal");
    }
    SECTION("slug transliterates diacritics") {
        auto post = sample_post();
        CHECK(post.slug == "2008-10-28-eleccion-tribunal");
    }
    SECTION("slug collisions get numeric suffixes") {
        story_cluster c;
        c.member_ids = {"h1"};
        c.label_terms = {"elección", "tribunal"};
        std::vector<article> arts{mk_article("lpg", "http://x/1", "t")};
        std::vector<std::string> sums{"r."};
        std::set<std::string> taken{"2008-10-28-eleccion-tribunal",
                                    "2008-10-28-eleccion-tribunal-2"};
        auto post = compose_post(c, arts, sums, {}, day("2008-10-28"), {}, taken);
        CHECK(post.slug == "2008-10-28-eleccion-tribunal-3");
    }
    SECTION("label-less cluster falls back to the first article title") {
        story_cluster c;
        c.member_ids = {"h1"};
        std::vector<article> arts{mk_article("lpg", "http://x/1", "Titular propio")};
        std::vector<std::string> sums{"r."};
        auto post = compose_post(c, arts, sums, {}, day("2008-10-28"), {}, {});
        CHECK(post.title == "Titular propio");
        CHECK(post.slug == "2008-10-28-titular-propio");
    }
    SECTION("alignment mismatches are rejected") {
        story_cluster c;
        c.member_ids = {"h1", "h2"};
        std::vector<article> arts{mk_article("lpg", "http://x/1", "t")};
        std::vector<std::string> sums{"r."};
        CHECK_THROWS_AS(
            compose_post(c, arts, sums, {}, day("2008-10-28"), {}, {}),
            alignment_error);
    }
    SECTION("long titles truncate to 80 slug chars") {
        story_cluster c;
        c.member_ids = {"h1"};
        c.label_terms = {std::string(200, 'a')};
        std::vector<article> arts{mk_article("lpg", "http://x/1", "t")};
        std::vector<std::string> sums{"r."};
        auto post = compose_post(c, arts, sums, {}, day("2008-10-28"), {}, {});
        CHECK(post.slug.size() <= 80);
        CHECK(post.slug.back() != '-');
    }
}

TEST_CASE("render_post") {
    auto post = sample_post();
    std::string html = render_post(post);
    SECTION("matches the frozen golden document") {
        auto golden = testutil::read_file(testutil::data_dir() / "golden" /
                                          "post_sample.html");
        CHECK(html == golden);
    }
    SECTION("rendering is deterministic") {
        CHECK(render_post(post) == html);
    }
    SECTION("every source url appears in exactly one anchor") {
        for (const auto& s : post.sections) {
            std::string needle = "<a href=\"" + s.source_url + "\">";
            auto first = html.find(needle);
            REQUIRE(first != std::string::npos);
            CHECK(html.find(needle, first + 1) == std::string::npos);
        }
    }
    SECTION("sections equal blockquotes") {
        std::size_t count = 0;
        for (std::size_t pos = 0;
             (pos = html.find("<blockquote>", pos)) != std::string::npos; ++pos)
            ++count;
        CHECK(count == post.sections.size());
    }
    SECTION("tagless posts have no tag list") {
        auto bare = post;
        bare.tags.clear();
        CHECK(render_post(bare).find("class=\"tags\"") == std::string::npos);
    }
    SECTION("rendered page is well-formed and valid UTF-8") {
        CHECK(is_valid_utf8(html));
        std::string body = html.substr(html.find("<html"));
        CHECK_NOTHROW(xml::parse(body));
    }
    SECTION("markup in titles is escaped") {
        auto hostile = post;
        hostile.title = "<script>alert(1)</script> & más";
        std::string out = render_post(hostile);
        CHECK(out.find("<script>alert") == std::string::npos);
        CHECK(out.find("&lt;script&gt;") != std::string::npos);
    }
}

TEST_CASE("render_site") {
    testutil::temp_dir tmp("site");
    SECTION("zero posts render an index only") {
        auto manifest = render_site({}, tmp.path());
        REQUIRE(manifest == std::vector<std::string>{"index.html"});
        CHECK(std::filesystem::exists(tmp.path() / "index.html"));
    }
    SECTION("two posts across two months") {
        auto a = sample_post();
        blog_post b = a;
        b.slug = "2008-11-03-otro";
        b.title = "Otro";
        b.date = day("2008-11-03");
        b.tags.clear();
        auto manifest = render_site({a, b}, tmp.path());
        std::vector<std::string> want{
            "archive/2008/10.html", "archive/2008/11.html", "index.html",
            "posts/2008-10-28-eleccion-tribunal.html", "posts/2008-11-03-otro.html",
            "tags/voto-urna-tribunal.html"};
        CHECK(manifest == want);
        for (const auto& rel : manifest)
            CHECK(std::filesystem::exists(tmp.path() / rel));
    }
    SECTION("site render is idempotent, byte for byte") {
        auto a = sample_post();
        auto m1 = render_site({a}, tmp.path());
        auto index1 = testutil::read_file(tmp.path() / "index.html");
        auto post1 = testutil::read_file(tmp.path() / "posts" / (a.slug + ".html"));
        auto m2 = render_site({a}, tmp.path());
        CHECK(m1 == m2);
        CHECK(testutil::read_file(tmp.path() / "index.html") == index1);
        CHECK(testutil::read_file(tmp.path() / "posts" / (a.slug + ".html")) ==
              post1);
    }
    SECTION("five-post fixture matches frozen manifest and index") {
        std::vector<blog_post> posts;
        const char* days[] = {"2008-09-30", "2008-10-01", "2008-10-15",
                              "2008-10-28", "2008-11-02"};
        for (int i = 0; i < 5; ++i) {
            auto p = sample_post();
            p.date = day(days[i]);
            p.slug = std::string(days[i]) + "-nota-" + std::to_string(i + 1);
            p.title = "Nota " + std::to_string(i + 1);
            if (i % 2 == 0) p.tags = {"voto-urna-tribunal"};
            posts.push_back(std::move(p));
        }
        auto manifest = render_site(posts, tmp.path());
        json got;
        got["manifest"] = manifest;
        auto want = json::parse(testutil::read_file(testutil::data_dir() /
                                                    "golden" / "site_manifest.json"));
        CHECK(got == want);
        auto index = testutil::read_file(tmp.path() / "index.html");
        CHECK(index == testutil::read_file(testutil::data_dir() / "golden" /
                                           "site_index.html"));
    }
    SECTION("index lists newest first and caps at 20") {
        std::vector<blog_post> posts;
        for (int i = 1; i <= 23; ++i) {
            auto p = sample_post();
            char buf[16];
            std::snprintf(buf, sizeof(buf), "2008-10-%02d", (i % 27) + 1);
            p.date = day(buf);
            p.slug = std::string(buf) + "-n" + std::to_string(i);
            p.tags.clear();
            posts.push_back(std::move(p));
        }
        render_site(posts, tmp.path());
        auto index = testutil::read_file(tmp.path() / "index.html");
        std::size_t count = 0;
        for (std::size_t pos = 0;
             (pos = index.find("<li><time", pos)) != std::string::npos; ++pos)
            ++count;
        CHECK(count == 20);
    }
}

TEST_CASE("filesystem publish writes the post where the receipt says") {
    testutil::temp_dir tmp("pub");
    backend_config cfg;
    cfg.kind = publish_backend::filesystem;
    cfg.out_dir = tmp.path();
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    auto receipt = publish(sample_post(), cfg, now);
    CHECK(receipt.backend == publish_backend::filesystem);
    CHECK(receipt.published_at == now);
    REQUIRE(std::filesystem::exists(receipt.location));
    CHECK(testutil::read_file(receipt.location) == render_post(sample_post()));
}

TEST_CASE("http publish speaks atom") {
    httplib::Server srv;
    std::string seen_body, seen_auth, seen_type;
    srv.Post("/api/entries", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        seen_type = req.get_header_value("Content-Type");
        res.status = 201;
        res.set_header("Location", "http://blog.test/entries/99");
    });
    int port = srv.bind_to_any_port("127.0.0.1");
    std::thread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    backend_config cfg;
    cfg.kind = publish_backend::http;
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/api/entries";
    cfg.bearer_token = "sekrit";
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");

    SECTION("201 returns the Location header") {
        auto receipt = publish(sample_post(), cfg, now);
        CHECK(receipt.location == "http://blog.test/entries/99");
        CHECK(seen_auth == "Bearer sekrit");
        CHECK(seen_type.find("application/atom+xml") == 0);
        auto entry = xml::parse(seen_body);
        CHECK(entry.local_name() == "entry");
        REQUIRE(entry.first_child("title") != nullptr);
        CHECK(entry.first_child("title")->text_content() == "elección · tribunal");
        REQUIRE(entry.first_child("category") != nullptr);
        CHECK(*entry.first_child("category")->attr("term") == "voto-urna-tribunal");
        REQUIRE(entry.first_child("content") != nullptr);
        CHECK(*entry.first_child("content")->attr("type") == "html");
    }

    srv.stop();
    th.join();
}

TEST_CASE("http publish surfaces failures") {
    httplib::Server srv;
    srv.Post("/api/entries", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("no token", "text/plain");
    });
    int port = srv.bind_to_any_port("127.0.0.1");
    std::thread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    backend_config cfg;
    cfg.kind = publish_backend::http;
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/api/entries";
    auto now = *parse_rfc3339("2008-10-28T12:00:00Z");
    try {
        publish(sample_post(), cfg, now);
        FAIL("expected http_publish_error");
    } catch (const http_publish_error& e) {
        CHECK(e.status == 401);
        CHECK(std::string(e.what()).find("no token") != std::string::npos);
    }
    srv.stop();
    th.join();
}

TEST_CASE("post json round trip") {
    auto post = sample_post();
    auto back = post_from_json(post_to_json(post));
    CHECK(back.slug == post.slug);
    CHECK(back.title == post.title);
    CHECK(std::chrono::sys_days(back.date) == std::chrono::sys_days(post.date));
    REQUIRE(back.sections.size() == post.sections.size());
    CHECK(back.sections[0].source_url == post.sections[0].source_url);
    CHECK(back.tags == post.tags);
}

TEST_CASE("slugify") {
    CHECK(slugify("elección · tribunal") == "eleccion-tribunal");
    CHECK(slugify("¡Año nuevo!") == "ano-nuevo");
    CHECK(slugify("  spaces   everywhere ") == "spaces-everywhere");
    CHECK(slugify("¿?¡!···") == "");
    CHECK(slugify("123 go") == "123-go");
}
