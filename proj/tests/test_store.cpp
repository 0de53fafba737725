#include <catch2/catch_amalgamated.hpp>

#include "cadejo/store.hpp"
#include "helpers.hpp"

using namespace cadejo;

namespace {

article mk(const std::string& url, const std::string& title,
           const std::string& body, const char* fetched = "2008-10-28T12:00:00Z") {
    article a;
    a.outlet_id = "t";
    a.url = url;
    a.title = title;
    a.body = {body};
    a.fetched_at = *parse_rfc3339(fetched);
    a.content_hash = content_hash(a.title, a.body);
    return a;
}

}  // namespace

TEST_CASE("put_article dedupes by link and by content") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    auto a = mk("http://x/a", "Uno", "cuerpo uno");

    CHECK(st.put_article(a) == store::put_result::stored);
    CHECK(st.put_article(a) == store::put_result::duplicate);

    SECTION("same body, different url: content hash wins") {
        auto b = mk("http://x/otra-ruta", "Uno", "cuerpo uno");
        CHECK(st.put_article(b) == store::put_result::duplicate);
    }
    SECTION("different body, same url: link index wins") {
        auto b = mk("http://x/a", "Uno editado", "cuerpo distinto");
        CHECK(st.put_article(b) == store::put_result::duplicate);
    }
    SECTION("fresh article stores") {
        auto b = mk("http://x/b", "Dos", "cuerpo dos");
        CHECK(st.put_article(b) == store::put_result::stored);
        CHECK(st.articles().size() == 2);
    }
}

TEST_CASE("stored articles survive reopen") {
    testutil::temp_dir tmp("store");
    {
        store st(tmp.path());
        st.put_article(mk("http://x/a", "Uno", "cuerpo uno"));
    }
    store st(tmp.path());
    REQUIRE(st.articles().size() == 1);
    CHECK(st.articles()[0].title == "Uno");
    CHECK(st.put_article(mk("http://x/a", "Uno", "cuerpo uno")) ==
          store::put_result::duplicate);
}

TEST_CASE("load_window") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    auto today = date_of(*parse_rfc3339("2008-10-28T23:00:00Z"));

    SECTION("empty store") {
        CHECK(st.load_window(30, today).empty());
    }
    SECTION("only articles inside the window") {
        st.put_article(mk("http://x/new", "Nueva", "a", "2008-10-28T08:00:00Z"));
        st.put_article(mk("http://x/mid", "Media", "b", "2008-10-10T08:00:00Z"));
        st.put_article(mk("http://x/old", "Vieja", "c", "2008-09-01T08:00:00Z"));
        auto got = st.load_window(30, today);
        REQUIRE(got.size() == 2);
        CHECK(got[0].title == "Media");  // ordered by fetched_at
        CHECK(got[1].title == "Nueva");
    }
    SECTION("boundary day is included (closed interval)") {
        st.put_article(mk("http://x/edge", "Borde", "d", "2008-09-28T00:00:00Z"));
        auto got = st.load_window(30, today);
        REQUIRE(got.size() == 1);
        CHECK(got[0].title == "Borde");
    }
    SECTION("ties on fetched_at order by content hash") {
        auto a = mk("http://x/1", "A", "aaa", "2008-10-28T08:00:00Z");
        auto b = mk("http://x/2", "B", "bbb", "2008-10-28T08:00:00Z");
        st.put_article(a);
        st.put_article(b);
        auto got = st.load_window(1, today);
        REQUIRE(got.size() == 2);
        CHECK(got[0].content_hash.hex < got[1].content_hash.hex);
    }
}

TEST_CASE("run log") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    run_record r;
    r.run_id = "2008-10-28T12:00:00Z";
    r.counts.items_fetched = 12;
    r.counts.items_new = 5;
    r.counts.articles_extracted = 5;
    r.counts.clusters = 2;
    r.counts.posts_published = 2;
    r.config_hash = "deadbeef";

    SECTION("append then read back") {
        st.record_run(r);
        auto runs = st.read_runs();
        REQUIRE(runs.size() == 1);
        CHECK(runs[0].run_id == r.run_id);
        CHECK(runs[0].counts.items_fetched == 12);
        CHECK(runs[0].counts.posts_published == 2);
        CHECK(runs[0].config_hash == "deadbeef");
    }
    SECTION("two runs preserve order") {
        st.record_run(r);
        auto r2 = r;
        r2.run_id = "2008-10-29T12:00:00Z";
        st.record_run(r2);
        auto runs = st.read_runs();
        REQUIRE(runs.size() == 2);
        CHECK(runs[0].run_id < runs[1].run_id);
    }
    SECTION("malformed line reports its line number") {
        st.record_run(r);
        testutil::write_file(tmp.path() / "runs.ndjson",
                             run_record_to_json(r).dump() + "\n{broken\n");
        try {
            st.read_runs();
            FAIL("expected log_corrupt_error");
        } catch (const log_corrupt_error& e) {
            CHECK(e.line_no == 2);
            CHECK(std::string(e.what()).find("runs.ndjson") != std::string::npos);
        }
    }
}

TEST_CASE("article log is append-only") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    st.put_article(mk("http://x/a", "Uno", "cuerpo uno"));
    auto before = testutil::read_file(tmp.path() / "articles.ndjson");
    st.put_article(mk("http://x/b", "Dos", "cuerpo dos"));
    st.put_article(mk("http://x/a", "Uno", "cuerpo uno"));  // duplicate, no write
    auto after = testutil::read_file(tmp.path() / "articles.ndjson");
    REQUIRE(after.size() > before.size());
    CHECK(after.substr(0, before.size()) == before);
}

TEST_CASE("torn trailing line is repaired on open") {
    testutil::temp_dir tmp("store");
    {
        store st(tmp.path());
        st.put_article(mk("http://x/a", "Uno", "cuerpo uno"));
    }
    // simulate a crash mid-append
    {
        std::ofstream out(tmp.path() / "articles.ndjson",
                          std::ios::binary | std::ios::app);
        out << "{\"outlet_id\":\"t\",\"url\":\"http://x/tor";
    }
    store st(tmp.path());
    REQUIRE(st.articles().size() == 1);
    CHECK(st.put_article(mk("http://x/b", "Dos", "cuerpo dos")) ==
          store::put_result::stored);
    store reread(tmp.path());
    CHECK(reread.articles().size() == 2);
}

TEST_CASE("store lock") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    SECTION("second acquire fails while held") {
        auto lock = st.acquire_lock();
        CHECK_THROWS_AS(st.acquire_lock(), io_error);
    }
    SECTION("release allows reacquisition") {
        {
            auto lock = st.acquire_lock();
        }
        CHECK_NOTHROW(st.acquire_lock());
    }
    SECTION("stale lock from a dead process is taken over") {
        testutil::write_file(tmp.path() / "lock", "999999999\n");
        CHECK_NOTHROW(st.acquire_lock());
    }
}

TEST_CASE("read-only store rejects writes") {
    testutil::temp_dir tmp("store");
    store st(tmp.path(), /*writable=*/false);
    CHECK_THROWS_AS(st.put_article(mk("http://x/a", "Uno", "cuerpo")), io_error);
}

TEST_CASE("feed conditional state round trip") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    CHECK(st.feed_state("lpg").empty());
    conditional_state cond;
    cond.etag = "\"abc\"";
    cond.last_modified = "Tue, 28 Oct 2008 12:00:00 GMT";
    st.set_feed_state("lpg", cond);
    st.set_feed_state("edh", conditional_state{"\"zzz\"", ""});
    auto got = st.feed_state("lpg");
    CHECK(got.etag == "\"abc\"");
    CHECK(got.last_modified == cond.last_modified);
    CHECK(st.feed_state("edh").etag == "\"zzz\"");
}

TEST_CASE("posts log round trip") {
    testutil::temp_dir tmp("store");
    store st(tmp.path());
    blog_post p;
    p.slug = "2008-10-28-nota";
    p.title = "Nota";
    p.date = date_of(*parse_rfc3339("2008-10-28T00:00:00Z"));
    p.sections.push_back({"La Prensa", "Titular", "Resumen.", "http://x/a"});
    p.tags = {"tag-uno"};
    st.append_posts({p});
    auto posts = st.load_posts();
    REQUIRE(posts.size() == 1);
    CHECK(posts[0].slug == p.slug);
    CHECK(st.post_slugs() == std::set<std::string>{"2008-10-28-nota"});
}
