#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cadejo/feed.hpp"
#include "feed_fixtures.hpp"
#include "helpers.hpp"

using namespace cadejo;

namespace {

raw_feed_document doc_from(const std::string& bytes, const char* outlet = "test") {
    raw_feed_document d;
    d.outlet_id = outlet;
    d.bytes = bytes;
    return d;
}

raw_feed_document load_fixture(const char* name) {
    return doc_from(testutil::read_file(testutil::data_dir() / "feeds" / name));
}

}  // namespace

TEST_CASE("rss 2.0 minimal item") {
    auto items = parse_feed(load_fixture("rss_minimal.xml"));
    REQUIRE(items.size() == 1);
    CHECK(items[0].title == "A");
    CHECK(items[0].link == "http://x/a");
    CHECK(items[0].outlet_id == "test");
    CHECK_FALSE(items[0].published.has_value());
}

TEST_CASE("rss channel with zero items") {
    CHECK(parse_feed(load_fixture("rss_empty.xml")).empty());
}

TEST_CASE("html entities in titles are decoded") {
    auto items = parse_feed(load_fixture("rss_entities.xml"));
    REQUIRE(items.size() == 1);
    CHECK(items[0].title == "Elección & tribunal – más");

    auto cdata = parse_feed(load_fixture("rss_cdata.xml"));
    REQUIRE(cdata.size() == 1);
    CHECK(cdata[0].title == "Reforma fiscal: área gris");

    auto atom = parse_feed(load_fixture("atom_entities.xml"));
    REQUIRE(atom.size() == 1);
    CHECK(atom[0].title == "Café «nacional»");
}

TEST_CASE("missing or bad dates yield absent published") {
    auto missing = parse_feed(load_fixture("rss_missing_date.xml"));
    REQUIRE(missing.size() == 1);
    CHECK_FALSE(missing[0].published.has_value());
    CHECK(missing[0].guid == "tag:x,2008:sinfecha");

    auto bad = parse_feed(load_fixture("rss_bad_date.xml"));
    REQUIRE(bad.size() == 1);
    CHECK_FALSE(bad[0].published.has_value());
}

TEST_CASE("permalink guid substitutes for a missing link") {
    auto items = parse_feed(load_fixture("rss_guid_link.xml"));
    REQUIRE(items.size() == 1);
    CHECK(items[0].link == "http://x/desde-guid");
}

TEST_CASE("rss multi-item document order and rfc822 dates") {
    auto items = parse_feed(load_fixture("rss_multi.xml"));
    REQUIRE(items.size() == 3);
    CHECK(items[0].title == "Primero");
    CHECK(items[1].title == "Segundo");
    CHECK(items[2].title == "Tercero");
    REQUIRE(items[0].published.has_value());
    CHECK(format_rfc3339(*items[0].published) == "2008-10-28T14:30:00Z");
    CHECK(format_rfc3339(*items[1].published) == "2008-10-28T14:30:00Z");
    CHECK(format_rfc3339(*items[2].published) == "2008-10-28T15:00:00Z");
}

TEST_CASE("latin-1 encoded feed is transcoded") {
    auto items = parse_feed(load_fixture("rss_latin1.xml"));
    REQUIRE(items.size() == 1);
    CHECK(items[0].title == "Mañana habrá elección");
}

TEST_CASE("atom 1.0 entries") {
    auto one = parse_feed(load_fixture("atom_minimal.xml"));
    REQUIRE(one.size() == 1);
    CHECK(one[0].title == "Entrada");
    CHECK(one[0].link == "http://x/atom-1");
    REQUIRE(one[0].published.has_value());  // falls back to <updated>
    CHECK(format_rfc3339(*one[0].published) == "2008-10-28T12:00:00Z");

    // golden expectations, hand-checked against the fixture file
    auto three = parse_feed(load_fixture("atom_three.xml"));
    REQUIRE(three.size() == 3);
    CHECK(three[0].link == "http://x/t1");
    CHECK(format_rfc3339(*three[0].published) == "2008-10-26T06:15:00Z");
    CHECK(format_rfc3339(*three[1].published) == "2008-10-28T00:45:30Z");
    CHECK(format_rfc3339(*three[2].published) == "2008-10-28T23:59:59Z");
    CHECK(three[2].guid == "tag:x,2008:t3");
}

TEST_CASE("atom rel=alternate wins over self and enclosure") {
    auto items = parse_feed(load_fixture("atom_links.xml"));
    REQUIRE(items.size() == 1);
    CHECK(items[0].link == "http://x/principal");
}

TEST_CASE("malformed documents raise feed_parse_error") {
    CHECK_THROWS_AS(parse_feed(load_fixture("malformed_unclosed.xml")),
                    feed_parse_error);
    CHECK_THROWS_AS(parse_feed(load_fixture("malformed_root.xml")),
                    feed_parse_error);
    CHECK_THROWS_AS(parse_feed(load_fixture("malformed_notxml.xml")),
                    feed_parse_error);
}

TEST_CASE("entire fixture suite parses as expected") {
    for (const auto& fx : testutil::feed_fixtures()) {
        INFO(fx.file);
        if (fx.expect_error) {
            CHECK_THROWS_AS(parse_feed(load_fixture(fx.file)), feed_parse_error);
        } else {
            CHECK(parse_feed(load_fixture(fx.file)).size() == fx.expected_items);
        }
    }
}

TEST_CASE("item count equals item/entry elements in generated feeds") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = rng() % 20;
        std::string xml = "<?xml version=\"1.0\"?><rss version=\"2.0\"><channel>";
        for (std::size_t i = 0; i < n; ++i) {
            xml += "<item><title>t" + std::to_string(i) + "</title><link>http://x/" +
                   std::to_string(i) + "</link></item>";
        }
        xml += "</channel></rss>";
        CHECK(parse_feed(doc_from(xml)).size() == n);
    }
}

TEST_CASE("fuzzed mutations never crash the parser") {
    std::vector<std::string> corpus;
    for (const auto& fx : testutil::feed_fixtures())
        corpus.push_back(testutil::read_file(testutil::data_dir() / "feeds" / fx.file));
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string bytes = corpus[rng() % corpus.size()];
        std::size_t edits = 1 + rng() % 8;
        for (std::size_t e = 0; e < edits && !bytes.empty(); ++e) {
            switch (rng() % 3) {
                case 0: bytes[rng() % bytes.size()] = static_cast<char>(rng() % 256); break;
                case 1: bytes.erase(rng() % bytes.size(), 1 + rng() % 4); break;
                default:
                    bytes.insert(rng() % bytes.size(), 1,
                                 static_cast<char>(rng() % 256));
            }
        }
        try {
            (void)parse_feed(doc_from(bytes));
        } catch (const feed_parse_error&) {
            // typed failure is the contract
        }
    }
    SUCCEED("no crash across 2000 mutations");
}

TEST_CASE("filter_new") {
    std::vector<feed_item> items(3);
    items[0].link = "http://x/a";
    items[1].link = "http://x/b";
    items[2].link = "http://x/c";
    for (auto& it : items) it.title = "t";

    seen_index none;
    CHECK(filter_new(items, none).size() == 3);

    seen_index all;
    for (const auto& it : items) all.add_link(it.link);
    CHECK(filter_new(items, all).empty());

    SECTION("order preserved, seen removed") {
        seen_index some;
        some.add_link("http://x/b");
        auto out = filter_new(items, some);
        REQUIRE(out.size() == 2);
        CHECK(out[0].link == "http://x/a");
        CHECK(out[1].link == "http://x/c");
    }
    SECTION("duplicate link within batch keeps first occurrence") {
        auto dup = items;
        dup.push_back(items[0]);
        dup[3].title = "copy";
        auto out = filter_new(dup, none);
        REQUIRE(out.size() == 3);
        CHECK(out[0].title == "t");
    }
    SECTION("normalization: trailing slash and fragment match") {
        seen_index seen;
        seen.add_link("http://x/a/");
        std::vector<feed_item> v{items[0]};
        CHECK(filter_new(v, seen).empty());
    }
    SECTION("idempotence") {
        seen_index some;
        some.add_link("http://x/c");
        auto once = filter_new(items, some);
        auto twice = filter_new(once, some);
        REQUIRE(once.size() == twice.size());
        for (std::size_t i = 0; i < once.size(); ++i)
            CHECK(once[i].link == twice[i].link);
    }
}

TEST_CASE("not-modified document parses to an empty item list") {
    raw_feed_document d;
    d.outlet_id = "x";
    d.not_modified = true;
    CHECK(parse_feed(d).empty());
}
