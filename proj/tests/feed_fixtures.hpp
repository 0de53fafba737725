#pragma once

#include <cstddef>
#include <vector>

namespace testutil {

struct feed_fixture {
    const char* file;
    std::size_t expected_items;  // meaningful when expect_error is false
    bool expect_error;
};

// Everything under tests/data/feeds, with the parse outcome each document
// must produce.
inline const std::vector<feed_fixture>& feed_fixtures() {
    static const std::vector<feed_fixture> fixtures = {
        {"rss_minimal.xml", 1, false},
        {"rss_empty.xml", 0, false},
        {"rss_entities.xml", 1, false},
        {"rss_missing_date.xml", 1, false},
        {"rss_bad_date.xml", 1, false},
        {"rss_guid_link.xml", 1, false},
        {"rss_cdata.xml", 1, false},
        {"rss_multi.xml", 3, false},
        {"rss_latin1.xml", 1, false},
        {"atom_minimal.xml", 1, false},
        {"atom_three.xml", 3, false},
        {"atom_links.xml", 1, false},
        {"atom_entities.xml", 1, false},
        {"malformed_unclosed.xml", 0, true},
        {"malformed_root.xml", 0, true},
        {"malformed_notxml.xml", 0, true},
    };
    return fixtures;
}

}  // namespace testutil
