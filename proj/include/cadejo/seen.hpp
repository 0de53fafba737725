#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

#include "cadejo/url.hpp"

namespace cadejo {

// Dedup index over everything the pipeline has already ingested. URLs are
// stored normalized (lowercase scheme/host, no fragment, no trailing slash).
class seen_index {
public:
    void add_link(std::string_view url) { links_.insert(normalize_url(url)); }
    void add_hash(std::string_view hex) { hashes_.emplace(hex); }

    bool has_link(std::string_view url) const {
        return links_.count(normalize_url(url)) > 0;
    }
    bool has_hash(std::string_view hex) const {
        return hashes_.count(std::string(hex)) > 0;
    }

    std::size_t link_count() const { return links_.size(); }
    std::size_t hash_count() const { return hashes_.size(); }

private:
    std::unordered_set<std::string> links_;
    std::unordered_set<std::string> hashes_;
};

}  // namespace cadejo
