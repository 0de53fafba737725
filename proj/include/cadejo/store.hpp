#pragma once

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cadejo/errors.hpp"
#include "cadejo/http.hpp"
#include "cadejo/model.hpp"
#include "cadejo/publish.hpp"
#include "cadejo/seen.hpp"
#include "cadejo/time.hpp"

namespace cadejo {

struct run_counts {
    std::int64_t items_fetched = 0;
    std::int64_t items_new = 0;
    std::int64_t articles_extracted = 0;
    std::int64_t clusters = 0;
    std::int64_t posts_published = 0;
};

struct run_record {
    std::string run_id;  // RFC 3339 timestamp of the run's injected clock
    run_counts counts;
    std::string config_hash;  // hex digest of the effective config
};

inline json run_record_to_json(const run_record& r) {
    json j;
    j["run_id"] = r.run_id;
    json c;
    c["items_fetched"] = r.counts.items_fetched;
    c["items_new"] = r.counts.items_new;
    c["articles_extracted"] = r.counts.articles_extracted;
    c["clusters"] = r.counts.clusters;
    c["posts_published"] = r.counts.posts_published;
    j["counts"] = std::move(c);
    j["config_hash"] = r.config_hash;
    return j;
}

inline run_record run_record_from_json(const json& j) {
    run_record r;
    r.run_id = j.at("run_id").get<std::string>();
    const auto& c = j.at("counts");
    r.counts.items_fetched = c.at("items_fetched").get<std::int64_t>();
    r.counts.items_new = c.at("items_new").get<std::int64_t>();
    r.counts.articles_extracted = c.at("articles_extracted").get<std::int64_t>();
    r.counts.clusters = c.at("clusters").get<std::int64_t>();
    r.counts.posts_published = c.at("posts_published").get<std::int64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    return r;
}

namespace detail {

// Reads complete lines of an ndjson log. A trailing line without '\n' is a
// torn write from a crashed run and is ignored; malformed complete lines
// raise log_corrupt_error with their line number.
template <typename Fn>
inline void read_ndjson(const std::filesystem::path& path, Fn&& per_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return;  // absent file = empty log
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        auto eol = content.find('\n', pos);
        if (eol == std::string::npos) break;  // torn tail
        ++line_no;
        std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw log_corrupt_error(path.filename().string(), line_no);
        try {
            per_line(j);
        } catch (const error&) {
            throw log_corrupt_error(path.filename().string(), line_no);
        } catch (const nlohmann::json::exception&) {
            throw log_corrupt_error(path.filename().string(), line_no);
        }
    }
}

// Drops a torn trailing line so the next append starts on a clean boundary.
inline void repair_torn_tail(const std::filesystem::path& path) {
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    if (ec || size == 0) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    if (!content.empty() && content.back() != '\n') {
        auto last_nl = content.find_last_of('\n');
        auto keep = (last_nl == std::string::npos) ? 0 : last_nl + 1;
        std::filesystem::resize_file(path, keep, ec);
    }
}

inline void append_line(const std::filesystem::path& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw io_error("cannot open " + path.string() + " for append");
    out << line << '\n';
    out.flush();
    if (!out) throw io_error("short append to " + path.string());
}

}  // namespace detail

// Exclusive-writer lock: a lock file holding the owner pid. A lock whose
// owner is gone counts as stale and is taken over.
class store_lock {
public:
    store_lock() = default;

    explicit store_lock(const std::filesystem::path& path) : path_(path) {
        for (int attempt = 0; attempt < 2; ++attempt) {
            int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd >= 0) {
                std::string pid = std::to_string(::getpid()) + "\n";
                [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
                ::close(fd);
                held_ = true;
                return;
            }
            // somebody holds it; stale if that process is gone
            std::ifstream in(path);
            long pid = 0;
            if (in >> pid; pid > 0 && ::kill(static_cast<pid_t>(pid), 0) == 0 &&
                           pid != static_cast<long>(::getpid()))
                throw io_error("store locked by running pid " + std::to_string(pid));
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
        throw io_error("cannot acquire store lock " + path_.string());
    }

    store_lock(store_lock&& o) noexcept : path_(std::move(o.path_)), held_(o.held_) {
        o.held_ = false;
    }
    store_lock& operator=(store_lock&& o) noexcept {
        release();
        path_ = std::move(o.path_);
        held_ = o.held_;
        o.held_ = false;
        return *this;
    }
    store_lock(const store_lock&) = delete;
    store_lock& operator=(const store_lock&) = delete;

    ~store_lock() { release(); }

    void release() {
        if (held_) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
            held_ = false;
        }
    }

private:
    std::filesystem::path path_;
    bool held_ = false;
};

// Append-only persistence under one data directory:
//   articles.ndjson  every stored article
//   seen.ndjson      normalized link + content hash per stored article
//   runs.ndjson      one record per pipeline run
//   posts.ndjson     every published post
//   feedstate.json   per-outlet conditional-GET validators
//   lock             single-writer lock file
class store {
public:
    enum class put_result { stored, duplicate };

    explicit store(std::filesystem::path data_dir, bool writable = true)
        : dir_(std::move(data_dir)), writable_(writable) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw io_error("cannot create data dir " + dir_.string());
        if (writable_) {
            for (const char* f : {"articles.ndjson", "seen.ndjson",
                                  "runs.ndjson", "posts.ndjson"})
                detail::repair_torn_tail(dir_ / f);
        }
        detail::read_ndjson(dir_ / "seen.ndjson", [&](const json& j) {
            if (j.contains("link")) seen_.add_link(j.at("link").get<std::string>());
            if (j.contains("hash")) seen_.add_hash(j.at("hash").get<std::string>());
        });
        detail::read_ndjson(dir_ / "articles.ndjson", [&](const json& j) {
            articles_.push_back(article_from_json(j));
        });
    }

    const std::filesystem::path& dir() const { return dir_; }
    const seen_index& seen() const { return seen_; }
    const std::vector<article>& articles() const { return articles_; }

    // Stores the article unless its link or content hash is already known.
    put_result put_article(const article& a) {
        if (seen_.has_link(a.url) || seen_.has_hash(a.content_hash.hex))
            return put_result::duplicate;
        require_writable();
        detail::append_line(dir_ / "articles.ndjson", article_to_line(a));
        json s;
        s["link"] = normalize_url(a.url);
        s["hash"] = a.content_hash.hex;
        detail::append_line(dir_ / "seen.ndjson", s.dump());
        seen_.add_link(a.url);
        seen_.add_hash(a.content_hash.hex);
        articles_.push_back(a);
        return put_result::stored;
    }

    // Articles fetched within the closed interval [today - days, today],
    // ordered by (fetched_at, content_hash).
    std::vector<article> load_window(std::size_t days, utc_date today) const {
        auto lo = std::chrono::sys_days(today) - std::chrono::days(days);
        auto hi = std::chrono::sys_days(today);
        std::vector<article> out;
        for (const auto& a : articles_) {
            auto day = std::chrono::floor<std::chrono::days>(a.fetched_at);
            if (day >= lo && day <= hi) out.push_back(a);
        }
        std::sort(out.begin(), out.end(), [](const article& a, const article& b) {
            if (a.fetched_at != b.fetched_at) return a.fetched_at < b.fetched_at;
            return a.content_hash.hex < b.content_hash.hex;
        });
        return out;
    }

    void record_run(const run_record& r) {
        require_writable();
        detail::append_line(dir_ / "runs.ndjson", run_record_to_json(r).dump());
    }

    std::vector<run_record> read_runs() const {
        std::vector<run_record> out;
        detail::read_ndjson(dir_ / "runs.ndjson", [&](const json& j) {
            out.push_back(run_record_from_json(j));
        });
        return out;
    }

    void append_posts(const std::vector<blog_post>& posts) {
        require_writable();
        for (const auto& p : posts)
            detail::append_line(dir_ / "posts.ndjson", post_to_json(p).dump());
    }

    std::vector<blog_post> load_posts() const {
        std::vector<blog_post> out;
        detail::read_ndjson(dir_ / "posts.ndjson", [&](const json& j) {
            out.push_back(post_from_json(j));
        });
        return out;
    }

    std::set<std::string> post_slugs() const {
        std::set<std::string> out;
        for (const auto& p : load_posts()) out.insert(p.slug);
        return out;
    }

    // -- conditional-GET validators per outlet ---------------------------

    conditional_state feed_state(const std::string& outlet_id) const {
        std::ifstream in(dir_ / "feedstate.json");
        if (!in) return {};
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains(outlet_id)) return {};
        conditional_state st;
        st.etag = j[outlet_id].value("etag", "");
        st.last_modified = j[outlet_id].value("last_modified", "");
        return st;
    }

    void set_feed_state(const std::string& outlet_id, const conditional_state& st) {
        require_writable();
        json j;
        {
            std::ifstream in(dir_ / "feedstate.json");
            if (in) {
                json existing = json::parse(in, nullptr, false);
                if (!existing.is_discarded()) j = std::move(existing);
            }
        }
        j[outlet_id]["etag"] = st.etag;
        j[outlet_id]["last_modified"] = st.last_modified;
        detail::write_file(dir_ / "feedstate.json", j.dump(2) + "\n");
    }

    store_lock acquire_lock() { return store_lock(dir_ / "lock"); }

private:
    void require_writable() const {
        if (!writable_) throw io_error("store opened read-only");
    }

    std::filesystem::path dir_;
    bool writable_;
    seen_index seen_;
    std::vector<article> articles_;
};

}  // namespace cadejo
