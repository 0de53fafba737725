#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cadejo/cluster.hpp"
#include "cadejo/config.hpp"
#include "cadejo/extract.hpp"
#include "cadejo/feed.hpp"
#include "cadejo/http.hpp"
#include "cadejo/lda.hpp"
#include "cadejo/publish.hpp"
#include "cadejo/store.hpp"

namespace cadejo {

struct pipeline_options {
    utc_seconds now{};
    std::optional<std::uint64_t> seed_override;
    bool dry_run = false;
    bool verbose = false;
};

namespace detail {

inline void log_line(const pipeline_options& opts, const char* level,
                     const std::string& msg) {
    if (!opts.verbose && std::string_view(level) == "INFO") return;
    std::fprintf(stderr, "%s %s %s\n", format_rfc3339(opts.now).c_str(), level,
                 msg.c_str());
}

inline std::filesystem::path pending_articles_path(const config& cfg) {
    return cfg.data_dir / "pending_articles.ndjson";
}
inline std::filesystem::path pending_posts_path(const config& cfg) {
    return cfg.data_dir / "pending_posts.ndjson";
}
inline std::filesystem::path pending_run_path(const config& cfg) {
    return cfg.data_dir / "pending_run.json";
}

inline run_record load_pending_run(const config& cfg, const pipeline_options& opts) {
    run_record r;
    r.run_id = format_rfc3339(opts.now);
    r.config_hash = config_hash_hex(cfg);
    std::ifstream in(pending_run_path(cfg));
    if (in) {
        json j = json::parse(in, nullptr, false);
        if (!j.is_discarded()) r = run_record_from_json(j);
    }
    return r;
}

inline void save_pending_run(const config& cfg, const run_record& r) {
    write_file(pending_run_path(cfg), run_record_to_json(r).dump() + "\n");
}

}  // namespace detail

// Stage-to-stage carrier. Stage subcommands (standalone = true) pick their
// input up from the pending files; a single `run` passes it in memory.
// Pending files are still written either way (unless dry) so a run can be
// resumed stage-wise.
struct pipeline_state {
    std::vector<article> batch;
    std::vector<blog_post> posts;
    run_record record;
    bool standalone = true;
};

// -- stage 1: fetch ---------------------------------------------------------
//
// One reader per outlet: fetch the feed (conditional GET), parse it, drop
// seen items, fetch and extract each new article, store it. Outlet failures
// are logged and skipped; the digest must not die because one site is down.
inline void stage_fetch(const config& cfg, const pipeline_options& opts,
                        store& st, pipeline_state& state) {
    state.record = run_record{};  // fetch begins a new run
    state.record.run_id = format_rfc3339(opts.now);
    state.record.config_hash = config_hash_hex(cfg);

    struct outlet_result {
        std::vector<feed_item> items;
        conditional_state validators;
        bool have_validators = false;
        std::string failure;
    };
    std::vector<outlet_result> results(cfg.outlets.size());

    // bounded concurrent feed fetches; everything downstream is ordered
    const std::size_t workers =
        std::min<std::size_t>(4, std::max<std::size_t>(1, cfg.outlets.size()));
    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> hold(next_mutex);
                if (next >= cfg.outlets.size()) return;
                i = next++;
            }
            const outlet_config& outlet = cfg.outlets[i];
            try {
                conditional_state cached = st.feed_state(outlet.id);
                conditional_state fresh;
                raw_feed_document doc =
                    fetch_feed(outlet, cfg.fetch, opts.now,
                               cached.empty() ? nullptr : &cached, &fresh);
                results[i].items = parse_feed(doc);
                if (!doc.not_modified) {
                    results[i].validators = fresh;
                    results[i].have_validators = true;
                }
            } catch (const error& e) {
                results[i].failure = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<feed_item> merged;
    for (std::size_t i = 0; i < cfg.outlets.size(); ++i) {
        if (!results[i].failure.empty()) {
            detail::log_line(opts, "WARN", "outlet " + cfg.outlets[i].id +
                                               " skipped: " + results[i].failure);
            continue;
        }
        detail::log_line(opts, "INFO",
                         "outlet " + cfg.outlets[i].id + " items=" +
                             std::to_string(results[i].items.size()));
        merged.insert(merged.end(), results[i].items.begin(),
                      results[i].items.end());
        if (results[i].have_validators && !opts.dry_run &&
            !results[i].validators.empty())
            st.set_feed_state(cfg.outlets[i].id, results[i].validators);
    }
    std::sort(merged.begin(), merged.end(), [](const feed_item& a, const feed_item& b) {
        if (a.outlet_id != b.outlet_id) return a.outlet_id < b.outlet_id;
        return a.link < b.link;
    });
    state.record.counts.items_fetched = static_cast<std::int64_t>(merged.size());

    std::vector<feed_item> fresh_items = filter_new(merged, st.seen());
    state.record.counts.items_new = static_cast<std::int64_t>(fresh_items.size());

    std::map<std::string, const outlet_config*> outlet_by_id;
    for (const auto& o : cfg.outlets) outlet_by_id[o.id] = &o;

    state.batch.clear();
    seen_index dry_seen;  // batch-local dedup when not writing to the store
    for (const auto& item : fresh_items) {
        const outlet_config* outlet = outlet_by_id.at(item.outlet_id);
        try {
            fetch_result page = fetch_url(item.link, cfg.fetch);
            extracted_article ex =
                extract_article(page.body, page.content_type, outlet->rules);
            article a;
            a.outlet_id = item.outlet_id;
            a.url = item.link;
            a.title = ex.title;
            a.body = ex.paragraphs;
            a.fetched_at = opts.now;
            a.published = item.published;
            a.content_hash = content_hash(a.title, a.body);
            bool stored;
            if (opts.dry_run) {
                stored = !st.seen().has_link(a.url) &&
                         !st.seen().has_hash(a.content_hash.hex) &&
                         !dry_seen.has_link(a.url) &&
                         !dry_seen.has_hash(a.content_hash.hex);
                if (stored) {
                    dry_seen.add_link(a.url);
                    dry_seen.add_hash(a.content_hash.hex);
                }
            } else {
                stored = st.put_article(a) == store::put_result::stored;
            }
            if (stored) {
                state.batch.push_back(std::move(a));
            } else {
                detail::log_line(opts, "INFO", "duplicate " + item.link);
            }
        } catch (const error& e) {
            detail::log_line(opts, "WARN",
                             "article " + item.link + " skipped: " + e.what());
        }
    }
    state.record.counts.articles_extracted =
        static_cast<std::int64_t>(state.batch.size());

    if (!opts.dry_run) {
        std::string lines;
        for (const auto& a : state.batch) lines += article_to_line(a) + "\n";
        detail::write_file(detail::pending_articles_path(cfg), lines);
        std::error_code ec;
        std::filesystem::remove(detail::pending_posts_path(cfg), ec);
        detail::save_pending_run(cfg, state.record);
    }
    detail::log_line(opts, "INFO",
                     "fetch done: items=" +
                         std::to_string(state.record.counts.items_fetched) +
                         " new=" + std::to_string(state.record.counts.items_new) +
                         " extracted=" +
                         std::to_string(state.record.counts.articles_extracted));
}

// -- stage 2: analyze --------------------------------------------------------
//
// Cluster the batch, train LDA over the rolling window, compose one digest
// post per cluster.
inline void stage_analyze(const config& cfg, const pipeline_options& opts,
                          store& st, pipeline_state& state) {
    if (state.standalone) {
        state.record = detail::load_pending_run(cfg, opts);
        state.batch.clear();
        detail::read_ndjson(detail::pending_articles_path(cfg), [&](const json& j) {
            state.batch.push_back(article_from_json(j));
        });
    }
    state.posts.clear();
    state.record.counts.clusters = 0;

    if (state.batch.empty()) {
        detail::log_line(opts, "INFO", "analyze: no new articles");
        if (!opts.dry_run) {
            detail::write_file(detail::pending_posts_path(cfg), "");
            detail::save_pending_run(cfg, state.record);
        }
        return;
    }

    // rolling window; in dry-run the batch was never stored, so merge it
    std::vector<article> window = st.load_window(cfg.window_days, date_of(opts.now));
    if (opts.dry_run) {
        std::set<std::string> have;
        for (const auto& a : window) have.insert(a.content_hash.hex);
        for (const auto& a : state.batch)
            if (!have.count(a.content_hash.hex)) window.push_back(a);
        std::sort(window.begin(), window.end(), [](const article& a, const article& b) {
            if (a.fetched_at != b.fetched_at) return a.fetched_at < b.fetched_at;
            return a.content_hash.hex < b.content_hash.hex;
        });
    }

    const auto stopset = config_stopwords(cfg);
    auto doc_text = [](const article& a) {
        std::string text = a.title;
        for (const auto& p : a.body) {
            text += " ";
            text += p;
        }
        return text;
    };
    std::vector<std::vector<std::string>> window_stems;
    window_stems.reserve(window.size());
    for (const auto& a : window) window_stems.push_back(stem_terms(doc_text(a), stopset));

    vocabulary vocab;
    try {
        vocab = build_vocabulary(window_stems, 1, 0.6);
    } catch (const empty_vocabulary_error& e) {
        detail::log_line(opts, "WARN", std::string("analyze: ") + e.what());
        if (!opts.dry_run) {
            detail::write_file(detail::pending_posts_path(cfg), "");
            detail::save_pending_run(cfg, state.record);
        }
        return;
    }

    std::unordered_map<std::string, std::size_t> window_index;
    for (std::size_t i = 0; i < window.size(); ++i)
        window_index[window[i].content_hash.hex] = i;

    // cluster this run's batch
    std::vector<std::pair<std::string, sparse_vector>> batch_vectors;
    std::unordered_map<std::string, const article*> batch_by_hash;
    for (const auto& a : state.batch) {
        std::size_t widx = window_index.at(a.content_hash.hex);
        batch_vectors.emplace_back(a.content_hash.hex,
                                   tfidf_vector(window_stems[widx], vocab));
        batch_by_hash[a.content_hash.hex] = &a;
    }
    std::vector<story_cluster> clusters =
        cluster_articles(batch_vectors, cfg.cluster);
    state.record.counts.clusters = static_cast<std::int64_t>(clusters.size());

    // topics over the window
    lda_config lda_cfg = cfg.lda;
    if (opts.seed_override) lda_cfg.seed = *opts.seed_override;
    term_docs docs(window.size());
    for (std::size_t i = 0; i < window.size(); ++i)
        for (const auto& stem : window_stems[i])
            if (auto pos = vocab.position(stem)) docs[i].push_back(*pos);
    std::optional<topic_model> model;
    try {
        model = train(docs, vocab.size(), lda_cfg);
    } catch (const empty_corpus_error& e) {
        detail::log_line(opts, "WARN", std::string("analyze: lda: ") + e.what());
    }

    std::map<std::string, std::string> outlet_names;
    for (const auto& o : cfg.outlets) outlet_names[o.id] = o.name;
    std::set<std::string> slugs = st.post_slugs();

    for (auto& cluster : clusters) {
        std::vector<article> members;
        std::vector<std::string> summaries;
        std::vector<std::size_t> member_window_indices;
        surface_registry surfaces;
        for (const auto& hash : cluster.member_ids) {
            const article& a = *batch_by_hash.at(hash);
            members.push_back(a);
            summaries.push_back(summarize_article(a, 3, 400));
            member_window_indices.push_back(window_index.at(hash));
            for (const auto& surface :
                 remove_stopwords(tokenize(doc_text(a)), stopset))
                surfaces.observe(stem_spanish(surface), surface);
        }
        cluster.label_terms =
            label_cluster(cluster, vocab, surfaces, cfg.cluster.max_label_terms);
        std::vector<std::string> tags;
        if (model)
            tags = assign_tags(*model, member_window_indices, vocab);
        blog_post post = compose_post(cluster, members, summaries, tags,
                                      date_of(opts.now), outlet_names, slugs);
        slugs.insert(post.slug);
        state.posts.push_back(std::move(post));
    }

    if (!opts.dry_run) {
        std::string lines;
        for (const auto& p : state.posts) lines += post_to_json(p).dump() + "\n";
        detail::write_file(detail::pending_posts_path(cfg), lines);
        detail::save_pending_run(cfg, state.record);
    }
    detail::log_line(opts, "INFO",
                     "analyze done: clusters=" +
                         std::to_string(state.record.counts.clusters));
}

// -- stage 3: publish ---------------------------------------------------------
//
// Publish pending posts through the filesystem backend, re-render the site,
// finalize the run record.
inline run_record stage_publish(const config& cfg, const pipeline_options& opts,
                                store& st, pipeline_state& state) {
    if (state.standalone) {
        state.record = detail::load_pending_run(cfg, opts);
        state.posts.clear();
        detail::read_ndjson(detail::pending_posts_path(cfg), [&](const json& j) {
            state.posts.push_back(post_from_json(j));
        });
    }
    state.record.counts.posts_published =
        static_cast<std::int64_t>(state.posts.size());

    if (!opts.dry_run) {
        backend_config backend;
        backend.kind = publish_backend::filesystem;
        backend.out_dir = cfg.out_dir;
        for (const auto& post : state.posts) {
            publish_receipt r = publish(post, backend, opts.now);
            detail::log_line(opts, "INFO", "published " + r.location);
        }
        st.append_posts(state.posts);
        render_site(st.load_posts(), cfg.out_dir);
        st.record_run(state.record);
        std::error_code ec;
        std::filesystem::remove(detail::pending_articles_path(cfg), ec);
        std::filesystem::remove(detail::pending_posts_path(cfg), ec);
        std::filesystem::remove(detail::pending_run_path(cfg), ec);
    }
    detail::log_line(opts, "INFO",
                     "publish done: posts=" +
                         std::to_string(state.record.counts.posts_published));
    return state.record;
}

// Full pipeline: fetch -> analyze -> publish, one store lock for the run.
inline run_record run_pipeline(const config& cfg, const pipeline_options& opts) {
    store st(cfg.data_dir, !opts.dry_run);
    store_lock lock;
    if (!opts.dry_run) lock = st.acquire_lock();
    pipeline_state state;
    state.standalone = false;
    stage_fetch(cfg, opts, st, state);
    stage_analyze(cfg, opts, st, state);
    return stage_publish(cfg, opts, st, state);
}

}  // namespace cadejo
