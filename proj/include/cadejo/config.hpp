#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cadejo/cluster.hpp"
#include "cadejo/errors.hpp"
#include "cadejo/html.hpp"
#include "cadejo/http.hpp"
#include "cadejo/lda.hpp"
#include "cadejo/model.hpp"
#include "cadejo/sha256.hpp"
#include "cadejo/textproc.hpp"
#include "cadejo/url.hpp"

namespace cadejo {

struct config {
    std::vector<outlet_config> outlets;
    fetch_policy fetch;
    cluster_params cluster;
    lda_config lda;
    std::size_t window_days = 30;
    std::filesystem::path out_dir;
    std::filesystem::path data_dir;
    std::optional<std::filesystem::path> stopword_file;
};

namespace detail {

inline std::string jpath(const std::string& base, const std::string& field) {
    return base.empty() ? field : base + "." + field;
}

inline const json* opt_field(const json& j, const std::string& field) {
    auto it = j.find(field);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline std::string want_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw config_error(path, "expected a string");
    return j.get<std::string>();
}

inline double want_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path, "expected a number");
    return j.get<double>();
}

inline std::int64_t want_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw config_error(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline void check_selector(const std::string& text, const std::string& path) {
    if (!html::is_valid_selector(text))
        throw config_error(path, "invalid selector '" + text + "'");
}

inline extraction_rules parse_rules(const json& j, const std::string& path) {
    extraction_rules r;
    if (const json* t = opt_field(j, "title_selector")) {
        r.title_selector = want_string(*t, jpath(path, "title_selector"));
        check_selector(*r.title_selector, jpath(path, "title_selector"));
    }
    if (const json* b = opt_field(j, "body_selector")) {
        r.body_selector = want_string(*b, jpath(path, "body_selector"));
        check_selector(*r.body_selector, jpath(path, "body_selector"));
    }
    if (const json* s = opt_field(j, "strip_selectors")) {
        if (!s->is_array())
            throw config_error(jpath(path, "strip_selectors"), "expected an array");
        r.strip_selectors.clear();
        std::size_t i = 0;
        for (const auto& item : *s) {
            auto p = jpath(path, "strip_selectors[" + std::to_string(i++) + "]");
            auto sel = want_string(item, p);
            check_selector(sel, p);
            r.strip_selectors.push_back(sel);
        }
    }
    return r;
}

}  // namespace detail

// Parses and fully validates a configuration file. Relative out_dir /
// data_dir / stopword_file paths resolve against the config file's
// directory.
inline config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path.string(), "cannot open file");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw config_error(path.string(), "not valid JSON");
    if (!j.is_object()) throw config_error(path.string(), "expected a JSON object");

    using detail::jpath;
    using detail::opt_field;
    using detail::want_int;
    using detail::want_number;
    using detail::want_string;

    config cfg;
    const auto base_dir = path.has_parent_path()
                              ? path.parent_path()
                              : std::filesystem::path(".");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base_dir / fp;
    };

    const json* outlets = opt_field(j, "outlets");
    if (!outlets || !outlets->is_array() || outlets->empty())
        throw config_error("outlets", "at least one outlet required");
    std::unordered_set<std::string> ids;
    std::size_t idx = 0;
    for (const auto& jo : *outlets) {
        std::string opath = "outlets[" + std::to_string(idx++) + "]";
        if (!jo.is_object()) throw config_error(opath, "expected an object");
        outlet_config o;
        const json* id = opt_field(jo, "id");
        if (!id) throw config_error(jpath(opath, "id"), "required");
        o.id = want_string(*id, jpath(opath, "id"));
        if (o.id.empty()) throw config_error(jpath(opath, "id"), "must be non-empty");
        if (!ids.insert(o.id).second)
            throw config_error(jpath(opath, "id"), "duplicate");
        if (const json* n = opt_field(jo, "name"))
            o.name = want_string(*n, jpath(opath, "name"));
        else
            o.name = o.id;
        const json* feed = opt_field(jo, "feed_url");
        if (!feed) throw config_error(jpath(opath, "feed_url"), "required");
        o.feed_url = want_string(*feed, jpath(opath, "feed_url"));
        if (!is_valid_absolute_url(o.feed_url))
            throw config_error(jpath(opath, "feed_url"),
                               "not a valid absolute http(s) URL");
        if (const json* r = opt_field(jo, "extraction_rules"))
            o.rules = detail::parse_rules(*r, jpath(opath, "extraction_rules"));
        if (const json* l = opt_field(jo, "leaning_note"))
            o.leaning_note = want_string(*l, jpath(opath, "leaning_note"));
        cfg.outlets.push_back(std::move(o));
    }

    if (const json* f = opt_field(j, "fetch")) {
        if (const json* v = opt_field(*f, "timeout_s")) {
            cfg.fetch.timeout_s = want_number(*v, "fetch.timeout_s");
            if (cfg.fetch.timeout_s <= 0)
                throw config_error("fetch.timeout_s", "must be > 0");
        }
        if (const json* v = opt_field(*f, "max_retries")) {
            auto n = want_int(*v, "fetch.max_retries");
            if (n < 0) throw config_error("fetch.max_retries", "must be >= 0");
            cfg.fetch.max_retries = static_cast<int>(n);
        }
        if (const json* v = opt_field(*f, "retry_backoff_s")) {
            cfg.fetch.retry_backoff_s = want_number(*v, "fetch.retry_backoff_s");
            if (cfg.fetch.retry_backoff_s < 0)
                throw config_error("fetch.retry_backoff_s", "must be >= 0");
        }
        if (const json* v = opt_field(*f, "max_body_bytes")) {
            auto n = want_int(*v, "fetch.max_body_bytes");
            if (n <= 0) throw config_error("fetch.max_body_bytes", "must be > 0");
            cfg.fetch.max_body_bytes = static_cast<std::size_t>(n);
        }
        if (const json* v = opt_field(*f, "user_agent"))
            cfg.fetch.user_agent = want_string(*v, "fetch.user_agent");
    }

    if (const json* c = opt_field(j, "cluster")) {
        if (const json* v = opt_field(*c, "tau")) {
            cfg.cluster.tau = want_number(*v, "cluster.tau");
            if (cfg.cluster.tau <= 0.0 || cfg.cluster.tau >= 1.0)
                throw config_error("cluster.tau", "out of range (0,1)");
        }
        if (const json* v = opt_field(*c, "min_cluster_size")) {
            auto n = want_int(*v, "cluster.min_cluster_size");
            if (n < 1) throw config_error("cluster.min_cluster_size", "must be >= 1");
            cfg.cluster.min_cluster_size = static_cast<std::size_t>(n);
        }
        if (const json* v = opt_field(*c, "max_label_terms")) {
            auto n = want_int(*v, "cluster.max_label_terms");
            if (n < 1) throw config_error("cluster.max_label_terms", "must be >= 1");
            cfg.cluster.max_label_terms = static_cast<std::size_t>(n);
        }
    }

    if (const json* l = opt_field(j, "lda")) {
        if (const json* v = opt_field(*l, "topics")) {
            auto n = want_int(*v, "lda.topics");
            if (n < 1) throw config_error("lda.topics", "must be >= 1");
            cfg.lda.topics = static_cast<std::size_t>(n);
        }
        if (const json* v = opt_field(*l, "alpha")) {
            cfg.lda.alpha = want_number(*v, "lda.alpha");
            if (cfg.lda.alpha <= 0) throw config_error("lda.alpha", "must be > 0");
        }
        if (const json* v = opt_field(*l, "beta")) {
            cfg.lda.beta = want_number(*v, "lda.beta");
            if (cfg.lda.beta <= 0) throw config_error("lda.beta", "must be > 0");
        }
        if (const json* v = opt_field(*l, "sweeps"))
            cfg.lda.sweeps = static_cast<std::size_t>(want_int(*v, "lda.sweeps"));
        if (const json* v = opt_field(*l, "burn_in"))
            cfg.lda.burn_in = static_cast<std::size_t>(want_int(*v, "lda.burn_in"));
        if (cfg.lda.sweeps < cfg.lda.burn_in)
            throw config_error("lda.burn_in", "must be <= lda.sweeps");
        if (const json* v = opt_field(*l, "seed"))
            cfg.lda.seed = static_cast<std::uint64_t>(want_int(*v, "lda.seed"));
    }

    if (const json* v = opt_field(j, "window_days")) {
        auto n = want_int(*v, "window_days");
        if (n < 1) throw config_error("window_days", "must be >= 1");
        cfg.window_days = static_cast<std::size_t>(n);
    }

    const json* out_dir = opt_field(j, "out_dir");
    if (!out_dir) throw config_error("out_dir", "required");
    cfg.out_dir = resolve(want_string(*out_dir, "out_dir"));
    const json* data_dir = opt_field(j, "data_dir");
    if (!data_dir) throw config_error("data_dir", "required");
    cfg.data_dir = resolve(want_string(*data_dir, "data_dir"));
    if (std::filesystem::weakly_canonical(cfg.out_dir) ==
        std::filesystem::weakly_canonical(cfg.data_dir))
        throw config_error("out_dir", "must differ from data_dir");

    if (const json* v = opt_field(j, "stopword_file")) {
        cfg.stopword_file = resolve(want_string(*v, "stopword_file"));
        if (!std::filesystem::exists(*cfg.stopword_file))
            throw config_error("stopword_file",
                               "file not found: " + cfg.stopword_file->string());
    }
    return cfg;
}

inline std::unordered_set<std::string> config_stopwords(const config& cfg) {
    if (!cfg.stopword_file) return default_stopwords();
    std::ifstream in(*cfg.stopword_file);
    if (!in) throw io_error("cannot read " + cfg.stopword_file->string());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return parse_stopword_list(content);
}

// Canonical serialization of the effective config (defaults applied); its
// digest identifies the configuration in run records.
inline json config_to_json(const config& cfg) {
    json j;
    json outlets = json::array();
    for (const auto& o : cfg.outlets) {
        json jo;
        jo["id"] = o.id;
        jo["name"] = o.name;
        jo["feed_url"] = o.feed_url;
        json rules;
        rules["title_selector"] =
            o.rules.title_selector ? json(*o.rules.title_selector) : json(nullptr);
        rules["body_selector"] =
            o.rules.body_selector ? json(*o.rules.body_selector) : json(nullptr);
        rules["strip_selectors"] = o.rules.strip_selectors;
        jo["extraction_rules"] = std::move(rules);
        jo["leaning_note"] = o.leaning_note;
        outlets.push_back(std::move(jo));
    }
    j["outlets"] = std::move(outlets);
    j["fetch"] = {{"timeout_s", cfg.fetch.timeout_s},
                  {"max_retries", cfg.fetch.max_retries},
                  {"retry_backoff_s", cfg.fetch.retry_backoff_s},
                  {"max_body_bytes", cfg.fetch.max_body_bytes},
                  {"user_agent", cfg.fetch.user_agent}};
    j["cluster"] = {{"tau", cfg.cluster.tau},
                    {"min_cluster_size", cfg.cluster.min_cluster_size},
                    {"max_label_terms", cfg.cluster.max_label_terms}};
    j["lda"] = {{"topics", cfg.lda.topics},
                {"alpha", cfg.lda.effective_alpha()},
                {"beta", cfg.lda.beta},
                {"sweeps", cfg.lda.sweeps},
                {"burn_in", cfg.lda.burn_in},
                {"seed", cfg.lda.seed}};
    j["window_days"] = cfg.window_days;
    j["out_dir"] = cfg.out_dir.string();
    j["data_dir"] = cfg.data_dir.string();
    j["stopword_file"] =
        cfg.stopword_file ? json(cfg.stopword_file->string()) : json(nullptr);
    return j;
}

inline std::string config_hash_hex(const config& cfg) {
    return sha256_hex(config_to_json(cfg).dump());
}

}  // namespace cadejo
