#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cadejo/cluster.hpp"
#include "cadejo/errors.hpp"
#include "cadejo/http.hpp"
#include "cadejo/model.hpp"
#include "cadejo/time.hpp"
#include "cadejo/unicode.hpp"

namespace cadejo {

struct post_section {
    std::string outlet_name;
    std::string article_title;
    std::string summary;
    std::string source_url;
};

struct blog_post {
    std::string slug;  // [a-z0-9-]+, unique per site
    std::string title;
    utc_date date{};
    std::vector<post_section> sections;
    std::vector<std::string> tags;
};

enum class publish_backend { filesystem, http };

struct publish_receipt {
    publish_backend backend{};
    std::string location;  // path or URL
    utc_seconds published_at{};
};

struct backend_config {
    publish_backend kind = publish_backend::filesystem;
    std::filesystem::path out_dir;  // filesystem backend
    std::string endpoint_url;       // http backend
    std::string bearer_token;       // http backend, from CADEJO_BLOG_TOKEN
};

// -- slugs -------------------------------------------------------------

inline std::string slugify(std::string_view text) {
    std::string out;
    bool dash_pending = false;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = decode_utf8(text, i);
        std::string t = ascii_translit(cp);
        bool wrote = false;
        for (char c : t) {
            if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
                if (dash_pending && !out.empty()) out.push_back('-');
                dash_pending = false;
                out.push_back(c);
                wrote = true;
            }
        }
        if (!wrote) dash_pending = true;
    }
    return out;
}

// -- post composition --------------------------------------------------

// One digest post per story cluster: title from the cluster labels, one
// section per article with its summary and source link.
inline blog_post compose_post(const story_cluster& cluster,
                              const std::vector<article>& articles,
                              const std::vector<std::string>& summaries,
                              const std::vector<std::string>& tags,
                              utc_date date,
                              const std::map<std::string, std::string>& outlet_names,
                              const std::set<std::string>& existing_slugs) {
    if (articles.size() != summaries.size() ||
        articles.size() != cluster.member_ids.size())
        throw alignment_error("articles/summaries/cluster members disagree: " +
                              std::to_string(articles.size()) + "/" +
                              std::to_string(summaries.size()) + "/" +
                              std::to_string(cluster.member_ids.size()));
    if (articles.empty()) throw alignment_error("empty cluster");

    blog_post post;
    post.date = date;
    post.tags = tags;

    if (!cluster.label_terms.empty()) {
        for (const auto& term : cluster.label_terms) {
            if (!post.title.empty()) post.title += " · ";
            post.title += term;
        }
    } else {
        post.title = articles.front().title;
    }

    struct keyed {
        const article* art;
        const std::string* summary;
    };
    std::vector<keyed> rows;
    rows.reserve(articles.size());
    for (std::size_t i = 0; i < articles.size(); ++i)
        rows.push_back({&articles[i], &summaries[i]});
    std::sort(rows.begin(), rows.end(), [](const keyed& a, const keyed& b) {
        if (a.art->outlet_id != b.art->outlet_id)
            return a.art->outlet_id < b.art->outlet_id;
        return a.art->title < b.art->title;
    });
    for (const auto& row : rows) {
        post_section s;
        auto it = outlet_names.find(row.art->outlet_id);
        s.outlet_name = (it != outlet_names.end()) ? it->second : row.art->outlet_id;
        s.article_title = row.art->title;
        s.summary = *row.summary;
        s.source_url = row.art->url;
        post.sections.push_back(std::move(s));
    }

    std::string base = format_date(date) + "-" + slugify(post.title);
    if (base.size() > 80) {
        base.resize(80);
        while (!base.empty() && base.back() == '-') base.pop_back();
    }
    std::string slug = base;
    for (int n = 2; existing_slugs.count(slug); ++n)
        slug = base + "-" + std::to_string(n);
    post.slug = slug;
    return post;
}

// -- rendering ----------------------------------------------------------

inline std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace detail {

inline const char* kSiteStyle =
    "body{font-family:Georgia,serif;max-width:46em;margin:2em auto;"
    "padding:0 1em;color:#222}h1{font-size:1.5em}blockquote{margin:0.5em 0;"
    "padding:0.5em 1em;border-left:3px solid #999;background:#f7f7f7}"
    "ul.tags{list-style:none;padding:0}ul.tags li{display:inline;"
    "margin-right:0.8em}footer{margin-top:3em;font-size:0.85em;color:#666}";

inline std::string render_article_fragment(const blog_post& post,
                                           const std::string& tag_href_prefix) {
    std::string h;
    h += "<article>\n";
    h += "<h1>" + html_escape(post.title) + "</h1>\n";
    h += "<p class=\"date\"><time datetime=\"" + format_date(post.date) + "\">" +
         format_date(post.date) + "</time></p>\n";
    for (const auto& s : post.sections) {
        h += "<section>\n";
        h += "<h2>" + html_escape(s.article_title) + "</h2>\n";
        h += "<blockquote>" + html_escape(s.summary) + "</blockquote>\n";
        h += "<p><cite><a href=\"" + html_escape(s.source_url) + "\">" +
             html_escape(s.outlet_name) + "</a></cite></p>\n";
        h += "</section>\n";
    }
    if (!post.tags.empty()) {
        h += "<ul class=\"tags\">\n";
        for (const auto& t : post.tags)
            h += "<li><a href=\"" + tag_href_prefix + slugify(t) + ".html\">" +
                 html_escape(t) + "</a></li>\n";
        h += "</ul>\n";
    }
    h += "</article>\n";
    return h;
}

inline std::string render_page(const std::string& title, const std::string& body) {
    std::string h;
    h += "<!DOCTYPE html>\n<html lang=\"es\">\n<head>\n<meta charset=\"utf-8\"/>\n";
    h += "<title>" + html_escape(title) + "</title>\n";
    h += "<style>" + std::string(kSiteStyle) + "</style>\n";
    h += "</head>\n<body>\n";
    h += body;
    h += "</body>\n</html>\n";
    return h;
}

}  // namespace detail

// Deterministic, self-contained HTML5 document for one post.
inline std::string render_post(const blog_post& post) {
    return detail::render_page(post.title,
                               detail::render_article_fragment(post, "../tags/"));
}

namespace detail {

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("short write to " + path.string());
}

inline std::string post_list_items(const std::vector<const blog_post*>& posts,
                                   const std::string& post_href_prefix) {
    std::string h = "<ul class=\"posts\">\n";
    for (const blog_post* p : posts) {
        h += "<li><time datetime=\"" + format_date(p->date) + "\">" +
             format_date(p->date) + "</time> <a href=\"" + post_href_prefix +
             p->slug + ".html\">" + html_escape(p->title) + "</a></li>\n";
    }
    h += "</ul>\n";
    return h;
}

}  // namespace detail

// Renders the whole static site: post pages, a reverse-chronological index
// (latest 20), per-month archive pages and per-tag pages. Managed entries
// under out_dir are staged first and swapped in, so a crash mid-render never
// leaves a half-written site. Returns the sorted manifest of relative paths.
inline std::vector<std::string> render_site(const std::vector<blog_post>& posts,
                                            const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create " + out_dir.string());
    fs::path staging = out_dir / ".staging";
    fs::remove_all(staging, ec);
    fs::create_directories(staging / "posts");
    fs::create_directories(staging / "archive");
    fs::create_directories(staging / "tags");

    std::vector<std::string> manifest;

    std::vector<const blog_post*> ordered;
    ordered.reserve(posts.size());
    for (const auto& p : posts) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(),
              [](const blog_post* a, const blog_post* b) {
                  if (a->date != b->date)
                      return std::chrono::sys_days(a->date) > std::chrono::sys_days(b->date);
                  return a->slug < b->slug;
              });

    for (const blog_post* p : ordered) {
        detail::write_file(staging / "posts" / (p->slug + ".html"), render_post(*p));
        manifest.push_back("posts/" + p->slug + ".html");
    }

    // month pages
    std::map<std::string, std::vector<const blog_post*>> months;  // "yyyy/mm"
    for (const blog_post* p : ordered) {
        char key[8];
        std::snprintf(key, sizeof(key), "%04d/%02u", int(p->date.year()),
                      unsigned(p->date.month()));
        months[key].push_back(p);
    }
    for (const auto& [key, list] : months) {
        fs::path dir = staging / "archive" / key.substr(0, 4);
        fs::create_directories(dir);
        std::string body = "<h1>Archivo " + key + "</h1>\n" +
                           detail::post_list_items(list, "../../posts/");
        body += "<footer><a href=\"../../index.html\">Inicio</a></footer>\n";
        detail::write_file(dir / (key.substr(5) + ".html"),
                           detail::render_page("Archivo " + key, body));
        manifest.push_back("archive/" + key + ".html");
    }

    // tag pages, grouped by slug so near-identical tags share one page
    std::map<std::string, std::pair<std::string, std::vector<const blog_post*>>> tags;
    for (const blog_post* p : ordered) {
        for (const auto& t : p->tags) {
            std::string slug = slugify(t);
            if (slug.empty()) continue;
            auto& entry = tags[slug];
            if (entry.first.empty() || t < entry.first) entry.first = t;
            entry.second.push_back(p);
        }
    }
    for (const auto& [slug, entry] : tags) {
        std::string body = "<h1>Etiqueta: " + html_escape(entry.first) + "</h1>\n" +
                           detail::post_list_items(entry.second, "../posts/");
        body += "<footer><a href=\"../index.html\">Inicio</a></footer>\n";
        detail::write_file(staging / "tags" / (slug + ".html"),
                           detail::render_page("Etiqueta: " + entry.first, body));
        manifest.push_back("tags/" + slug + ".html");
    }

    // index: newest 20
    {
        std::vector<const blog_post*> latest(
            ordered.begin(),
            ordered.begin() + std::min<std::size_t>(ordered.size(), 20));
        std::string body = "<h1>Resumen de noticias</h1>\n";
        body += detail::post_list_items(latest, "posts/");
        if (!months.empty()) {
            body += "<footer>Archivo: ";
            bool first = true;
            for (const auto& [key, _] : months) {
                if (!first) body += " · ";
                first = false;
                body += "<a href=\"archive/" + key + ".html\">" + key + "</a>";
            }
            body += "</footer>\n";
        }
        detail::write_file(staging / "index.html",
                           detail::render_page("Resumen de noticias", body));
        manifest.push_back("index.html");
    }

    // swap staged content into place
    for (const char* name : {"posts", "archive", "tags"}) {
        fs::remove_all(out_dir / name, ec);
        fs::rename(staging / name, out_dir / name, ec);
        if (ec) throw io_error("cannot move " + (staging / name).string());
    }
    fs::remove(out_dir / "index.html", ec);
    fs::rename(staging / "index.html", out_dir / "index.html", ec);
    if (ec) throw io_error("cannot move index.html");
    fs::remove_all(staging, ec);

    std::sort(manifest.begin(), manifest.end());
    return manifest;
}

// -- publish backends ----------------------------------------------------

inline std::string atom_entry_xml(const blog_post& post) {
    std::string xml;
    xml += "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
    xml += "<entry xmlns=\"http://www.w3.org/2005/Atom\">\n";
    xml += "  <title type=\"text\">" + html_escape(post.title) + "</title>\n";
    xml += "  <content type=\"html\">" +
           html_escape(detail::render_article_fragment(post, "tags/")) +
           "</content>\n";
    for (const auto& t : post.tags)
        xml += "  <category term=\"" + html_escape(t) + "\"/>\n";
    xml += "  <updated>" + format_date(post.date) + "T00:00:00Z</updated>\n";
    xml += "</entry>\n";
    return xml;
}

inline publish_receipt publish(const blog_post& post, const backend_config& cfg,
                               utc_seconds now) {
    publish_receipt receipt;
    receipt.backend = cfg.kind;
    receipt.published_at = now;
    if (cfg.kind == publish_backend::filesystem) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(cfg.out_dir / "posts", ec);
        if (ec) throw io_error("cannot create " + (cfg.out_dir / "posts").string());
        fs::path path = cfg.out_dir / "posts" / (post.slug + ".html");
        detail::write_file(path, render_post(post));
        receipt.location = path.string();
        return receipt;
    }

    auto parts = parse_url(cfg.endpoint_url);
    if (!parts) throw http_publish_error(0, "bad endpoint URL " + cfg.endpoint_url);
    httplib::Client cli(parts->origin());
    cli.set_follow_location(true);
    httplib::Headers headers;
    if (!cfg.bearer_token.empty())
        headers.emplace("Authorization", "Bearer " + cfg.bearer_token);
    auto res = cli.Post(parts->path.empty() ? "/" : parts->path, headers,
                        atom_entry_xml(post), "application/atom+xml;type=entry");
    if (!res) throw http_publish_error(0, httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw http_publish_error(res->status, res->body.substr(0, 200));
    receipt.location = res->get_header_value("Location");
    if (receipt.location.empty()) receipt.location = cfg.endpoint_url;
    return receipt;
}

// -- serialization (posts log) --------------------------------------------

inline json post_to_json(const blog_post& p) {
    json j;
    j["slug"] = p.slug;
    j["title"] = p.title;
    j["date"] = format_date(p.date);
    json sections = json::array();
    for (const auto& s : p.sections) {
        json js;
        js["outlet_name"] = s.outlet_name;
        js["article_title"] = s.article_title;
        js["summary"] = s.summary;
        js["source_url"] = s.source_url;
        sections.push_back(std::move(js));
    }
    j["sections"] = std::move(sections);
    j["tags"] = p.tags;
    return j;
}

inline blog_post post_from_json(const json& j) {
    blog_post p;
    p.slug = j.at("slug").get<std::string>();
    p.title = j.at("title").get<std::string>();
    std::string date = j.at("date").get<std::string>();
    auto t = parse_rfc3339(date + "T00:00:00Z");
    if (!t) throw error("bad post date " + date);
    p.date = date_of(*t);
    for (const auto& js : j.at("sections")) {
        post_section s;
        s.outlet_name = js.at("outlet_name").get<std::string>();
        s.article_title = js.at("article_title").get<std::string>();
        s.summary = js.at("summary").get<std::string>();
        s.source_url = js.at("source_url").get<std::string>();
        p.sections.push_back(std::move(s));
    }
    p.tags = j.at("tags").get<std::vector<std::string>>();
    return p;
}

}  // namespace cadejo
