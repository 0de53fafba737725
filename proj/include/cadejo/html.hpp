#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cadejo/entities.hpp"
#include "cadejo/errors.hpp"
#include "cadejo/model.hpp"
#include "cadejo/unicode.hpp"

namespace cadejo::html {

// Tag-soup tolerant HTML parser plus the title/body extraction heuristics.
// The parser never throws on malformed markup: unknown constructs are
// skipped, stray close tags ignored, unclosed elements closed at EOF.

struct element {
    std::string tag;   // empty => text node
    std::string text;  // text nodes only
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<element> children;

    bool is_text() const { return tag.empty(); }

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }

    std::string text_content() const {
        std::string out;
        append_text(out);
        return out;
    }

private:
    void append_text(std::string& out) const {
        if (is_text()) {
            out += text;
            return;
        }
        for (const auto& c : children) c.append_text(out);
    }
};

namespace detail {

inline const char* const kVoidTags[] = {"area",  "base",   "br",    "col",
                                        "embed", "hr",     "img",   "input",
                                        "link",  "meta",   "param", "source",
                                        "track", "wbr"};

inline bool is_void_tag(std::string_view t) {
    for (const char* v : kVoidTags)
        if (t == v) return true;
    return false;
}

inline bool is_raw_text_tag(std::string_view t) {
    return t == "script" || t == "style" || t == "textarea" || t == "title";
}

// block-level boundaries for paragraph splitting
inline bool is_block_tag(std::string_view t) {
    static const char* const tags[] = {
        "address", "article", "aside",      "blockquote", "br",   "caption",
        "dd",      "div",     "dl",         "dt",         "faq",  "fieldset",
        "figcaption", "figure", "footer",   "form",       "h1",   "h2",
        "h3",      "h4",      "h5",         "h6",         "header", "hr",
        "li",      "main",    "nav",        "ol",         "p",    "pre",
        "section", "table",   "tbody",      "td",         "tfoot", "th",
        "thead",   "tr",      "ul"};
    for (const char* v : tags)
        if (t == v) return true;
    return false;
}

inline std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

class soup_parser {
public:
    explicit soup_parser(std::string_view input) : s_(input) {}

    element parse() {
        element root;
        root.tag = "#document";
        stack_.push_back(&root);
        while (i_ < s_.size()) step();
        flush_text();
        return root;
    }

private:
    static constexpr std::size_t kMaxDepth = 256;

    element& current() { return *stack_.back(); }

    void flush_text() {
        if (pending_text_.empty()) return;
        element t;
        t.text = decode_entities(pending_text_);
        current().children.push_back(std::move(t));
        pending_text_.clear();
    }

    void step() {
        if (s_[i_] != '<') {
            pending_text_.push_back(s_[i_++]);
            return;
        }
        if (starts_with("<!--")) {
            auto end = s_.find("-->", i_ + 4);
            i_ = (end == std::string_view::npos) ? s_.size() : end + 3;
            return;
        }
        if (starts_with("<!") || starts_with("<?")) {
            auto end = s_.find('>', i_ + 2);
            i_ = (end == std::string_view::npos) ? s_.size() : end + 1;
            return;
        }
        if (starts_with("</")) {
            std::size_t j = i_ + 2;
            std::string name = read_name(j);
            auto end = s_.find('>', j);
            i_ = (end == std::string_view::npos) ? s_.size() : end + 1;
            if (!name.empty()) close_tag(name);
            return;
        }
        if (i_ + 1 < s_.size() &&
            (std::isalpha(static_cast<unsigned char>(s_[i_ + 1])))) {
            open_tag();
            return;
        }
        // lone '<' is text
        pending_text_.push_back(s_[i_++]);
    }

    bool starts_with(std::string_view p) const {
        return s_.compare(i_, p.size(), p) == 0;
    }

    std::string read_name(std::size_t& j) const {
        std::size_t start = j;
        while (j < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '-' ||
                s_[j] == '_' || s_[j] == ':'))
            ++j;
        return lower_ascii(s_.substr(start, j - start));
    }

    void open_tag() {
        std::size_t j = i_ + 1;
        std::string name = read_name(j);
        element el;
        el.tag = name;
        bool self_closing = false;
        // attributes
        while (j < s_.size() && s_[j] != '>') {
            if (s_[j] == '/' && j + 1 < s_.size() && s_[j + 1] == '>') {
                self_closing = true;
                ++j;
                break;
            }
            if (std::isspace(static_cast<unsigned char>(s_[j]))) {
                ++j;
                continue;
            }
            std::size_t astart = j;
            while (j < s_.size() && s_[j] != '=' && s_[j] != '>' && s_[j] != '/' &&
                   !std::isspace(static_cast<unsigned char>(s_[j])))
                ++j;
            if (j == astart) {
                ++j;
                continue;
            }
            std::string key = lower_ascii(s_.substr(astart, j - astart));
            std::string value;
            while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
            if (j < s_.size() && s_[j] == '=') {
                ++j;
                while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
                if (j < s_.size() && (s_[j] == '"' || s_[j] == '\'')) {
                    char q = s_[j++];
                    std::size_t vstart = j;
                    while (j < s_.size() && s_[j] != q) ++j;
                    value = std::string(s_.substr(vstart, j - vstart));
                    if (j < s_.size()) ++j;
                } else {
                    std::size_t vstart = j;
                    while (j < s_.size() && s_[j] != '>' &&
                           !std::isspace(static_cast<unsigned char>(s_[j])))
                        ++j;
                    value = std::string(s_.substr(vstart, j - vstart));
                }
            }
            el.attrs.emplace_back(std::move(key), decode_entities(value));
        }
        i_ = (j >= s_.size()) ? s_.size() : j + 1;

        flush_text();
        implicit_close(name);

        if (is_raw_text_tag(name) && !self_closing) {
            std::string close = "</" + name;
            std::size_t end = find_ci(close);
            std::string raw(s_.substr(i_, (end == std::string_view::npos ? s_.size() : end) - i_));
            if (name == "title" || name == "textarea") {
                element t;
                t.text = decode_entities(raw);
                el.children.push_back(std::move(t));
            } else if (!raw.empty()) {
                element t;
                t.text = std::move(raw);  // script/style content kept verbatim
                el.children.push_back(std::move(t));
            }
            if (end == std::string_view::npos) {
                i_ = s_.size();
            } else {
                auto gt = s_.find('>', end);
                i_ = (gt == std::string_view::npos) ? s_.size() : gt + 1;
            }
            current().children.push_back(std::move(el));
            return;
        }

        if (self_closing || is_void_tag(name) || stack_.size() >= kMaxDepth) {
            current().children.push_back(std::move(el));
            return;
        }
        current().children.push_back(std::move(el));
        stack_.push_back(&current().children.back());
    }

    // html5-ish auto-closing for list/paragraph/table soup
    void implicit_close(const std::string& name) {
        auto top_is = [&](std::string_view t) {
            return stack_.size() > 1 && current().tag == t;
        };
        if (name == "li") {
            if (top_is("li")) pop();
        } else if (name == "td" || name == "th") {
            if (top_is("td") || top_is("th")) pop();
        } else if (name == "tr") {
            while (top_is("td") || top_is("th") || top_is("tr")) pop();
        } else if (name == "option") {
            if (top_is("option")) pop();
        } else if (is_block_tag(name) && name != "br") {
            if (top_is("p")) pop();
        }
    }

    void pop() {
        flush_text();
        stack_.pop_back();
    }

    void close_tag(const std::string& name) {
        // find matching open element; ignore stray close tags
        for (std::size_t k = stack_.size(); k-- > 1;) {
            if (stack_[k]->tag == name) {
                flush_text();
                stack_.resize(k);
                return;
            }
        }
    }

    std::size_t find_ci(const std::string& needle) const {
        for (std::size_t k = i_; k + needle.size() <= s_.size(); ++k) {
            bool hit = true;
            for (std::size_t m = 0; m < needle.size(); ++m) {
                if (std::tolower(static_cast<unsigned char>(s_[k + m])) !=
                    std::tolower(static_cast<unsigned char>(needle[m]))) {
                    hit = false;
                    break;
                }
            }
            if (hit) return k;
        }
        return std::string_view::npos;
    }

    std::string_view s_;
    std::size_t i_ = 0;
    std::string pending_text_;
    std::vector<element*> stack_;
};

}  // namespace detail

inline element parse(std::string_view text) {
    return detail::soup_parser(text).parse();
}

// -- selectors -------------------------------------------------------------

// CSS subset: tag, #id, .class compounds chained by descendant combinator.
struct simple_selector {
    std::string tag;  // empty = any
    std::string id;
    std::vector<std::string> classes;
};

using selector = std::vector<simple_selector>;

inline selector parse_selector(std::string_view text) {
    selector sel;
    std::size_t i = 0;
    auto read_ident = [&]() {
        std::size_t start = i;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) ||
                text[i] == '-' || text[i] == '_'))
            ++i;
        return std::string(text.substr(start, i - start));
    };
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        simple_selector simple;
        bool any = false;
        for (;;) {
            if (i < text.size() && text[i] == '#') {
                ++i;
                simple.id = read_ident();
                if (simple.id.empty()) throw extraction_error("selector: empty #id");
                any = true;
            } else if (i < text.size() && text[i] == '.') {
                ++i;
                auto cls = read_ident();
                if (cls.empty()) throw extraction_error("selector: empty .class");
                simple.classes.push_back(cls);
                any = true;
            } else if (i < text.size() &&
                       std::isalnum(static_cast<unsigned char>(text[i]))) {
                if (!simple.tag.empty() || any) break;
                simple.tag = detail::lower_ascii(read_ident());
                any = true;
            } else {
                break;
            }
        }
        if (!any)
            throw extraction_error("selector: unexpected character '" +
                                   std::string(1, text[i]) + "'");
        sel.push_back(std::move(simple));
    }
    if (sel.empty()) throw extraction_error("selector: empty expression");
    return sel;
}

inline bool is_valid_selector(std::string_view text) {
    try {
        parse_selector(text);
        return true;
    } catch (const extraction_error&) {
        return false;
    }
}

namespace detail {

inline bool matches_simple(const element& el, const simple_selector& s) {
    if (el.is_text()) return false;
    if (!s.tag.empty() && el.tag != s.tag) return false;
    if (!s.id.empty()) {
        const std::string* id = el.attr("id");
        if (!id || *id != s.id) return false;
    }
    if (!s.classes.empty()) {
        const std::string* cls = el.attr("class");
        if (!cls) return false;
        std::vector<std::string> have;
        std::size_t i = 0;
        while (i < cls->size()) {
            while (i < cls->size() && std::isspace(static_cast<unsigned char>((*cls)[i]))) ++i;
            std::size_t start = i;
            while (i < cls->size() && !std::isspace(static_cast<unsigned char>((*cls)[i]))) ++i;
            if (i > start) have.push_back(cls->substr(start, i - start));
        }
        for (const auto& want : s.classes)
            if (std::find(have.begin(), have.end(), want) == have.end()) return false;
    }
    return true;
}

inline void find_all_impl(const element& el, const selector& sel, std::size_t pos,
                          std::vector<const element*>& out) {
    if (!el.is_text() && matches_simple(el, sel[pos])) {
        if (pos + 1 == sel.size())
            out.push_back(&el);
        else
            for (const auto& c : el.children) find_all_impl(c, sel, pos + 1, out);
        // a matched element can also host deeper matches of the same stage
    }
    for (const auto& c : el.children) find_all_impl(c, sel, pos, out);
}

}  // namespace detail

// All elements matching the selector, in document order (duplicates removed).
inline std::vector<const element*> find_all(const element& root, const selector& sel) {
    std::vector<const element*> raw;
    detail::find_all_impl(root, sel, 0, raw);
    std::vector<const element*> out;
    for (const element* e : raw)
        if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    return out;
}

inline const element* find_first(const element& root, const selector& sel) {
    auto all = find_all(root, sel);
    return all.empty() ? nullptr : all.front();
}

}  // namespace cadejo::html
