#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cadejo/entities.hpp"
#include "cadejo/errors.hpp"

namespace cadejo::xml {

// Minimal well-formedness-checking DOM, sized for syndication feeds.
// Rejects mismatched tags and truncated documents with feed_parse_error;
// it does not validate against DTDs or resolve custom entities.

struct node {
    std::string name;  // empty => text node
    std::string text;  // text nodes only
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<node> children;

    bool is_text() const { return name.empty(); }

    // local name with any namespace prefix stripped
    std::string local_name() const {
        auto colon = name.rfind(':');
        return colon == std::string::npos ? name : name.substr(colon + 1);
    }

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }

    const node* first_child(std::string_view local) const {
        for (const auto& c : children)
            if (!c.is_text() && c.local_name() == local) return &c;
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

class parser {
public:
    explicit parser(std::string_view input) : s_(input) {}

    node parse_document() {
        skip_bom();
        skip_misc();
        if (eof()) throw feed_parse_error("empty document");
        node root = parse_element(0);
        skip_misc();
        if (!eof()) throw feed_parse_error("content after document element");
        return root;
    }

private:
    static constexpr int kMaxDepth = 200;

    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return s_[i_]; }
    bool starts_with(std::string_view p) const {
        return s_.compare(i_, p.size(), p) == 0;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw feed_parse_error(why + " at offset " + std::to_string(i_));
    }

    void skip_bom() {
        if (starts_with("\xEF\xBB\xBF")) i_ += 3;
    }

    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                          peek() == '\n'))
            ++i_;
    }

    // whitespace, comments, PIs and DOCTYPE between markup
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                auto end = s_.find("-->", i_ + 4);
                if (end == std::string_view::npos) fail("unterminated comment");
                i_ = end + 3;
            } else if (starts_with("<?")) {
                auto end = s_.find("?>", i_ + 2);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                i_ = end + 2;
            } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
                int depth = 0;
                while (!eof()) {
                    char c = s_[i_++];
                    if (c == '[') ++depth;
                    else if (c == ']') --depth;
                    else if (c == '>' && depth <= 0) break;
                }
            } else {
                return;
            }
        }
    }

    static bool is_name_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }
    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == ':' || c == '-' || c == '.';
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected name");
        std::size_t start = i_;
        ++i_;
        while (!eof() && is_name_char(peek())) ++i_;
        return std::string(s_.substr(start, i_ - start));
    }

    node parse_element(int depth) {
        if (depth > kMaxDepth) fail("nesting too deep");
        if (eof() || peek() != '<') fail("expected element");
        ++i_;
        node el;
        el.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '>') {
                ++i_;
                break;
            }
            if (starts_with("/>")) {
                i_ += 2;
                return el;
            }
            auto key = parse_name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' in attribute");
            ++i_;
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
            char quote = peek();
            ++i_;
            auto end = s_.find(quote, i_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            el.attrs.emplace_back(std::move(key),
                                  decode_entities(s_.substr(i_, end - i_)));
            i_ = end + 1;
        }
        // content
        std::string pending_text;
        auto flush_text = [&] {
            if (!pending_text.empty()) {
                node t;
                t.text = decode_entities(pending_text);
                el.children.push_back(std::move(t));
                pending_text.clear();
            }
        };
        for (;;) {
            if (eof()) fail("unterminated element <" + el.name + ">");
            if (peek() != '<') {
                pending_text.push_back(s_[i_++]);
                continue;
            }
            if (starts_with("</")) {
                flush_text();
                i_ += 2;
                auto closing = parse_name();
                if (closing != el.name)
                    fail("mismatched close tag </" + closing + "> for <" + el.name + ">");
                skip_ws();
                if (eof() || peek() != '>') fail("malformed close tag");
                ++i_;
                return el;
            }
            if (starts_with("<!--")) {
                auto end = s_.find("-->", i_ + 4);
                if (end == std::string_view::npos) fail("unterminated comment");
                i_ = end + 3;
                continue;
            }
            if (starts_with("<![CDATA[")) {
                auto end = s_.find("]]>", i_ + 9);
                if (end == std::string_view::npos) fail("unterminated CDATA");
                flush_text();
                node t;
                t.text = std::string(s_.substr(i_ + 9, end - i_ - 9));
                el.children.push_back(std::move(t));
                i_ = end + 3;
                continue;
            }
            if (starts_with("<?")) {
                auto end = s_.find("?>", i_ + 2);
                if (end == std::string_view::npos) fail("unterminated processing instruction");
                i_ = end + 2;
                continue;
            }
            flush_text();
            el.children.push_back(parse_element(depth + 1));
        }
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

}  // namespace detail

// Parses a complete XML document; throws feed_parse_error on malformed input.
inline node parse(std::string_view input) {
    return detail::parser(input).parse_document();
}

// Reads the encoding attribute of an XML declaration, if any.
inline std::optional<std::string> declared_encoding(std::string_view input) {
    if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
    if (input.substr(0, 5) != "<?xml") return std::nullopt;
    auto end = input.find("?>");
    if (end == std::string_view::npos) return std::nullopt;
    std::string_view decl = input.substr(0, end);
    auto pos = decl.find("encoding");
    if (pos == std::string_view::npos) return std::nullopt;
    pos = decl.find_first_of("\"'", pos);
    if (pos == std::string_view::npos) return std::nullopt;
    char quote = decl[pos];
    auto close = decl.find(quote, pos + 1);
    if (close == std::string_view::npos) return std::nullopt;
    std::string enc(decl.substr(pos + 1, close - pos - 1));
    for (auto& c : enc) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return enc;
}

}  // namespace cadejo::xml
