#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "wrac/errors.hpp"

namespace wrac {

namespace detail {

/// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
inline std::size_t find_invalid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        if (b < 0x80) {
            len = 1;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
        } else {
            return i;
        }
        if (i + len > s.size()) return i;
        for (std::size_t k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return i;
        }
        i += len;
    }
    return std::string_view::npos;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        std::size_t semi = s.find(';', i);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") {
            out += '&';
        } else if (name == "lt") {
            out += '<';
        } else if (name == "gt") {
            out += '>';
        } else if (name == "quot") {
            out += '"';
        } else if (name == "apos" || name == "#39") {
            out += '\'';
        } else if (name == "nbsp") {
            out += ' ';
        } else if (!name.empty() && name.front() == '#') {
            long cp = 0;
            bool ok = false;
            if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X')) {
                cp = std::strtol(std::string(name.substr(2)).c_str(), nullptr, 16);
                ok = name.size() > 2;
            } else {
                cp = std::strtol(std::string(name.substr(1)).c_str(), nullptr, 10);
                ok = name.size() > 1;
            }
            if (ok && cp > 0 && cp <= 0x10FFFF) {
                // Encode the codepoint as UTF-8.
                auto c = static_cast<unsigned long>(cp);
                if (c <= 0x7F) {
                    out += static_cast<char>(c);
                } else if (c <= 0x7FF) {
                    out += static_cast<char>(0xC0 | (c >> 6));
                    out += static_cast<char>(0x80 | (c & 0x3F));
                } else if (c <= 0xFFFF) {
                    out += static_cast<char>(0xE0 | (c >> 12));
                    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (c & 0x3F));
                } else {
                    out += static_cast<char>(0xF0 | (c >> 18));
                    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
                    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
                    out += static_cast<char>(0x80 | (c & 0x3F));
                }
            } else {
                out += s.substr(i, semi - i + 1);
            }
        } else {
            out += s.substr(i, semi - i + 1);
            i = semi + 1;
            continue;
        }
        i = semi + 1;
    }
    return out;
}

}  // namespace detail

/// Best-effort tag-soup HTML to Markdown conversion.
///
/// Heading levels map to ATX markers, paragraphs and lists keep their breaks,
/// tables become pipe rows, script/style/comment contents are dropped, and
/// remaining text content passes through verbatim (entities decoded, runs of
/// whitespace collapsed as a browser would).
inline std::string html_to_markdown(std::string_view html) {
    using namespace detail;

    if (std::size_t bad = find_invalid_utf8(html); bad != std::string_view::npos) {
        throw EncodingError(bad);
    }

    std::string out;            // finished blocks
    std::string inline_buf;     // text of the block being assembled
    std::string block_prefix;   // marker emitted before the current block
    std::vector<std::pair<char, int>> list_stack;  // ('u' or 'o', item counter)
    bool in_table_row = false;
    bool table_had_header = false;
    bool row_is_header = false;
    bool last_was_row = false;
    std::string table_row;

    auto flush_inline = [&]() {
        // Collapse whitespace runs and trim, as rendered text would be.
        std::string text;
        bool ws = false;
        for (char c : inline_buf) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                ws = !text.empty();
            } else {
                if (ws) text += ' ';
                ws = false;
                text += c;
            }
        }
        inline_buf.clear();
        if (text.empty()) {
            block_prefix.clear();
            return;
        }
        if (!out.empty()) out += "\n\n";
        out += block_prefix + text;
        block_prefix.clear();
        last_was_row = false;
    };

    auto end_table_row = [&]() {
        if (!in_table_row) return;
        in_table_row = false;
        std::string collapsed;
        bool ws = false;
        for (char c : table_row) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                ws = !collapsed.empty();
            } else {
                if (ws) collapsed += ' ';
                ws = false;
                collapsed += c;
            }
        }
        table_row = collapsed;
        if (table_row.empty()) {
            row_is_header = false;
            return;
        }
        if (!out.empty()) out += last_was_row ? "\n" : "\n\n";
        out += table_row + " |";
        if (row_is_header && !table_had_header) {
            std::size_t cells = static_cast<std::size_t>(
                std::count(table_row.begin(), table_row.end(), '|'));
            out += "\n";
            for (std::size_t c = 0; c < cells; ++c) out += "| --- ";
            out += "|";
            table_had_header = true;
        }
        table_row.clear();
        row_is_header = false;
        last_was_row = true;
    };

    const std::string lower = ascii_lower(html);
    std::size_t i = 0;
    const std::size_t n = html.size();
    while (i < n) {
        if (html[i] != '<') {
            std::size_t j = html.find('<', i);
            if (j == std::string_view::npos) j = n;
            std::string text = decode_entities(html.substr(i, j - i));
            if (in_table_row) {
                table_row += text;
            } else {
                inline_buf += text;
            }
            i = j;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            std::size_t close = html.find("-->", i);
            i = (close == std::string_view::npos) ? n : close + 3;
            continue;
        }
        std::size_t close = html.find('>', i);
        if (close == std::string_view::npos) {
            inline_buf += html.substr(i);
            break;
        }
        std::string_view tag_body{lower.data() + i + 1, close - i - 1};
        bool closing = !tag_body.empty() && tag_body.front() == '/';
        if (closing) tag_body.remove_prefix(1);
        std::size_t name_end = 0;
        while (name_end < tag_body.size() &&
               (std::isalnum(static_cast<unsigned char>(tag_body[name_end])) ||
                tag_body[name_end] == '!')) {
            ++name_end;
        }
        const std::string tag(tag_body.substr(0, name_end));
        i = close + 1;

        if (!closing && (tag == "script" || tag == "style")) {
            std::size_t end = lower.find("</" + tag, i);
            i = (end == std::string::npos) ? n : lower.find('>', end) + 1;
            if (i == 0) i = n;  // unterminated closing tag
            continue;
        }

        if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') {
            if (!closing) {
                flush_inline();
                end_table_row();
                block_prefix = std::string(static_cast<std::size_t>(tag[1] - '0'), '#') + " ";
            } else {
                flush_inline();
            }
        } else if (tag == "p" || tag == "div" || tag == "section" || tag == "article" ||
                   tag == "blockquote" || tag == "header" || tag == "footer" || tag == "main" ||
                   tag == "nav" || tag == "aside" || tag == "figure" || tag == "figcaption") {
            flush_inline();
            end_table_row();
        } else if (tag == "br") {
            inline_buf += ' ';
        } else if (tag == "ul" || tag == "ol") {
            flush_inline();
            if (!closing) {
                list_stack.emplace_back(tag == "ol" ? 'o' : 'u', 0);
            } else if (!list_stack.empty()) {
                list_stack.pop_back();
            }
        } else if (tag == "li") {
            flush_inline();
            if (!closing) {
                std::string indent(list_stack.empty() ? 0 : 2 * (list_stack.size() - 1), ' ');
                if (!list_stack.empty() && list_stack.back().first == 'o') {
                    block_prefix = indent + std::to_string(++list_stack.back().second) + ". ";
                } else {
                    block_prefix = indent + "- ";
                }
            }
        } else if (tag == "table") {
            flush_inline();
            end_table_row();
            table_had_header = false;
        } else if (tag == "tr") {
            flush_inline();
            if (!closing) {
                in_table_row = true;
                table_row.clear();
            } else {
                end_table_row();
            }
        } else if (tag == "td" || tag == "th") {
            if (!closing && in_table_row) {
                table_row += table_row.empty() ? "|" : " |";
                table_row += " ";
                if (tag == "th") row_is_header = true;
            }
        } else if (tag == "pre" || tag == "code") {
            // Only fence <pre> blocks; inline <code> passes through.
            if (tag == "pre") {
                flush_inline();
                if (!closing) {
                    std::size_t end = lower.find("</pre", i);
                    std::size_t stop = (end == std::string::npos) ? n : end;
                    std::string content = decode_entities(html.substr(i, stop - i));
                    // Strip a single leading/trailing newline, keep interior verbatim.
                    if (!content.empty() && content.front() == '\n') content.erase(0, 1);
                    while (!content.empty() &&
                           (content.back() == '\n' || content.back() == ' ')) {
                        content.pop_back();
                    }
                    if (!content.empty()) {
                        if (!out.empty()) out += "\n\n";
                        out += "```\n" + content + "\n```";
                        last_was_row = false;
                    }
                    i = (end == std::string::npos) ? n : lower.find('>', end) + 1;
                    if (i == 0) i = n;
                }
            }
        }
        // Other tags (span, a, b, i, em, img, ...) contribute only their text.
    }
    flush_inline();
    end_table_row();

    while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
    return out;
}

}  // namespace wrac
