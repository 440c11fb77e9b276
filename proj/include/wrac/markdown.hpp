#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "wrac/document.hpp"
#include "wrac/errors.hpp"
#include "wrac/tokens.hpp"

namespace wrac {

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (std::string& l : lines) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
    }
    return lines;
}

inline bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

inline std::string_view trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline int heading_marker_level(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && line[n] == '#') ++n;
    if (n == 0 || n > 6) return 0;
    if (n < line.size() && line[n] != ' ' && line[n] != '\t') return 0;
    return static_cast<int>(n);
}

/// Heading text: marker stripped, optional closing hash run stripped.
inline std::string heading_text(std::string_view line, int level) {
    std::string_view rest = trim(line.substr(level));
    while (!rest.empty() && rest.back() == '#') rest.remove_suffix(1);
    return std::string(trim(rest));
}

inline bool is_fence(std::string_view line) {
    std::string_view t = trim(line);
    return t.substr(0, 3) == "```" || t.substr(0, 3) == "~~~";
}

inline bool is_table_row(std::string_view line) {
    std::string_view t = trim(line);
    return !t.empty() && t.front() == '|';
}

inline bool is_rule(std::string_view line) {
    std::string_view t = trim(line);
    if (t.size() < 3) return false;
    char c = t.front();
    if (c != '-' && c != '*' && c != '_') return false;
    return t.find_first_not_of(c) == std::string_view::npos;
}

inline std::size_t indent_of(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && line[n] == ' ') ++n;
    return n;
}

/// Matches a numbered step marker: digits followed by '.' or ')' and a space.
inline bool is_numbered_marker(std::string_view s) {
    std::size_t n = 0;
    while (n < s.size() && std::isdigit(static_cast<unsigned char>(s[n]))) ++n;
    if (n == 0 || n >= s.size()) return false;
    if (s[n] != '.' && s[n] != ')') return false;
    return n + 1 < s.size() && (s[n + 1] == ' ' || s[n + 1] == '\t');
}

inline bool is_bullet_marker(std::string_view s) {
    if (s.size() < 2) return false;
    return (s[0] == '-' || s[0] == '*' || s[0] == '+') && (s[1] == ' ' || s[1] == '\t');
}

inline bool is_list_item_start(std::string_view line) {
    if (indent_of(line) >= 4) return false;
    std::string_view t = trim(line);
    return is_bullet_marker(t) || is_numbered_marker(t);
}

inline std::string join(const std::vector<std::string>& lines, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from) out += '\n';
        out += lines[i];
    }
    return out;
}

}  // namespace detail

/// Boilerplate stems removed by filter_boilerplate, matched case-insensitively
/// as substrings of a unit's text.
inline const std::vector<std::string>& default_boilerplate_lexicon() {
    static const std::vector<std::string> lexicon = {
        "cookie", "accept all", "sign in", "log in", "navigation", "skip to content",
    };
    return lexicon;
}

/// Splits markdown into ID-addressable units.
///
/// One unit per heading, paragraph, table, fenced code block, and top-level
/// list item; a fully numbered list is kept as a single unit so step sequences
/// stay atomic. Ids carry a single document-order ordinal shared across kinds.
inline ParsedDocument parse_markdown(const SourceDocument& doc,
                                     const TokenCounter& tokens = default_token_counter()) {
    using namespace detail;

    ParsedDocument parsed;
    parsed.doc_id = doc.doc_id;
    parsed.total_chars = static_cast<long>(doc.raw.size());

    const std::vector<std::string> lines = split_lines(doc.raw);
    std::vector<DocumentUnit> units;

    auto add_unit = [&](UnitKind kind, std::string text, std::size_t first_line_idx,
                        std::optional<int> level = std::nullopt) {
        if (trim(text).empty()) return;
        DocumentUnit u;
        u.kind = kind;
        u.text = std::move(text);
        u.line = static_cast<int>(first_line_idx) + 1;
        u.heading_level = level;
        units.push_back(std::move(u));
    };

    std::size_t i = 0;
    const std::size_t n = lines.size();
    while (i < n) {
        const std::string& line = lines[i];
        if (is_blank(line)) {
            ++i;
            continue;
        }
        if (int level = heading_marker_level(line); level > 0) {
            add_unit(UnitKind::heading, heading_text(line, level), i, level);
            ++i;
            continue;
        }
        if (is_fence(line)) {
            std::size_t body_start = i + 1;
            std::size_t j = body_start;
            while (j < n && !is_fence(lines[j])) ++j;
            add_unit(UnitKind::code, join(lines, body_start, j), i);
            i = (j < n) ? j + 1 : n;
            continue;
        }
        if (is_table_row(line)) {
            std::size_t j = i;
            while (j < n && is_table_row(lines[j])) ++j;
            add_unit(UnitKind::table, join(lines, i, j), i);
            i = j;
            continue;
        }
        if (is_rule(line)) {
            ++i;
            continue;
        }
        if (is_list_item_start(line)) {
            // Collect the whole list block: item lines plus indented continuations.
            std::size_t j = i;
            std::vector<std::size_t> item_starts;
            bool all_numbered = true;
            while (j < n && !is_blank(lines[j])) {
                if (is_list_item_start(lines[j])) {
                    item_starts.push_back(j);
                    if (!is_numbered_marker(trim(lines[j]))) all_numbered = false;
                } else if (indent_of(lines[j]) < 2) {
                    break;  // unindented plain line ends the block
                }
                ++j;
            }
            if (all_numbered) {
                add_unit(UnitKind::list_item, join(lines, i, j), i);
            } else {
                for (std::size_t k = 0; k < item_starts.size(); ++k) {
                    std::size_t a = item_starts[k];
                    std::size_t b = (k + 1 < item_starts.size()) ? item_starts[k + 1] : j;
                    add_unit(UnitKind::list_item, join(lines, a, b), a);
                }
            }
            i = j;
            continue;
        }
        // Paragraph: everything until a blank line or the start of another block.
        std::size_t j = i;
        while (j < n && !is_blank(lines[j]) && heading_marker_level(lines[j]) == 0 &&
               !is_fence(lines[j]) && !is_table_row(lines[j]) && !is_list_item_start(lines[j]) &&
               !is_rule(lines[j])) {
            ++j;
        }
        add_unit(UnitKind::text, join(lines, i, j), i);
        i = j;
    }

    if (units.empty()) throw NoUnitsError(doc.doc_id);

    // Assign ids from one shared ordinal and resolve parent headings.
    const std::vector<int> parent = compute_parent_indexes(units);
    int min_level = 0;
    for (std::size_t k = 0; k < units.size(); ++k) {
        DocumentUnit& u = units[k];
        u.id = std::string(to_string(u.kind)) + "_" + std::to_string(k + 1);
        u.token_count = tokens(u.text);
        if (parent[k] >= 0) u.parent_heading = units[static_cast<std::size_t>(parent[k])].text;
        if (u.is_heading()) {
            int level = u.heading_level.value_or(1);
            if (min_level == 0 || level < min_level) min_level = level;
        }
    }
    for (const DocumentUnit& u : units) {
        if (u.is_heading() && u.heading_level.value_or(1) == min_level) {
            parsed.title = u.text;
            break;
        }
    }

    parsed.units = std::move(units);
    return parsed;
}

/// Removes boilerplate units (cookie banners, navigation, login prompts).
/// Surviving ids are left untouched so they stay stable references.
inline ParsedDocument filter_boilerplate(
    const ParsedDocument& doc,
    const std::vector<std::string>& lexicon = default_boilerplate_lexicon()) {
    ParsedDocument out;
    out.doc_id = doc.doc_id;
    out.title = doc.title;
    out.total_chars = doc.total_chars;

    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    std::vector<std::string> stems;
    stems.reserve(lexicon.size());
    for (const std::string& s : lexicon) stems.push_back(lower(s));

    for (const DocumentUnit& u : doc.units) {
        const std::string folded = lower(u.text);
        bool drop = std::any_of(stems.begin(), stems.end(), [&](const std::string& stem) {
            return folded.find(stem) != std::string::npos;
        });
        if (!drop) out.units.push_back(u);
    }
    return out;
}

}  // namespace wrac
