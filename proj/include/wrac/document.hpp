#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wrac/errors.hpp"

namespace wrac {

enum class Media { html, markdown };

inline std::string_view to_string(Media m) {
    return m == Media::html ? "html" : "markdown";
}

enum class UnitKind { heading, text, table, list_item, code };

inline std::string_view to_string(UnitKind k) {
    switch (k) {
        case UnitKind::heading: return "heading";
        case UnitKind::text: return "text";
        case UnitKind::table: return "table";
        case UnitKind::list_item: return "list_item";
        case UnitKind::code: return "code";
    }
    return "text";
}

inline UnitKind unit_kind_from(std::string_view s) {
    if (s == "heading") return UnitKind::heading;
    if (s == "text") return UnitKind::text;
    if (s == "table") return UnitKind::table;
    if (s == "list_item") return UnitKind::list_item;
    if (s == "code") return UnitKind::code;
    throw DataError("unknown unit kind: " + std::string(s));
}

/// One stored input file. `raw` is never mutated after load.
struct SourceDocument {
    std::string doc_id;
    std::string origin_path;
    Media media = Media::markdown;
    std::string raw;
    std::string org = "default";
    std::size_t byte_len = 0;
};

/// One ID-addressable semantic element of a parsed document.
///
/// Ids are `<kind>_<ordinal>` where the ordinal is a single counter shared by
/// all kinds, strictly increasing in document order (heading_1, heading_2,
/// text_3, ...).
struct DocumentUnit {
    std::string id;
    UnitKind kind = UnitKind::text;
    std::string text;
    int line = 1;
    std::optional<std::string> parent_heading;
    std::optional<int> heading_level;
    long token_count = 0;

    bool is_heading() const { return kind == UnitKind::heading; }
};

struct ParsedDocument {
    std::string doc_id;
    std::vector<DocumentUnit> units;
    std::optional<std::string> title;
    long total_chars = 0;
};

/// Structural parent of each unit, as an index into `units` (-1 for none).
///
/// Replays a heading stack over the unit list: a heading's parent is the
/// nearest preceding heading of strictly smaller level, a non-heading unit's
/// parent is the nearest preceding heading. Works on filtered documents too,
/// where the serialized parent_heading text may name a removed unit.
inline std::vector<int> compute_parent_indexes(const std::vector<DocumentUnit>& units) {
    std::vector<int> parent(units.size(), -1);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < units.size(); ++i) {
        const DocumentUnit& u = units[i];
        if (u.is_heading()) {
            const int level = u.heading_level.value_or(1);
            while (!stack.empty() && units[stack.back()].heading_level.value_or(1) >= level) {
                stack.pop_back();
            }
            parent[i] = stack.empty() ? -1 : static_cast<int>(stack.back());
            stack.push_back(i);
        } else {
            parent[i] = stack.empty() ? -1 : static_cast<int>(stack.back());
        }
    }
    return parent;
}

/// Unit record with all DocumentUnit fields; absent optionals serialize as null.
inline nlohmann::ordered_json unit_to_json(const DocumentUnit& u) {
    nlohmann::ordered_json j;
    j["id"] = u.id;
    j["kind"] = to_string(u.kind);
    j["text"] = u.text;
    j["line"] = u.line;
    j["parent_heading"] = u.parent_heading ? nlohmann::ordered_json(*u.parent_heading)
                                           : nlohmann::ordered_json(nullptr);
    j["heading_level"] = u.heading_level ? nlohmann::ordered_json(*u.heading_level)
                                         : nlohmann::ordered_json(nullptr);
    j["token_count"] = u.token_count;
    return j;
}

inline DocumentUnit unit_from_json(const nlohmann::json& j) {
    DocumentUnit u;
    u.id = j.at("id").get<std::string>();
    u.kind = unit_kind_from(j.at("kind").get<std::string>());
    u.text = j.at("text").get<std::string>();
    u.line = j.value("line", 1);
    if (j.contains("parent_heading") && !j["parent_heading"].is_null()) {
        u.parent_heading = j["parent_heading"].get<std::string>();
    }
    if (j.contains("heading_level") && !j["heading_level"].is_null()) {
        u.heading_level = j["heading_level"].get<int>();
    }
    u.token_count = j.value("token_count", 0L);
    return u;
}

/// A document serializes as the ordered array of its unit records.
inline nlohmann::ordered_json units_to_json(const ParsedDocument& doc) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const DocumentUnit& u : doc.units) arr.push_back(unit_to_json(u));
    return arr;
}

}  // namespace wrac
