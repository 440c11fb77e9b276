#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wrac/document.hpp"
#include "wrac/errors.hpp"
#include "wrac/llm_client.hpp"
#include "wrac/markdown.hpp"
#include "wrac/prompts.hpp"

namespace wrac {

struct PlannerConfig {
    long max_chunk_tokens = 512;
    static constexpr int hierarchy_levels = 3;  // the grouping protocol is 3-level
    bool include_unit_text_in_payload = true;
    bool boilerplate_filter = true;
    std::string model = "gpt-4.1";
};

enum class PlannerKind { structural, llm };

inline std::string_view to_string(PlannerKind k) {
    return k == PlannerKind::structural ? "structural" : "llm";
}

/// Ordered groups of unit IDs — the planner's sole output.
struct ChunkPlan {
    std::string doc_id;
    std::vector<std::vector<std::string>> groups;
    PlannerKind planner_kind = PlannerKind::structural;
    std::optional<std::string> raw_response;
};

/// Canonical plan serialization: a single `chunks` key, compact encoding.
inline std::string plan_to_json(const ChunkPlan& plan) {
    nlohmann::ordered_json j;
    j["chunks"] = plan.groups;
    return j.dump();
}

/// Unit array in the payload shape the grouping prompt documents:
/// id / type / text / parent_heading, with `text` swapped for token_count and
/// heading_level in metadata-only mode.
inline nlohmann::ordered_json payload_units_json(const ParsedDocument& doc,
                                                 const PlannerConfig& cfg) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const DocumentUnit& u : doc.units) {
        nlohmann::ordered_json j;
        j["id"] = u.id;
        j["type"] = to_string(u.kind);
        if (cfg.include_unit_text_in_payload) {
            j["text"] = u.text;
        } else {
            j["token_count"] = u.token_count;
            if (u.heading_level) j["heading_level"] = *u.heading_level;
        }
        j["parent_heading"] = u.parent_heading ? nlohmann::ordered_json(*u.parent_heading)
                                               : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr;
}

/// Full planning payload: grouping prompt followed by the unit array.
inline std::string build_planner_payload(const ParsedDocument& doc, const PlannerConfig& cfg) {
    if (doc.units.empty()) throw NoUnitsError(doc.doc_id);
    std::string payload(prompts::planner_system);
    payload += "\n\n";
    payload += payload_units_json(doc, cfg).dump(2);
    return payload;
}

namespace detail {

/// Per-heading structural view used by the planner and the repair path.
struct HeadingTree {
    std::vector<int> parent;                        // unit index -> parent heading index
    std::vector<std::vector<std::size_t>> child_headings;  // heading idx -> child heading idxs
    std::vector<std::vector<std::size_t>> content;  // heading idx -> direct non-heading idxs
    std::vector<std::size_t> orphans;               // non-heading units with no heading above

    explicit HeadingTree(const std::vector<DocumentUnit>& units)
        : parent(compute_parent_indexes(units)),
          child_headings(units.size()),
          content(units.size()) {
        for (std::size_t i = 0; i < units.size(); ++i) {
            int p = parent[i];
            if (units[i].is_heading()) {
                if (p >= 0) child_headings[static_cast<std::size_t>(p)].push_back(i);
            } else if (p >= 0) {
                content[static_cast<std::size_t>(p)].push_back(i);
            } else {
                orphans.push_back(i);
            }
        }
    }
};

inline bool is_step_heading(const DocumentUnit& u) {
    return u.is_heading() && is_numbered_marker(u.text);
}

/// A heading opens a procedural run when all of its child headings are
/// numbered steps and there are at least two of them.
inline bool is_procedure_head(const std::vector<DocumentUnit>& units, const HeadingTree& tree,
                              std::size_t h) {
    const auto& kids = tree.child_headings[h];
    if (kids.size() < 2) return false;
    return std::all_of(kids.begin(), kids.end(),
                       [&](std::size_t k) { return is_step_heading(units[k]); });
}

/// 3-level heading trail for the section owned by heading `h`, returned as
/// distinct unit indexes in document order. L1 is the nearest preceding
/// level-1 heading (falling back to the document's first heading), L2 the
/// immediate parent or L1 reused, L3 the owning heading itself.
inline std::vector<std::size_t> heading_trail(const std::vector<DocumentUnit>& units,
                                              const HeadingTree& tree, std::size_t h) {
    std::optional<std::size_t> l1;
    for (std::size_t i = 0; i <= h; ++i) {
        if (units[i].is_heading() && units[i].heading_level.value_or(1) == 1) l1 = i;
    }
    if (!l1) {
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (units[i].is_heading()) {
                l1 = i;
                break;
            }
        }
    }
    std::set<std::size_t> trail;
    if (l1) trail.insert(*l1);
    if (int p = tree.parent[h]; p >= 0) trail.insert(static_cast<std::size_t>(p));
    trail.insert(h);
    return {trail.begin(), trail.end()};
}

inline std::vector<std::string> ids_of(const std::vector<DocumentUnit>& units,
                                       const std::set<std::size_t>& members) {
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (std::size_t i : members) ids.push_back(units[i].id);
    return ids;
}

}  // namespace detail

/// Deterministic chunk planner implementing the grouping protocol directly:
/// procedural runs stay whole, each content-bearing heading forms a group
/// carrying its 3-level heading trail, parents repeat across sibling groups,
/// oversized groups split at unit boundaries, and heading-less lead-in units
/// merge into standalone groups under the token budget.
inline ChunkPlan structural_plan(const ParsedDocument& doc, const PlannerConfig& cfg) {
    using namespace detail;

    const std::vector<DocumentUnit>& units = doc.units;
    const HeadingTree tree(units);

    // Groups keyed by the position that owns them (procedure heading or first
    // content unit), which is unique per group and fixes emission order.
    std::vector<std::pair<std::size_t, std::vector<std::string>>> groups;

    auto emit = [&](std::size_t key, const std::set<std::size_t>& members) {
        if (members.empty()) return;
        groups.emplace_back(key, ids_of(units, members));
    };

    // Split one section's content at unit boundaries so no part exceeds the
    // token budget; a single oversized unit stays whole.
    auto emit_budgeted = [&](const std::vector<std::size_t>& trail,
                             const std::vector<std::size_t>& content) {
        std::vector<std::size_t> part;
        long part_tokens = 0;
        auto flush = [&]() {
            if (part.empty()) return;
            std::set<std::size_t> members(trail.begin(), trail.end());
            members.insert(part.begin(), part.end());
            emit(part.front(), members);
            part.clear();
            part_tokens = 0;
        };
        for (std::size_t i : content) {
            long t = units[i].token_count;
            if (!part.empty() && part_tokens + t > cfg.max_chunk_tokens) flush();
            part.push_back(i);
            part_tokens += t;
        }
        flush();
    };

    std::vector<bool> consumed(units.size(), false);

    // Procedural runs first: the run's heading, every descendant heading, and
    // all their content form one group, never split.
    for (std::size_t h = 0; h < units.size(); ++h) {
        if (!units[h].is_heading() || consumed[h]) continue;
        if (!is_procedure_head(units, tree, h)) continue;
        std::set<std::size_t> members;
        std::vector<std::size_t> stack{h};
        while (!stack.empty()) {
            std::size_t cur = stack.back();
            stack.pop_back();
            members.insert(cur);
            consumed[cur] = true;
            for (std::size_t c : tree.content[cur]) {
                members.insert(c);
                consumed[c] = true;
            }
            for (std::size_t k : tree.child_headings[cur]) stack.push_back(k);
        }
        const std::vector<std::size_t> trail = heading_trail(units, tree, h);
        members.insert(trail.begin(), trail.end());
        emit(h, members);
    }

    // Remaining sections: one group per heading with direct content.
    for (std::size_t h = 0; h < units.size(); ++h) {
        if (!units[h].is_heading() || consumed[h]) continue;
        std::vector<std::size_t> content;
        for (std::size_t c : tree.content[h]) {
            if (!consumed[c]) content.push_back(c);
        }
        if (content.empty()) continue;
        emit_budgeted(heading_trail(units, tree, h), content);
    }

    // Lead-in units with no heading above them: standalone groups, merged with
    // their neighbours up to the budget.
    if (!tree.orphans.empty()) {
        emit_budgeted({}, tree.orphans);
    }

    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    ChunkPlan plan;
    plan.doc_id = doc.doc_id;
    plan.planner_kind = PlannerKind::structural;
    for (auto& [pos, ids] : groups) plan.groups.push_back(std::move(ids));
    return plan;
}

/// Parses a model plan response. Code fences are stripped if present despite
/// the instructions; the result must be {"chunks": [["id", ...], ...]}.
inline ChunkPlan parse_plan_response(std::string_view text) {
    std::string_view body = detail::trim(text);
    if (body.substr(0, 3) == "```") {
        std::size_t first_nl = body.find('\n');
        if (first_nl != std::string_view::npos) {
            body.remove_prefix(first_nl + 1);
            std::size_t closing = body.rfind("```");
            if (closing != std::string_view::npos) body = body.substr(0, closing);
            body = detail::trim(body);
        }
    }

    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded()) throw PlanParseError(std::string(text));
    if (!j.is_object() || !j.contains("chunks") || !j["chunks"].is_array()) {
        throw PlanShapeError(std::string(text));
    }

    ChunkPlan plan;
    plan.planner_kind = PlannerKind::llm;
    plan.raw_response = std::string(text);
    for (const auto& group : j["chunks"]) {
        if (!group.is_array()) throw PlanShapeError(std::string(text));
        std::vector<std::string> ids;
        for (const auto& id : group) {
            if (!id.is_string()) throw PlanShapeError(std::string(text));
            ids.push_back(id.get<std::string>());
        }
        plan.groups.push_back(std::move(ids));
    }
    return plan;
}

struct LlmPlanResult {
    ChunkPlan plan;
    TokenUsage usage;
    bool fallback = false;  // true when the structural planner had to stand in
    long wall_ms = 0;
};

/// One planning call per document: build the payload, ask the model, parse.
/// An unparseable response earns one corrective retry; a second failure falls
/// back to the structural planner and flags the run.
inline LlmPlanResult llm_plan(const ParsedDocument& doc, const PlannerConfig& cfg,
                              ChatClient& client) {
    LlmPlanResult result;

    ChatRequest request;
    request.model = cfg.model;
    request.system_text = std::string(prompts::planner_system);
    request.user_text = payload_units_json(doc, cfg).dump(2);
    request.temperature = 0.0;

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&t0]() {
        return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count());
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatExchange exchange;
        try {
            exchange = client.complete(request);
        } catch (const TransportError& e) {
            throw PlannerUnavailable(std::string("planner transport failed: ") + e.what());
        }
        result.usage += exchange.usage;
        try {
            result.plan = parse_plan_response(exchange.response_text);
            result.plan.doc_id = doc.doc_id;
            result.wall_ms = elapsed_ms();
            return result;
        } catch (const PlanError&) {
            request.user_text += "\n\n";
            request.user_text += prompts::planner_retry_instruction;
        }
    }

    result.plan = structural_plan(doc, cfg);
    result.fallback = true;
    result.wall_ms = elapsed_ms();
    return result;
}

}  // namespace wrac
