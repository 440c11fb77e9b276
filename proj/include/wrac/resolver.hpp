#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wrac/chunk.hpp"
#include "wrac/document.hpp"
#include "wrac/errors.hpp"
#include "wrac/planner.hpp"
#include "wrac/tokens.hpp"

namespace wrac {

struct ValidationReport {
    std::vector<std::string> unknown_ids;
    std::vector<std::string> duplicate_text_ids;  // non-heading ids in more than one place
    std::vector<std::string> uncovered_ids;       // non-heading ids in no group
    int empty_groups = 0;
    bool ok = false;
};

/// Checks a plan against its document. Heading ids repeating across groups is
/// the parent-duplication rule at work, not a defect; repeated or missing
/// non-heading ids and fabricated ids are.
inline ValidationReport validate_plan(const ChunkPlan& plan, const ParsedDocument& doc) {
    if (plan.doc_id != doc.doc_id) {
        throw IdentityError("plan is for '" + plan.doc_id + "', document is '" + doc.doc_id +
                            "'");
    }

    std::map<std::string, const DocumentUnit*> by_id;
    for (const DocumentUnit& u : doc.units) by_id.emplace(u.id, &u);

    ValidationReport report;
    std::map<std::string, int> text_occurrences;
    std::set<std::string> seen_unknown;
    for (const auto& group : plan.groups) {
        if (group.empty()) ++report.empty_groups;
        for (const std::string& id : group) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                if (seen_unknown.insert(id).second) report.unknown_ids.push_back(id);
            } else if (!it->second->is_heading()) {
                ++text_occurrences[id];
            }
        }
    }
    for (const DocumentUnit& u : doc.units) {
        if (u.is_heading()) continue;
        auto it = text_occurrences.find(u.id);
        if (it == text_occurrences.end()) {
            report.uncovered_ids.push_back(u.id);
        } else if (it->second > 1) {
            report.duplicate_text_ids.push_back(u.id);
        }
    }
    report.ok = report.unknown_ids.empty() && report.duplicate_text_ids.empty() &&
                report.uncovered_ids.empty() && report.empty_groups == 0;
    return report;
}

/// Repairs the defects validate_plan reports: fabricated ids are dropped,
/// duplicated non-heading ids keep their first occurrence, uncovered units
/// join the group of their nearest preceding covered neighbour (or start a
/// fresh group with an inferred heading trail), and empty groups disappear.
inline ChunkPlan repair_plan(const ChunkPlan& plan, const ParsedDocument& doc,
                             const ValidationReport& report) {
    const std::vector<DocumentUnit>& units = doc.units;
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < units.size(); ++i) index_of.emplace(units[i].id, i);

    const std::set<std::string> unknown(report.unknown_ids.begin(), report.unknown_ids.end());

    ChunkPlan repaired;
    repaired.doc_id = plan.doc_id;
    repaired.planner_kind = plan.planner_kind;
    repaired.raw_response = plan.raw_response;

    std::set<std::string> seen_text;
    for (const auto& group : plan.groups) {
        std::vector<std::string> kept;
        for (const std::string& id : group) {
            if (unknown.count(id)) continue;
            const DocumentUnit& u = units[index_of.at(id)];
            if (!u.is_heading() && !seen_text.insert(id).second) continue;
            kept.push_back(id);
        }
        repaired.groups.push_back(std::move(kept));
    }

    // Coverage is judged against the plan as handed in, so a fully missing
    // region becomes fresh singleton groups rather than one growing chain.
    std::map<std::string, std::size_t> covered_group;  // text id -> group index
    for (std::size_t g = 0; g < repaired.groups.size(); ++g) {
        for (const std::string& id : repaired.groups[g]) {
            if (!units[index_of.at(id)].is_heading()) covered_group.emplace(id, g);
        }
    }

    const detail::HeadingTree tree(units);
    for (std::size_t i = 0; i < units.size(); ++i) {
        const DocumentUnit& u = units[i];
        if (u.is_heading() || covered_group.count(u.id)) continue;

        // Nearest preceding covered non-heading unit.
        std::optional<std::size_t> target_group;
        for (std::size_t j = i; j-- > 0;) {
            if (units[j].is_heading()) continue;
            auto it = covered_group.find(units[j].id);
            if (it != covered_group.end()) {
                target_group = it->second;
                break;
            }
        }
        if (target_group) {
            auto& group = repaired.groups[*target_group];
            auto pos = std::find_if(group.begin(), group.end(), [&](const std::string& id) {
                return index_of.at(id) > i;
            });
            group.insert(pos, u.id);
        } else {
            std::set<std::size_t> members{i};
            if (int p = tree.parent[i]; p >= 0) {
                auto trail =
                    detail::heading_trail(units, tree, static_cast<std::size_t>(p));
                members.insert(trail.begin(), trail.end());
            }
            repaired.groups.push_back(detail::ids_of(units, members));
        }
    }

    std::erase_if(repaired.groups, [](const auto& g) { return g.empty(); });
    return repaired;
}

/// Maps a validated plan back to verbatim text. Headings render as `# <text>`
/// lines, everything else passes through untouched, units separated by one
/// blank line in document order.
inline std::vector<Chunk> resolve_plan(const ChunkPlan& plan, const ParsedDocument& doc,
                                       const TokenCounter& tokens = default_token_counter()) {
    const ValidationReport report = validate_plan(plan, doc);
    if (!report.ok) {
        throw DataError("plan for '" + plan.doc_id +
                        "' does not validate; run validate_plan/repair_plan first");
    }

    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < doc.units.size(); ++i) index_of.emplace(doc.units[i].id, i);

    std::vector<Chunk> chunks;
    chunks.reserve(plan.groups.size());
    for (const auto& group : plan.groups) {
        std::vector<std::size_t> members;
        members.reserve(group.size());
        for (const std::string& id : group) members.push_back(index_of.at(id));
        std::sort(members.begin(), members.end());

        Chunk chunk;
        chunk.doc_id = doc.doc_id;
        chunk.chunk_id = make_chunk_id(doc.doc_id, chunks.size() + 1);
        for (std::size_t i : members) {
            const DocumentUnit& u = doc.units[i];
            chunk.unit_ids.push_back(u.id);
            if (!chunk.body.empty()) chunk.body += "\n\n";
            if (u.is_heading()) {
                chunk.body += "# " + u.text;
                if (chunk.heading_trail.size() < 3 &&
                    chunk.unit_ids.size() == chunk.heading_trail.size() + 1) {
                    // Still in the leading heading run: part of the trail.
                    chunk.heading_trail.push_back(u.text);
                }
            } else {
                chunk.body += u.text;
            }
        }
        chunk.token_count = tokens(chunk.body);
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

}  // namespace wrac
