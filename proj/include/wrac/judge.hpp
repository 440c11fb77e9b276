#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "wrac/chunk.hpp"
#include "wrac/metrics.hpp"

namespace wrac {

struct GoldItem {
    std::string doc_id;
    std::string evidence;  // verbatim span from the source document
};

struct QueryRecord {
    std::string query_id;
    std::string text;
    std::string category;  // one of the seven canonical classes
    std::string org;
    std::vector<GoldItem> gold;
};

/// Case-folded with whitespace runs collapsed, so matching survives line
/// wrapping and capitalization but still fails when a chunk boundary cuts
/// through the evidence span.
inline std::string normalize_for_match(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool ws = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            ws = !out.empty();
        } else {
            if (ws) out += ' ';
            ws = false;
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    return out;
}

/// A chunk satisfies a gold item when it comes from the cited document and
/// contains the evidence span intact.
inline bool judge_relevance(const Chunk& chunk, const GoldItem& gold) {
    if (chunk.doc_id != gold.doc_id) return false;
    const std::string evidence = normalize_for_match(gold.evidence);
    if (evidence.empty()) return false;
    return normalize_for_match(chunk.body).find(evidence) != std::string::npos;
}

/// Judges a ranked chunk list against every gold item of a query.
inline JudgedRanking judge_ranking(const std::vector<const Chunk*>& ranked,
                                   const std::vector<GoldItem>& gold) {
    JudgedRanking jr;
    jr.gold_count = static_cast<int>(gold.size());
    jr.relevant_gold.reserve(ranked.size());
    for (const Chunk* chunk : ranked) {
        std::vector<int> matches;
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (judge_relevance(*chunk, gold[g])) matches.push_back(static_cast<int>(g));
        }
        jr.relevant_gold.push_back(std::move(matches));
    }
    return jr;
}

}  // namespace wrac
