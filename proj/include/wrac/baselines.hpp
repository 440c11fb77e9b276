#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "wrac/chunk.hpp"
#include "wrac/document.hpp"
#include "wrac/errors.hpp"
#include "wrac/prompts.hpp"
#include "wrac/tokens.hpp"

namespace wrac {

namespace detail {

/// Whitespace-delimited word span; cost covers the word plus the gap after it,
/// so window arithmetic tracks the ceil(bytes/4) token estimate.
struct WordSegment {
    std::size_t begin = 0;      // first byte of the word
    std::size_t word_end = 0;   // one past the last byte of the word
    long tokens = 0;
};

inline std::vector<WordSegment> word_segments(std::string_view text) {
    std::vector<WordSegment> segments;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= n) break;
        WordSegment seg;
        seg.begin = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        seg.word_end = i;
        std::size_t gap_end = i;
        while (gap_end < n && std::isspace(static_cast<unsigned char>(text[gap_end]))) {
            ++gap_end;
        }
        seg.tokens = count_tokens(text.substr(seg.begin, gap_end - seg.begin));
        segments.push_back(seg);
    }
    return segments;
}

}  // namespace detail

/// Sliding windows of roughly size_tokens over the whitespace-segmented token
/// stream, advancing by size_tokens - overlap_tokens; boundaries always land
/// on whitespace and the final short window is kept.
inline std::vector<Chunk> fixed_size_chunk(const std::string& doc_id, std::string_view text,
                                           long size_tokens, long overlap_tokens) {
    if (overlap_tokens < 0 || size_tokens <= overlap_tokens) {
        throw ConfigError("fixed-size window must exceed overlap (got size " +
                          std::to_string(size_tokens) + ", overlap " +
                          std::to_string(overlap_tokens) + ")");
    }
    const std::vector<detail::WordSegment> segs = detail::word_segments(text);
    const long stride = size_tokens - overlap_tokens;

    // Token-prefix sums over segments.
    std::vector<long> prefix(segs.size() + 1, 0);
    for (std::size_t i = 0; i < segs.size(); ++i) prefix[i + 1] = prefix[i] + segs[i].tokens;

    std::vector<Chunk> chunks;
    std::size_t start = 0;
    while (start < segs.size()) {
        std::size_t end = start + 1;
        while (end < segs.size() && prefix[end + 1] - prefix[start] <= size_tokens) ++end;

        Chunk chunk;
        chunk.doc_id = doc_id;
        chunk.method = "fixed";
        chunk.chunk_id = make_chunk_id(doc_id, chunks.size() + 1);
        chunk.body = std::string(
            text.substr(segs[start].begin, segs[end - 1].word_end - segs[start].begin));
        chunk.token_count = count_tokens(chunk.body);
        chunks.push_back(std::move(chunk));

        const long target = prefix[start] + stride;
        std::size_t next = start + 1;
        while (next < segs.size() && prefix[next] < target) ++next;
        if (prefix[next] < target) break;  // ran off the end
        start = next;
    }
    return chunks;
}

/// Rule-based baseline: one chunk per heading with its direct texts, split at
/// unit boundaries over the budget. No heading trails, no parent duplication,
/// no procedure handling — deliberately plainer than the planner.
inline std::vector<Chunk> structural_chunk(const ParsedDocument& doc, long budget_tokens,
                                           const TokenCounter& tokens = default_token_counter()) {
    const std::vector<DocumentUnit>& units = doc.units;
    const std::vector<int> parent = compute_parent_indexes(units);

    std::vector<Chunk> chunks;
    auto emit = [&](const std::vector<std::size_t>& members, std::optional<std::size_t> heading) {
        if (members.empty()) return;
        Chunk chunk;
        chunk.doc_id = doc.doc_id;
        chunk.method = "structural";
        chunk.chunk_id = make_chunk_id(doc.doc_id, chunks.size() + 1);
        if (heading) {
            const DocumentUnit& h = units[*heading];
            chunk.heading_trail.push_back(h.text);
            chunk.unit_ids.push_back(h.id);
            chunk.body = "# " + h.text;
        }
        for (std::size_t i : members) {
            chunk.unit_ids.push_back(units[i].id);
            if (!chunk.body.empty()) chunk.body += "\n\n";
            chunk.body += units[i].text;
        }
        chunk.token_count = tokens(chunk.body);
        chunks.push_back(std::move(chunk));
    };

    auto emit_budgeted = [&](const std::vector<std::size_t>& content,
                             std::optional<std::size_t> heading) {
        std::vector<std::size_t> part;
        long part_tokens = 0;
        for (std::size_t i : content) {
            long t = units[i].token_count;
            if (!part.empty() && part_tokens + t > budget_tokens) {
                emit(part, heading);
                part.clear();
                part_tokens = 0;
            }
            part.push_back(i);
            part_tokens += t;
        }
        emit(part, heading);
    };

    std::vector<std::size_t> orphans;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (!units[i].is_heading() && parent[i] < 0) orphans.push_back(i);
    }
    emit_budgeted(orphans, std::nullopt);

    for (std::size_t h = 0; h < units.size(); ++h) {
        if (!units[h].is_heading()) continue;
        std::vector<std::size_t> content;
        for (std::size_t i = h + 1; i < units.size(); ++i) {
            if (!units[i].is_heading() && parent[i] == static_cast<int>(h)) {
                content.push_back(i);
            }
        }
        if (!content.empty()) emit_budgeted(content, h);
    }
    return chunks;
}

/// Full-text payload for the rewriting chunker.
inline std::string build_agentic_prompt(std::string_view markdown) {
    std::string payload(prompts::agentic_system);
    payload += "\n\n";
    payload += markdown;
    return payload;
}

struct AgenticEntry {
    std::vector<std::string> heading_trail;  // 1-3 levels, split on '>'
    std::string body;
};

struct AgenticResponse {
    std::string raw;
    std::vector<AgenticEntry> parsed;
};

/// Parses [HEAD]a > b > c[/HEAD] sections. Entries with empty bodies are
/// dropped; a response without any marker is an error carrying the raw text.
inline AgenticResponse parse_agentic_response(std::string_view text) {
    static constexpr std::string_view open = "[HEAD]";
    static constexpr std::string_view close = "[/HEAD]";

    AgenticResponse response;
    response.raw = std::string(text);

    std::size_t pos = text.find(open);
    if (pos == std::string_view::npos) throw AgenticParseError(std::string(text));

    while (pos != std::string_view::npos) {
        std::size_t head_start = pos + open.size();
        std::size_t head_end = text.find(close, head_start);
        if (head_end == std::string_view::npos) break;
        std::size_t body_start = head_end + close.size();
        std::size_t next = text.find(open, body_start);
        std::size_t body_end = (next == std::string_view::npos) ? text.size() : next;

        AgenticEntry entry;
        std::string_view head = text.substr(head_start, head_end - head_start);
        std::size_t from = 0;
        while (from <= head.size()) {
            std::size_t gt = head.find('>', from);
            std::string_view part =
                head.substr(from, gt == std::string_view::npos ? std::string_view::npos
                                                               : gt - from);
            std::string_view trimmed = detail::trim(part);
            if (!trimmed.empty()) entry.heading_trail.emplace_back(trimmed);
            if (gt == std::string_view::npos) break;
            from = gt + 1;
        }
        std::string_view body = text.substr(body_start, body_end - body_start);
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) {
            body.remove_prefix(1);
        }
        while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) {
            body.remove_suffix(1);
        }
        entry.body = std::string(body);
        if (!entry.body.empty()) response.parsed.push_back(std::move(entry));

        pos = next;
    }
    return response;
}

inline std::vector<Chunk> agentic_chunks(const std::string& doc_id,
                                         const AgenticResponse& response) {
    std::vector<Chunk> chunks;
    for (const AgenticEntry& entry : response.parsed) {
        Chunk chunk;
        chunk.doc_id = doc_id;
        chunk.method = "agentic";
        chunk.chunk_id = make_chunk_id(doc_id, chunks.size() + 1);
        chunk.heading_trail = entry.heading_trail;
        if (chunk.heading_trail.size() > 3) chunk.heading_trail.resize(3);
        chunk.body = entry.body;
        chunk.token_count = count_tokens(chunk.body);
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

/// Diagnostic similarity between rewritten chunk text and the source, as
/// 1 - edit_distance / max_length over whitespace-normalized text. Inputs are
/// capped so the quadratic distance stays cheap; this is a report value, not
/// a guarantee.
inline double agentic_fidelity(std::string_view chunks_text, std::string_view source_text) {
    auto normalize = [](std::string_view s) {
        std::string out;
        bool ws = false;
        for (char c : s) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                ws = !out.empty();
            } else {
                if (ws) out += ' ';
                ws = false;
                out += c;
            }
        }
        constexpr std::size_t cap = 20000;
        if (out.size() > cap) out.resize(cap);
        return out;
    };
    const std::string a = normalize(chunks_text);
    const std::string b = normalize(source_text);
    if (a.empty() && b.empty()) return 1.0;

    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    const double dist = static_cast<double>(prev[b.size()]);
    return 1.0 - dist / static_cast<double>(std::max(a.size(), b.size()));
}

}  // namespace wrac
