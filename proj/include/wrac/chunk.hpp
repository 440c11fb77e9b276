#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

namespace wrac {

/// A resolved, retrievable chunk. `body` holds only text that exists in the
/// source units; nothing is ever regenerated.
struct Chunk {
    std::string chunk_id;  // <doc_id>#<group ordinal>
    std::string doc_id;
    std::string method = "wrac";  // wrac | fixed | structural | agentic
    std::vector<std::string> unit_ids;
    std::vector<std::string> heading_trail;  // up to 3 heading texts, L1 -> L3
    std::string body;
    long token_count = 0;
};

/// Zero-padded ordinal keeps chunk ids lexicographically ordered, which the
/// retrieval tie-break relies on.
inline std::string make_chunk_id(const std::string& doc_id, std::size_t ordinal) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", ordinal);
    return doc_id + "#" + buf;
}

inline nlohmann::ordered_json chunk_to_json(const Chunk& c) {
    nlohmann::ordered_json j;
    j["chunk_id"] = c.chunk_id;
    j["doc_id"] = c.doc_id;
    j["method"] = c.method;
    j["heading_trail"] = c.heading_trail;
    j["unit_ids"] = c.unit_ids;
    j["body"] = c.body;
    j["token_count"] = c.token_count;
    return j;
}

inline Chunk chunk_from_json(const nlohmann::json& j) {
    Chunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.doc_id = j.at("doc_id").get<std::string>();
    c.method = j.value("method", "wrac");
    c.heading_trail = j.value("heading_trail", std::vector<std::string>{});
    c.unit_ids = j.value("unit_ids", std::vector<std::string>{});
    c.body = j.at("body").get<std::string>();
    c.token_count = j.value("token_count", 0L);
    return c;
}

}  // namespace wrac
