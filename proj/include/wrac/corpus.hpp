#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrac/document.hpp"
#include "wrac/errors.hpp"
#include "wrac/judge.hpp"

namespace wrac {

/// Loads every .md/.html file under <root>/docs. The first directory level
/// below docs/ names the organization; doc ids are the docs-relative paths.
/// Results are sorted by doc_id so downstream runs are order-stable.
inline std::vector<SourceDocument> load_corpus(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    const fs::path docs = root / "docs";
    if (!fs::is_directory(docs)) {
        throw DataError("no documents: " + docs.string() + " is not a directory");
    }

    std::vector<SourceDocument> out;
    for (const auto& entry : fs::recursive_directory_iterator(docs)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext != ".md" && ext != ".html" && ext != ".htm") continue;

        SourceDocument doc;
        doc.origin_path = entry.path().string();
        doc.media = (ext == ".md") ? Media::markdown : Media::html;
        doc.doc_id = fs::relative(entry.path(), docs).generic_string();

        const fs::path rel = fs::relative(entry.path(), docs);
        doc.org = rel.has_parent_path() ? rel.begin()->string() : "default";

        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        doc.raw = buf.str();
        doc.byte_len = doc.raw.size();
        out.push_back(std::move(doc));
    }
    if (out.empty()) throw DataError("no documents under " + docs.string());
    std::sort(out.begin(), out.end(), [](const SourceDocument& a, const SourceDocument& b) {
        return a.doc_id < b.doc_id;
    });

    std::set<std::string> ids;
    for (const SourceDocument& d : out) {
        if (!ids.insert(d.doc_id).second) throw DataError("duplicate doc_id: " + d.doc_id);
    }
    return out;
}

/// Reads one query record per line:
/// {"query_id", "text", "category", "org", "gold": [{"doc_id", "evidence"}]}.
/// Records with an empty gold list are skipped with a warning since recall is
/// undefined for them; unknown categories are rejected.
inline std::vector<QueryRecord> load_queries(const std::filesystem::path& path,
                                             std::ostream* warnings = &std::cerr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open query file: " + path.string());

    std::vector<QueryRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw DataError("bad query record at " + path.string() + ":" +
                            std::to_string(lineno));
        }
        QueryRecord q;
        q.query_id = j.at("query_id").get<std::string>();
        q.text = j.at("text").get<std::string>();
        q.category = j.at("category").get<std::string>();
        q.org = j.value("org", "default");
        for (const auto& g : j.value("gold", nlohmann::json::array())) {
            q.gold.push_back({g.at("doc_id").get<std::string>(),
                              g.at("evidence").get<std::string>()});
        }

        const auto& cats = canonical_categories();
        if (std::find(cats.begin(), cats.end(), q.category) == cats.end()) {
            throw DataError("unknown query category '" + q.category + "' for " + q.query_id);
        }
        if (q.gold.empty()) {
            if (warnings) {
                *warnings << "warning: query " << q.query_id
                          << " has no gold items; excluded from evaluation\n";
            }
            continue;
        }
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace wrac
