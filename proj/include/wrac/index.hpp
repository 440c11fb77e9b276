#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wrac/chunk.hpp"
#include "wrac/errors.hpp"

namespace wrac {

/// Lowercased alphanumeric word tokens.
inline std::vector<std::string> tokenize_terms(std::string_view text) {
    std::vector<std::string> terms;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            terms.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) terms.push_back(std::move(cur));
    return terms;
}

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;
};

struct RetrievalResult {
    std::vector<ScoredChunk> ranked;  // strictly descending score, id tie-break
};

/// Immutable BM25 index over chunk bodies and heading trails. Heading-trail
/// terms are indexed at double weight so section context acts as a ranking
/// prior. Safe for concurrent retrieval once built.
class Index {
public:
    static constexpr int kVersion = 1;
    static constexpr double kK1 = 1.2;
    static constexpr double kB = 0.75;

    static Index build(std::vector<Chunk> chunks) {
        if (chunks.empty()) throw DataError("cannot build an index over zero chunks");
        Index index;
        index.chunks_ = std::move(chunks);

        std::set<std::string> ids;
        for (const Chunk& c : index.chunks_) {
            if (!ids.insert(c.chunk_id).second) {
                throw DataError("duplicate chunk_id: " + c.chunk_id);
            }
        }

        double total_len = 0.0;
        index.lengths_.resize(index.chunks_.size(), 0.0);
        for (std::size_t i = 0; i < index.chunks_.size(); ++i) {
            const Chunk& c = index.chunks_[i];
            std::map<std::string, double> tf;
            for (const std::string& term : tokenize_terms(c.body)) tf[term] += 1.0;
            for (const std::string& heading : c.heading_trail) {
                for (const std::string& term : tokenize_terms(heading)) tf[term] += 2.0;
            }
            double len = 0.0;
            for (const auto& [term, freq] : tf) {
                index.postings_[term].push_back({i, freq});
                len += freq;
            }
            index.lengths_[i] = len;
            total_len += len;
        }
        index.avg_len_ = index.chunks_.empty() ? 0.0
                                               : total_len /
                                                     static_cast<double>(index.chunks_.size());
        return index;
    }

    RetrievalResult retrieve(std::string_view query, int k) const {
        if (k < 1) throw ConfigError("retrieve requires k >= 1");
        std::vector<std::string> terms = tokenize_terms(query);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

        std::map<std::size_t, double> scores;
        const double n_docs = static_cast<double>(chunks_.size());
        for (const std::string& term : terms) {
            auto it = postings_.find(term);
            if (it == postings_.end()) continue;
            const double df = static_cast<double>(it->second.size());
            const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
            for (const auto& [doc, tf] : it->second) {
                const double norm = 1.0 - kB + kB * lengths_[doc] / avg_len_;
                scores[doc] += idf * (tf * (kK1 + 1.0)) / (tf + kK1 * norm);
            }
        }

        std::vector<ScoredChunk> ranked;
        ranked.reserve(scores.size());
        for (const auto& [doc, score] : scores) {
            if (score > 0.0) ranked.push_back({chunks_[doc].chunk_id, score});
        }
        std::sort(ranked.begin(), ranked.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.chunk_id < b.chunk_id;
        });
        if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
        return {std::move(ranked)};
    }

    const std::vector<Chunk>& chunks() const { return chunks_; }

    const Chunk& chunk_by_id(const std::string& chunk_id) const {
        for (const Chunk& c : chunks_) {
            if (c.chunk_id == chunk_id) return c;
        }
        throw DataError("unknown chunk_id: " + chunk_id);
    }

    void save(const std::filesystem::path& path) const {
        nlohmann::ordered_json j;
        j["version"] = kVersion;
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const Chunk& c : chunks_) arr.push_back(chunk_to_json(c));
        j["chunks"] = std::move(arr);
        std::ofstream out(path);
        out << j.dump(2) << "\n";
    }

    static Index load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open index: " + path.string());
        nlohmann::json j = nlohmann::json::parse(in);
        if (!j.contains("version") || j["version"].get<int>() != kVersion) {
            throw DataError("unsupported index version in " + path.string());
        }
        std::vector<Chunk> chunks;
        for (const auto& cj : j.at("chunks")) chunks.push_back(chunk_from_json(cj));
        return build(std::move(chunks));
    }

private:
    struct Posting {
        std::size_t doc;
        double tf;
    };

    std::vector<Chunk> chunks_;
    std::map<std::string, std::vector<Posting>> postings_;
    std::vector<double> lengths_;
    double avg_len_ = 0.0;
};

/// Optional dense-retrieval hook: rank by cosine similarity under a caller
/// supplied embedding function.
using EmbeddingFn = std::function<std::vector<float>(const std::string&)>;

class EmbeddingIndex {
public:
    EmbeddingIndex(std::vector<Chunk> chunks, EmbeddingFn embed)
        : chunks_(std::move(chunks)), embed_(std::move(embed)) {
        vectors_.reserve(chunks_.size());
        for (const Chunk& c : chunks_) vectors_.push_back(embed_(c.body));
    }

    RetrievalResult retrieve(const std::string& query, int k) const {
        const std::vector<float> q = embed_(query);
        std::vector<ScoredChunk> ranked;
        for (std::size_t i = 0; i < chunks_.size(); ++i) {
            ranked.push_back({chunks_[i].chunk_id, cosine(q, vectors_[i])});
        }
        std::sort(ranked.begin(), ranked.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.chunk_id < b.chunk_id;
        });
        if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
        return {std::move(ranked)};
    }

private:
    static double cosine(const std::vector<float>& a, const std::vector<float>& b) {
        double dot = 0, na = 0, nb = 0;
        const std::size_t n = std::min(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i) {
            dot += static_cast<double>(a[i]) * b[i];
            na += static_cast<double>(a[i]) * a[i];
            nb += static_cast<double>(b[i]) * b[i];
        }
        return (na == 0 || nb == 0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
    }

    std::vector<Chunk> chunks_;
    EmbeddingFn embed_;
    std::vector<std::vector<float>> vectors_;
};

}  // namespace wrac
