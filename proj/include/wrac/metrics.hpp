#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wrac/errors.hpp"

namespace wrac {

/// A retrieval ranking with relevance judgments attached: entry i lists the
/// gold-item indexes the chunk at rank i+1 satisfies (empty = not relevant).
struct JudgedRanking {
    std::vector<std::vector<int>> relevant_gold;
    int gold_count = 0;
};

/// Fraction of gold items covered by at least one chunk in the top k.
inline double recall_at_k(const JudgedRanking& jr, int k) {
    if (jr.gold_count <= 0) throw DataError("recall undefined for empty gold set");
    std::set<int> covered;
    const std::size_t depth = std::min<std::size_t>(jr.relevant_gold.size(),
                                                    static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < depth; ++i) {
        covered.insert(jr.relevant_gold[i].begin(), jr.relevant_gold[i].end());
    }
    return static_cast<double>(covered.size()) / static_cast<double>(jr.gold_count);
}

/// Relevant chunks in the top k over k; ranks past the end of the list count
/// as non-relevant.
inline double precision_at_k(const JudgedRanking& jr, int k) {
    if (k <= 0) throw ConfigError("precision_at_k requires k >= 1");
    int relevant = 0;
    const std::size_t depth = std::min<std::size_t>(jr.relevant_gold.size(),
                                                    static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < depth; ++i) {
        if (!jr.relevant_gold[i].empty()) ++relevant;
    }
    return static_cast<double>(relevant) / static_cast<double>(k);
}

/// Reciprocal rank of the first relevant chunk, 0 when none is.
inline double mrr(const JudgedRanking& jr) {
    for (std::size_t i = 0; i < jr.relevant_gold.size(); ++i) {
        if (!jr.relevant_gold[i].empty()) return 1.0 / static_cast<double>(i + 1);
    }
    return 0.0;
}

/// Binary-gain NDCG: DCG over the top k against the ideal placement of the
/// ranking's relevant chunks, 0 when there are none.
inline double ndcg_at_k(const JudgedRanking& jr, int k) {
    const std::size_t depth = std::min<std::size_t>(jr.relevant_gold.size(),
                                                    static_cast<std::size_t>(k));
    double dcg = 0.0;
    int total_relevant = 0;
    for (std::size_t i = 0; i < jr.relevant_gold.size(); ++i) {
        if (jr.relevant_gold[i].empty()) continue;
        ++total_relevant;
        if (i < depth) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    const int ideal = std::min(total_relevant, k);
    double idcg = 0.0;
    for (int i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return idcg == 0.0 ? 0.0 : dcg / idcg;
}

/// All metrics for one query at the run's two cutoffs.
struct QueryMetrics {
    std::string query_id;
    std::string org;
    std::string category;
    int k_lo = 3;
    int k_hi = 6;
    double recall_hi = 0, recall_lo = 0;
    double precision_hi = 0, precision_lo = 0;
    double mrr_value = 0;
    double ndcg_hi = 0, ndcg_lo = 0;
};

inline QueryMetrics score_query(const JudgedRanking& jr, int k_lo, int k_hi) {
    QueryMetrics m;
    m.k_lo = k_lo;
    m.k_hi = k_hi;
    m.recall_hi = recall_at_k(jr, k_hi);
    m.recall_lo = recall_at_k(jr, k_lo);
    m.precision_hi = precision_at_k(jr, k_hi);
    m.precision_lo = precision_at_k(jr, k_lo);
    m.mrr_value = mrr(jr);
    m.ndcg_hi = ndcg_at_k(jr, k_hi);
    m.ndcg_lo = ndcg_at_k(jr, k_lo);
    return m;
}

/// One row of the retrieval tables: unweighted means over a query group.
struct MetricsRow {
    std::string group_key;  // organization, query category, or "Overall"
    std::string method;
    int k_lo = 3;
    int k_hi = 6;
    double recall_hi = 0, recall_lo = 0;
    double precision_hi = 0, precision_lo = 0;
    double mrr_value = 0;
    double ndcg_hi = 0, ndcg_lo = 0;
    int count = 0;
};

enum class Grouping { org, category, overall };

inline const std::vector<std::string>& canonical_categories() {
    static const std::vector<std::string> cats = {
        "Descriptive", "Analytical", "Comparative", "Boolean",
        "Temporal",    "Procedural", "Open-Ended",
    };
    return cats;
}

/// Unweighted mean per group. Organizations order lexicographically,
/// categories follow the canonical seven-class order.
inline std::vector<MetricsRow> aggregate(const std::vector<QueryMetrics>& per_query,
                                         Grouping grouping, const std::string& method) {
    std::map<std::string, std::vector<const QueryMetrics*>> groups;
    for (const QueryMetrics& q : per_query) {
        std::string key = grouping == Grouping::org        ? q.org
                          : grouping == Grouping::category ? q.category
                                                           : std::string("Overall");
        groups[key].push_back(&q);
    }

    std::vector<std::string> order;
    if (grouping == Grouping::category) {
        for (const std::string& c : canonical_categories()) {
            if (groups.count(c)) order.push_back(c);
        }
        for (const auto& [key, _] : groups) {
            if (std::find(order.begin(), order.end(), key) == order.end()) {
                order.push_back(key);
            }
        }
    } else {
        for (const auto& [key, _] : groups) order.push_back(key);
    }

    std::vector<MetricsRow> rows;
    for (const std::string& key : order) {
        const auto& members = groups[key];
        MetricsRow row;
        row.group_key = key;
        row.method = method;
        row.count = static_cast<int>(members.size());
        if (!members.empty()) {
            row.k_lo = members.front()->k_lo;
            row.k_hi = members.front()->k_hi;
        }
        for (const QueryMetrics* q : members) {
            row.recall_hi += q->recall_hi;
            row.recall_lo += q->recall_lo;
            row.precision_hi += q->precision_hi;
            row.precision_lo += q->precision_lo;
            row.mrr_value += q->mrr_value;
            row.ndcg_hi += q->ndcg_hi;
            row.ndcg_lo += q->ndcg_lo;
        }
        if (row.count > 0) {
            const double n = row.count;
            row.recall_hi /= n;
            row.recall_lo /= n;
            row.precision_hi /= n;
            row.precision_lo /= n;
            row.mrr_value /= n;
            row.ndcg_hi /= n;
            row.ndcg_lo /= n;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace wrac
