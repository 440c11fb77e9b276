#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrac/errors.hpp"

namespace wrac {

/// One accounting row: token and wall-time usage for one file under one method.
struct LedgerRow {
    std::string org;
    std::string method;
    std::string file;
    long input_tokens = 0;
    long output_tokens = 0;
    long cached_tokens = 0;
    double wall_seconds = 0.0;
};

/// Append-only usage store; appends may come from concurrent per-document
/// workers and rows keep their per-file attribution.
class UsageLedger {
public:
    void append(LedgerRow row) {
        std::lock_guard lock(mutex_);
        rows_.push_back(std::move(row));
    }

    std::vector<LedgerRow> rows() const {
        std::lock_guard lock(mutex_);
        return rows_;
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path);
        for (const LedgerRow& r : rows()) {
            nlohmann::ordered_json j;
            j["org"] = r.org;
            j["method"] = r.method;
            j["file"] = r.file;
            j["input_tokens"] = r.input_tokens;
            j["output_tokens"] = r.output_tokens;
            j["cached_tokens"] = r.cached_tokens;
            j["wall_seconds"] = r.wall_seconds;
            out << j.dump() << "\n";
        }
    }

    static std::vector<LedgerRow> load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open ledger: " + path.string());
        std::vector<LedgerRow> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            LedgerRow r;
            r.org = j.value("org", "");
            r.method = j.value("method", "");
            r.file = j.value("file", "");
            r.input_tokens = j.value("input_tokens", 0L);
            r.output_tokens = j.value("output_tokens", 0L);
            r.cached_tokens = j.value("cached_tokens", 0L);
            r.wall_seconds = j.value("wall_seconds", 0.0);
            rows.push_back(std::move(r));
        }
        return rows;
    }

private:
    mutable std::mutex mutex_;
    std::vector<LedgerRow> rows_;
};

/// Per-token prices. Defaults follow standard GPT-4.1-class pricing.
struct CostModel {
    double price_input = 0.000002;
    double price_output = 0.000008;
    double price_cache = 0.0000005;
};

struct MethodCost {
    std::string method;
    long input_tokens = 0;
    long output_tokens = 0;
    long cached_tokens = 0;
    double input_cost = 0;
    double output_cost = 0;
    double cache_cost = 0;
    double total_cost = 0;
};

/// Token-linear cost per method: sum tokens, multiply by unit prices.
inline std::vector<MethodCost> compute_cost(const std::vector<LedgerRow>& rows,
                                            const CostModel& model) {
    std::map<std::string, MethodCost> by_method;
    for (const LedgerRow& r : rows) {
        MethodCost& c = by_method[r.method];
        c.method = r.method;
        c.input_tokens += r.input_tokens;
        c.output_tokens += r.output_tokens;
        c.cached_tokens += r.cached_tokens;
    }
    std::vector<MethodCost> out;
    for (auto& [_, c] : by_method) {
        c.input_cost = static_cast<double>(c.input_tokens) * model.price_input;
        c.output_cost = static_cast<double>(c.output_tokens) * model.price_output;
        c.cache_cost = static_cast<double>(c.cached_tokens) * model.price_cache;
        c.total_cost = c.input_cost + c.output_cost + c.cache_cost;
        out.push_back(c);
    }
    return out;
}

/// (after - before) / before, in percent.
inline double relative_change(double before, double after) {
    if (before == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (after - before) / before * 100.0;
}

/// Costs are published to the cent, so comparative cost deltas are taken over
/// the rounded values.
inline double round_cents(double dollars) {
    return std::round(dollars * 100.0) / 100.0;
}

/// Nearest-rank percentile (p in [0,100]) over an unsorted sample.
inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(p / 100.0 * static_cast<double>(values.size()));
    const std::size_t idx = static_cast<std::size_t>(
        std::clamp<double>(rank, 1.0, static_cast<double>(values.size())));
    return values[idx - 1];
}

/// Aggregate token/time statistics for one method over its ledger rows.
struct MethodStats {
    std::string method;
    long total_length = 0;  // filled by callers that track document bytes
    long input_tokens = 0;
    long output_tokens = 0;
    long cached_tokens = 0;
    double total_seconds = 0;
    int files = 0;
    double avg_input_tokens = 0;
    double avg_output_tokens = 0;
    double avg_seconds = 0;
    double p90_seconds = 0;
    double p95_seconds = 0;
};

inline MethodStats method_stats(const std::vector<LedgerRow>& rows, const std::string& method) {
    MethodStats s;
    s.method = method;
    std::vector<double> times;
    for (const LedgerRow& r : rows) {
        if (r.method != method) continue;
        s.input_tokens += r.input_tokens;
        s.output_tokens += r.output_tokens;
        s.cached_tokens += r.cached_tokens;
        s.total_seconds += r.wall_seconds;
        times.push_back(r.wall_seconds);
        ++s.files;
    }
    if (s.files > 0) {
        s.avg_input_tokens = static_cast<double>(s.input_tokens) / s.files;
        s.avg_output_tokens = static_cast<double>(s.output_tokens) / s.files;
        s.avg_seconds = s.total_seconds / s.files;
        s.p90_seconds = percentile(times, 90.0);
        s.p95_seconds = percentile(times, 95.0);
    }
    return s;
}

}  // namespace wrac
