#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wrac/baselines.hpp"
#include "wrac/corpus.hpp"
#include "wrac/index.hpp"
#include "wrac/judge.hpp"
#include "wrac/ledger.hpp"
#include "wrac/llm_client.hpp"
#include "wrac/metrics.hpp"
#include "wrac/parse.hpp"
#include "wrac/planner.hpp"
#include "wrac/report.hpp"
#include "wrac/resolver.hpp"

namespace wrac {

inline const std::set<std::string>& known_methods() {
    static const std::set<std::string> methods = {
        "wrac", "wrac-structural", "fixed", "structural", "agentic",
    };
    return methods;
}

struct RunConfig {
    std::filesystem::path corpus_root;
    std::filesystem::path out_dir = "wrac-out";
    std::string method = "wrac-structural";
    ClientConfig client = ClientConfig::from_env();
    long max_chunk_tokens = 512;
    long fixed_size_tokens = 512;
    long fixed_overlap_tokens = 64;
    int k_lo = 3;
    int k_hi = 6;
    CostModel prices;
    int jobs = 1;
    std::string model = "gpt-4.1";
    bool payload_text = true;

    void validate() const {
        if (!known_methods().count(method)) {
            throw ConfigError("unknown method '" + method + "'");
        }
        if (k_lo < 1 || k_hi < k_lo) throw ConfigError("k values must satisfy 1 <= k_lo <= k_hi");
        if (jobs < 1) throw ConfigError("--jobs must be >= 1");
        if (prices.price_input < 0 || prices.price_output < 0 || prices.price_cache < 0) {
            throw ConfigError("prices must be >= 0");
        }
    }

    PlannerConfig planner_config() const {
        PlannerConfig pc;
        pc.max_chunk_tokens = max_chunk_tokens;
        pc.include_unit_text_in_payload = payload_text;
        pc.model = model;
        return pc;
    }
};

/// Runs fn(0..n) across up to `jobs` workers. Results must be written to
/// pre-sized slots so output order never depends on scheduling.
template <typename Fn>
inline void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct IngestedDoc {
    SourceDocument source;
    std::string markdown;   // post-conversion body
    ParsedDocument parsed;  // unfiltered units
    std::string error;      // non-empty when this file could not be parsed
};

/// Parses the whole corpus; per-file failures are recorded, not fatal.
inline std::vector<IngestedDoc> ingest_corpus(const RunConfig& cfg) {
    const std::vector<SourceDocument> sources = load_corpus(cfg.corpus_root);
    std::vector<IngestedDoc> docs(sources.size());
    parallel_for(sources.size(), cfg.jobs, [&](std::size_t i) {
        docs[i].source = sources[i];
        try {
            docs[i].markdown = document_markdown(sources[i]);
            SourceDocument as_md = sources[i];
            as_md.media = Media::markdown;
            as_md.raw = docs[i].markdown;
            docs[i].parsed = parse_markdown(as_md);
        } catch (const Error& e) {
            docs[i].error = e.what();
        }
    });
    return docs;
}

struct DocChunkResult {
    std::vector<Chunk> chunks;
    LedgerRow ledger;
    std::optional<ChunkPlan> plan;
    PlannerKind planner_kind = PlannerKind::structural;
    bool fallback = false;
    long wall_ms = 0;                    // model time; zero for local-only methods
    std::optional<double> fidelity;      // agentic text-fidelity diagnostic
};

/// Produces this method's chunks for one document, with its ledger row.
/// Ledger time is the model-reported latency, so replayed runs account the
/// recorded cost and local-only methods account zero.
inline DocChunkResult chunk_document(const IngestedDoc& doc, const RunConfig& cfg,
                                     ChatClient* client) {
    DocChunkResult result;
    result.ledger.org = doc.source.org;
    result.ledger.method = cfg.method == "wrac-structural" ? "wrac" : cfg.method;
    result.ledger.file = doc.source.doc_id;

    const PlannerConfig pc = cfg.planner_config();

    if (cfg.method == "wrac" || cfg.method == "wrac-structural") {
        ParsedDocument planned = pc.boilerplate_filter ? filter_boilerplate(doc.parsed)
                                                       : doc.parsed;
        if (planned.units.empty()) return result;  // everything was boilerplate
        ChunkPlan plan;
        if (cfg.method == "wrac") {
            if (client == nullptr) throw ConfigError("method 'wrac' needs a chat client");
            LlmPlanResult llm = llm_plan(planned, pc, *client);
            plan = std::move(llm.plan);
            result.fallback = llm.fallback;
            result.wall_ms = llm.wall_ms;
            result.ledger.input_tokens = llm.usage.input_tokens;
            result.ledger.output_tokens = llm.usage.output_tokens;
            result.ledger.cached_tokens = llm.usage.cached_tokens;
        } else {
            plan = structural_plan(planned, pc);
        }
        ValidationReport report = validate_plan(plan, planned);
        if (!report.ok) plan = repair_plan(plan, planned, report);
        result.planner_kind = plan.planner_kind;
        result.chunks = resolve_plan(plan, planned);
        result.plan = std::move(plan);
    } else if (cfg.method == "fixed") {
        result.chunks = fixed_size_chunk(doc.source.doc_id, doc.markdown,
                                         cfg.fixed_size_tokens, cfg.fixed_overlap_tokens);
    } else if (cfg.method == "structural") {
        result.chunks = structural_chunk(doc.parsed, cfg.max_chunk_tokens);
    } else if (cfg.method == "agentic") {
        if (client == nullptr) throw ConfigError("method 'agentic' needs a chat client");
        ChatRequest request;
        request.model = cfg.model;
        request.system_text = std::string(prompts::agentic_system);
        request.user_text = doc.markdown;
        request.temperature = 0.0;
        ChatExchange exchange;
        try {
            exchange = client->complete(request);
        } catch (const TransportError& e) {
            throw PlannerUnavailable(std::string("agentic transport failed: ") + e.what());
        }
        result.wall_ms = exchange.latency_ms;
        result.ledger.input_tokens = exchange.usage.input_tokens;
        result.ledger.output_tokens = exchange.usage.output_tokens;
        result.ledger.cached_tokens = exchange.usage.cached_tokens;
        AgenticResponse response = parse_agentic_response(exchange.response_text);
        result.chunks = agentic_chunks(doc.source.doc_id, response);
        std::string bodies;
        for (const Chunk& c : result.chunks) {
            bodies += c.body;
            bodies += "\n";
        }
        result.fidelity = agentic_fidelity(bodies, doc.markdown);
    } else {
        throw ConfigError("unknown method '" + cfg.method + "'");
    }

    for (Chunk& c : result.chunks) c.method = result.ledger.method;
    result.ledger.wall_seconds = static_cast<double>(result.wall_ms) / 1000.0;
    return result;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

inline std::filesystem::path doc_relative_path(const std::string& doc_id,
                                               const std::string& suffix) {
    return std::filesystem::path(doc_id + suffix);
}

}  // namespace detail

struct IngestSummary {
    int files = 0;
    int errors = 0;
    long total_chars = 0;
};

/// ingest: parse every document into its unit file, plus a corpus summary
/// with per-organization file counts and content lengths.
inline IngestSummary cmd_ingest(const RunConfig& cfg) {
    cfg.validate();
    const std::vector<IngestedDoc> docs = ingest_corpus(cfg);

    IngestSummary summary;
    nlohmann::ordered_json doc_rows = nlohmann::ordered_json::array();
    std::map<std::string, std::pair<int, long>> by_org;  // org -> (files, chars)

    for (const IngestedDoc& doc : docs) {
        ++summary.files;
        nlohmann::ordered_json row;
        row["doc_id"] = doc.source.doc_id;
        row["org"] = doc.source.org;
        row["media"] = to_string(doc.source.media);
        row["byte_len"] = doc.source.byte_len;
        if (!doc.error.empty()) {
            ++summary.errors;
            row["error"] = doc.error;
            std::cerr << "warning: " << doc.source.doc_id << ": " << doc.error << "\n";
        } else {
            row["units"] = doc.parsed.units.size();
            row["chars"] = doc.parsed.total_chars;
            summary.total_chars += doc.parsed.total_chars;
            auto& [files, chars] = by_org[doc.source.org];
            ++files;
            chars += doc.parsed.total_chars;
            const auto path = cfg.out_dir / "units" /
                              detail::doc_relative_path(doc.source.doc_id, ".units.json");
            detail::write_text(path, units_to_json(doc.parsed).dump(2) + "\n");
        }
        doc_rows.push_back(std::move(row));
    }

    nlohmann::ordered_json j;
    j["files"] = summary.files;
    j["errors"] = summary.errors;
    j["total_chars"] = summary.total_chars;
    nlohmann::ordered_json orgs = nlohmann::ordered_json::array();
    for (const auto& [org, fc] : by_org) {
        orgs.push_back({{"org", org}, {"total_files", fc.first}, {"total_length", fc.second}});
    }
    j["orgs"] = std::move(orgs);
    j["docs"] = std::move(doc_rows);
    detail::write_text(cfg.out_dir / "parse_summary.json", j.dump(2) + "\n");
    return summary;
}

/// Everything cmd_eval knows after chunking, reused by the narrower commands.
struct ChunkRunResult {
    std::vector<IngestedDoc> docs;
    std::vector<DocChunkResult> per_doc;
    std::vector<Chunk> all_chunks;
    UsageLedger ledger;
};

inline ChunkRunResult run_chunking(const RunConfig& cfg, ChatClient* client) {
    ChunkRunResult run;
    run.docs = ingest_corpus(cfg);
    run.per_doc.resize(run.docs.size());

    parallel_for(run.docs.size(), cfg.jobs, [&](std::size_t i) {
        if (!run.docs[i].error.empty()) return;
        run.per_doc[i] = chunk_document(run.docs[i], cfg, client);
    });

    for (std::size_t i = 0; i < run.docs.size(); ++i) {
        if (!run.docs[i].error.empty()) {
            std::cerr << "warning: " << run.docs[i].source.doc_id << ": " << run.docs[i].error
                      << "\n";
            continue;
        }
        run.ledger.append(run.per_doc[i].ledger);
        for (const Chunk& c : run.per_doc[i].chunks) run.all_chunks.push_back(c);
    }
    return run;
}

inline std::unique_ptr<ChatClient> make_client(const RunConfig& cfg) {
    if (cfg.method == "wrac" || cfg.method == "agentic") {
        return std::make_unique<CachingChatClient>(cfg.client);
    }
    return nullptr;
}

inline void write_chunks_file(const std::filesystem::path& path,
                              const std::vector<Chunk>& chunks) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (const Chunk& c : chunks) out << chunk_to_json(c).dump() << "\n";
}

inline std::vector<Chunk> read_chunks_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open chunks file: " + path.string());
    std::vector<Chunk> chunks;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) chunks.push_back(chunk_from_json(nlohmann::json::parse(line)));
    }
    return chunks;
}

inline void write_plan_artifacts(const RunConfig& cfg, const ChunkRunResult& run) {
    std::ofstream log;
    for (std::size_t i = 0; i < run.docs.size(); ++i) {
        const DocChunkResult& r = run.per_doc[i];
        if (!r.plan) continue;
        const auto path = cfg.out_dir / "plans" /
                          detail::doc_relative_path(run.docs[i].source.doc_id, ".plan.json");
        detail::write_text(path, plan_to_json(*r.plan) + "\n");
        if (!log.is_open()) {
            std::filesystem::create_directories(cfg.out_dir);
            log.open(cfg.out_dir / "run_log.jsonl");
        }
        nlohmann::ordered_json row;
        row["doc_id"] = run.docs[i].source.doc_id;
        row["planner_kind"] = to_string(r.plan->planner_kind);
        row["fallback"] = r.fallback;
        row["usage"] = {{"input_tokens", r.ledger.input_tokens},
                        {"output_tokens", r.ledger.output_tokens},
                        {"cached_tokens", r.ledger.cached_tokens}};
        row["wall_ms"] = r.wall_ms;
        log << row.dump() << "\n";
    }
}

/// Table-4 style cost report for the methods present in a ledger.
inline std::string render_cost_report(const std::vector<MethodCost>& costs,
                                      const CostModel& prices) {
    std::vector<std::string> headers = {"Component", "Pricing ($/token)"};
    for (const MethodCost& c : costs) headers.push_back(c.method + " Cost ($)");
    TextTable table(headers);

    auto add = [&](const std::string& name, double price, auto getter) {
        std::vector<std::string> row = {name, format_fixed(price, 7)};
        for (const MethodCost& c : costs) row.push_back(format_money(getter(c)));
        table.add_row(row);
    };
    add("Input Tokens", prices.price_input, [](const MethodCost& c) { return c.input_cost; });
    add("Cache Tokens", prices.price_cache, [](const MethodCost& c) { return c.cache_cost; });
    add("Output Tokens", prices.price_output,
        [](const MethodCost& c) { return c.output_cost; });
    std::vector<std::string> total = {"Total Cost", "--"};
    for (const MethodCost& c : costs) total.push_back(format_money(c.total_cost));
    table.add_row(total);
    return table.render();
}

namespace detail {

inline std::vector<std::string> metrics_headers(const std::string& first, int k_lo, int k_hi,
                                                bool with_method = true) {
    auto k = [](const std::string& name, int kv) { return name + "@" + std::to_string(kv); };
    std::vector<std::string> headers = {first};
    if (with_method) headers.push_back("Method");
    for (const std::string& h :
         {"Avg " + k("Recall", k_hi), "Avg " + k("Recall", k_lo),
          "Avg " + k("Precision", k_hi), "Avg " + k("Precision", k_lo), std::string("Avg MRR"),
          "Avg " + k("NDCG", k_hi), "Avg " + k("NDCG", k_lo), std::string("Count")}) {
        headers.push_back(h);
    }
    return headers;
}

inline std::vector<std::string> metrics_cells(const MetricsRow& r, bool with_key) {
    std::vector<std::string> cells;
    if (with_key) cells.push_back(r.group_key);
    cells.push_back(r.method);
    cells.push_back(format_fixed(r.recall_hi, 2));
    cells.push_back(format_fixed(r.recall_lo, 2));
    cells.push_back(format_fixed(r.precision_hi, 2));
    cells.push_back(format_fixed(r.precision_lo, 2));
    cells.push_back(format_fixed(r.mrr_value, 2));
    cells.push_back(format_fixed(r.ndcg_hi, 2));
    cells.push_back(format_fixed(r.ndcg_lo, 2));
    cells.push_back(std::to_string(r.count));
    return cells;
}

inline nlohmann::ordered_json metrics_row_json(const MetricsRow& r, const std::string& grouping) {
    nlohmann::ordered_json j;
    j["grouping"] = grouping;
    j["group"] = r.group_key;
    j["method"] = r.method;
    j["k_lo"] = r.k_lo;
    j["k_hi"] = r.k_hi;
    j["recall_hi"] = r.recall_hi;
    j["recall_lo"] = r.recall_lo;
    j["precision_hi"] = r.precision_hi;
    j["precision_lo"] = r.precision_lo;
    j["mrr"] = r.mrr_value;
    j["ndcg_hi"] = r.ndcg_hi;
    j["ndcg_lo"] = r.ndcg_lo;
    j["count"] = r.count;
    return j;
}

inline MetricsRow metrics_row_from_json(const nlohmann::json& j) {
    MetricsRow r;
    r.group_key = j.value("group", "");
    r.method = j.value("method", "");
    r.k_lo = j.value("k_lo", 3);
    r.k_hi = j.value("k_hi", 6);
    r.recall_hi = j.value("recall_hi", 0.0);
    r.recall_lo = j.value("recall_lo", 0.0);
    r.precision_hi = j.value("precision_hi", 0.0);
    r.precision_lo = j.value("precision_lo", 0.0);
    r.mrr_value = j.value("mrr", 0.0);
    r.ndcg_hi = j.value("ndcg_hi", 0.0);
    r.ndcg_lo = j.value("ndcg_lo", 0.0);
    r.count = j.value("count", 0);
    return r;
}

}  // namespace detail

/// eval: the full pipeline — parse, plan, chunk, index, retrieve, judge,
/// aggregate — emitting machine-readable records and table-layout reports.
/// Returns the overall metrics rows.
inline std::vector<MetricsRow> cmd_eval(const RunConfig& cfg) {
    cfg.validate();
    std::unique_ptr<ChatClient> client = make_client(cfg);
    ChunkRunResult run = run_chunking(cfg, client.get());
    if (run.all_chunks.empty()) throw DataError("no chunks produced; nothing to evaluate");

    std::filesystem::create_directories(cfg.out_dir);
    write_chunks_file(cfg.out_dir / "chunks.jsonl", run.all_chunks);
    write_plan_artifacts(cfg, run);

    const Index index = Index::build(run.all_chunks);
    index.save(cfg.out_dir / "index.json");

    const std::vector<QueryRecord> queries = load_queries(cfg.corpus_root / "queries.jsonl");
    if (queries.empty()) throw DataError("no usable queries in corpus");

    const std::string method_label = run.all_chunks.front().method;
    std::vector<QueryMetrics> per_query(queries.size());
    parallel_for(queries.size(), cfg.jobs, [&](std::size_t i) {
        const QueryRecord& q = queries[i];
        const RetrievalResult result = index.retrieve(q.text, cfg.k_hi);
        std::vector<const Chunk*> ranked;
        ranked.reserve(result.ranked.size());
        for (const ScoredChunk& s : result.ranked) ranked.push_back(&index.chunk_by_id(s.chunk_id));
        per_query[i] = score_query(judge_ranking(ranked, q.gold), cfg.k_lo, cfg.k_hi);
        per_query[i].query_id = q.query_id;
        per_query[i].org = q.org;
        per_query[i].category = q.category;
    });

    {
        std::ofstream out(cfg.out_dir / "per_query_metrics.jsonl");
        for (const QueryMetrics& m : per_query) {
            nlohmann::ordered_json j;
            j["query_id"] = m.query_id;
            j["org"] = m.org;
            j["category"] = m.category;
            j["recall_hi"] = m.recall_hi;
            j["recall_lo"] = m.recall_lo;
            j["precision_hi"] = m.precision_hi;
            j["precision_lo"] = m.precision_lo;
            j["mrr"] = m.mrr_value;
            j["ndcg_hi"] = m.ndcg_hi;
            j["ndcg_lo"] = m.ndcg_lo;
            out << j.dump() << "\n";
        }
    }

    const auto by_org = aggregate(per_query, Grouping::org, method_label);
    const auto by_category = aggregate(per_query, Grouping::category, method_label);
    const auto overall = aggregate(per_query, Grouping::overall, method_label);

    {
        std::ofstream out(cfg.out_dir / "metrics.jsonl");
        for (const auto& r : by_org) out << detail::metrics_row_json(r, "org").dump() << "\n";
        for (const auto& r : by_category) {
            out << detail::metrics_row_json(r, "category").dump() << "\n";
        }
        for (const auto& r : overall) {
            out << detail::metrics_row_json(r, "overall").dump() << "\n";
        }
    }

    auto render_rows = [&](const std::string& first, const std::vector<MetricsRow>& rows,
                           bool with_key) {
        TextTable table(detail::metrics_headers(first, cfg.k_lo, cfg.k_hi));
        for (const MetricsRow& r : rows) table.add_row(detail::metrics_cells(r, with_key));
        return table.render();
    };
    detail::write_text(cfg.out_dir / "report_by_org.txt",
                       render_rows("Organization", by_org, true));
    detail::write_text(cfg.out_dir / "report_by_category.txt",
                       render_rows("Query Type", by_category, true));
    {
        // Overall table keys rows by method alone.
        TextTable table(detail::metrics_headers("Method", cfg.k_lo, cfg.k_hi, false));
        for (const MetricsRow& r : overall) table.add_row(detail::metrics_cells(r, false));
        detail::write_text(cfg.out_dir / "report_overall.txt", table.render());
    }

    const std::vector<LedgerRow> rows = run.ledger.rows();
    run.ledger.save(cfg.out_dir / "usage_ledger.jsonl");
    detail::write_text(cfg.out_dir / "report_cost.txt",
                       render_cost_report(compute_cost(rows, cfg.prices), cfg.prices));

    // Run summary (no wall-clock content: outputs stay replay-stable).
    nlohmann::ordered_json summary;
    summary["corpus"] = cfg.corpus_root.string();
    summary["method"] = cfg.method;
    summary["files"] = run.docs.size();
    int errors = 0;
    for (const auto& d : run.docs) errors += d.error.empty() ? 0 : 1;
    summary["parse_errors"] = errors;
    summary["chunks"] = run.all_chunks.size();
    summary["queries"] = queries.size();
    nlohmann::ordered_json fidelity = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < run.docs.size(); ++i) {
        if (run.per_doc[i].fidelity) {
            fidelity.push_back({{"doc_id", run.docs[i].source.doc_id},
                                {"fidelity", *run.per_doc[i].fidelity}});
        }
    }
    if (!fidelity.empty()) summary["agentic_fidelity"] = std::move(fidelity);
    detail::write_text(cfg.out_dir / "summary.json", summary.dump(2) + "\n");

    return overall;
}

/// One side of a method comparison, read back from a completed run directory.
struct CompareSide {
    std::filesystem::path dir;
    std::string method = "?";
    bool has_ledger = false;
    std::vector<LedgerRow> ledger;
    MethodStats stats;
    MethodCost cost;
    bool has_metrics = false;
    MetricsRow overall;
};

inline CompareSide load_compare_side(const std::filesystem::path& dir,
                                     const CostModel& prices) {
    CompareSide side;
    side.dir = dir;

    const auto ledger_path = dir / "usage_ledger.jsonl";
    if (std::filesystem::exists(ledger_path)) {
        side.ledger = UsageLedger::load(ledger_path);
        if (!side.ledger.empty()) {
            side.has_ledger = true;
            side.method = side.ledger.front().method;
            side.stats = method_stats(side.ledger, side.method);
            for (const MethodCost& c : compute_cost(side.ledger, prices)) {
                if (c.method == side.method) side.cost = c;
            }
        }
    }

    const auto metrics_path = dir / "metrics.jsonl";
    if (std::filesystem::exists(metrics_path)) {
        std::ifstream in(metrics_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            if (j.value("grouping", "") == "overall") {
                side.overall = detail::metrics_row_from_json(j);
                side.has_metrics = true;
                if (side.method == "?") side.method = side.overall.method;
            }
        }
    }

    if (!side.has_ledger) {
        std::cerr << "warning: " << dir.string()
                  << " has no usage ledger rows; efficiency comparison will be partial\n";
    }
    return side;
}

/// compare: token, time, cost, and retrieval deltas between two completed
/// runs, in the published table layouts plus one machine-readable record.
inline nlohmann::ordered_json cmd_compare(const std::filesystem::path& dir_a,
                                          const std::filesystem::path& dir_b,
                                          const std::filesystem::path& out_dir,
                                          const CostModel& prices) {
    const CompareSide a = load_compare_side(dir_a, prices);
    const CompareSide b = load_compare_side(dir_b, prices);
    std::filesystem::create_directories(out_dir);

    nlohmann::ordered_json result;
    auto side_json = [](const CompareSide& s) {
        nlohmann::ordered_json j;
        j["dir"] = s.dir.string();
        j["method"] = s.method;
        if (s.has_ledger) {
            j["efficiency"] = {{"total_files", s.stats.files},
                               {"input_tokens", s.stats.input_tokens},
                               {"output_tokens", s.stats.output_tokens},
                               {"cached_tokens", s.stats.cached_tokens},
                               {"avg_input_tokens", s.stats.avg_input_tokens},
                               {"avg_output_tokens", s.stats.avg_output_tokens},
                               {"total_seconds", s.stats.total_seconds},
                               {"avg_seconds", s.stats.avg_seconds},
                               {"p90_seconds", s.stats.p90_seconds},
                               {"p95_seconds", s.stats.p95_seconds}};
            j["cost"] = {{"input_cost", s.cost.input_cost},
                         {"output_cost", s.cost.output_cost},
                         {"cache_cost", s.cost.cache_cost},
                         {"total_cost", s.cost.total_cost}};
        } else {
            j["efficiency"] = nullptr;
            j["cost"] = nullptr;
        }
        if (s.has_metrics) {
            j["overall"] = detail::metrics_row_json(s.overall, "overall");
        } else {
            j["overall"] = nullptr;
        }
        return j;
    };
    result["a"] = side_json(a);
    result["b"] = side_json(b);

    if (a.has_ledger && b.has_ledger) {
        // Per-organization token/time table.
        TextTable per_org({"Organization", "Method", "Input Tokens", "Output Tokens",
                           "Time (s)", "Total Files", "Avg Input Tokens", "Avg Output Tokens",
                           "Avg Time (s)", "P90 Time (s)", "P95 Time (s)"});
        auto org_rows = [&](const CompareSide& side) {
            std::map<std::string, std::vector<LedgerRow>> by_org;
            for (const LedgerRow& r : side.ledger) by_org[r.org].push_back(r);
            for (const auto& [org, rows] : by_org) {
                const MethodStats s = method_stats(rows, side.method);
                per_org.add_row({org, side.method, format_thousands(s.input_tokens),
                                 format_thousands(s.output_tokens),
                                 format_fixed(s.total_seconds, 2), std::to_string(s.files),
                                 format_fixed(s.avg_input_tokens, 2),
                                 format_fixed(s.avg_output_tokens, 2),
                                 format_fixed(s.avg_seconds, 2), format_fixed(s.p90_seconds, 2),
                                 format_fixed(s.p95_seconds, 2)});
            }
        };
        org_rows(a);
        org_rows(b);
        detail::write_text(out_dir / "efficiency_by_org.txt", per_org.render());

        // Aggregate efficiency summary.
        TextTable summary({"Metric", a.method, b.method, "Relative Change"});
        nlohmann::ordered_json rel;
        auto add = [&](const std::string& name, double va, double vb, bool integral,
                       const std::string& key) {
            const double change = relative_change(va, vb);
            summary.add_row({name,
                             integral ? format_thousands(static_cast<long>(va))
                                      : format_fixed(va, 2),
                             integral ? format_thousands(static_cast<long>(vb))
                                      : format_fixed(vb, 2),
                             format_percent(change)});
            rel[key] = change;
        };
        add("Total Input Tokens", static_cast<double>(a.stats.input_tokens),
            static_cast<double>(b.stats.input_tokens), true, "input_tokens");
        add("Total Output Tokens", static_cast<double>(a.stats.output_tokens),
            static_cast<double>(b.stats.output_tokens), true, "output_tokens");
        add("Average Input Tokens per File", a.stats.avg_input_tokens, b.stats.avg_input_tokens,
            false, "avg_input_tokens");
        add("Average Output Tokens per File", a.stats.avg_output_tokens,
            b.stats.avg_output_tokens, false, "avg_output_tokens");
        add("Total Processing Time (s)", a.stats.total_seconds, b.stats.total_seconds, false,
            "total_seconds");
        add("Average Time per File (s)", a.stats.avg_seconds, b.stats.avg_seconds, false,
            "avg_seconds");
        add("P90 Time (s)", a.stats.p90_seconds, b.stats.p90_seconds, false, "p90_seconds");
        add("P95 Time (s)", a.stats.p95_seconds, b.stats.p95_seconds, false, "p95_seconds");
        detail::write_text(out_dir / "efficiency_summary.txt", summary.render());

        // Cost analysis. Published cost deltas are taken over cent-rounded
        // figures, so the comparison does the same.
        TextTable cost({"Component", "Pricing ($/token)", a.method + " Cost ($)",
                        b.method + " Cost ($)", "Relative Change"});
        auto cost_rel = [](double ca, double cb) {
            return relative_change(round_cents(ca), round_cents(cb));
        };
        cost.add_row({"Input Tokens", format_fixed(prices.price_input, 7),
                      format_money(a.cost.input_cost), format_money(b.cost.input_cost),
                      format_percent(cost_rel(a.cost.input_cost, b.cost.input_cost))});
        cost.add_row({"Cache Tokens", format_fixed(prices.price_cache, 7),
                      format_money(a.cost.cache_cost), format_money(b.cost.cache_cost), "--"});
        cost.add_row({"Output Tokens", format_fixed(prices.price_output, 7),
                      format_money(a.cost.output_cost), format_money(b.cost.output_cost),
                      format_percent(cost_rel(a.cost.output_cost, b.cost.output_cost))});
        cost.add_row({"Total Cost", "--", format_money(a.cost.total_cost),
                      format_money(b.cost.total_cost),
                      format_percent(cost_rel(a.cost.total_cost, b.cost.total_cost))});
        detail::write_text(out_dir / "cost_analysis.txt", cost.render());
        rel["input_cost"] = cost_rel(a.cost.input_cost, b.cost.input_cost);
        rel["output_cost"] = cost_rel(a.cost.output_cost, b.cost.output_cost);
        rel["cache_cost"] = cost_rel(a.cost.cache_cost, b.cost.cache_cost);
        rel["total_cost"] = cost_rel(a.cost.total_cost, b.cost.total_cost);

        TextTable improvements({"Metric", "Reduction"});
        improvements.add_row(
            {"Time Reduction",
             format_fixed(-relative_change(a.stats.total_seconds, b.stats.total_seconds), 2) +
                 "%"});
        improvements.add_row(
            {"Output Tokens Reduction",
             format_fixed(-relative_change(static_cast<double>(a.stats.output_tokens),
                                           static_cast<double>(b.stats.output_tokens)),
                          2) +
                 "%"});
        improvements.add_row(
            {"Cost Reduction",
             format_fixed(-cost_rel(a.cost.total_cost, b.cost.total_cost), 2) + "%"});
        detail::write_text(out_dir / "efficiency_improvements.txt", improvements.render());

        result["relative_change"] = std::move(rel);
    } else {
        result["relative_change"] = nullptr;
    }

    if (a.has_metrics && b.has_metrics) {
        TextTable delta({"Metric", a.method, b.method, "Delta"});
        nlohmann::ordered_json dj;
        auto add = [&](const std::string& name, double va, double vb, const std::string& key) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%+.2f", vb - va);
            delta.add_row({name, format_fixed(va, 2), format_fixed(vb, 2), buf});
            dj[key] = vb - va;
        };
        const MetricsRow& ra = a.overall;
        const MetricsRow& rb = b.overall;
        add("Avg Recall@" + std::to_string(ra.k_hi), ra.recall_hi, rb.recall_hi, "recall_hi");
        add("Avg Recall@" + std::to_string(ra.k_lo), ra.recall_lo, rb.recall_lo, "recall_lo");
        add("Avg Precision@" + std::to_string(ra.k_hi), ra.precision_hi, rb.precision_hi,
            "precision_hi");
        add("Avg Precision@" + std::to_string(ra.k_lo), ra.precision_lo, rb.precision_lo,
            "precision_lo");
        add("Avg MRR", ra.mrr_value, rb.mrr_value, "mrr");
        add("Avg NDCG@" + std::to_string(ra.k_hi), ra.ndcg_hi, rb.ndcg_hi, "ndcg_hi");
        add("Avg NDCG@" + std::to_string(ra.k_lo), ra.ndcg_lo, rb.ndcg_lo, "ndcg_lo");
        detail::write_text(out_dir / "retrieval_delta.txt", delta.render());
        result["retrieval_delta"] = std::move(dj);
    } else {
        if (!a.has_metrics || !b.has_metrics) {
            std::cerr << "warning: retrieval metrics missing on one side; "
                         "retrieval comparison skipped\n";
        }
        result["retrieval_delta"] = nullptr;
    }

    detail::write_text(out_dir / "comparison.json", result.dump(2) + "\n");
    return result;
}

}  // namespace wrac
