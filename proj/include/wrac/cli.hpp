#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wrac/pipeline.hpp"

namespace wrac::cli {

namespace detail {

inline void add_run_options(CLI::App* cmd, RunConfig& cfg, std::vector<int>& k_values,
                            std::string& mode) {
    cmd->add_option("--corpus", cfg.corpus_root, "Corpus root (docs/ plus queries.jsonl)")
        ->required();
    cmd->add_option("--out", cfg.out_dir, "Output directory");
    cmd->add_option("--method", cfg.method,
                    "Chunking method: wrac, wrac-structural, fixed, structural, agentic");
    cmd->add_option("--mode", mode, "Model transport mode: record, replay, live");
    cmd->add_option("--cache", cfg.client.cache_dir, "Model exchange cache directory");
    cmd->add_option("--jobs", cfg.jobs, "Parallel workers for per-document stages");
    cmd->add_option("--max-chunk-tokens", cfg.max_chunk_tokens, "Planner token budget");
    cmd->add_option("--fixed-size", cfg.fixed_size_tokens, "Fixed-size window tokens");
    cmd->add_option("--fixed-overlap", cfg.fixed_overlap_tokens, "Fixed-size overlap tokens");
    cmd->add_option("--k", k_values, "Retrieval cutoffs (two values)")->expected(1, 2);
    cmd->add_option("--model", cfg.model, "Model name for planning calls");
    cmd->add_option("--price-input", cfg.prices.price_input, "Price per input token");
    cmd->add_option("--price-output", cfg.prices.price_output, "Price per output token");
    cmd->add_option("--price-cache", cfg.prices.price_cache, "Price per cache token");
    cmd->add_flag(
        "--metadata-only",
        [&cfg](std::int64_t) { cfg.payload_text = false; },
        "Send ids, hierarchy and token counts to the planner instead of unit text");
}

inline void finish_config(RunConfig& cfg, std::vector<int>& k_values, const std::string& mode) {
    if (!mode.empty()) cfg.client.mode = client_mode_from(mode);
    if (!k_values.empty()) {
        std::sort(k_values.begin(), k_values.end());
        cfg.k_lo = k_values.front();
        cfg.k_hi = k_values.back();
    }
    cfg.validate();
}

}  // namespace detail

/// Entry point shared by the binary and the test suite.
/// Exit codes: 0 success, 1 data error, 2 usage error.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"W-RAC chunking pipeline: parse, plan, chunk, index, retrieve, evaluate"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<int> k_values;
    std::string mode;

    auto* ingest = app.add_subcommand("ingest", "Parse a corpus into unit files");
    detail::add_run_options(ingest, cfg, k_values, mode);

    auto* plan = app.add_subcommand("plan", "Produce chunk plans and a planning run log");
    detail::add_run_options(plan, cfg, k_values, mode);

    auto* chunk = app.add_subcommand("chunk", "Resolve plans into a chunk record file");
    detail::add_run_options(chunk, cfg, k_values, mode);

    auto* index_cmd = app.add_subcommand("index", "Build a retrieval index from chunk records");
    std::string chunks_file;
    std::string index_out = "index.json";
    index_cmd->add_option("--chunks", chunks_file, "chunks.jsonl produced by `chunk`")
        ->required();
    index_cmd->add_option("--out", index_out, "Index file to write");

    auto* retrieve_cmd = app.add_subcommand("retrieve", "Query an index");
    std::string index_file;
    std::string query_text;
    int k = 6;
    retrieve_cmd->add_option("--index", index_file, "Index file")->required();
    retrieve_cmd->add_option("--query", query_text, "Query text")->required();
    retrieve_cmd->add_option("--k", k, "Results to return");

    auto* eval = app.add_subcommand("eval", "Run the full pipeline and score retrieval");
    detail::add_run_options(eval, cfg, k_values, mode);

    auto* compare = app.add_subcommand("compare", "Compare two completed eval runs");
    std::string dir_a, dir_b, compare_out = "comparison";
    compare->add_option("--a", dir_a, "First run directory")->required();
    compare->add_option("--b", dir_b, "Second run directory")->required();
    compare->add_option("--out", compare_out, "Comparison output directory");
    compare->add_option("--price-input", cfg.prices.price_input, "Price per input token");
    compare->add_option("--price-output", cfg.prices.price_output, "Price per output token");
    compare->add_option("--price-cache", cfg.prices.price_cache, "Price per cache token");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            detail::finish_config(cfg, k_values, mode);
            const IngestSummary s = cmd_ingest(cfg);
            std::cout << "ingested " << s.files << " files (" << s.errors << " errors), "
                      << s.total_chars << " chars -> " << cfg.out_dir.string() << "\n";
        } else if (*plan || *chunk) {
            detail::finish_config(cfg, k_values, mode);
            auto client = make_client(cfg);
            ChunkRunResult run = run_chunking(cfg, client.get());
            std::filesystem::create_directories(cfg.out_dir);
            write_plan_artifacts(cfg, run);
            if (*chunk) {
                write_chunks_file(cfg.out_dir / "chunks.jsonl", run.all_chunks);
                std::cout << "wrote " << run.all_chunks.size() << " chunks to "
                          << (cfg.out_dir / "chunks.jsonl").string() << "\n";
            } else {
                std::cout << "planned " << run.docs.size() << " documents -> "
                          << cfg.out_dir.string() << "\n";
            }
        } else if (*index_cmd) {
            const Index index = Index::build(read_chunks_file(chunks_file));
            index.save(index_out);
            std::cout << "indexed " << index.chunks().size() << " chunks -> " << index_out
                      << "\n";
        } else if (*retrieve_cmd) {
            if (k < 1) throw ConfigError("--k must be >= 1");
            const Index index = Index::load(index_file);
            const RetrievalResult result = index.retrieve(query_text, k);
            for (std::size_t i = 0; i < result.ranked.size(); ++i) {
                std::cout << (i + 1) << ". " << result.ranked[i].chunk_id << "  "
                          << format_fixed(result.ranked[i].score, 4) << "\n";
            }
        } else if (*eval) {
            detail::finish_config(cfg, k_values, mode);
            const std::vector<MetricsRow> overall = cmd_eval(cfg);
            for (const MetricsRow& r : overall) {
                std::cout << r.method << ": P@" << r.k_lo << "="
                          << format_fixed(r.precision_lo, 2) << " R@" << r.k_hi << "="
                          << format_fixed(r.recall_hi, 2) << " MRR="
                          << format_fixed(r.mrr_value, 2) << " over " << r.count
                          << " queries\n";
            }
            std::cout << "reports written to " << cfg.out_dir.string() << "\n";
        } else if (*compare) {
            cmd_compare(dir_a, dir_b, compare_out, cfg.prices);
            std::cout << "comparison written to " << compare_out << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace wrac::cli
