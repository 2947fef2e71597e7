#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "convbench/conversation_io.hpp"
#include "convbench/corpus.hpp"
#include "convbench/dataset_stats.hpp"
#include "convbench/gen_eval.hpp"
#include "convbench/llm/mock_provider.hpp"
#include "convbench/mining.hpp"
#include "convbench/net/http_clients.hpp"
#include "convbench/pipeline.hpp"
#include "convbench/quality_audit.hpp"
#include "convbench/report.hpp"
#include "convbench/retrieval/analysis.hpp"
#include "convbench/retrieval/bm25.hpp"

namespace convbench::cli {

namespace fs = std::filesystem;

struct RunConfig {
    fs::path corpus;
    fs::path sources;
    fs::path conversations;  // defaults to <out>/conversations.jsonl
    fs::path qrels;          // defaults to <out>/qrels.txt
    fs::path out = "out";
    bool mock = false;
    fs::path mock_dir;       // canned LLM replies
    fs::path mock_search;    // canned search results
    std::string llm_endpoint;
    std::string generator_endpoint;
    std::string embed_endpoint;
    std::string search_endpoint;
    std::string scorer_endpoint;
    std::string api_key;
    std::string model_name = "gpt-4.1";
    std::vector<std::string> strategies{"baseline", "rewrite", "reasoning", "history", "history_reasoning"};
    std::vector<std::string> retrievers{"bm25"};
    std::size_t k = 10;
    std::size_t generation_k = 5;
    std::vector<std::string> generation_modes{"oracle", "retrieved", "no_retrieval"};
    std::string generation_run;  // "<retriever>.<strategy>" used by retrieved mode
    std::string generator_tag = "generator";
    double selection_threshold = 5.0;
    double overlap_threshold = 0.8;
    double judge_threshold = 0.5;  // human-alignment delta bound
    std::map<std::string, double> human_means;
    std::size_t target_aspects = 6;
    bool mine_negatives = false;
    std::size_t queries_per_source = 5;
    std::size_t passage_target_len = 200;
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    std::uint64_t seed = 0;
    int max_in_flight = 4;
    std::size_t workers = 4;

    fs::path conversations_path() const { return conversations.empty() ? out / "conversations.jsonl" : conversations; }
    fs::path qrels_path() const { return qrels.empty() ? out / "qrels.txt" : qrels; }
};

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    auto path = [&](const char* key, fs::path& target) {
        if (j.contains(key)) target = j[key].get<std::string>();
    };
    path("corpus", c.corpus);
    path("sources", c.sources);
    path("conversations", c.conversations);
    path("qrels", c.qrels);
    path("out", c.out);
    path("mock_dir", c.mock_dir);
    path("mock_search", c.mock_search);
    c.mock = j.value("mock", c.mock);
    c.llm_endpoint = j.value("llm_endpoint", c.llm_endpoint);
    c.generator_endpoint = j.value("generator_endpoint", c.generator_endpoint);
    c.embed_endpoint = j.value("embed_endpoint", c.embed_endpoint);
    c.search_endpoint = j.value("search_endpoint", c.search_endpoint);
    c.scorer_endpoint = j.value("scorer_endpoint", c.scorer_endpoint);
    c.model_name = j.value("model_name", c.model_name);
    c.strategies = j.value("strategies", c.strategies);
    c.retrievers = j.value("retrievers", c.retrievers);
    c.k = j.value("k", c.k);
    c.generation_k = j.value("generation_k", c.generation_k);
    c.generation_modes = j.value("generation_modes", c.generation_modes);
    c.generation_run = j.value("generation_run", c.generation_run);
    c.generator_tag = j.value("generator_tag", c.generator_tag);
    c.selection_threshold = j.value("selection_threshold", c.selection_threshold);
    c.overlap_threshold = j.value("overlap_threshold", c.overlap_threshold);
    c.judge_threshold = j.value("judge_threshold", c.judge_threshold);
    c.human_means = j.value("human_means", c.human_means);
    c.target_aspects = j.value("target_aspects", c.target_aspects);
    c.mine_negatives = j.value("mine_negatives", c.mine_negatives);
    c.queries_per_source = j.value("queries_per_source", c.queries_per_source);
    c.passage_target_len = j.value("passage_target_len", c.passage_target_len);
    c.bm25_k1 = j.value("bm25_k1", c.bm25_k1);
    c.bm25_b = j.value("bm25_b", c.bm25_b);
    c.seed = j.value("seed", c.seed);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.workers = j.value("workers", c.workers);
}

inline nlohmann::json to_json(const RunConfig& c) {
    return {{"corpus", c.corpus.string()},
            {"sources", c.sources.string()},
            {"mock", c.mock},
            {"model_name", c.model_name},
            {"strategies", c.strategies},
            {"retrievers", c.retrievers},
            {"k", c.k},
            {"generation_k", c.generation_k},
            {"generation_modes", c.generation_modes},
            {"selection_threshold", c.selection_threshold},
            {"overlap_threshold", c.overlap_threshold},
            {"judge_threshold", c.judge_threshold},
            {"target_aspects", c.target_aspects},
            {"bm25_k1", c.bm25_k1},
            {"bm25_b", c.bm25_b},
            {"seed", c.seed},
            {"max_in_flight", c.max_in_flight},
            {"workers", c.workers}};
}

/// Reads a JSON config; relative paths resolve against the config file's directory.
inline RunConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open config " + file.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("config " + file.string() + " is not a JSON object");
    RunConfig c;
    try {
        from_json(j, c);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad config value: " + std::string(e.what()));
    }
    const auto base = file.parent_path();
    for (fs::path* p : {&c.corpus, &c.sources, &c.conversations, &c.qrels, &c.out, &c.mock_dir, &c.mock_search})
        if (!p->empty() && p->is_relative()) *p = base / *p;
    return c;
}

/// Secrets and service endpoints from the environment override the file.
inline void apply_env(RunConfig& c) {
    if (const char* v = std::getenv("PROVIDER_API_KEY")) c.api_key = v;
    if (const char* v = std::getenv("EMBED_ENDPOINT")) c.embed_endpoint = v;
    if (const char* v = std::getenv("SEARCH_ENDPOINT")) c.search_endpoint = v;
}

enum class Command { synthesize, eval_retrieval, eval_generation, audit, stats, report };

inline Command parse_command(const std::string& s) {
    static const std::map<std::string, Command> m{{"synthesize", Command::synthesize},
                                                  {"eval-retrieval", Command::eval_retrieval},
                                                  {"eval-generation", Command::eval_generation},
                                                  {"audit", Command::audit},
                                                  {"stats", Command::stats},
                                                  {"report", Command::report}};
    auto it = m.find(s);
    if (it == m.end()) throw PreconditionError("unknown command '" + s + "'");
    return it->second;
}

inline std::string to_string(Command c) {
    switch (c) {
        case Command::synthesize: return "synthesize";
        case Command::eval_retrieval: return "eval-retrieval";
        case Command::eval_generation: return "eval-generation";
        case Command::audit: return "audit";
        case Command::stats: return "stats";
        case Command::report: return "report";
    }
    return "";
}

inline void require_file(const fs::path& p, const std::string& what) {
    if (p.empty()) throw PreconditionError(what + " path is not configured");
    if (!fs::exists(p)) throw PreconditionError(what + " not found: " + p.string());
}

inline void validate(const RunConfig& c, Command cmd) {
    if (c.k == 0 || c.generation_k == 0) throw PreconditionError("k values must be positive");
    if (c.workers == 0 || c.max_in_flight < 1) throw PreconditionError("parallelism caps must be positive");
    if (!(c.overlap_threshold > 0.0 && c.overlap_threshold <= 1.0))
        throw PreconditionError("overlap_threshold must be in (0, 1]");
    retrieval::IndexConfig{c.bm25_k1, c.bm25_b}.check();
    for (const auto& s : c.strategies) retrieval::parse_strategy(s);
    for (const auto& m : c.generation_modes) gen::parse_mode(m);
    const bool needs_llm = cmd == Command::synthesize || cmd == Command::eval_generation || cmd == Command::audit ||
                           cmd == Command::eval_retrieval;
    if (needs_llm) {
        if (c.mock) require_file(c.mock_dir, "mock fixture directory");
        else if (c.llm_endpoint.empty()) throw PreconditionError("llm_endpoint is required outside mock mode");
    }
    switch (cmd) {
        case Command::synthesize:
            require_file(c.sources, "sources file");
            if (!c.corpus.empty()) require_file(c.corpus, "corpus");
            if (c.mine_negatives && c.mock) require_file(c.mock_search, "mock search fixture");
            if (c.mine_negatives && !c.mock && c.search_endpoint.empty())
                throw PreconditionError("search_endpoint is required for mining outside mock mode");
            break;
        case Command::eval_retrieval:
        case Command::eval_generation:
        case Command::audit:
            require_file(c.corpus, "corpus");
            require_file(c.conversations_path(), "conversations file");
            if (cmd != Command::audit) require_file(c.qrels_path(), "qrels file");
            break;
        case Command::stats: require_file(c.conversations_path(), "conversations file"); break;
        case Command::report: break;
    }
}

/// Run files are named after the run tag with path-unfriendly characters replaced.
inline fs::path run_file(const fs::path& out, std::string tag) {
    for (auto& ch : tag)
        if (ch == ':' || ch == '/' || ch == '\\') ch = '-';
    return out / "runs" / (tag + ".run");
}

inline void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << s;
}

inline void write_json(const fs::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

struct Services {
    std::shared_ptr<llm::Provider> llm;
    std::shared_ptr<llm::Provider> generator;
};

inline Services make_services(const RunConfig& c) {
    Services s;
    if (c.mock) {
        auto mock = llm::MockProvider::from_directory(c.mock_dir);
        s.llm = mock;
        s.generator = mock;
    } else {
        s.llm = std::make_shared<net::HttpProvider>(net::Endpoint{c.llm_endpoint, c.api_key});
        s.generator = c.generator_endpoint.empty()
                          ? s.llm
                          : std::shared_ptr<llm::Provider>(std::make_shared<net::HttpGenerator>(
                                net::Endpoint{c.generator_endpoint, c.api_key}));
    }
    return s;
}

inline llm::GatewayConfig gateway_config(const RunConfig& c) {
    llm::GatewayConfig g;
    g.model_name = c.model_name;
    g.max_in_flight = c.max_in_flight;
    return g;
}

inline corpus::Corpus load_corpus(const fs::path& p) { return corpus::Corpus::ingest(p, corpus::format_from_path(p)); }

inline int run_synthesize(const RunConfig& c, std::ostream& log) {
    std::optional<corpus::Corpus> corp;
    if (!c.corpus.empty()) corp = load_corpus(c.corpus);
    auto sources = load_sources(c.sources, corp ? &*corp : nullptr);
    auto services = make_services(c);
    llm::Gateway gateway(services.llm, gateway_config(c));

    SynthesisConfig sc;
    sc.target_aspects = c.target_aspects;
    sc.forge.selection_threshold = c.selection_threshold;
    sc.workers = c.workers;
    auto outcomes = synthesize_all(sources, gateway, sc);

    std::vector<forge::Conversation> convs;
    nlohmann::json report = nlohmann::json::array();
    int supported = 0, total = 0;
    for (const auto& o : outcomes) {
        nlohmann::json r{{"source_id", o.source_id},
                         {"status", o.conversation ? "accepted" : "rejected"},
                         {"rejection", o.rejection},
                         {"coverage", o.alignment.coverage_percentage},
                         {"aspects", o.aspects.size()},
                         {"skipped", o.skipped}};
        nlohmann::json facts = nlohmann::json::array();
        for (const auto& f : o.fact_reports) {
            facts.push_back({{"aspect", f.aspect_ref}, {"supported", f.supported_count}, {"total", f.total_count}});
            supported += f.supported_count;
            total += f.total_count;
        }
        r["facts"] = facts;
        report.push_back(std::move(r));
        if (o.conversation) convs.push_back(*o.conversation);
    }
    fs::create_directories(c.out);
    forge::write_conversations(c.out / "conversations.jsonl", convs);
    forge::qrels_from_conversations(convs).write(c.out / "qrels.txt");
    write_json(c.out / "synthesis_report.json",
               {{"sources", sources.size()},
                {"accepted", convs.size()},
                {"facts_supported", supported},
                {"facts_total", total},
                {"records", report}});

    if (c.mine_negatives) {
        std::shared_ptr<corpus::SearchClient> search;
        if (c.mock) search = corpus::MockSearchClient::from_file(c.mock_search);
        else search = std::make_shared<net::HttpSearchClient>(net::Endpoint{c.search_endpoint, c.api_key});
        corpus::MiningConfig mc;
        mc.queries_per_source = c.queries_per_source;
        mc.passage_target_len = c.passage_target_len;
        mc.overlap_threshold = c.overlap_threshold;
        std::ofstream neg(c.out / "negatives.jsonl");
        std::set<std::string> seen;
        for (const auto& s : sources) {
            auto mined = corpus::mine_hard_negatives(s, gateway, *search, mc);
            if (!mined.diagnostic.empty()) spdlog::warn("{}", mined.diagnostic);
            for (const auto& d : mined.documents)
                if (seen.insert(d.doc_id).second) neg << corpus::to_json(d).dump() << '\n';
        }
    }
    write_json(c.out / "manifest.json", to_json(c));
    log << "synthesized " << convs.size() << " of " << sources.size() << " conversations; facts verified " << supported
        << "/" << total << "\n";
    return 0;
}

inline std::vector<std::shared_ptr<retrieval::Retriever>> make_retrievers(const RunConfig& c, const corpus::Corpus& corp) {
    std::vector<std::shared_ptr<retrieval::Retriever>> out;
    for (const auto& name : c.retrievers) {
        if (name == "bm25") {
            auto idx = std::make_shared<const retrieval::Bm25Index>(
                retrieval::Bm25Index::build(corp, retrieval::IndexConfig{c.bm25_k1, c.bm25_b}));
            out.push_back(std::make_shared<retrieval::Bm25Retriever>(name, idx));
        } else if (name.rfind("dense:", 0) == 0) {
            std::shared_ptr<retrieval::EmbeddingClient> client;
            if (c.mock) client = std::make_shared<retrieval::HashingEmbeddingClient>(name.substr(6));
            else if (c.embed_endpoint.empty()) throw PreconditionError("retriever '" + name + "' needs EMBED_ENDPOINT");
            else client = std::make_shared<net::HttpEmbeddingClient>(net::Endpoint{c.embed_endpoint, c.api_key});
            auto dense = std::make_shared<retrieval::DenseRetriever>(name, client);
            dense->build(corp);
            out.push_back(dense);
        } else {
            throw PreconditionError("unknown retriever '" + name + "' (use bm25 or dense:<name>)");
        }
    }
    return out;
}

inline int run_eval_retrieval(const RunConfig& c, std::ostream& log) {
    auto corp = load_corpus(c.corpus);
    auto convs = forge::read_conversations(c.conversations_path());
    auto qrels = corpus::Qrels::load(c.qrels_path());
    auto services = make_services(c);
    llm::Gateway gateway(services.llm, gateway_config(c));
    retrieval::QueryBuilder builder(&gateway);
    std::vector<retrieval::Strategy> strategies;
    for (const auto& s : c.strategies) strategies.push_back(retrieval::parse_strategy(s));

    auto retrievers = make_retrievers(c, corp);
    auto runs = retrieval::execute_runs(convs, retrievers, strategies, builder, std::max<std::size_t>(c.k, 10), c.workers);
    fs::create_directories(c.out / "runs");
    for (const auto& r : runs) retrieval::write_run(run_file(c.out, r.tag()), r);

    auto scores = retrieval::score_runs(runs, qrels, convs, 10);
    Table main{"Retrieval effectiveness (domain macro-average)",
               {"retriever", "strategy", "nDCG@10", "MAP@10", "Recall@10", "MRR"},
               {}};
    Table domains{"nDCG@10 per domain", {"retriever", "strategy", "domain", "turns", "nDCG@10"}, {}};
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& r : retrievers) {
        for (auto st : strategies) {
            auto m = retrieval::macro_for(scores, r->id(), st);
            main.add({r->id(), retrieval::to_string(st), fixed(m.macro.ndcg_at_10), fixed(m.macro.map_at_10),
                      fixed(m.macro.recall_at_10), fixed(m.macro.mrr)});
            for (const auto& [d, row] : m.domains)
                domains.add({r->id(), retrieval::to_string(st), d, std::to_string(row.count), fixed(row.mean.ndcg_at_10)});
            metrics.push_back({{"retriever", r->id()},
                               {"strategy", retrieval::to_string(st)},
                               {"ndcg_at_10", m.macro.ndcg_at_10},
                               {"map_at_10", m.macro.map_at_10},
                               {"recall_at_10", m.macro.recall_at_10},
                               {"mrr", m.macro.mrr}});
        }
    }
    Table sig{"Paired t-tests against baseline (nDCG@10, pooled over retrievers)",
              {"strategy", "n", "mean delta", "SE", "t", "p"},
              {}};
    nlohmann::json tests = nlohmann::json::array();
    const bool has_baseline =
        std::find(strategies.begin(), strategies.end(), retrieval::Strategy::baseline) != strategies.end();
    for (auto st : strategies) {
        if (!has_baseline || st == retrieval::Strategy::baseline) continue;
        try {
            auto t = retrieval::compare_strategies(scores, st, retrieval::Strategy::baseline);
            sig.add({retrieval::to_string(st), std::to_string(t.n), fixed(t.mean_delta, 4), fixed(t.standard_error, 4),
                     fixed(t.t_statistic, 2), fixed(t.p_value, 6)});
            tests.push_back({{"strategy", retrieval::to_string(st)}, {"n", t.n}, {"mean_delta", t.mean_delta},
                             {"standard_error", t.standard_error}, {"t", t.t_statistic}, {"p", t.p_value}});
        } catch (const PreconditionError& e) {
            spdlog::warn("t-test for {} skipped: {}", retrieval::to_string(st), e.what());
        }
    }
    std::vector<Table> analyses;
    for (auto kind : {retrieval::AnalysisKind::turn_position, retrieval::AnalysisKind::complexity,
                      retrieval::AnalysisKind::failure})
        analyses.push_back(retrieval::analyze_results(scores, kind));

    std::string text = main.to_text() + "\n" + domains.to_text() + "\n" + sig.to_text();
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& a : analyses) {
        text += "\n" + a.to_text();
        tables.push_back(a.to_json());
    }
    write_text(c.out / "retrieval_report.txt", text);
    write_json(c.out / "retrieval_report.json", {{"metrics", metrics}, {"significance", tests}, {"analyses", tables}});
    log << text;
    return 0;
}

inline int run_eval_generation(const RunConfig& c, std::ostream& log) {
    auto corp = load_corpus(c.corpus);
    auto convs = forge::read_conversations(c.conversations_path());
    auto qrels = corpus::Qrels::load(c.qrels_path());
    auto services = make_services(c);
    llm::Gateway judge(services.llm, gateway_config(c));
    llm::Gateway generator(services.generator, gateway_config(c));
    std::unique_ptr<gen::ScorerClient> scorer;
    if (!c.scorer_endpoint.empty()) scorer = std::make_unique<net::HttpScorerClient>(net::Endpoint{c.scorer_endpoint, c.api_key});

    std::optional<retrieval::RunResult> run;
    fs::create_directories(c.out);
    std::vector<gen::GenerationSummary> summaries;
    for (const auto& mode_name : c.generation_modes) {
        gen::GenerationSetup setup;
        setup.mode = gen::parse_mode(mode_name);
        setup.generator_tag = c.generator_tag;
        setup.k = c.generation_k;
        setup.workers = c.workers;
        setup.scorer = scorer.get();
        if (setup.mode == gen::Mode::retrieved) {
            if (!run) {
                auto tag = c.generation_run.empty()
                               ? (c.retrievers.empty() ? std::string("bm25") : c.retrievers.front()) + ".history_reasoning"
                               : c.generation_run;
                auto path = run_file(c.out, tag);
                if (!fs::exists(path)) throw PreconditionError("retrieved mode needs run file " + path.string());
                run = retrieval::read_run(path);
            }
            setup.run = &*run;
        }
        auto records = gen::evaluate_generation(convs, qrels, corp, generator, judge, setup);
        std::ofstream out(c.out / ("generation_" + mode_name + ".jsonl"), std::ios::binary);
        for (const auto& r : records) out << gen::to_json(r).dump() << '\n';
        summaries.push_back(gen::summarize_generation(records));
    }
    auto table = gen::generation_table(summaries);
    write_text(c.out / "generation_report.txt", table.to_text());
    write_json(c.out / "generation_report.json", table.to_json());
    log << table.to_text();
    return 0;
}

inline int run_audit(const RunConfig& c, std::ostream& log) {
    auto corp = load_corpus(c.corpus);
    auto convs = forge::read_conversations(c.conversations_path());
    auto services = make_services(c);
    llm::Gateway gateway(services.llm, gateway_config(c));
    auto result = audit::audit_dataset(convs, corp, gateway, c.workers);
    fs::create_directories(c.out);
    {
        std::ofstream rows(c.out / "audit.jsonl", std::ios::binary);
        for (const auto& a : result.conversations) rows << audit::to_json(a).dump() << '\n';
    }
    auto tables = audit::audit_tables(result);
    if (!c.human_means.empty()) {
        std::map<std::string, double> llm_means;
        for (const auto& [dim, v] : c.human_means) {
            auto it = result.means.find(dim);
            if (it == result.means.end()) throw PreconditionError("human_means names unknown audit dimension '" + dim + "'");
            llm_means[dim] = it->second;
        }
        tables.push_back(audit::human_alignment_table(audit::human_alignment_report(llm_means, c.human_means, c.judge_threshold)));
    }
    std::string text;
    nlohmann::json j = nlohmann::json::array();
    for (const auto& t : tables) {
        text += (text.empty() ? "" : "\n") + t.to_text();
        j.push_back(t.to_json());
    }
    write_text(c.out / "audit_report.txt", text);
    write_json(c.out / "audit_report.json", j);
    log << text;
    return 0;
}

inline int run_stats(const RunConfig& c, std::ostream& log) {
    auto convs = forge::read_conversations(c.conversations_path());
    std::optional<corpus::Corpus> corp;
    if (!c.corpus.empty() && fs::exists(c.corpus)) corp = load_corpus(c.corpus);
    auto s = compute_stats(convs, corp ? &*corp : nullptr);
    auto text = stats_table(s).to_text() + "\n" + text_stats_table(s).to_text();
    fs::create_directories(c.out);
    write_text(c.out / "stats.txt", text);
    write_json(c.out / "stats.json", to_json(s));
    log << text;
    return 0;
}

inline int run_report(const RunConfig& c, std::ostream& log) {
    std::string text;
    for (const char* name : {"stats.txt", "retrieval_report.txt", "generation_report.txt", "audit_report.txt"}) {
        auto p = c.out / name;
        if (!fs::exists(p)) continue;
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        text += "== " + std::string(name) + " ==\n" + ss.str() + "\n";
    }
    if (text.empty()) throw PreconditionError("no reports found in " + c.out.string());
    write_text(c.out / "summary.txt", text);
    log << text;
    return 0;
}

/// Runs one subcommand. Failures are written to `err` as one JSON line and
/// turn into a nonzero status.
inline int execute(Command cmd, RunConfig config, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
    try {
        validate(config, cmd);
        switch (cmd) {
            case Command::synthesize: return run_synthesize(config, log);
            case Command::eval_retrieval: return run_eval_retrieval(config, log);
            case Command::eval_generation: return run_eval_generation(config, log);
            case Command::audit: return run_audit(config, log);
            case Command::stats: return run_stats(config, log);
            case Command::report: return run_report(config, log);
        }
        return 2;
    } catch (const std::exception& e) {
        std::string type = "error";
        if (dynamic_cast<const PreconditionError*>(&e)) type = "precondition";
        else if (dynamic_cast<const ParseError*>(&e)) type = "parse";
        else if (dynamic_cast<const ConflictError*>(&e)) type = "conflict";
        else if (dynamic_cast<const ValidationError*>(&e)) type = "validation";
        else if (dynamic_cast<const ServiceError*>(&e)) type = "service";
        err << nlohmann::json{{"level", "error"}, {"command", to_string(cmd)}, {"type", type}, {"message", e.what()}}.dump()
            << std::endl;
        return type == "precondition" ? 2 : 1;
    }
}

}  // namespace convbench::cli
