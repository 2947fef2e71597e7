#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "convbench/conversation_io.hpp"
#include "convbench/errors.hpp"
#include "convbench/parallel.hpp"
#include "convbench/qrels.hpp"
#include "convbench/retrieval/dense.hpp"
#include "convbench/retrieval/metrics.hpp"
#include "convbench/retrieval/strategy.hpp"
#include "convbench/retrieval/ttest.hpp"

namespace convbench::retrieval {

struct RunResult {
    std::string retriever_id;
    Strategy strategy = Strategy::baseline;
    std::map<std::string, std::vector<ScoredDoc>> rankings;

    std::string tag() const { return retriever_id + "." + to_string(strategy); }
};

/// Run file lines: "query_id doc_id rank score retriever_tag".
inline void write_run(const std::filesystem::path& path, const RunResult& run) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.setf(std::ios::fixed);
    out.precision(6);
    const auto tag = run.tag();
    for (const auto& [qid, ranking] : run.rankings)
        for (std::size_t i = 0; i < ranking.size(); ++i)
            out << qid << ' ' << ranking[i].doc_id << ' ' << (i + 1) << ' ' << ranking[i].score << ' ' << tag << '\n';
}

/// Reads a run file; the tag must have the form "<retriever>.<strategy>".
inline RunResult read_run(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open run file " + path.string());
    RunResult run;
    std::string line, tag;
    std::size_t lineno = 0;
    std::map<std::string, std::map<long, ScoredDoc>> by_rank;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        std::istringstream ss(line);
        std::string qid, doc, t, extra;
        long rank = 0;
        double score = 0.0;
        if (!(ss >> qid >> doc >> rank >> score >> t) || (ss >> extra) || rank < 1)
            throw ParseError("run line must be 'query_id doc_id rank score tag'", lineno);
        if (tag.empty()) tag = t;
        else if (tag != t) throw ParseError("mixed retriever tags in one run file", lineno);
        if (!by_rank[qid].emplace(rank, ScoredDoc{doc, score}).second)
            throw ParseError("duplicate rank " + std::to_string(rank) + " for " + qid, lineno);
    }
    auto dot = tag.rfind('.');
    if (dot == std::string::npos) throw ParseError("run tag '" + tag + "' lacks a strategy suffix");
    run.retriever_id = tag.substr(0, dot);
    run.strategy = parse_strategy(tag.substr(dot + 1));
    for (auto& [qid, ranks] : by_rank)
        for (auto& [r, sd] : ranks) run.rankings[qid].push_back(std::move(sd));
    return run;
}

struct TurnRef {
    const forge::Conversation* conversation = nullptr;
    int turn_index = 0;
    std::string query_id;
};

inline std::vector<TurnRef> all_turns(const std::vector<forge::Conversation>& convs) {
    std::vector<TurnRef> out;
    for (const auto& c : convs)
        for (const auto& t : c.turns) out.push_back({&c, t.turn_index, forge::query_id(c.conv_id, t.turn_index)});
    return out;
}

/// Every (retriever, strategy) pair over every turn. Strategy texts are
/// built once per turn and shared by all retrievers.
inline std::vector<RunResult> execute_runs(const std::vector<forge::Conversation>& convs,
                                           const std::vector<std::shared_ptr<Retriever>>& retrievers,
                                           const std::vector<Strategy>& strategies, QueryBuilder& builder,
                                           std::size_t k, std::size_t workers = 4) {
    auto turns = all_turns(convs);
    std::vector<std::vector<StrategyQuery>> queries(strategies.size());
    for (std::size_t s = 0; s < strategies.size(); ++s)
        queries[s] = parallel_map(turns.size(), workers, [&](std::size_t i) {
            return builder.build(*turns[i].conversation, turns[i].turn_index, strategies[s]);
        });

    std::vector<RunResult> runs;
    for (const auto& r : retrievers) {
        for (std::size_t s = 0; s < strategies.size(); ++s) {
            RunResult run;
            run.retriever_id = r->id();
            run.strategy = strategies[s];
            auto ranked = parallel_map(turns.size(), workers,
                                       [&](std::size_t i) { return r->search(queries[s][i].query_text, k); });
            for (std::size_t i = 0; i < turns.size(); ++i) run.rankings[turns[i].query_id] = std::move(ranked[i]);
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

/// Per-query nDCG and friends for one run; one row per evaluable query.
struct QueryScore {
    std::string retriever_id;
    Strategy strategy = Strategy::baseline;
    std::string query_id;
    std::string conv_id;
    std::string domain;
    int turn_index = 0;
    int aspect_count = 0;
    MetricVector metrics;
};

inline std::vector<QueryScore> score_runs(const std::vector<RunResult>& runs, const corpus::Qrels& qrels,
                                          const std::vector<forge::Conversation>& convs, std::size_t k = 10,
                                          Gain g = Gain::exponential) {
    std::vector<QueryScore> out;
    std::size_t skipped = 0;
    for (const auto& run : runs) {
        for (const auto& ref : all_turns(convs)) {
            const auto* judged = qrels.find(ref.query_id);
            if (!judged) {
                ++skipped;
                continue;
            }
            std::vector<std::string> ids;
            if (auto it = run.rankings.find(ref.query_id); it != run.rankings.end())
                for (const auto& sd : it->second) ids.push_back(sd.doc_id);
            auto m = compute_metrics(ids, *judged, k, g);
            if (!m) {
                ++skipped;
                continue;
            }
            out.push_back({run.retriever_id, run.strategy, ref.query_id, ref.conversation->conv_id,
                           ref.conversation->domain, ref.turn_index, ref.conversation->aspect_count, *m});
        }
    }
    if (skipped) spdlog::warn("{} query evaluations skipped (no relevant documents judged)", skipped);
    return out;
}

/// Pairs strategy `a` with strategy `b` on (retriever, query) and tests the
/// nDCG@10 differences; n is the number of aligned observations.
inline TTestResult compare_strategies(const std::vector<QueryScore>& scores, Strategy a, Strategy b) {
    std::map<std::pair<std::string, std::string>, double> left, right;
    for (const auto& s : scores) {
        if (s.strategy == a) left[{s.retriever_id, s.query_id}] = s.metrics.ndcg_at_10;
        if (s.strategy == b) right[{s.retriever_id, s.query_id}] = s.metrics.ndcg_at_10;
    }
    std::vector<double> xs, ys;
    for (const auto& [key, v] : left) {
        auto it = right.find(key);
        if (it == right.end()) continue;
        xs.push_back(v);
        ys.push_back(it->second);
    }
    return paired_t_test(xs, ys);
}

/// Domain-macro report for one (retriever, strategy) pair.
inline MacroReport macro_for(const std::vector<QueryScore>& scores, const std::string& retriever, Strategy strategy) {
    std::vector<std::pair<std::string, MetricVector>> rows;
    for (const auto& s : scores)
        if (s.retriever_id == retriever && s.strategy == strategy) rows.emplace_back(s.domain, s.metrics);
    return macro_average(rows);
}

}  // namespace convbench::retrieval
