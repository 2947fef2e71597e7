#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "convbench/conversation_io.hpp"
#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/parallel.hpp"
#include "convbench/qrels.hpp"
#include "convbench/report.hpp"
#include "convbench/retrieval/run.hpp"
#include "convbench/source.hpp"

namespace convbench::gen {

enum class Mode { oracle, retrieved, no_retrieval };

inline std::string to_string(Mode m) {
    switch (m) {
        case Mode::oracle: return "oracle";
        case Mode::retrieved: return "retrieved";
        case Mode::no_retrieval: return "no_retrieval";
    }
    return "oracle";
}

inline Mode parse_mode(const std::string& s) {
    for (auto m : {Mode::oracle, Mode::retrieved, Mode::no_retrieval})
        if (to_string(m) == s) return m;
    throw PreconditionError("unknown generation mode '" + s + "'");
}

struct GenerationContext {
    Mode mode = Mode::oracle;
    std::string conv_id;
    std::string domain;
    int turn_index = 0;
    std::string question;
    forge::History history;
    std::vector<corpus::Document> passages;
    std::size_t k = 5;
};

/// Oracle: judged-relevant documents (best grade first). Retrieved: the run's
/// top-k for the turn. No retrieval: no passages.
inline GenerationContext build_context(int turn_index, const forge::Conversation& conv, Mode mode,
                                       const retrieval::RunResult* run, const corpus::Qrels& qrels,
                                       const corpus::Corpus& corpus, std::size_t k = 5) {
    if (turn_index < 1 || static_cast<std::size_t>(turn_index) > conv.turns.size())
        throw PreconditionError("turn " + std::to_string(turn_index) + " is not part of " + conv.conv_id);
    if (mode == Mode::retrieved && !run) throw PreconditionError("retrieved mode needs a run");
    if (k == 0) throw PreconditionError("k must be >= 1");

    GenerationContext ctx;
    ctx.mode = mode;
    ctx.conv_id = conv.conv_id;
    ctx.domain = conv.domain;
    ctx.turn_index = turn_index;
    ctx.question = conv.turns[static_cast<std::size_t>(turn_index) - 1].conversational_query;
    ctx.history = forge::history_of(conv, static_cast<std::size_t>(turn_index) - 1);
    ctx.k = k;
    const auto qid = forge::query_id(conv.conv_id, turn_index);
    auto resolve = [&](const std::string& id) {
        const auto* d = corpus.find(id);
        if (!d) throw PreconditionError("document '" + id + "' is not in the corpus");
        ctx.passages.push_back(*d);
    };
    if (mode == Mode::oracle) {
        std::vector<std::pair<int, std::string>> gold;
        if (const auto* j = qrels.find(qid))
            for (const auto& [doc, grade] : *j)
                if (grade > 0) gold.emplace_back(-grade, doc);
        std::sort(gold.begin(), gold.end());
        for (const auto& [g, doc] : gold) resolve(doc);
    } else if (mode == Mode::retrieved) {
        if (auto it = run->rankings.find(qid); it != run->rankings.end())
            for (std::size_t i = 0; i < it->second.size() && i < k; ++i) resolve(it->second[i].doc_id);
    }
    return ctx;
}

inline std::string render_context_history(const forge::History& h) {
    return h.empty() ? std::string("(none)") : forge::render_history(h);
}

/// Asks the generator for an answer to the context's question.
inline std::string generate_answer(const GenerationContext& ctx, llm::Gateway& generator) {
    const bool grounded = ctx.mode != Mode::no_retrieval;
    return generator.complete_text(
        llm::prompt_ids::generation,
        {{"history", render_context_history(ctx.history)},
         {"question", ctx.question},
         {"passages", grounded ? render_documents(ctx.passages) : std::string("(none)")},
         {"grounding_instruction", grounded ? "Base the answer on the passages."
                                            : "No passages are available; answer from your own knowledge."}});
}

inline constexpr std::array<const char*, 5> judge_dimensions{"correctness", "completeness", "relevance", "coherence",
                                                             "faithfulness"};

struct JudgeScore {
    int correctness = 0;
    int completeness = 0;
    int relevance = 0;
    int coherence = 0;
    std::optional<int> faithfulness;
    std::map<std::string, double> normalized;

    /// Mean of the normalized scores that are present.
    double average() const {
        double s = 0.0;
        for (const auto& [k, v] : normalized) s += v;
        return normalized.empty() ? 0.0 : s / static_cast<double>(normalized.size());
    }
};

inline double normalize_judge(int raw) { return (raw - 1) / 4.0; }

struct JudgeOutcome {
    std::optional<JudgeScore> score;
    std::string diagnostic;
};

namespace detail {

inline std::optional<std::string> judge_problem(const nlohmann::json& j, Mode mode) {
    for (std::size_t i = 0; i < 4; ++i) {
        int v = j[judge_dimensions[i]].get<int>();
        if (v < 1 || v > 5) return std::string(judge_dimensions[i]) + " out of range: " + std::to_string(v);
    }
    const bool has_faith = j.contains("faithfulness") && !j["faithfulness"].is_null();
    if (mode != Mode::no_retrieval) {
        if (!has_faith) return std::string("faithfulness missing");
        int v = j["faithfulness"].get<int>();
        if (v < 1 || v > 5) return "faithfulness out of range: " + std::to_string(v);
    }
    return std::nullopt;
}

}  // namespace detail

/// Five dimensions (four without passages) on 1-5, normalized by (raw-1)/4.
/// An out-of-range reply is retried once; after that the record is dropped.
inline JudgeOutcome judge_answer(const GenerationContext& ctx, const std::string& answer,
                                 const std::string& reference_answer, llm::Gateway& judge) {
    if (text::trim(answer).empty()) throw PreconditionError("cannot judge an empty answer");
    const bool grounded = ctx.mode != Mode::no_retrieval;
    llm::Variables vars{{"history", render_context_history(ctx.history)},
                        {"question", ctx.question},
                        {"passages", grounded ? render_documents(ctx.passages) : std::string("(none)")},
                        {"reference_answer", reference_answer},
                        {"answer", answer},
                        {"faithfulness_instruction",
                         grounded ? "Score it 1-5." : "No passages were given: set faithfulness to null."}};
    JudgeOutcome out;
    std::string note;
    for (int attempt = 0; attempt < 2; ++attempt) {
        nlohmann::json j;
        try {
            j = judge.complete_structured(llm::prompt_ids::judge, vars, note).parsed;
        } catch (const Error& e) {
            out.diagnostic = e.what();
            return out;
        }
        if (auto problem = detail::judge_problem(j, ctx.mode)) {
            out.diagnostic = *problem;
            note = "Every score must be an integer from 1 to 5" +
                   std::string(grounded ? ", including faithfulness." : "; faithfulness must be null.");
            continue;
        }
        JudgeScore s;
        s.correctness = j["correctness"].get<int>();
        s.completeness = j["completeness"].get<int>();
        s.relevance = j["relevance"].get<int>();
        s.coherence = j["coherence"].get<int>();
        if (grounded) s.faithfulness = j["faithfulness"].get<int>();
        s.normalized = {{"correctness", normalize_judge(s.correctness)},
                        {"completeness", normalize_judge(s.completeness)},
                        {"relevance", normalize_judge(s.relevance)},
                        {"coherence", normalize_judge(s.coherence)}};
        if (s.faithfulness) s.normalized["faithfulness"] = normalize_judge(*s.faithfulness);
        out.score = std::move(s);
        out.diagnostic.clear();
        return out;
    }
    return out;
}

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
    auto ref = text::tokenize(reference);
    if (ref.empty()) throw PreconditionError("ROUGE-L needs a non-empty reference");
    auto cand = text::tokenize(candidate);
    RougeScore r;
    if (cand.empty()) return r;
    const double lcs = static_cast<double>(lcs_length(cand, ref));
    r.precision = lcs / static_cast<double>(cand.size());
    r.recall = lcs / static_cast<double>(ref.size());
    r.f1 = lcs > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

inline double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw PreconditionError("pearson needs equal-length inputs");
    if (xs.size() < 2) throw PreconditionError("pearson needs at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw PreconditionError("pearson undefined for zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Optional external lexical/semantic scorer (METEOR, BERTScore F1).
class ScorerClient {
public:
    virtual ~ScorerClient() = default;
    struct Scores {
        double meteor = 0.0;
        double bertscore = 0.0;
    };
    virtual Scores score(const std::string& candidate, const std::string& reference) = 0;
};

struct GenerationRecord {
    std::string conv_id;
    std::string domain;
    int turn_index = 0;
    Mode mode = Mode::oracle;
    std::string generator_tag;
    std::string answer;
    std::optional<JudgeScore> judge;
    RougeScore rouge;
    std::optional<ScorerClient::Scores> external;
    std::string diagnostic;
};

inline nlohmann::json to_json(const GenerationRecord& r) {
    nlohmann::json j{{"conv_id", r.conv_id},
                     {"turn_index", r.turn_index},
                     {"mode", to_string(r.mode)},
                     {"generator_tag", r.generator_tag},
                     {"answer", r.answer},
                     {"rouge_l", {{"precision", r.rouge.precision}, {"recall", r.rouge.recall}, {"f1", r.rouge.f1}}}};
    if (r.judge) {
        nlohmann::json s{{"correctness", r.judge->correctness},
                         {"completeness", r.judge->completeness},
                         {"relevance", r.judge->relevance},
                         {"coherence", r.judge->coherence},
                         {"faithfulness", r.judge->faithfulness ? nlohmann::json(*r.judge->faithfulness) : nlohmann::json()},
                         {"normalized", r.judge->normalized},
                         {"average", r.judge->average()}};
        j["judge_scores"] = s;
    } else {
        j["judge_scores"] = nullptr;
    }
    if (r.external) j["external"] = {{"meteor", r.external->meteor}, {"bertscore", r.external->bertscore}};
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j;
}

struct GenerationSetup {
    Mode mode = Mode::oracle;
    std::string generator_tag = "generator";
    std::size_t k = 5;
    std::size_t workers = 4;
    const retrieval::RunResult* run = nullptr;
    ScorerClient* scorer = nullptr;
};

/// Generates and judges an answer for every turn. The turn's synthesized
/// answer is the reference.
inline std::vector<GenerationRecord> evaluate_generation(const std::vector<forge::Conversation>& convs,
                                                         const corpus::Qrels& qrels, const corpus::Corpus& corpus,
                                                         llm::Gateway& generator, llm::Gateway& judge,
                                                         const GenerationSetup& setup) {
    auto turns = retrieval::all_turns(convs);
    return parallel_map(turns.size(), setup.workers, [&](std::size_t i) {
        const auto& conv = *turns[i].conversation;
        const int t = turns[i].turn_index;
        GenerationRecord rec;
        rec.conv_id = conv.conv_id;
        rec.domain = conv.domain;
        rec.turn_index = t;
        rec.mode = setup.mode;
        rec.generator_tag = setup.generator_tag;
        const auto& reference = conv.turns[static_cast<std::size_t>(t) - 1].answer;
        auto ctx = build_context(t, conv, setup.mode, setup.run, qrels, corpus, setup.k);
        try {
            rec.answer = generate_answer(ctx, generator);
        } catch (const Error& e) {
            rec.diagnostic = std::string("generation failed: ") + e.what();
            return rec;
        }
        if (rec.answer.empty()) {
            rec.diagnostic = "empty answer";
            return rec;
        }
        rec.rouge = rouge_l(rec.answer, reference);
        auto verdict = judge_answer(ctx, rec.answer, reference, judge);
        rec.judge = verdict.score;
        if (!verdict.score) rec.diagnostic = "judge dropped: " + verdict.diagnostic;
        if (setup.scorer) {
            try {
                rec.external = setup.scorer->score(rec.answer, reference);
            } catch (const Error& e) {
                spdlog::warn("external scorer failed for {}_t{}: {}", rec.conv_id, t, e.what());
            }
        }
        return rec;
    });
}

struct GenerationSummary {
    Mode mode = Mode::oracle;
    std::size_t judged = 0;
    std::size_t dropped = 0;
    double macro_average = 0.0;                  // domain-macro of per-turn judge averages
    std::map<std::string, double> dimensions;    // pooled normalized means
    std::map<std::string, double> domain_means;
    std::array<std::optional<double>, 5> by_turn;  // turn buckets 1,2,3,4,5+
    double rouge_l_f1 = 0.0;
};

inline GenerationSummary summarize_generation(const std::vector<GenerationRecord>& records) {
    GenerationSummary s;
    if (!records.empty()) s.mode = records.front().mode;
    std::map<std::string, std::pair<double, std::size_t>> domain, dims;
    std::array<std::pair<double, std::size_t>, 5> turn{};
    double rouge = 0.0;
    std::size_t rouge_n = 0;
    for (const auto& r : records) {
        if (!r.answer.empty()) {
            rouge += r.rouge.f1;
            ++rouge_n;
        }
        if (!r.judge) {
            ++s.dropped;
            continue;
        }
        ++s.judged;
        const double avg = r.judge->average();
        domain[r.domain].first += avg;
        ++domain[r.domain].second;
        auto b = static_cast<std::size_t>(std::clamp(r.turn_index, 1, 5) - 1);
        turn[b].first += avg;
        ++turn[b].second;
        for (const auto& [d, v] : r.judge->normalized) {
            dims[d].first += v;
            ++dims[d].second;
        }
    }
    for (const auto& [d, p] : domain) s.domain_means[d] = p.first / static_cast<double>(p.second);
    for (const auto& [d, m] : s.domain_means) s.macro_average += m;
    if (!s.domain_means.empty()) s.macro_average /= static_cast<double>(s.domain_means.size());
    for (const auto& [d, p] : dims) s.dimensions[d] = p.first / static_cast<double>(p.second);
    for (std::size_t b = 0; b < 5; ++b)
        if (turn[b].second) s.by_turn[b] = turn[b].first / static_cast<double>(turn[b].second);
    if (rouge_n) s.rouge_l_f1 = rouge / static_cast<double>(rouge_n);
    return s;
}

inline Table generation_table(const std::vector<GenerationSummary>& summaries) {
    Table t{"Generation quality (normalized judge scores)", {"mode", "judged", "dropped", "macro"}, {}};
    for (const auto* d : judge_dimensions) t.headers.emplace_back(d);
    for (const auto* b : {"turn 1", "turn 2", "turn 3", "turn 4", "turn 5+"}) t.headers.emplace_back(b);
    t.headers.emplace_back("rouge_l_f1");
    for (const auto& s : summaries) {
        std::vector<std::string> row{to_string(s.mode), std::to_string(s.judged), std::to_string(s.dropped),
                                     fixed(s.macro_average)};
        for (const auto* d : judge_dimensions) {
            auto it = s.dimensions.find(d);
            row.push_back(it == s.dimensions.end() ? "-" : fixed(it->second));
        }
        for (const auto& b : s.by_turn) row.push_back(b ? fixed(*b) : "-");
        row.push_back(fixed(s.rouge_l_f1));
        t.add(std::move(row));
    }
    return t;
}

}  // namespace convbench::gen
