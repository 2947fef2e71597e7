#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "convbench/decomposer.hpp"
#include "convbench/errors.hpp"
#include "convbench/fact_verifier.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/source.hpp"
#include "convbench/text.hpp"

namespace convbench::forge {

struct DocScore {
    std::string doc_id;
    int support = 0;       // S_s
    int completeness = 0;  // S_c
    int clarity = 0;       // S_l
    int misleading = 0;    // S_m
    double final_score = 0.0;
    std::string rationale;
};

/// 0.5 S_s + 0.3 S_c + 0.15 S_l - 0.05 S_m, evaluated in hundredths so the
/// result is the double nearest the exact rational value.
inline double combine_scores(int s, int c, int l, int m) {
    return static_cast<double>(50 * s + 30 * c + 15 * l - 5 * m) / 100.0;
}

struct RetrievalReasoning {
    std::string target;
    std::vector<std::string> relevance_signals;
    std::vector<std::string> irrelevance_signals;
};

struct Turn {
    int turn_index = 0;
    std::string aspect_ref;
    std::string sub_question;
    std::string conversational_query;
    std::string answer;
    std::vector<DocScore> selected_docs;
    RetrievalReasoning retrieval_reasoning;
};

struct Conversation {
    std::string conv_id;
    std::string domain;
    std::string source_ref;
    std::string topic;  // the seed question
    int aspect_count = 0;
    std::vector<Turn> turns;
};

struct Exchange {
    std::string question;
    std::string answer;
};

using History = std::vector<Exchange>;

inline std::string render_history(const History& history) {
    std::string out;
    for (const auto& e : history) {
        if (!out.empty()) out += '\n';
        out += "Q: " + e.question + "\nA: " + e.answer;
    }
    return out;
}

inline History history_of(const Conversation& conv, std::size_t turns) {
    History h;
    for (std::size_t i = 0; i < turns && i < conv.turns.size(); ++i)
        h.push_back({conv.turns[i].conversational_query, conv.turns[i].answer});
    return h;
}

struct SubQuestion {
    std::string sub_question;
    double confidence = 0.0;
};

inline std::string bullet_list(const std::vector<std::string>& items) {
    if (items.empty()) return "(none)";
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += '\n';
        out += "- " + s;
    }
    return out;
}

inline SubQuestion generate_subquestion(const decompose::Aspect& aspect, const std::vector<std::string>& facts,
                                        const std::vector<std::string>& prior_subqs, std::string_view query,
                                        std::string_view overall_reasoning, llm::Gateway& gateway,
                                        std::string_view repair_note = {}) {
    if (facts.empty()) throw PreconditionError("aspect '" + aspect.aspect_name + "' has no verified facts");
    auto reply = gateway.complete_structured(llm::prompt_ids::subquestion,
                                             {{"query", std::string(query)},
                                              {"overall_reasoning", std::string(overall_reasoning)},
                                              {"aspect_name", aspect.aspect_name},
                                              {"aspect_type", decompose::to_string(aspect.aspect_type)},
                                              {"semantic_facts", bullet_list(facts)},
                                              {"previous_subquestions", bullet_list(prior_subqs)}},
                                             repair_note);
    return {text::trim(reply.parsed["sub_question"].get<std::string>()),
            std::clamp(reply.parsed["confidence"].get<double>(), 0.0, 1.0)};
}

namespace detail {

inline std::string question_key(std::string_view q) {
    std::string key;
    for (const auto& t : text::tokenize(q)) key += t + ' ';
    return key;
}

inline int clamp_component(const nlohmann::json& v, const std::string& name, const std::string& doc_id) {
    double x = v.get<double>();
    double c = std::clamp(std::round(x), 0.0, 10.0);
    if (c != x) spdlog::warn("document {}: {} {} adjusted to {}", doc_id, name, x, c);
    return static_cast<int>(c);
}

}  // namespace detail

/// One score per candidate, in candidate order. The model's final score is
/// ignored and recomputed; candidates the model skipped score zero.
inline std::vector<DocScore> score_documents(std::string_view sub_question, std::string_view reasoning,
                                             const std::vector<std::string>& facts,
                                             const std::vector<corpus::Document>& candidates, llm::Gateway& gateway) {
    if (candidates.empty()) throw PreconditionError("score_documents needs at least one candidate");
    auto reply = gateway.complete_structured(llm::prompt_ids::scoring,
                                             {{"sub_question", std::string(sub_question)},
                                              {"retrieval_reasoning", std::string(reasoning)},
                                              {"semantic_facts", bullet_list(facts)},
                                              {"candidate_docs", render_documents(candidates)}});
    std::vector<DocScore> out;
    for (const auto& cand : candidates) {
        DocScore s;
        s.doc_id = cand.doc_id;
        s.rationale = "not scored";
        for (const auto& item : reply.parsed["document_scores"]) {
            if (item["doc_id"].get<std::string>() != cand.doc_id) continue;
            s.support = detail::clamp_component(item["support_score"], "support_score", cand.doc_id);
            s.completeness = detail::clamp_component(item["completeness_score"], "completeness_score", cand.doc_id);
            s.clarity = detail::clamp_component(item["clarity_score"], "clarity_score", cand.doc_id);
            s.misleading = detail::clamp_component(item["misleading_score"], "misleading_score", cand.doc_id);
            s.rationale = item.value("reasoning", "");
            break;
        }
        s.final_score = combine_scores(s.support, s.completeness, s.clarity, s.misleading);
        out.push_back(std::move(s));
    }
    return out;
}

/// Scores at or above `threshold`, best first, ties by doc_id.
inline std::vector<DocScore> select_scores(const std::vector<DocScore>& scores, double threshold) {
    if (scores.empty()) throw PreconditionError("select_documents needs at least one score");
    std::vector<DocScore> kept;
    for (const auto& s : scores)
        if (s.final_score >= threshold) kept.push_back(s);
    std::stable_sort(kept.begin(), kept.end(), [](const DocScore& a, const DocScore& b) {
        if (a.final_score != b.final_score) return a.final_score > b.final_score;
        return a.doc_id < b.doc_id;
    });
    return kept;
}

inline std::vector<std::string> select_documents(const std::vector<DocScore>& scores, double threshold) {
    std::vector<std::string> ids;
    for (auto& s : select_scores(scores, threshold)) ids.push_back(std::move(s.doc_id));
    return ids;
}

struct NaturalizedQuery {
    std::string conversational_query;
    bool retried = false;
    bool fell_back = false;
};

inline std::string render_openers(const std::vector<std::string>& openers) {
    if (openers.empty()) return "(none)";
    std::string out;
    for (const auto& o : openers) out += (out.empty() ? "" : ", ") + o;
    return out;
}

/// Turn 1 uses the opening template, later turns the follow-up template. A
/// follow-up that starts with an already used opener is regenerated once.
inline NaturalizedQuery naturalize_query(std::string_view sub_question, const History& history, int turn_index,
                                         const std::vector<std::string>& prior_openers, std::string_view topic,
                                         llm::Gateway& gateway) {
    if (turn_index < 1) throw PreconditionError("turn_index must be >= 1");
    if ((turn_index == 1) != history.empty())
        throw PreconditionError("history must be empty exactly when turn_index is 1");

    NaturalizedQuery out;
    llm::Variables vars{{"original_query", std::string(topic)}, {"sub_question", std::string(sub_question)}};
    const char* tid = llm::prompt_ids::turn1;
    if (turn_index > 1) {
        tid = llm::prompt_ids::followup;
        vars["history"] = render_history(history);
        vars["previous_starters"] = render_openers(prior_openers);
    }
    std::set<std::string> used;
    for (const auto& o : prior_openers) used.insert(text::first_word(o));
    try {
        auto q = text::trim(gateway.complete_structured(tid, vars).parsed["conversational_query"].get<std::string>());
        auto opener = text::first_word(q);
        if (!opener.empty() && used.count(opener)) {
            out.retried = true;
            q = text::trim(gateway
                               .complete_structured(tid, vars,
                                                    "Do not begin the question with \"" + opener +
                                                        "\"; pick a different opening word.")
                               .parsed["conversational_query"]
                               .get<std::string>());
        }
        if (q.empty()) throw ValidationError("empty conversational_query", "", 1);
        out.conversational_query = std::move(q);
    } catch (const Error& e) {
        spdlog::warn("query naturalization failed ({}); using the sub-question", e.what());
        out.conversational_query = std::string(sub_question);
        out.fell_back = true;
    }
    return out;
}

/// Lexical check for answers that talk about their sources instead of the topic.
inline bool has_meta_reference(std::string_view answer) {
    static const std::set<std::string> words{"document", "documents", "passage", "passages", "excerpt", "excerpts"};
    static const std::vector<std::string> phrases{"the text",         "the source",  "the sources",   "provided text",
                                                  "provided information", "according to the", "the provided"};
    for (const auto& t : text::tokenize(answer))
        if (words.count(t)) return true;
    std::string norm;
    for (const auto& t : text::tokenize(answer)) norm += ' ' + t;
    norm += ' ';
    for (const auto& p : phrases)
        if (norm.find(' ' + p + ' ') != std::string::npos) return true;
    return false;
}

struct GroundedAnswer {
    std::optional<std::string> answer;  // empty when the turn must be dropped
    bool retried = false;
};

inline GroundedAnswer generate_grounded_answer(std::string_view query, const History& history,
                                               const std::vector<corpus::Document>& selected, llm::Gateway& gateway) {
    if (selected.empty()) throw PreconditionError("grounded answer needs at least one selected document");
    llm::Variables vars{{"history", history.empty() ? "(none)" : render_history(history)},
                        {"query", std::string(query)},
                        {"documents", render_documents(selected)}};
    GroundedAnswer out;
    std::string note;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto a = text::trim(gateway.complete_structured(llm::prompt_ids::answer, vars, note).parsed["answer"].get<std::string>());
        if (!a.empty() && !has_meta_reference(a)) {
            out.answer = std::move(a);
            return out;
        }
        out.retried = true;
        note = "Answer directly about the topic. Do not mention documents, sources, passages or \"the text\".";
    }
    return out;
}

struct DiversityVerdict {
    bool adds_value = true;
    std::string value_type;
    std::string reason;
};

inline DiversityVerdict check_turn_diversity(std::string_view new_answer, const History& history, llm::Gateway& gateway) {
    if (history.empty()) return {true, "first_turn", "no prior turns"};
    auto reply = gateway.complete_structured(llm::prompt_ids::diversity,
                                             {{"previous_content", render_history(history)},
                                              {"new_answer", std::string(new_answer)}});
    DiversityVerdict v;
    v.value_type = reply.parsed["value_type"].get<std::string>();
    v.adds_value = reply.parsed["adds_value"].get<bool>() && v.value_type != "repetitive";
    v.reason = reply.parsed.value("reason", "");
    return v;
}

struct ReasoningResult {
    RetrievalReasoning reasoning;
    bool flagged = false;  // relevance signals still empty after the retry
};

inline ReasoningResult annotate_retrieval_reasoning(std::string_view sub_question,
                                                    const std::vector<corpus::Document>& selected,
                                                    llm::Gateway& gateway) {
    if (selected.empty()) throw PreconditionError("retrieval reasoning needs at least one selected document");
    llm::Variables vars{{"sub_question", std::string(sub_question)}, {"documents", render_documents(selected)}};
    ReasoningResult out;
    std::string note;
    for (int attempt = 0; attempt < 2; ++attempt) {
        auto j = gateway.complete_structured(llm::prompt_ids::retrieval_reasoning, vars, note).parsed;
        RetrievalReasoning r;
        r.target = text::trim(j["target"].get<std::string>());
        for (const auto& s : j["relevance_signals"])
            if (auto t = text::trim(s.get<std::string>()); !t.empty()) r.relevance_signals.push_back(t);
        for (const auto& s : j["irrelevance_signals"])
            if (auto t = text::trim(s.get<std::string>()); !t.empty()) r.irrelevance_signals.push_back(t);
        out.reasoning = std::move(r);
        if (!out.reasoning.relevance_signals.empty()) return out;
        note = "relevance_signals must contain at least one signal.";
    }
    out.flagged = true;
    return out;
}

struct ForgeConfig {
    double selection_threshold = 5.0;
    std::size_t min_turns = 3;
    std::size_t max_turns = 12;
};

enum class RejectReason { too_short, too_long, validation_failed };

inline std::string to_string(RejectReason r) {
    switch (r) {
        case RejectReason::too_short: return "too_short";
        case RejectReason::too_long: return "too_long";
        case RejectReason::validation_failed: return "validation_failed";
    }
    return "validation_failed";
}

struct AssemblyResult {
    std::optional<Conversation> conversation;
    std::optional<RejectReason> rejection;
    std::string detail;
    std::vector<std::string> skipped;  // "aspect: why" for every aspect that produced no turn
};

/// Conversation-level checks; returns the first problem found.
inline std::optional<std::string> conversation_problem(const Conversation& conv) {
    std::set<std::string> queries;
    for (std::size_t i = 0; i < conv.turns.size(); ++i) {
        const auto& t = conv.turns[i];
        if (t.turn_index != static_cast<int>(i) + 1) return "turn indexes are not contiguous";
        if (t.selected_docs.empty()) return "turn " + std::to_string(t.turn_index) + " has no selected documents";
        if (text::trim(t.answer).empty()) return "turn " + std::to_string(t.turn_index) + " has an empty answer";
        if (!queries.insert(detail::question_key(t.conversational_query)).second)
            return "turn " + std::to_string(t.turn_index) + " repeats an earlier query";
    }
    return std::nullopt;
}

/// Builds turns for the ordered aspects (paired index-wise with their fact
/// reports), then applies the length and conversation-level checks.
inline AssemblyResult assemble_conversation(const SourceRecord& source,
                                            const std::vector<decompose::Aspect>& ordered_aspects,
                                            const std::vector<facts::FactReport>& fact_reports, llm::Gateway& gateway,
                                            const ForgeConfig& config = {}) {
    if (ordered_aspects.size() != fact_reports.size())
        throw PreconditionError("one fact report per aspect is required");
    source.check();

    AssemblyResult result;
    Conversation conv;
    conv.conv_id = source.source_id;
    conv.domain = source.domain;
    conv.source_ref = source.source_id;
    conv.topic = source.query;
    conv.aspect_count = static_cast<int>(ordered_aspects.size());

    History history;
    std::vector<std::string> prior_subqs;
    std::set<std::string> subq_keys;
    std::vector<std::string> openers;
    auto skip = [&](const decompose::Aspect& a, const std::string& why) {
        result.skipped.push_back(a.aspect_name + ": " + why);
    };

    for (std::size_t i = 0; i < ordered_aspects.size(); ++i) {
        const auto& aspect = ordered_aspects[i];
        const auto& report = fact_reports[i];
        if (!report.survives) {
            skip(aspect, "no verified facts");
            continue;
        }
        try {
            auto facts = report.supported_facts();
            auto sq = generate_subquestion(aspect, facts, prior_subqs, source.query, source.overall_reasoning, gateway);
            if (subq_keys.count(detail::question_key(sq.sub_question))) {
                sq = generate_subquestion(aspect, facts, prior_subqs, source.query, source.overall_reasoning, gateway,
                                          "The sub-question must differ from every previous sub-question.");
                if (subq_keys.count(detail::question_key(sq.sub_question))) {
                    skip(aspect, "duplicate sub-question");
                    continue;
                }
            }
            if (sq.sub_question.empty()) {
                skip(aspect, "empty sub-question");
                continue;
            }

            auto scores = score_documents(sq.sub_question, source.overall_reasoning, facts, source.documents, gateway);
            auto selected = select_scores(scores, config.selection_threshold);
            if (selected.empty()) {
                skip(aspect, "no document above threshold");
                continue;
            }
            std::vector<corpus::Document> selected_docs;
            for (const auto& s : selected)
                for (const auto& d : source.documents)
                    if (d.doc_id == s.doc_id) selected_docs.push_back(d);

            const int turn_index = static_cast<int>(conv.turns.size()) + 1;
            auto q = naturalize_query(sq.sub_question, history, turn_index, openers, source.query, gateway);
            auto ans = generate_grounded_answer(q.conversational_query, history, selected_docs, gateway);
            if (!ans.answer) {
                skip(aspect, "answer kept referring to its sources");
                continue;
            }
            auto div = check_turn_diversity(*ans.answer, history, gateway);
            if (!div.adds_value) {
                skip(aspect, "repetitive answer");
                continue;
            }
            auto rr = annotate_retrieval_reasoning(sq.sub_question, selected_docs, gateway);
            if (rr.flagged) {
                skip(aspect, "no relevance signals");
                continue;
            }

            Turn t;
            t.turn_index = turn_index;
            t.aspect_ref = aspect.aspect_name;
            t.sub_question = sq.sub_question;
            t.conversational_query = q.conversational_query;
            t.answer = *ans.answer;
            t.selected_docs = std::move(selected);
            t.retrieval_reasoning = std::move(rr.reasoning);

            prior_subqs.push_back(t.sub_question);
            subq_keys.insert(detail::question_key(t.sub_question));
            if (auto w = text::first_word(t.conversational_query); !w.empty()) openers.push_back(w);
            history.push_back({t.conversational_query, t.answer});
            conv.turns.push_back(std::move(t));
        } catch (const Error& e) {
            skip(aspect, std::string("gateway: ") + e.what());
        }
    }

    if (conv.turns.size() < config.min_turns) {
        result.rejection = RejectReason::too_short;
        result.detail = std::to_string(conv.turns.size()) + " turns";
        return result;
    }
    if (conv.turns.size() > config.max_turns) {
        result.rejection = RejectReason::too_long;
        result.detail = std::to_string(conv.turns.size()) + " turns";
        return result;
    }
    if (auto problem = conversation_problem(conv)) {
        result.rejection = RejectReason::validation_failed;
        result.detail = *problem;
        return result;
    }
    result.conversation = std::move(conv);
    return result;
}

}  // namespace convbench::forge
