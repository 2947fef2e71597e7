#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"
#include "convbench/qrels.hpp"
#include "convbench/turn_forge.hpp"

namespace convbench::forge {

inline nlohmann::json to_json(const DocScore& s) {
    return {{"doc_id", s.doc_id},   {"S_s", s.support},   {"S_c", s.completeness},    {"S_l", s.clarity},
            {"S_m", s.misleading}, {"final_score", s.final_score}, {"rationale", s.rationale}};
}

inline nlohmann::json to_json(const Turn& t) {
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& s : t.selected_docs) docs.push_back(to_json(s));
    return {{"turn_index", t.turn_index},
            {"aspect_ref", t.aspect_ref},
            {"sub_question", t.sub_question},
            {"conversational_query", t.conversational_query},
            {"answer", t.answer},
            {"selected_docs", docs},
            {"retrieval_reasoning",
             {{"target", t.retrieval_reasoning.target},
              {"relevance_signals", t.retrieval_reasoning.relevance_signals},
              {"irrelevance_signals", t.retrieval_reasoning.irrelevance_signals}}}};
}

inline nlohmann::json to_json(const Conversation& c) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : c.turns) turns.push_back(to_json(t));
    return {{"conv_id", c.conv_id}, {"domain", c.domain},          {"source_ref", c.source_ref},
            {"topic", c.topic},     {"aspect_count", c.aspect_count}, {"turns", turns}};
}

inline Conversation conversation_from_json(const nlohmann::json& j) {
    Conversation c;
    c.conv_id = j.at("conv_id").get<std::string>();
    c.domain = j.value("domain", "");
    c.source_ref = j.value("source_ref", c.conv_id);
    c.topic = j.value("topic", "");
    c.aspect_count = j.value("aspect_count", 0);
    for (const auto& tj : j.at("turns")) {
        Turn t;
        t.turn_index = tj.at("turn_index").get<int>();
        t.aspect_ref = tj.value("aspect_ref", "");
        t.sub_question = tj.value("sub_question", "");
        t.conversational_query = tj.at("conversational_query").get<std::string>();
        t.answer = tj.at("answer").get<std::string>();
        for (const auto& sj : tj.value("selected_docs", nlohmann::json::array())) {
            DocScore s;
            s.doc_id = sj.at("doc_id").get<std::string>();
            s.support = sj.value("S_s", 0);
            s.completeness = sj.value("S_c", 0);
            s.clarity = sj.value("S_l", 0);
            s.misleading = sj.value("S_m", 0);
            s.final_score = combine_scores(s.support, s.completeness, s.clarity, s.misleading);
            s.rationale = sj.value("rationale", "");
            t.selected_docs.push_back(std::move(s));
        }
        if (auto rr = tj.find("retrieval_reasoning"); rr != tj.end()) {
            t.retrieval_reasoning.target = rr->value("target", "");
            t.retrieval_reasoning.relevance_signals =
                rr->value("relevance_signals", std::vector<std::string>{});
            t.retrieval_reasoning.irrelevance_signals =
                rr->value("irrelevance_signals", std::vector<std::string>{});
        }
        c.turns.push_back(std::move(t));
    }
    return c;
}

inline void write_conversations(const std::filesystem::path& path, const std::vector<Conversation>& convs) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& c : convs) out << to_json(c).dump() << '\n';
}

inline std::vector<Conversation> read_conversations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open conversations file " + path.string());
    std::vector<Conversation> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ParseError("invalid JSON conversation", lineno);
        try {
            out.push_back(conversation_from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad conversation record: ") + e.what(), lineno);
        }
    }
    return out;
}

inline std::string query_id(const std::string& conv_id, int turn_index) {
    return conv_id + "_t" + std::to_string(turn_index);
}

/// Selected documents of every turn become grade-1 judgments for that turn.
inline corpus::Qrels qrels_from_conversations(const std::vector<Conversation>& convs) {
    corpus::Qrels q;
    for (const auto& c : convs)
        for (const auto& t : c.turns)
            for (const auto& s : t.selected_docs) q.set(query_id(c.conv_id, t.turn_index), s.doc_id, 1);
    return q;
}

}  // namespace convbench::forge
