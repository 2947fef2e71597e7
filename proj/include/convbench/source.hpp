#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"

namespace convbench {

/// A single-turn seed: question, gold answer, reasoning annotation and the
/// documents that support the answer.
struct SourceRecord {
    std::string source_id;
    std::string query;
    std::string gold_answer;
    std::string overall_reasoning;
    std::string domain;
    std::vector<corpus::Document> documents;

    /// Throws PreconditionError when the query or answer is empty or no document is attached.
    void check() const {
        if (text::trim(query).empty()) throw PreconditionError("source '" + source_id + "': empty query");
        if (text::trim(gold_answer).empty()) throw PreconditionError("source '" + source_id + "': empty gold answer");
        if (documents.empty()) throw PreconditionError("source '" + source_id + "': no documents");
    }
};

/// Line-delimited sources. Each record has source_id, query, gold_answer,
/// overall_reasoning, domain and either inline `documents` or `doc_ids`
/// resolved against `corpus`.
inline std::vector<SourceRecord> load_sources(const std::filesystem::path& path, const corpus::Corpus* corpus) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sources file " + path.string());
    std::vector<SourceRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ParseError("invalid JSON source record", lineno);
        try {
            SourceRecord r;
            r.source_id = j.at("source_id").get<std::string>();
            r.query = j.at("query").get<std::string>();
            r.gold_answer = j.at("gold_answer").get<std::string>();
            r.overall_reasoning = j.value("overall_reasoning", "");
            r.domain = j.value("domain", "");
            if (j.contains("documents")) {
                for (const auto& d : j["documents"]) r.documents.push_back(corpus::document_from_json(d));
            }
            if (j.contains("doc_ids")) {
                if (!corpus) throw ParseError("doc_ids given but no corpus loaded");
                for (const auto& id : j["doc_ids"]) {
                    const auto* d = corpus->find(id.get<std::string>());
                    if (!d) throw ParseError("unknown doc_id '" + id.get<std::string>() + "'");
                    r.documents.push_back(*d);
                }
            }
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad source record: ") + e.what(), lineno);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return out;
}

/// Documents rendered for prompts: "[doc_id]" header line followed by the text.
inline std::string render_documents(const std::vector<corpus::Document>& docs) {
    std::string out;
    for (const auto& d : docs) {
        if (!out.empty()) out += "\n\n";
        out += "[" + d.doc_id + "]\n" + text::trim(d.text);
    }
    return out.empty() ? std::string("(none)") : out;
}

}  // namespace convbench
