#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "convbench/errors.hpp"
#include "convbench/text.hpp"

namespace convbench::corpus {

struct Document {
    std::string doc_id;
    std::string domain;
    std::string text;
    std::optional<std::string> source_url;
    bool is_positive = false;

    bool operator==(const Document&) const = default;
};

inline nlohmann::json to_json(const Document& d) {
    nlohmann::json j{{"doc_id", d.doc_id}, {"domain", d.domain}, {"text", d.text}, {"is_positive", d.is_positive}};
    j["source_url"] = d.source_url ? nlohmann::json(*d.source_url) : nlohmann::json(nullptr);
    return j;
}

/// Parses one corpus record. Throws ParseError (without line number) on malformed input.
inline Document document_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("record is not an object");
    auto req_string = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw ParseError(std::string("missing or non-string field '") + key + "'");
        return it->get<std::string>();
    };
    Document d;
    d.doc_id = req_string("doc_id");
    d.text = req_string("text");
    if (auto it = j.find("domain"); it != j.end() && it->is_string()) d.domain = it->get<std::string>();
    if (auto it = j.find("source_url"); it != j.end() && it->is_string()) d.source_url = it->get<std::string>();
    if (auto it = j.find("is_positive"); it != j.end()) {
        if (!it->is_boolean()) throw ParseError("field 'is_positive' must be boolean");
        d.is_positive = it->get<bool>();
    }
    if (text::trim(d.doc_id).empty()) throw ParseError("empty doc_id");
    if (text::trim(d.text).empty()) throw ParseError("empty text for doc '" + d.doc_id + "'");
    return d;
}

enum class Format { jsonl, tsv };

inline Format format_from_path(const std::filesystem::path& p) {
    return p.extension() == ".tsv" ? Format::tsv : Format::jsonl;
}

struct CorpusStats {
    std::size_t total = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;

    /// Negatives per positive; 0 when there are no positives.
    double negative_ratio() const { return positives ? static_cast<double>(negatives) / positives : 0.0; }
};

/// Immutable document store with id lookup. Safe for concurrent reads.
class Corpus {
public:
    Corpus() = default;

    /// Throws ConflictError on a repeated doc_id and PreconditionError on empty text.
    static Corpus from_documents(std::vector<Document> docs) {
        Corpus c;
        c.docs_ = std::move(docs);
        c.index_.reserve(c.docs_.size());
        for (std::size_t i = 0; i < c.docs_.size(); ++i) {
            if (text::trim(c.docs_[i].text).empty())
                throw PreconditionError("document '" + c.docs_[i].doc_id + "' has empty text");
            if (!c.index_.emplace(c.docs_[i].doc_id, i).second) throw ConflictError(c.docs_[i].doc_id);
        }
        return c;
    }

    /// Loads a line-delimited corpus. jsonl records carry doc_id, domain, text,
    /// source_url, is_positive; tsv columns are doc_id, text, then optional
    /// domain, source_url and is_positive (true/false/1/0).
    static Corpus ingest(const std::filesystem::path& path, Format format) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open corpus file " + path.string());
        std::vector<Document> docs;
        std::unordered_map<std::string, std::size_t> seen;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (text::trim(line).empty()) continue;
            Document d;
            try {
                d = format == Format::jsonl ? parse_jsonl(line) : parse_tsv(line);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), lineno);
            }
            if (!seen.emplace(d.doc_id, lineno).second) throw ConflictError(d.doc_id);
            docs.push_back(std::move(d));
        }
        return from_documents(std::move(docs));
    }

    static Corpus ingest(const std::filesystem::path& path) { return ingest(path, format_from_path(path)); }

    void write_jsonl(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        for (const auto& d : docs_) out << to_json(d).dump() << '\n';
    }

    std::size_t size() const noexcept { return docs_.size(); }
    bool empty() const noexcept { return docs_.empty(); }
    auto begin() const noexcept { return docs_.begin(); }
    auto end() const noexcept { return docs_.end(); }
    const Document& operator[](std::size_t i) const { return docs_[i]; }
    const std::vector<Document>& documents() const noexcept { return docs_; }

    const Document* find(std::string_view doc_id) const {
        auto it = index_.find(std::string(doc_id));
        return it == index_.end() ? nullptr : &docs_[it->second];
    }

    bool contains(std::string_view doc_id) const { return find(doc_id) != nullptr; }

    CorpusStats stats() const {
        CorpusStats s;
        s.total = docs_.size();
        for (const auto& d : docs_) (d.is_positive ? s.positives : s.negatives)++;
        return s;
    }

private:
    static Document parse_jsonl(const std::string& line) {
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("invalid JSON");
        return document_from_json(j);
    }

    static Document parse_tsv(const std::string& line) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) cols.push_back(col);
        if (cols.size() < 2) throw ParseError("expected at least doc_id and text columns");
        Document d;
        d.doc_id = text::trim(cols[0]);
        d.text = cols[1];
        if (cols.size() > 2) d.domain = text::trim(cols[2]);
        if (cols.size() > 3 && !text::trim(cols[3]).empty()) d.source_url = text::trim(cols[3]);
        if (cols.size() > 4) {
            auto flag = text::trim(cols[4]);
            if (flag == "true" || flag == "1") d.is_positive = true;
            else if (flag == "false" || flag == "0" || flag.empty()) d.is_positive = false;
            else throw ParseError("bad is_positive value '" + flag + "'");
        }
        if (d.doc_id.empty()) throw ParseError("empty doc_id");
        if (text::trim(d.text).empty()) throw ParseError("empty text for doc '" + d.doc_id + "'");
        return d;
    }

    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace convbench::corpus
