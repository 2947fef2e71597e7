#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "convbench/errors.hpp"
#include "convbench/text.hpp"

namespace convbench::corpus {

/// Graded relevance judgments: query_id -> (doc_id -> grade >= 0).
class Qrels {
public:
    using Judgments = std::map<std::string, int>;

    void set(const std::string& query_id, const std::string& doc_id, int grade) {
        if (grade < 0) throw PreconditionError("negative relevance grade for " + query_id + "/" + doc_id);
        entries_[query_id][doc_id] = grade;
    }

    const Judgments* find(const std::string& query_id) const {
        auto it = entries_.find(query_id);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t query_count() const noexcept { return entries_.size(); }

    std::size_t entry_count() const noexcept {
        std::size_t n = 0;
        for (const auto& [q, j] : entries_) n += j.size();
        return n;
    }

    const std::map<std::string, Judgments>& entries() const noexcept { return entries_; }

    bool operator==(const Qrels&) const = default;

    /// Four whitespace-separated columns: "query_id 0 doc_id grade".
    static Qrels load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open qrels file " + path.string());
        Qrels q;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (text::trim(line).empty()) continue;
            std::istringstream ss(line);
            std::string qid, iter, doc, grade_s, extra;
            if (!(ss >> qid >> iter >> doc >> grade_s) || (ss >> extra))
                throw ParseError("qrels line must have exactly 4 columns", lineno);
            int grade = 0;
            auto [ptr, ec] = std::from_chars(grade_s.data(), grade_s.data() + grade_s.size(), grade);
            if (ec != std::errc{} || ptr != grade_s.data() + grade_s.size())
                throw ParseError("non-integer relevance grade '" + grade_s + "'", lineno);
            if (grade < 0) throw ParseError("negative relevance grade " + grade_s, lineno);
            q.entries_[qid][doc] = grade;
        }
        return q;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        for (const auto& [qid, judgments] : entries_)
            for (const auto& [doc, grade] : judgments) out << qid << " 0 " << doc << ' ' << grade << '\n';
    }

private:
    std::map<std::string, Judgments> entries_;
};

}  // namespace convbench::corpus
