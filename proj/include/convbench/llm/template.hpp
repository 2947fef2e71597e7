#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "convbench/errors.hpp"
#include "convbench/llm/prompts.hpp"

namespace convbench::llm {

using Variables = std::map<std::string, std::string>;

/// A prompt body with `{name}` placeholders. Brace pairs that do not enclose a
/// plain identifier (JSON examples, for instance) are left untouched.
class PromptTemplate {
public:
    PromptTemplate(std::string id, std::string body, Schema schema = {}, PromptGroup group = PromptGroup::auxiliary)
        : id_(std::move(id)), body_(std::move(body)), schema_(std::move(schema)), group_(group) {
        for (const auto& seg : segments()) {
            if (seg.is_placeholder && std::find(placeholders_.begin(), placeholders_.end(), seg.text) == placeholders_.end())
                placeholders_.push_back(seg.text);
        }
    }

    const std::string& id() const noexcept { return id_; }
    const std::string& body() const noexcept { return body_; }
    const Schema& schema() const noexcept { return schema_; }
    PromptGroup group() const noexcept { return group_; }
    const std::vector<std::string>& placeholders() const noexcept { return placeholders_; }

    /// Substitutes every placeholder; throws TemplateError naming the first unbound one.
    std::string render(const Variables& vars) const {
        std::string out;
        out.reserve(body_.size() + 256);
        for (const auto& seg : segments()) {
            if (!seg.is_placeholder) {
                out += seg.text;
                continue;
            }
            auto it = vars.find(seg.text);
            if (it == vars.end()) throw TemplateError("template '" + id_ + "': unbound placeholder {" + seg.text + "}");
            out += it->second;
        }
        return out;
    }

private:
    struct Segment {
        bool is_placeholder;
        std::string text;
    };

    static bool is_ident(std::string_view s) {
        if (s.empty() || !(std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
        return std::all_of(s.begin(), s.end(), [](char c) {
            return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
        });
    }

    std::vector<Segment> segments() const {
        std::vector<Segment> segs;
        std::size_t pos = 0, lit = 0;
        while ((pos = body_.find('{', pos)) != std::string::npos) {
            auto close = body_.find('}', pos + 1);
            if (close == std::string::npos) break;
            std::string_view name(body_.data() + pos + 1, close - pos - 1);
            if (is_ident(name)) {
                if (pos > lit) segs.push_back({false, body_.substr(lit, pos - lit)});
                segs.push_back({true, std::string(name)});
                lit = close + 1;
                pos = close + 1;
            } else {
                ++pos;
            }
        }
        if (lit < body_.size()) segs.push_back({false, body_.substr(lit)});
        return segs;
    }

    std::string id_;
    std::string body_;
    Schema schema_;
    PromptGroup group_;
    std::vector<std::string> placeholders_;
};

class TemplateRegistry {
public:
    TemplateRegistry() = default;

    static const TemplateRegistry& builtin() {
        static const TemplateRegistry reg = [] {
            TemplateRegistry r;
            for (auto& p : detail::build_prompts()) r.add(PromptTemplate(p.id, p.body, p.schema, p.group));
            return r;
        }();
        return reg;
    }

    void add(PromptTemplate t) {
        auto id = t.id();
        if (!index_.emplace(id, templates_.size()).second) throw ConflictError(id);
        templates_.push_back(std::move(t));
    }

    const PromptTemplate& get(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw TemplateError("unknown template '" + std::string(id) + "'");
        return templates_[it->second];
    }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

    std::vector<std::string> ids(PromptGroup group) const {
        std::vector<std::string> out;
        for (const auto& t : templates_)
            if (t.group() == group) out.push_back(t.id());
        return out;
    }

    const std::vector<PromptTemplate>& all() const noexcept { return templates_; }

private:
    std::vector<PromptTemplate> templates_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace convbench::llm
