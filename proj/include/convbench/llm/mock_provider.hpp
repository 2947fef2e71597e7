#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"

namespace convbench::llm {

/// One canned reply sequence. A rule applies to a request when the template id
/// matches, the variable hash matches (if `key` is set) and every `contains`
/// needle occurs in the rendered prompt. Successive calls with the same
/// variables walk through `responses`; the last one repeats.
struct MockRule {
    std::string template_id;
    std::optional<std::uint64_t> key;
    std::vector<std::string> contains;
    std::vector<json> responses;
};

/// Deterministic offline provider. Rules are matched in order: keyed rules
/// first, then the first matching unkeyed rule. Responses may use `{{name}}`
/// to echo a request variable.
class MockProvider : public Provider {
public:
    using Handler = std::function<std::string(const ProviderRequest&)>;

    struct CallRecord {
        std::string template_id;
        std::uint64_t variables_hash;
    };

    MockProvider() = default;

    void add(MockRule rule) {
        std::lock_guard lock(mutex_);
        rules_.push_back(std::move(rule));
    }

    void add(std::string template_id, std::vector<json> responses, std::vector<std::string> contains = {}) {
        add(MockRule{std::move(template_id), std::nullopt, std::move(contains), std::move(responses)});
    }

    /// Handlers take precedence over rules for their template id.
    void on(std::string template_id, Handler handler) {
        std::lock_guard lock(mutex_);
        handlers_[std::move(template_id)] = std::move(handler);
    }

    void set_delay(std::chrono::milliseconds d) { delay_ = d; }

    /// Loads every `*.jsonl` file in `dir` (sorted by name). Each line:
    /// {"template_id": ..., "key": "<16 hex>"?, "contains": [...]?, "responses": [...]}
    static std::shared_ptr<MockProvider> from_directory(const std::filesystem::path& dir) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) throw ParseError("mock fixture directory not found: " + dir.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".jsonl") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        auto mock = std::make_shared<MockProvider>();
        for (const auto& f : files) mock->load_file(f);
        return mock;
    }

    void load_file(const std::filesystem::path& file) {
        std::ifstream in(file);
        if (!in) throw ParseError("cannot open mock fixture " + file.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (text::trim(line).empty()) continue;
            auto j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("template_id") || !j.contains("responses") ||
                !j["responses"].is_array() || j["responses"].empty())
                throw ParseError("malformed mock rule in " + file.string(), lineno);
            MockRule rule;
            rule.template_id = j["template_id"].get<std::string>();
            if (j.contains("key")) rule.key = std::stoull(j["key"].get<std::string>(), nullptr, 16);
            if (j.contains("contains")) rule.contains = j["contains"].get<std::vector<std::string>>();
            for (const auto& r : j["responses"]) rule.responses.push_back(r);
            add(std::move(rule));
        }
    }

    std::string complete(const ProviderRequest& req) override {
        if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
        Handler handler;
        std::optional<json> reply;
        {
            std::lock_guard lock(mutex_);
            log_.push_back({req.template_id, req.variables_hash});
            if (auto h = handlers_.find(req.template_id); h != handlers_.end()) {
                handler = h->second;
            } else {
                auto idx = match(req);
                if (!idx) throw ServiceError("no mock response for template '" + req.template_id + "'", "mock");
                auto& seq = counters_[{*idx, req.variables_hash}];
                const auto& rule = rules_[*idx];
                reply = rule.responses[std::min(seq, rule.responses.size() - 1)];
                ++seq;
            }
        }
        if (handler) return handler(req);
        return render(*reply, req.variables);
    }

    std::vector<CallRecord> calls() const {
        std::lock_guard lock(mutex_);
        return log_;
    }

    std::size_t call_count(std::string_view template_id) const {
        std::lock_guard lock(mutex_);
        return static_cast<std::size_t>(std::count_if(log_.begin(), log_.end(),
                                                      [&](const CallRecord& c) { return c.template_id == template_id; }));
    }

private:
    std::optional<std::size_t> match(const ProviderRequest& req) const {
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            const auto& r = rules_[i];
            if (r.template_id == req.template_id && r.key && *r.key == req.variables_hash) return i;
        }
        for (std::size_t i = 0; i < rules_.size(); ++i) {
            const auto& r = rules_[i];
            if (r.template_id != req.template_id || r.key) continue;
            bool all = true;
            for (const auto& needle : r.contains) all = all && req.prompt_text.find(needle) != std::string::npos;
            if (all) return i;
        }
        return std::nullopt;
    }

    static std::string substitute(std::string s, const Variables& vars) {
        std::size_t pos = 0;
        while ((pos = s.find("{{", pos)) != std::string::npos) {
            auto close = s.find("}}", pos + 2);
            if (close == std::string::npos) break;
            auto name = s.substr(pos + 2, close - pos - 2);
            auto it = vars.find(name);
            if (it == vars.end()) {
                pos = close + 2;
                continue;
            }
            s.replace(pos, close + 2 - pos, it->second);
            pos += it->second.size();
        }
        return s;
    }

    static void substitute_strings(json& j, const Variables& vars) {
        if (j.is_string()) {
            j = substitute(j.get<std::string>(), vars);
        } else if (j.is_array() || j.is_object()) {
            for (auto& v : j) substitute_strings(v, vars);
        }
    }

    static std::string render(json reply, const Variables& vars) {
        if (reply.is_string()) return substitute(reply.get<std::string>(), vars);
        substitute_strings(reply, vars);
        return reply.dump();
    }

    mutable std::mutex mutex_;
    std::vector<MockRule> rules_;
    std::map<std::string, Handler> handlers_;
    std::map<std::pair<std::size_t, std::uint64_t>, std::size_t> counters_;
    std::vector<CallRecord> log_;
    std::chrono::milliseconds delay_{0};
};

}  // namespace convbench::llm
