#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "convbench/errors.hpp"
#include "convbench/llm/schema.hpp"
#include "convbench/llm/template.hpp"
#include "convbench/text.hpp"

namespace convbench::llm {

/// What a provider sees. `template_id`, `variables_hash` and `variables` are
/// local metadata for keyed mocks; HTTP providers send only the wire fields.
struct ProviderRequest {
    std::string model_name;
    std::string prompt_text;
    double temperature = 0.0;
    int max_tokens = 2048;

    std::string template_id;
    std::uint64_t variables_hash = 0;
    Variables variables;
};

class Provider {
public:
    virtual ~Provider() = default;
    /// Returns the completion text. Throws ServiceError on transport failure.
    virtual std::string complete(const ProviderRequest& request) = 0;
};

struct GatewayConfig {
    std::string model_name = "gpt-4.1";
    double temperature = 0.0;
    int max_tokens = 2048;
    int max_retries = 2;
    int max_in_flight = 4;
};

struct StructuredResponse {
    std::string raw;
    json parsed;
    int attempts = 0;
};

/// Stable hash of a variable binding, independent of insertion order.
inline std::uint64_t hash_variables(const Variables& vars) {
    std::uint64_t h = text::fnv1a64("");
    for (const auto& [k, v] : vars) {
        h = text::fnv1a64(k, h);
        h = text::fnv1a64(std::string_view("\x1f", 1), h);
        h = text::fnv1a64(v, h);
        h = text::fnv1a64(std::string_view("\x1e", 1), h);
    }
    return h;
}

/// Removes a surrounding Markdown code fence (``` or ```json) if the reply has one.
inline std::string strip_code_fences(std::string_view reply) {
    auto s = text::trim(reply);
    auto open = s.find("```");
    if (open == std::string::npos) return s;
    auto body_start = s.find('\n', open);
    if (body_start == std::string::npos) return s;
    auto close = s.find("```", body_start);
    if (close == std::string::npos) return text::trim(std::string_view(s).substr(body_start + 1));
    return text::trim(std::string_view(s).substr(body_start + 1, close - body_start - 1));
}

/// Parses a reply as a JSON object. Returns nullopt and sets `error` on failure.
inline std::optional<json> parse_reply(std::string_view reply, std::string& error) {
    auto body = strip_code_fences(reply);
    if (body.empty() || body.front() != '{') {
        error = "reply is not a JSON object";
        return std::nullopt;
    }
    auto parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        error = "reply is not valid JSON";
        return std::nullopt;
    }
    return parsed;
}

/// Shared entry point for every LLM call: renders templates, enforces the
/// in-flight cap, validates structured replies and retries with a repair note.
class Gateway {
public:
    Gateway(std::shared_ptr<Provider> provider, GatewayConfig config = {},
            const TemplateRegistry& registry = TemplateRegistry::builtin())
        : provider_(std::move(provider)),
          config_(config),
          registry_(&registry),
          slots_(std::max(1, config.max_in_flight)) {
        if (!provider_) throw PreconditionError("gateway requires a provider");
    }

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    const GatewayConfig& config() const noexcept { return config_; }
    const TemplateRegistry& registry() const noexcept { return *registry_; }

    /// `repair_note`, when given, is appended to the first attempt's prompt; callers
    /// use it for their own semantic retries on top of schema validation.
    StructuredResponse complete_structured(std::string_view template_id, const Variables& vars,
                                           std::string_view repair_note = {}) {
        const auto& tmpl = registry_->get(template_id);
        const auto prompt = tmpl.render(vars);
        auto request = make_request(tmpl.id(), prompt, vars);

        std::string raw;
        std::string error;
        const int max_attempts = 1 + std::max(0, config_.max_retries);
        for (int attempt = 1; attempt <= max_attempts; ++attempt) {
            request.prompt_text = prompt;
            if (!repair_note.empty()) request.prompt_text += "\n\n" + std::string(repair_note);
            if (attempt > 1)
                request.prompt_text += "\n\nYour previous reply could not be used (" + error +
                                       "). Reply with ONLY a JSON object in the requested format.";
            try {
                raw = call(request);
            } catch (const ServiceError& e) {
                if (attempt == max_attempts) throw;
                error = e.what();
                continue;
            }
            if (auto parsed = parse_reply(raw, error)) {
                if (auto violation = validate(*parsed, tmpl.schema())) {
                    error = *violation;
                } else {
                    return StructuredResponse{raw, std::move(*parsed), attempt};
                }
            }
            spdlog::debug("template {} attempt {} rejected: {}", tmpl.id(), attempt, error);
        }
        throw ValidationError("template '" + tmpl.id() + "': " + error, raw, max_attempts);
    }

    /// Free-text completion (no schema), used for answer generation.
    std::string complete_text(std::string_view template_id, const Variables& vars) {
        const auto& tmpl = registry_->get(template_id);
        auto request = make_request(tmpl.id(), tmpl.render(vars), vars);
        return text::trim(call(request));
    }

    int peak_in_flight() const noexcept { return peak_.load(); }
    std::uint64_t total_calls() const noexcept { return calls_.load(); }

private:
    ProviderRequest make_request(const std::string& id, std::string prompt, const Variables& vars) const {
        ProviderRequest r;
        r.model_name = config_.model_name;
        r.prompt_text = std::move(prompt);
        r.temperature = config_.temperature;
        r.max_tokens = config_.max_tokens;
        r.template_id = id;
        r.variables_hash = hash_variables(vars);
        r.variables = vars;
        return r;
    }

    std::string call(const ProviderRequest& request) {
        slots_.acquire();
        struct Release {
            Gateway* g;
            ~Release() {
                g->active_.fetch_sub(1);
                g->slots_.release();
            }
        } release{this};
        int now = active_.fetch_add(1) + 1;
        int seen = peak_.load();
        while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
        }
        calls_.fetch_add(1);
        return provider_->complete(request);
    }

    std::shared_ptr<Provider> provider_;
    GatewayConfig config_;
    const TemplateRegistry* registry_;
    std::counting_semaphore<4096> slots_;
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace convbench::llm
