#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace convbench {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Uniqueness violation, e.g. a repeated doc_id.
class ConflictError : public Error {
public:
    explicit ConflictError(std::string key)
        : Error("conflicting duplicate id: " + key), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// An operation was called with arguments violating its contract.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A prompt template could not be rendered (unknown id, unbound placeholder).
class TemplateError : public Error {
public:
    using Error::Error;
};

/// Structured LLM output failed schema validation after all retries.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::string raw, int attempts)
        : Error(what), raw_(std::move(raw)), attempts_(attempts) {}

    const std::string& raw() const noexcept { return raw_; }
    int attempts() const noexcept { return attempts_; }

private:
    std::string raw_;
    int attempts_;
};

/// A remote service (LLM provider, search, embedding) failed or was unreachable.
class ServiceError : public Error {
public:
    ServiceError(const std::string& what, std::string service = {})
        : Error(service.empty() ? what : service + ": " + what), service_(std::move(service)) {}

    const std::string& service() const noexcept { return service_; }

private:
    std::string service_;
};

}  // namespace convbench
