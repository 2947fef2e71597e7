#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace convbench::llm {

using json = nlohmann::json;

enum class Kind { string, number, integer, boolean, array, object, any };

/// One expected key of a structured response. Validation is structural:
/// presence, value kind, enum membership and, for arrays, element shape.
struct Field {
    std::string name;
    Kind kind = Kind::any;
    bool required = true;
    bool nullable = false;
    std::vector<std::string> one_of;   // enum membership for string fields
    Kind element_kind = Kind::any;     // arrays only
    std::vector<Field> element_fields; // arrays of objects / nested objects
};

struct Schema {
    std::vector<Field> fields;
};

namespace detail {

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::string: return "string";
        case Kind::number: return "number";
        case Kind::integer: return "integer";
        case Kind::boolean: return "boolean";
        case Kind::array: return "array";
        case Kind::object: return "object";
        case Kind::any: return "any";
    }
    return "?";
}

inline bool matches_kind(const json& v, Kind k) {
    switch (k) {
        case Kind::string: return v.is_string();
        case Kind::number: return v.is_number();
        case Kind::integer:
            return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
        case Kind::boolean: return v.is_boolean();
        case Kind::array: return v.is_array();
        case Kind::object: return v.is_object();
        case Kind::any: return true;
    }
    return false;
}

inline std::optional<std::string> check_fields(const json& obj, const std::vector<Field>& fields, const std::string& path);

inline std::optional<std::string> check_value(const json& v, const Field& f, const std::string& path) {
    if (v.is_null()) {
        if (f.nullable) return std::nullopt;
        return path + ": null not allowed";
    }
    if (!matches_kind(v, f.kind)) return path + ": expected " + kind_name(f.kind);
    if (!f.one_of.empty()) {
        auto s = v.get<std::string>();
        bool ok = false;
        for (const auto& e : f.one_of) ok = ok || e == s;
        if (!ok) return path + ": value '" + s + "' not in allowed set";
    }
    if (f.kind == Kind::array) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto p = path + "[" + std::to_string(i) + "]";
            if (!matches_kind(v[i], f.element_kind)) return p + ": expected " + kind_name(f.element_kind);
            if (f.element_kind == Kind::object && !f.element_fields.empty())
                if (auto err = check_fields(v[i], f.element_fields, p)) return err;
        }
    }
    if (f.kind == Kind::object && !f.element_fields.empty()) return check_fields(v, f.element_fields, path);
    return std::nullopt;
}

inline std::optional<std::string> check_fields(const json& obj, const std::vector<Field>& fields, const std::string& path) {
    for (const auto& f : fields) {
        auto p = path.empty() ? f.name : path + "." + f.name;
        auto it = obj.find(f.name);
        if (it == obj.end()) {
            if (f.required) return p + ": missing";
            continue;
        }
        if (auto err = check_value(*it, f, p)) return err;
    }
    return std::nullopt;
}

}  // namespace detail

/// Returns a description of the first violation, or nullopt when `value` conforms.
inline std::optional<std::string> validate(const json& value, const Schema& schema) {
    if (!value.is_object()) return std::string("top level: expected object");
    return detail::check_fields(value, schema.fields, "");
}

}  // namespace convbench::llm
