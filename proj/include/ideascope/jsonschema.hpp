#pragma once
// Minimal JSON Schema validator covering the subset used by the shipped
// scene schema: type, properties, required, items, enum, minimum/maximum,
// minItems/maxItems, additionalProperties (boolean form). Not a general
// draft-complete implementation.

#include <string>
#include <vector>

#include <json.hpp>

namespace ideascope {

namespace detail {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

inline void validate_node(const nlohmann::json& schema, const nlohmann::json& value,
                          const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(value, t.get<std::string>());
        } else if (t.is_array()) {
            for (const auto& alt : t)
                if (type_matches(value, alt.get<std::string>())) ok = true;
        }
        if (!ok) {
            errors.push_back(path + ": expected type " + t.dump());
            return;  // further checks assume the right shape
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& allowed : schema["enum"])
            if (allowed == value) ok = true;
        if (!ok) errors.push_back(path + ": value not in enum " + schema["enum"].dump());
    }
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>())
            errors.push_back(path + ": below minimum " + schema["minimum"].dump());
        if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>())
            errors.push_back(path + ": above maximum " + schema["maximum"].dump());
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(path + ": missing required property '" +
                                     key.get<std::string>() + "'");
        const auto* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (props && props->contains(it.key())) {
                validate_node((*props)[it.key()], it.value(), path + "/" + it.key(), errors);
            } else if (schema.contains("additionalProperties") &&
                       schema["additionalProperties"].is_boolean() &&
                       !schema["additionalProperties"].get<bool>()) {
                errors.push_back(path + ": unexpected property '" + it.key() + "'");
            }
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>())
            errors.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
        if (schema.contains("maxItems") && value.size() > schema["maxItems"].get<std::size_t>())
            errors.push_back(path + ": more than " + schema["maxItems"].dump() + " items");
        if (schema.contains("items")) {
            std::size_t i = 0;
            for (const auto& item : value) {
                validate_node(schema["items"], item, path + "/" + std::to_string(i), errors);
                ++i;
            }
        }
    }
}

}  // namespace detail

// Empty result = valid; otherwise one message per violation, with a
// slash-delimited path into the document.
inline std::vector<std::string> validate_against_schema(const nlohmann::json& schema,
                                                        const nlohmann::json& value) {
    std::vector<std::string> errors;
    detail::validate_node(schema, value, "$", errors);
    return errors;
}

}  // namespace ideascope
