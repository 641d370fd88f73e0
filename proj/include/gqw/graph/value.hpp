#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>

#include "gqw/error.hpp"

namespace gqw {

/// Property values are restricted to four scalar kinds; lists and maps are rejected at load.
using Scalar = std::variant<bool, std::int64_t, double, std::string>;

using PropertyMap = std::map<std::string, Scalar>;

enum class ValueType { Boolean, Integer, Float, String };

inline ValueType type_of(const Scalar& value) noexcept {
    return static_cast<ValueType>(value.index());
}

constexpr std::string_view to_string(ValueType type) noexcept {
    switch (type) {
    case ValueType::Boolean: return "Boolean";
    case ValueType::Integer: return "Integer";
    case ValueType::Float: return "Float";
    case ValueType::String: return "String";
    }
    return "String";
}

/// Accepts both our own type names and the server-side names ("Long", "Double").
inline ValueType value_type_from_string(std::string_view name) {
    if (name == "Boolean") return ValueType::Boolean;
    if (name == "Integer" || name == "Long") return ValueType::Integer;
    if (name == "Float" || name == "Double") return ValueType::Float;
    if (name == "String") return ValueType::String;
    throw Error(ErrorCode::InvalidValue, "unknown property type '" + std::string(name) + "'");
}

/// Equality with query-language semantics: integers and floats compare numerically,
/// every other cross-kind comparison is false.
inline bool scalar_equal(const Scalar& a, const Scalar& b) noexcept {
    auto numeric = [](const Scalar& v, double& out) {
        if (const auto* i = std::get_if<std::int64_t>(&v)) {
            out = static_cast<double>(*i);
            return true;
        }
        if (const auto* d = std::get_if<double>(&v)) {
            out = *d;
            return true;
        }
        return false;
    };
    if (a.index() == b.index()) return a == b;
    double x = 0;
    double y = 0;
    if (numeric(a, x) && numeric(b, y)) return x == y;
    return false;
}

/// Shortest round-trip decimal text; always contains '.', 'e', "inf" or "nan" so it reads back as
/// a float.
inline std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, end);
    if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
    return text;
}

} // namespace gqw
