#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace gqw {

enum class ElementKind { Node, Relationship };

constexpr std::string_view to_string(ElementKind kind) noexcept {
    return kind == ElementKind::Node ? "node" : "relationship";
}

/// A bare element identity as returned by a reference-mode query.
struct ElementRef {
    ElementKind kind = ElementKind::Node;
    std::string id;
    auto operator<=>(const ElementRef&) const = default;
};

} // namespace gqw
