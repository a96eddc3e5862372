#pragma once

#include <optional>
#include <string_view>

namespace osteo {

/// Diagnostic class. Osteoporotic is the positive class everywhere.
enum class Label : int { Normal = 0, Osteoporotic = 1 };

constexpr std::string_view label_name(Label l) {
    return l == Label::Normal ? "Normal" : "Osteoporotic";
}

constexpr std::optional<Label> parse_label(std::string_view s) {
    if (s == "Normal" || s == "0") return Label::Normal;
    if (s == "Osteoporotic" || s == "1") return Label::Osteoporotic;
    return std::nullopt;
}

}  // namespace osteo
