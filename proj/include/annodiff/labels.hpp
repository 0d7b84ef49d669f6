#pragma once

// The fixed three-level sentiment hierarchy:
//
//   Relevant ── Factual
//            └─ NonFactual ── Positive
//                          └─ Negative
//   Irrelevant
//
// Level 2 exists only below Relevant, level 3 only below NonFactual.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace annodiff {

inline constexpr std::size_t kLevels = 3;

enum class Label : unsigned char {
  Relevant,
  Irrelevant,
  Factual,
  NonFactual,
  Positive,
  Negative,
};

/// Zero-based hierarchy level a label belongs to.
[[nodiscard]] constexpr std::size_t level_of(Label l) noexcept {
  return static_cast<std::size_t>(l) / 2;
}

/// The two labels of a zero-based level, in enum order.
[[nodiscard]] constexpr std::array<Label, 2> labels_at(std::size_t level) noexcept {
  return {static_cast<Label>(level * 2), static_cast<Label>(level * 2 + 1)};
}

[[nodiscard]] std::string_view to_string(Label l) noexcept;
/// Accepts the canonical names plus the short codes R, IR, F, NF, P, N.
[[nodiscard]] std::optional<Label> parse_label(std::string_view s) noexcept;

/// One tweet's labels on up to three levels; structurally valid by
/// construction.
class LabelPath {
 public:
  /// Throws std::invalid_argument when the combination violates the
  /// hierarchy or a label sits on the wrong level.
  static LabelPath make(Label level1, std::optional<Label> level2 = std::nullopt,
                        std::optional<Label> level3 = std::nullopt);

  /// Like make(), but first drops anything below an Irrelevant level 1.
  static LabelPath make_pruned(Label level1, std::optional<Label> level2 = std::nullopt,
                               std::optional<Label> level3 = std::nullopt);

  [[nodiscard]] Label level1() const noexcept { return *levels_[0]; }
  [[nodiscard]] std::optional<Label> at(std::size_t level) const noexcept { return levels_[level]; }
  [[nodiscard]] std::size_t depth() const noexcept;

  friend bool operator==(const LabelPath&, const LabelPath&) = default;

 private:
  LabelPath() = default;
  std::array<std::optional<Label>, kLevels> levels_{};
};

}  // namespace annodiff
