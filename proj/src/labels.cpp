#include "annodiff/labels.hpp"

#include <stdexcept>
#include <string>

namespace annodiff {

std::string_view to_string(Label l) noexcept {
  switch (l) {
    case Label::Relevant: return "Relevant";
    case Label::Irrelevant: return "Irrelevant";
    case Label::Factual: return "Factual";
    case Label::NonFactual: return "NonFactual";
    case Label::Positive: return "Positive";
    case Label::Negative: return "Negative";
  }
  return "?";
}

std::optional<Label> parse_label(std::string_view s) noexcept {
  struct Entry {
    std::string_view name;
    std::string_view code;
    Label label;
  };
  static constexpr Entry kTable[] = {
      {"Relevant", "R", Label::Relevant},   {"Irrelevant", "IR", Label::Irrelevant},
      {"Factual", "F", Label::Factual},     {"NonFactual", "NF", Label::NonFactual},
      {"Positive", "P", Label::Positive},   {"Negative", "N", Label::Negative},
  };
  for (const auto& e : kTable) {
    if (s == e.name || s == e.code) return e.label;
  }
  return std::nullopt;
}

LabelPath LabelPath::make(Label level1, std::optional<Label> level2, std::optional<Label> level3) {
  auto fail = [](const char* why) { throw std::invalid_argument(std::string("invalid label path: ") + why); };

  if (level_of(level1) != 0) fail("level-1 label expected");
  if (level2 && level_of(*level2) != 1) fail("level-2 label expected");
  if (level3 && level_of(*level3) != 2) fail("level-3 label expected");

  if (level1 == Label::Relevant && !level2) fail("Relevant requires a level-2 label");
  if (level1 == Label::Irrelevant && level2) fail("Irrelevant has no level-2 label");
  if (level2 == Label::NonFactual && !level3) fail("NonFactual requires a level-3 label");
  if (level3 && level2 != Label::NonFactual) fail("level-3 label requires NonFactual");

  LabelPath p;
  p.levels_ = {level1, level2, level3};
  return p;
}

LabelPath LabelPath::make_pruned(Label level1, std::optional<Label> level2,
                                 std::optional<Label> level3) {
  if (level1 == Label::Irrelevant) return make(level1);
  return make(level1, level2, level3);
}

std::size_t LabelPath::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& l : levels_) d += l.has_value();
  return d;
}

}  // namespace annodiff
