#pragma once

// Word-level tokenization and normalized similarity between short texts.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annodiff {

/// Ordered word tokens of one text. Never holds an empty token.
class WordSequence {
 public:
  WordSequence() = default;
  explicit WordSequence(std::vector<std::string> words);

  [[nodiscard]] std::span<const std::string> words() const noexcept { return words_; }
  [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
  [[nodiscard]] bool empty() const noexcept { return words_.empty(); }
  [[nodiscard]] const std::string& operator[](std::size_t i) const { return words_[i]; }

  friend bool operator==(const WordSequence&, const WordSequence&) = default;

 private:
  std::vector<std::string> words_;
};

enum class SimilarityMetric {
  LongestCommonSubsequence,
  LongestCommonSubstring,
  EditDistance,
};

/// Short CLI names: "subsequence", "substring", "edit".
[[nodiscard]] std::string_view to_string(SimilarityMetric m) noexcept;
[[nodiscard]] std::optional<SimilarityMetric> parse_metric(std::string_view name) noexcept;
[[nodiscard]] std::span<const SimilarityMetric> all_metrics() noexcept;

struct TokenizeOptions {
  /// Characters kept when they lead or trail a token.
  std::string keep_edge_chars = "#@";
  /// Drop tokens starting with http:// or https://.
  bool drop_urls = false;
  /// Exact-match tokens removed after normalization.
  std::vector<std::string> stopwords;
};

/// ASCII-lowercases, splits on whitespace and strips leading/trailing ASCII
/// punctuation from each token. Non-ASCII bytes pass through untouched.
[[nodiscard]] WordSequence tokenize(std::string_view text, const TokenizeOptions& opts = {});

[[nodiscard]] std::size_t lcs_subsequence_words(const WordSequence& a, const WordSequence& b);
[[nodiscard]] std::size_t lcs_substring_words(const WordSequence& a, const WordSequence& b);
/// Unit-cost Levenshtein distance over words.
[[nodiscard]] std::size_t edit_distance_words(const WordSequence& a, const WordSequence& b);

class UndefinedSimilarity : public std::domain_error {
 public:
  UndefinedSimilarity() : std::domain_error("similarity undefined for two empty sequences") {}
};

/// Similarity normalized by the longer sequence, in [0, 1]. For edit
/// distance this is 1 - dist / max(|a|, |b|).
/// Throws UndefinedSimilarity when both sequences are empty.
[[nodiscard]] double nsim(const WordSequence& a, const WordSequence& b, SimilarityMetric m);

}  // namespace annodiff
