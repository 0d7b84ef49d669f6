#include "annodiff/textsim.hpp"

#include <algorithm>
#include <array>

namespace annodiff {

WordSequence::WordSequence(std::vector<std::string> words) : words_(std::move(words)) {
  if (std::any_of(words_.begin(), words_.end(), [](const std::string& w) { return w.empty(); })) {
    throw std::invalid_argument("WordSequence: empty token");
  }
}

namespace {

constexpr std::array kMetrics = {
    SimilarityMetric::EditDistance,
    SimilarityMetric::LongestCommonSubsequence,
    SimilarityMetric::LongestCommonSubstring,
};

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

}  // namespace

std::string_view to_string(SimilarityMetric m) noexcept {
  switch (m) {
    case SimilarityMetric::LongestCommonSubsequence: return "subsequence";
    case SimilarityMetric::LongestCommonSubstring: return "substring";
    case SimilarityMetric::EditDistance: return "edit";
  }
  return "unknown";
}

std::optional<SimilarityMetric> parse_metric(std::string_view name) noexcept {
  for (auto m : kMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::span<const SimilarityMetric> all_metrics() noexcept { return kMetrics; }

WordSequence tokenize(std::string_view text, const TokenizeOptions& opts) {
  std::vector<std::string> out;
  auto strippable = [&](unsigned char c) {
    return is_ascii_punct(c) && opts.keep_edge_chars.find(static_cast<char>(c)) == std::string::npos;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;

    std::string_view raw = text.substr(i, j - i);
    i = j;

    if (opts.drop_urls && (raw.starts_with("http://") || raw.starts_with("https://"))) continue;
    while (!raw.empty() && strippable(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && strippable(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    if (raw.empty()) continue;

    std::string token(raw);
    for (char& c : token) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    if (std::find(opts.stopwords.begin(), opts.stopwords.end(), token) != opts.stopwords.end()) {
      continue;
    }
    out.push_back(std::move(token));
  }
  return WordSequence(std::move(out));
}

std::size_t lcs_subsequence_words(const WordSequence& a, const WordSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t lcs_substring_words(const WordSequence& a, const WordSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

std::size_t edit_distance_words(const WordSequence& a, const WordSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double nsim(const WordSequence& a, const WordSequence& b, SimilarityMetric m) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) throw UndefinedSimilarity();
  const auto denom = static_cast<double>(longest);
  switch (m) {
    case SimilarityMetric::LongestCommonSubsequence:
      return static_cast<double>(lcs_subsequence_words(a, b)) / denom;
    case SimilarityMetric::LongestCommonSubstring:
      return static_cast<double>(lcs_substring_words(a, b)) / denom;
    case SimilarityMetric::EditDistance:
      return 1.0 - static_cast<double>(edit_distance_words(a, b)) / denom;
  }
  return 0.0;
}

}  // namespace annodiff
