#pragma once

// Per-level kNN predictors over word sequences plus hierarchical F1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "annodiff/labels.hpp"
#include "annodiff/textsim.hpp"

namespace annodiff {

/// A level's label, or nullopt for "no label on this level".
using LevelLabel = std::optional<Label>;

struct LabeledTweet {
  WordSequence words;
  LabelPath labels;
};

struct LevelExample {
  WordSequence words;
  LevelLabel label;
};

/// Neighbour votes: the level's two labels in enum order, then NoLabel.
using VoteCounts = std::array<std::size_t, 3>;

/// nsim against every example; a pair of empty sequences scores 0.
[[nodiscard]] std::vector<double> similarities(const WordSequence& query,
                                               std::span<const LevelExample> examples,
                                               SimilarityMetric metric);

class LevelPredictor {
 public:
  /// `level` is zero-based. Labels must belong to that level.
  LevelPredictor(std::size_t level, std::vector<LevelExample> examples, SimilarityMetric metric,
                 std::size_t k);

  [[nodiscard]] std::size_t level() const noexcept { return level_; }
  [[nodiscard]] std::span<const LevelExample> examples() const noexcept { return examples_; }
  [[nodiscard]] SimilarityMetric metric() const noexcept { return metric_; }
  [[nodiscard]] std::size_t k() const noexcept { return k_; }
  [[nodiscard]] std::size_t effective_k() const noexcept { return std::min(k_, examples_.size()); }

  /// Example indices, most similar first. Equal similarities are ordered by
  /// a seeded hash of (words, label), so identical examples stay adjacent.
  [[nodiscard]] std::vector<std::size_t> rank(std::span<const double> sims, std::uint64_t seed) const;

  /// Votes among the first min(k, size) ranked examples.
  [[nodiscard]] VoteCounts count_votes(std::span<const std::size_t> ranking, std::size_t k) const;

  /// Plurality label; equal vote counts are broken by a draw from `seed`.
  [[nodiscard]] LevelLabel vote(std::span<const std::size_t> ranking, std::size_t k,
                                std::uint64_t seed) const;

  [[nodiscard]] LevelLabel predict(const WordSequence& query, std::uint64_t seed) const;

 private:
  [[nodiscard]] LevelLabel slot_label(std::size_t slot) const noexcept;

  std::size_t level_;
  std::vector<LevelExample> examples_;
  std::vector<std::uint64_t> content_hash_;
  SimilarityMetric metric_;
  std::size_t k_;
};

struct PredictedPath {
  std::array<LevelLabel, kLevels> levels{};

  /// Forces hierarchy validity: nothing below Irrelevant (or a missing
  /// level 1), nothing below Factual or a missing level 2.
  [[nodiscard]] static PredictedPath coerce(std::array<LevelLabel, kLevels> raw) noexcept;
  [[nodiscard]] static PredictedPath from(const LabelPath& path) noexcept;

  friend bool operator==(const PredictedPath&, const PredictedPath&) = default;
};

/// Three level predictors trained on the same tweets.
class HierarchicalKnn {
 public:
  /// Throws std::invalid_argument on an empty training set.
  [[nodiscard]] static HierarchicalKnn train(std::span<const LabeledTweet> tweets,
                                             SimilarityMetric metric, std::size_t k);

  [[nodiscard]] const LevelPredictor& level(std::size_t i) const { return levels_[i]; }
  [[nodiscard]] std::size_t size() const noexcept { return levels_[0].examples().size(); }

  [[nodiscard]] PredictedPath predict(const WordSequence& query, std::uint64_t seed) const;

  /// One prediction per entry of `ks`, sharing a single similarity pass.
  [[nodiscard]] std::vector<PredictedPath> predict_grid(const WordSequence& query,
                                                        std::span<const std::size_t> ks,
                                                        std::uint64_t seed) const;

 private:
  explicit HierarchicalKnn(std::vector<LevelPredictor> levels) : levels_(std::move(levels)) {}
  std::vector<LevelPredictor> levels_;
};

/// Micro-averaged set-overlap counts over ancestor-closed label sets.
struct HierCounts {
  std::size_t overlap = 0;
  std::size_t predicted = 0;
  std::size_t truth = 0;

  void add(const LabelPath& truth_path, const PredictedPath& pred) noexcept;
  [[nodiscard]] double precision() const noexcept;
  [[nodiscard]] double recall() const noexcept;
  /// 0 when precision + recall is 0.
  [[nodiscard]] double f1() const noexcept;
};

/// Throws std::invalid_argument on an empty list.
[[nodiscard]] double hierarchical_f1(std::span<const std::pair<LabelPath, PredictedPath>> pairs);

}  // namespace annodiff
