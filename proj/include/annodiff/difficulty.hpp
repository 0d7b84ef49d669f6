#pragma once

// Per-tweet difficulty: worker agreement (A), predictor certainty (C) and
// inverted labelling cost (L), summed into DS and split into easy and
// difficult by 1-D k-means.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "annodiff/dataset.hpp"
#include "annodiff/stats.hpp"
#include "annodiff/textsim.hpp"

namespace annodiff {

enum class DifficultyClass { Easy, Difficult };

[[nodiscard]] std::string_view to_string(DifficultyClass c) noexcept;
[[nodiscard]] std::optional<DifficultyClass> parse_difficulty_class(std::string_view s) noexcept;

struct DifficultyScore {
  std::string tweet_id;
  Institution institution = Institution::MD;
  double agreement = 0.0;
  double certainty = 0.0;
  double cost = 0.0;
  double ds = 0.0;
  DifficultyClass cls = DifficultyClass::Difficult;
  bool certainty_imputed = false;
};

/// sum_i (maj_i / voters_i) * (maj_i / total_maj), where total_maj counts
/// every majority voter plus one per tied level. Levels without voters add 0.
[[nodiscard]] double agreement_score(const MajorityResult& majority);

/// (n_j + s) / (k + c) for each of the c labels. `counts` holds n_j and
/// must sum to k.
[[nodiscard]] std::vector<double> knn_label_certainty(std::span<const std::size_t> counts,
                                                      std::size_t k, double smoothing,
                                                      std::size_t classes);

/// One worker's certainties for a tweet: per level, the level's two labels
/// in enum order.
using CertaintyTable = std::array<std::array<double, 2>, kLevels>;

/// Averages each label's certainty over workers, keeps the per-level
/// maximum and averages the level maxima. Throws on an empty span.
[[nodiscard]] double aggregate_certainty(std::span<const CertaintyTable> per_worker);

struct CertaintyConfig {
  double split_ratio = 0.4;
  SimilarityMetric metric = SimilarityMetric::LongestCommonSubstring;
  std::size_t k = 3;
  double smoothing = 1.0;
  std::uint64_t seed = 0;
};

struct WorkerSplit {
  std::vector<std::size_t> train;  ///< indices into Worker::annotations, ascending
  std::vector<std::size_t> test;
};

/// Seeded random partition; the training share is round(ratio * n),
/// clamped to [1, n - 1] when n >= 2.
[[nodiscard]] WorkerSplit split_worker(const Worker& worker, double ratio, std::uint64_t seed);

/// For every tweet of `inst`, the certainty tables of the workers that had
/// it in their test partition. Tweets nobody tested are absent.
[[nodiscard]] std::map<std::string, std::vector<CertaintyTable>> certainty_tables(
    const Dataset& dataset, Institution inst, const CertaintyConfig& config);

/// C for one tweet, or nullopt when no worker tested it.
[[nodiscard]] std::optional<double> predictor_certainty(const std::string& tweet_id,
                                                        const Dataset& dataset, Institution inst,
                                                        const CertaintyConfig& config);

/// 1 - (cost - min) / (max - min); 1 when max == min.
[[nodiscard]] double normalized_cost(double cost, double cost_min, double cost_max) noexcept;

/// Median over annotators of their summed per-level durations. Annotations
/// with a missing duration are skipped; nullopt when none remain.
[[nodiscard]] std::optional<double> median_cost(const std::string& tweet_id, const Dataset& dataset,
                                                Institution inst);

/// L per tweet of `inst`, normalized over the institution's tweets.
[[nodiscard]] std::map<std::string, double> labeling_costs(const Dataset& dataset, Institution inst);

[[nodiscard]] std::optional<double> labeling_cost(const std::string& tweet_id, const Dataset& dataset,
                                                  Institution inst);

/// Clusters ds and marks the higher-centroid cluster Easy. Throws
/// stats::DegenerateClustering when fewer than two distinct ds exist.
stats::Clustering1D assign_classes(std::span<DifficultyScore> scores);

struct DifficultyConfig {
  CertaintyConfig certainty;
  std::uint64_t seed = 0;  ///< majority tie-breaking
};

struct ExcludedTweet {
  std::string tweet_id;
  std::string reason;
};

struct DifficultyReport {
  Institution institution = Institution::MD;
  std::vector<DifficultyScore> scores;  ///< sorted by tweet_id
  std::vector<ExcludedTweet> excluded;
  std::size_t imputed_certainty = 0;
  std::array<double, 2> centroids{};  ///< difficult, easy
  std::vector<std::string> warnings;
};

[[nodiscard]] DifficultyReport difficulty_scores(const Dataset& dataset, Institution inst,
                                                 const DifficultyConfig& config);

}  // namespace annodiff
