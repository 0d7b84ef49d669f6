#pragma once

// Slow, obviously-correct reference implementations used to check the
// library on small inputs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "annodiff/hier_knn.hpp"
#include "annodiff/labels.hpp"
#include "annodiff/random.hpp"
#include "annodiff/textsim.hpp"

namespace annodiff::oracle {

/// Tries every subset of `a` (|a| <= 20).
std::size_t lcs_subsequence(const std::vector<std::string>& a, const std::vector<std::string>& b);
/// Tries every pair of start positions and run length.
std::size_t lcs_substring(const std::vector<std::string>& a, const std::vector<std::string>& b);
/// Memoized recursion on the Levenshtein recurrence.
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Enumerates every table with the observed margins using exact integer
/// hypergeometric weights. Grand total must stay <= 60.
double fisher_two_tailed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

struct ThresholdSplit {
  double threshold;       ///< values <= threshold form the lower cluster
  double within_ss;
};

/// Best split of the sorted distinct values by total within-cluster sum of
/// squares, computed directly for every threshold.
ThresholdSplit best_threshold_split(std::vector<double> values);
double within_ss(std::span<const double> values, std::span<const int> assignment);

/// Ancestor-closed label names of a path.
std::set<std::string> label_set(const LabelPath& p);
std::set<std::string> label_set(const PredictedPath& p);
double hierarchical_f1(std::span<const std::pair<LabelPath, PredictedPath>> pairs);

/// Agreement from raw votes; a nullopt vote means the worker gave no label.
double agreement(const std::array<std::vector<std::optional<Label>>, kLevels>& votes);

/// Every valid LabelPath.
std::vector<LabelPath> all_paths();

WordSequence random_words(SeededRng& rng, std::size_t max_len, std::size_t alphabet);

}  // namespace annodiff::oracle
