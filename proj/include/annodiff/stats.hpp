#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace annodiff::stats {

/// Two-cluster partition of 1-D data. Cluster 0 has the lower centroid.
struct Clustering1D {
  std::array<double, 2> centroids{};
  std::vector<int> assignment;  ///< per input value, 0 or 1
  std::size_t iterations = 0;
  bool used_exhaustive = false;  ///< Lloyd result replaced by the threshold search

  [[nodiscard]] double within_cluster_ss(std::span<const double> values) const;
};

class DegenerateClustering : public std::invalid_argument {
 public:
  DegenerateClustering() : std::invalid_argument("degenerate clustering: fewer than two distinct values") {}
};

/// Populations up to this size get their Lloyd result checked against the
/// exhaustive best threshold partition.
inline constexpr std::size_t kExhaustiveCheckLimit = 10'000;

/// k-means with k=2 by Lloyd iteration from (min, max). Each value goes to
/// the nearer centroid, ties to the lower one.
[[nodiscard]] Clustering1D kmeans_1d(std::span<const double> values);

/// Two-tailed Fisher exact test on [[a, b], [c, d]]: the summed probability
/// of all tables with the observed margins that are no more likely than the
/// observed one. Returns 1 when a margin is zero.
[[nodiscard]] double fisher_exact_two_tailed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                             std::uint64_t d);

[[nodiscard]] double median(std::vector<double> values);

}  // namespace annodiff::stats
