#include "annodiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace annodiff::stats {

double Clustering1D::within_cluster_ss(std::span<const double> values) const {
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - centroids[static_cast<std::size_t>(assignment[i])];
    ss += d * d;
  }
  return ss;
}

namespace {

struct Split {
  std::size_t lower_size = 0;  // number of sorted values in cluster 0
  double sse = 0.0;
};

// Best contiguous split of sorted data, using centred prefix sums.
Split best_threshold_split(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  std::vector<double> s(n + 1, 0.0), sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sorted[i] - mean;
    s[i + 1] = s[i] + x;
    sq[i + 1] = sq[i] + x * x;
  }
  Split best{0, INFINITY};
  for (std::size_t k = 1; k < n; ++k) {
    if (sorted[k - 1] == sorted[k]) continue;
    const double nl = static_cast<double>(k);
    const double nr = static_cast<double>(n - k);
    const double sl = s[k], sr = s[n] - s[k];
    const double sse = (sq[k] - sl * sl / nl) + ((sq[n] - sq[k]) - sr * sr / nr);
    if (sse < best.sse) best = {k, sse};
  }
  return best;
}

}  // namespace

Clustering1D kmeans_1d(std::span<const double> values) {
  if (values.size() < 2) throw DegenerateClustering();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) throw DegenerateClustering();

  Clustering1D out;
  out.centroids = {*lo, *hi};
  out.assignment.assign(values.size(), -1);

  constexpr std::size_t kMaxIterations = 10'000;
  for (; out.iterations < kMaxIterations; ++out.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const int c = std::abs(values[i] - out.centroids[0]) <= std::abs(values[i] - out.centroids[1]) ? 0 : 1;
      if (c != out.assignment[i]) {
        out.assignment[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    std::array<double, 2> sum{};
    std::array<std::size_t, 2> count{};
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[out.assignment[i]] += values[i];
      ++count[out.assignment[i]];
    }
    // Both clusters stay non-empty: the min is never closer to the upper
    // centroid, the max never closer to the lower one.
    for (int c = 0; c < 2; ++c) out.centroids[c] = sum[c] / static_cast<double>(count[c]);
  }

  if (values.size() <= kExhaustiveCheckLimit) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const Split best = best_threshold_split(sorted);
    const double lloyd = out.within_cluster_ss(values);
    const double scale = std::max(1.0, std::abs(lloyd));
    if (best.sse < lloyd - 1e-12 * scale) {
      const double threshold = sorted[best.lower_size - 1];
      std::array<double, 2> sum{};
      std::array<std::size_t, 2> count{};
      for (std::size_t i = 0; i < values.size(); ++i) {
        out.assignment[i] = values[i] <= threshold ? 0 : 1;
        sum[out.assignment[i]] += values[i];
        ++count[out.assignment[i]];
      }
      for (int c = 0; c < 2; ++c) out.centroids[c] = sum[c] / static_cast<double>(count[c]);
      out.used_exhaustive = true;
    }
  }
  return out;
}

namespace {

double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

double fisher_exact_two_tailed(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  const std::uint64_t row1 = a + b, row2 = c + d, col1 = a + c, n = a + b + c + d;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col1 == n) return 1.0;

  const double log_denom = log_choose(n, col1);
  auto log_p = [&](std::uint64_t x) { return log_choose(row1, x) + log_choose(row2, col1 - x) - log_denom; };

  const double observed = log_p(a);
  // Relative slack so that tables equal in probability to the observed one
  // are not lost to rounding.
  const double cutoff = observed + 1e-9;
  const std::uint64_t x_min = col1 > row2 ? col1 - row2 : 0;
  const std::uint64_t x_max = std::min(row1, col1);
  double p = 0.0;
  for (std::uint64_t x = x_min; x <= x_max; ++x) {
    const double lp = log_p(x);
    if (lp <= cutoff) p += std::exp(lp);
  }
  return std::min(p, 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace annodiff::stats
