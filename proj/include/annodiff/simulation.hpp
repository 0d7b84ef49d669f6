#pragma once

// Early/late strata, PredictorE vs PredictorD training over a parameter
// grid, T/E/D outcome encoding and the contingency analysis on top.

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
#include "annodiff/difficulty.hpp"
#include "annodiff/labels.hpp"
#include "annodiff/textsim.hpp"

namespace annodiff {

enum class Phase { Early, Late };

[[nodiscard]] std::string_view to_string(Phase p) noexcept;
[[nodiscard]] std::optional<Phase> parse_phase(std::string_view s) noexcept;

/// Tweets per phase; only the first two phases of a session are used.
inline constexpr int kPhaseLength = 25;
inline constexpr std::size_t kMinWorkerTweets = 2 * kPhaseLength;

struct StratumTweet {
  std::string tweet_id;
  int order_index = 0;
  LabelPath labels;
};

struct Stratum {
  std::string worker_id;
  Phase phase;
  DifficultyClass cls;
  std::vector<StratumTweet> tweets;  ///< ascending order_index
};

/// Every tweet of one worker's phase, regardless of class.
struct PhaseWindow {
  std::string worker_id;
  Phase phase;
  std::vector<StratumTweet> tweets;
};

struct StrataSet {
  Institution institution = Institution::MD;
  std::vector<Stratum> strata;        ///< four per qualifying worker
  std::vector<PhaseWindow> windows;   ///< two per qualifying worker
  std::vector<std::string> excluded_workers;
  std::vector<std::string> warnings;

  [[nodiscard]] const Stratum* find(std::string_view worker, Phase phase, DifficultyClass cls) const noexcept;
  [[nodiscard]] const PhaseWindow* window(std::string_view worker, Phase phase) const noexcept;
  [[nodiscard]] std::vector<std::string> worker_ids() const;
};

/// Workers of `inst` with at least 50 annotations get EARLY/LATE x
/// EASY/DIFFICULT strata from order_index 1-25 and 26-50; the rest of a
/// session is ignored. Tweets without a score stay in the window only.
[[nodiscard]] StrataSet build_strata(const Dataset& dataset, Institution inst,
                                     std::span<const DifficultyScore> scores);

struct ClassCount {
  Phase phase;
  std::size_t easy = 0;
  std::size_t difficult = 0;
};

/// Distinct tweets per class across the phase windows of all qualifying
/// workers, early then late.
[[nodiscard]] std::array<ClassCount, 2> class_counts(const StrataSet& strata);

struct ConfigKey {
  Institution institution = Institution::MD;
  SimilarityMetric metric = SimilarityMetric::EditDistance;
  Phase phase = Phase::Early;
  std::size_t n = 0;  ///< training tweets per worker

  friend bool operator==(const ConfigKey&, const ConfigKey&) = default;
};

/// Micro-averaged hierarchical F1 per neighbour count.
struct F1Curve {
  ConfigKey config;
  DifficultyClass arm = DifficultyClass::Easy;
  std::map<std::size_t, double> points;
  std::size_t workers_used = 0;
  std::size_t workers_skipped = 0;  ///< stratum smaller than n

  [[nodiscard]] bool empty() const noexcept { return points.empty(); }
};

enum class TrainingSelection { FirstN, Sampled };

struct ConfigResult {
  F1Curve easy;
  F1Curve difficult;
};

inline constexpr std::size_t kMinTrainSize = 2;
inline constexpr std::size_t kMaxTrainSize = 10;

/// Trains PredictorE on the first n tweets of each worker's easy stratum
/// (PredictorD likewise on the difficult one) and tests on the rest of the
/// worker's phase window. Throws std::invalid_argument for n outside
/// [2, 10] or an empty k grid.
[[nodiscard]] ConfigResult run_config(const Dataset& dataset, const StrataSet& strata,
                                      SimilarityMetric metric, Phase phase, std::size_t n,
                                      std::span<const std::size_t> k_grid, std::uint64_t seed,
                                      TrainingSelection selection = TrainingSelection::FirstN);

enum class OutcomeCode { T, E, D };

[[nodiscard]] char to_char(OutcomeCode c) noexcept;
[[nodiscard]] std::optional<OutcomeCode> parse_outcome(char c) noexcept;

/// Mean over k of hF1_E(k) - hF1_D(k). Throws std::invalid_argument when the
/// grids differ or are empty.
[[nodiscard]] double mean_f1_delta(const F1Curve& easy, const F1Curve& difficult);

/// E when the mean delta exceeds epsilon, D below -epsilon, T otherwise.
[[nodiscard]] OutcomeCode encode_outcome(const F1Curve& easy, const F1Curve& difficult, double epsilon);

struct OutcomeRecord {
  ConfigKey config;
  std::optional<OutcomeCode> code;  ///< empty when a curve was empty
  std::optional<double> mean_delta;
};

/// Rows are two outcome codes, columns Early and Late.
struct ContingencyTable2x2 {
  std::array<OutcomeCode, 2> rows{};
  std::array<std::array<std::uint64_t, 2>, 2> cells{};

  /// "E vs T", "E vs D" or "T vs D".
  [[nodiscard]] std::string name() const;
};

struct PhaseCounts {
  std::array<std::size_t, 3> early{};  ///< indexed by OutcomeCode
  std::array<std::size_t, 3> late{};

  [[nodiscard]] std::size_t at(Phase p, OutcomeCode c) const noexcept;
};

struct OutcomeAggregate {
  PhaseCounts counts;
  std::size_t undefined = 0;
  /// E vs T (rows T, E), E vs D (rows E, D), T vs D (rows T, D).
  std::array<ContingencyTable2x2, 3> tables{};
};

[[nodiscard]] ContingencyTable2x2 make_table(const PhaseCounts& counts, OutcomeCode first,
                                             OutcomeCode second) noexcept;
[[nodiscard]] OutcomeAggregate aggregate(std::span<const OutcomeRecord> outcomes);

/// Two-tailed Fisher exact p-value of the table.
[[nodiscard]] double test_proportions(const ContingencyTable2x2& table);

struct SimulationConfig {
  std::vector<Institution> institutions{Institution::MD, Institution::SU};
  std::vector<SimilarityMetric> metrics{SimilarityMetric::EditDistance,
                                        SimilarityMetric::LongestCommonSubsequence,
                                        SimilarityMetric::LongestCommonSubstring};
  std::vector<std::size_t> sizes{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::size_t> k_grid{1, 3, 5, 7, 9, 11, 13, 15};
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  TrainingSelection selection = TrainingSelection::FirstN;
};

struct SimulationResult {
  std::vector<ConfigResult> curves;
  std::vector<OutcomeRecord> outcomes;
  OutcomeAggregate aggregate;
  std::array<double, 3> p_values{};
  std::vector<std::string> warnings;
};

/// Runs every (institution, metric, phase, n) in grid order.
[[nodiscard]] SimulationResult run_simulation(const Dataset& dataset,
                                              const std::map<Institution, StrataSet>& strata,
                                              const SimulationConfig& config);

}  // namespace annodiff
