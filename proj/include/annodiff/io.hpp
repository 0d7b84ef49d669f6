#pragma once

// Run configuration and the CSV/JSON output files. Every file carries the
// configuration that produced it: CSVs as a leading "# config: {...}" line,
// stats.json as its "config" member.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "annodiff/dataset.hpp"
#include "annodiff/difficulty.hpp"
#include "annodiff/simulation.hpp"
#include "annodiff/textsim.hpp"

namespace annodiff::io {

struct RunConfig {
  std::string dataset_path;
  std::string tweets_path;
  std::vector<Institution> institutions{Institution::MD, Institution::SU};
  std::vector<SimilarityMetric> metrics{SimilarityMetric::EditDistance,
                                        SimilarityMetric::LongestCommonSubsequence,
                                        SimilarityMetric::LongestCommonSubstring};
  SimilarityMetric certainty_metric = SimilarityMetric::LongestCommonSubstring;
  double smoothing = 1.0;
  std::size_t k_certainty = 3;
  std::vector<std::size_t> k_grid{1, 3, 5, 7, 9, 11, 13, 15};
  std::vector<std::size_t> sizes{2, 3, 4, 5, 6, 7, 8, 9, 10};
  double epsilon = 0.01;
  double split_ratio = 0.4;
  std::uint64_t seed = 0;
  TrainingSelection selection = TrainingSelection::FirstN;
  double alpha = 0.05;

  [[nodiscard]] DifficultyConfig difficulty() const;
  [[nodiscard]] SimulationConfig simulation() const;
};

/// The output directory is not part of the provenance record, so moving
/// a run elsewhere does not change its bytes.
[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& c);
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j);

/// CSV field quoting per RFC 4180 when needed.
[[nodiscard]] std::string csv_field(const std::string& s);
/// Splits one CSV record; handles quoted fields without embedded newlines.
[[nodiscard]] std::vector<std::string> split_csv(const std::string& line);

void write_scores_csv(std::ostream& os, const RunConfig& config, const std::vector<DifficultyReport>& reports);
[[nodiscard]] std::vector<DifficultyScore> read_scores_csv(std::istream& is);

void write_outcomes_csv(std::ostream& os, const RunConfig& config, const std::vector<OutcomeRecord>& outcomes);
[[nodiscard]] std::vector<OutcomeRecord> read_outcomes_csv(std::istream& is);

void write_curves_csv(std::ostream& os, const RunConfig& config, const std::vector<ConfigResult>& curves);

struct InstitutionClassCounts {
  Institution institution;
  std::array<ClassCount, 2> counts;
};

[[nodiscard]] nlohmann::ordered_json stats_json(const RunConfig& config, const SimulationResult& result,
                                               const std::vector<InstitutionClassCounts>& classes);

/// Reads back the first "# config:" line of a CSV, if any.
[[nodiscard]] std::optional<nlohmann::json> read_csv_config(std::istream& is);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace annodiff::io
