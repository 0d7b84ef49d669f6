#pragma once

// Annotation records, dataset ingestion and per-level majority voting.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "annodiff/labels.hpp"
#include "annodiff/textsim.hpp"

namespace annodiff {

enum class Institution { MD, SU };
enum class WorkerGroup { S, M, L };

[[nodiscard]] std::string_view to_string(Institution i) noexcept;
[[nodiscard]] std::string_view to_string(WorkerGroup g) noexcept;
[[nodiscard]] std::optional<Institution> parse_institution(std::string_view s) noexcept;
[[nodiscard]] std::optional<WorkerGroup> parse_group(std::string_view s) noexcept;
/// Nominal session length of a group: S=50, M=150, L=500 tweets.
[[nodiscard]] std::size_t group_size(WorkerGroup g) noexcept;

using Durations = std::array<std::optional<double>, kLevels>;

/// A record as it appears on disk, before hierarchy rules are applied.
struct RawAnnotation {
  std::string worker_id;
  std::string tweet_id;
  int order_index = 0;
  std::array<std::optional<Label>, kLevels> labels{};
  Durations durations{};
};

struct Annotation {
  std::string worker_id;
  std::string tweet_id;
  int order_index;
  LabelPath labels;
  Durations durations;

  /// Sum of the per-level durations, or nullopt when any labelled level
  /// lacks one.
  [[nodiscard]] std::optional<double> total_duration() const;
};

/// Applies the Irrelevant pruning rule and validates the result. Throws
/// std::invalid_argument on a structurally invalid record.
[[nodiscard]] Annotation normalize(const RawAnnotation& raw);
[[nodiscard]] RawAnnotation to_raw(const Annotation& a);

struct Worker {
  std::string id;
  Institution institution;
  WorkerGroup group;
  std::vector<Annotation> annotations;  ///< ascending order_index
};

/// Immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  /// Validates referential integrity and per-worker uniqueness; throws
  /// std::invalid_argument otherwise. Texts are tokenized with `opts`.
  Dataset(std::vector<Worker> workers, std::map<std::string, std::string> texts,
          const TokenizeOptions& opts = {});

  [[nodiscard]] const std::vector<Worker>& workers() const noexcept { return workers_; }
  [[nodiscard]] const std::map<std::string, std::string>& texts() const noexcept { return texts_; }
  [[nodiscard]] const WordSequence& tokens(const std::string& tweet_id) const;

  /// Annotations of one tweet, optionally restricted to one institution,
  /// in worker order.
  [[nodiscard]] std::vector<const Annotation*> annotations_of(
      const std::string& tweet_id, std::optional<Institution> inst = std::nullopt) const;

  /// Sorted ids of tweets labelled by at least one worker of `inst`.
  [[nodiscard]] std::vector<std::string> tweet_ids(Institution inst) const;

  [[nodiscard]] const Worker* find_worker(std::string_view id) const noexcept;

 private:
  std::vector<Worker> workers_;
  std::map<std::string, std::string> texts_;
  std::map<std::string, WordSequence> tokens_;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> by_tweet_;
};

/// Ingestion failure with its source position.
class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::string source, std::size_t line, const std::string& what);
  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

struct IngestReport {
  std::size_t records = 0;
  std::size_t pruned_records = 0;        ///< Irrelevant records that carried deeper labels
  std::size_t missing_duration_records = 0;
  std::vector<std::string> warnings;
};

/// Reads annotations.jsonl and tweets.jsonl streams. Blank lines are skipped.
[[nodiscard]] Dataset parse_dataset(std::istream& annotations, std::istream& tweets,
                                    IngestReport* report = nullptr,
                                    const TokenizeOptions& opts = {},
                                    std::string_view annotations_name = "annotations.jsonl",
                                    std::string_view tweets_name = "tweets.jsonl");

[[nodiscard]] Dataset load_dataset(const std::filesystem::path& annotations,
                                   const std::filesystem::path& tweets,
                                   IngestReport* report = nullptr,
                                   const TokenizeOptions& opts = {});

struct LevelMajority {
  std::optional<Label> label;     ///< empty when nobody voted on the level
  std::size_t majority_count = 0;
  std::size_t voters = 0;
  bool tie = false;
};

struct MajorityResult {
  std::array<LevelMajority, kLevels> levels;
};

/// Per-level plurality label. Ties are broken by a draw seeded from
/// `seed` and the level only, so the result does not depend on the order
/// of `paths`.
[[nodiscard]] MajorityResult majority_labels(std::span<const LabelPath> paths, std::uint64_t seed);

/// All annotations must refer to the same tweet (std::invalid_argument otherwise).
[[nodiscard]] MajorityResult majority_labels(std::span<const Annotation* const> annos,
                                             std::uint64_t seed);

}  // namespace annodiff
