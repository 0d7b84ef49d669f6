#include "annodiff/difficulty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "annodiff/hier_knn.hpp"
#include "annodiff/random.hpp"

namespace annodiff {

std::string_view to_string(DifficultyClass c) noexcept {
  return c == DifficultyClass::Easy ? "easy" : "difficult";
}

std::optional<DifficultyClass> parse_difficulty_class(std::string_view s) noexcept {
  if (s == "easy") return DifficultyClass::Easy;
  if (s == "difficult") return DifficultyClass::Difficult;
  return std::nullopt;
}

double agreement_score(const MajorityResult& majority) {
  std::size_t total_maj = 0;
  for (const auto& lvl : majority.levels) total_maj += lvl.majority_count + (lvl.tie ? 1 : 0);
  if (total_maj == 0) return 0.0;

  double a = 0.0;
  for (const auto& lvl : majority.levels) {
    if (lvl.voters == 0) continue;
    const auto maj = static_cast<double>(lvl.majority_count);
    a += maj / static_cast<double>(lvl.voters) * (maj / static_cast<double>(total_maj));
  }
  return a;
}

std::vector<double> knn_label_certainty(std::span<const std::size_t> counts, std::size_t k,
                                        double smoothing, std::size_t classes) {
  if (classes < 2 || counts.size() != classes) {
    throw std::invalid_argument("knn_label_certainty: need one count per class, at least two classes");
  }
  if (smoothing < 0.0) throw std::invalid_argument("knn_label_certainty: negative smoothing");
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) != k) {
    throw std::invalid_argument("knn_label_certainty: counts do not sum to k");
  }
  const double denom = static_cast<double>(k + classes);
  std::vector<double> row;
  row.reserve(classes);
  for (std::size_t n : counts) row.push_back((static_cast<double>(n) + smoothing) / denom);
  return row;
}

double aggregate_certainty(std::span<const CertaintyTable> per_worker) {
  if (per_worker.empty()) throw std::invalid_argument("aggregate_certainty: no workers");
  const auto workers = static_cast<double>(per_worker.size());
  double total = 0.0;
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    double best = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      double sum = 0.0;
      for (const auto& t : per_worker) sum += t[lvl][j];
      best = std::max(best, sum / workers);
    }
    total += best;
  }
  return total / static_cast<double>(kLevels);
}

WorkerSplit split_worker(const Worker& worker, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0, 1)");
  const std::size_t n = worker.annotations.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SeededRng rng(seed);
  rng.shuffle(std::span(idx));

  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  else n_train = n;

  WorkerSplit split;
  split.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::map<std::string, std::vector<CertaintyTable>> certainty_tables(const Dataset& dataset,
                                                                    Institution inst,
                                                                    const CertaintyConfig& config) {
  std::map<std::string, std::vector<CertaintyTable>> out;
  for (const Worker& w : dataset.workers()) {
    if (w.institution != inst) continue;
    const WorkerSplit split = split_worker(w, config.split_ratio, mix_seed(config.seed, w.id));

    // Per level, only training tweets carrying a label on that level.
    std::vector<LevelPredictor> levels;
    std::array<std::vector<std::size_t>, kLevels> members;
    std::vector<LevelExample> all;
    for (std::size_t ti : split.train) {
      const Annotation& a = w.annotations[ti];
      all.push_back({dataset.tokens(a.tweet_id), std::nullopt});
    }
    for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
      std::vector<LevelExample> examples;
      for (std::size_t i = 0; i < split.train.size(); ++i) {
        const auto label = w.annotations[split.train[i]].labels.at(lvl);
        if (!label) continue;
        members[lvl].push_back(i);
        examples.push_back({all[i].words, label});
      }
      levels.emplace_back(lvl, std::move(examples), config.metric, config.k);
    }

    for (std::size_t ti : split.test) {
      const Annotation& a = w.annotations[ti];
      const auto sims_all = similarities(dataset.tokens(a.tweet_id), all, config.metric);
      const std::uint64_t tweet_seed = mix_seed(mix_seed(config.seed, w.id), a.tweet_id);
      CertaintyTable table{};
      for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
        std::vector<double> sims;
        sims.reserve(members[lvl].size());
        for (std::size_t i : members[lvl]) sims.push_back(sims_all[i]);
        const auto ranking = levels[lvl].rank(sims, mix_seed(tweet_seed, lvl));
        const std::size_t k_eff = levels[lvl].effective_k();
        const VoteCounts votes = levels[lvl].count_votes(ranking, k_eff);
        const std::array<std::size_t, 2> counts{votes[0], votes[1]};
        const auto row = knn_label_certainty(counts, k_eff, config.smoothing, 2);
        table[lvl] = {row[0], row[1]};
      }
      out[a.tweet_id].push_back(table);
    }
  }
  return out;
}

std::optional<double> predictor_certainty(const std::string& tweet_id, const Dataset& dataset,
                                          Institution inst, const CertaintyConfig& config) {
  const auto tables = certainty_tables(dataset, inst, config);
  auto it = tables.find(tweet_id);
  if (it == tables.end()) return std::nullopt;
  return aggregate_certainty(it->second);
}

double normalized_cost(double cost, double cost_min, double cost_max) noexcept {
  if (!(cost_max > cost_min)) return 1.0;
  return 1.0 - (cost - cost_min) / (cost_max - cost_min);
}

std::optional<double> median_cost(const std::string& tweet_id, const Dataset& dataset,
                                  Institution inst) {
  std::vector<double> totals;
  for (const Annotation* a : dataset.annotations_of(tweet_id, inst)) {
    if (auto t = a->total_duration()) totals.push_back(*t);
  }
  if (totals.empty()) return std::nullopt;
  return stats::median(std::move(totals));
}

std::map<std::string, double> labeling_costs(const Dataset& dataset, Institution inst) {
  std::map<std::string, double> medians;
  for (const auto& id : dataset.tweet_ids(inst)) {
    if (auto m = median_cost(id, dataset, inst)) medians.emplace(id, *m);
  }
  std::map<std::string, double> out;
  if (medians.empty()) return out;
  const auto [lo, hi] = std::minmax_element(
      medians.begin(), medians.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  const double cmin = lo->second, cmax = hi->second;
  for (const auto& [id, m] : medians) out.emplace(id, normalized_cost(m, cmin, cmax));
  return out;
}

std::optional<double> labeling_cost(const std::string& tweet_id, const Dataset& dataset,
                                    Institution inst) {
  const auto all = labeling_costs(dataset, inst);
  auto it = all.find(tweet_id);
  if (it == all.end()) return std::nullopt;
  return it->second;
}

stats::Clustering1D assign_classes(std::span<DifficultyScore> scores) {
  std::vector<double> ds;
  ds.reserve(scores.size());
  for (const auto& s : scores) ds.push_back(s.ds);
  stats::Clustering1D clustering = stats::kmeans_1d(ds);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i].cls = clustering.assignment[i] == 1 ? DifficultyClass::Easy : DifficultyClass::Difficult;
  }
  return clustering;
}

DifficultyReport difficulty_scores(const Dataset& dataset, Institution inst,
                                   const DifficultyConfig& config) {
  DifficultyReport report;
  report.institution = inst;

  const auto certainties = certainty_tables(dataset, inst, config.certainty);
  const auto costs = labeling_costs(dataset, inst);

  std::map<std::string, double> c_values;
  for (const auto& [id, tables] : certainties) c_values.emplace(id, aggregate_certainty(tables));
  std::optional<double> c_mean;
  if (!c_values.empty()) {
    double sum = 0.0;
    for (const auto& [id, c] : c_values) sum += c;
    c_mean = sum / static_cast<double>(c_values.size());
  }

  for (const auto& id : dataset.tweet_ids(inst)) {
    const auto annos = dataset.annotations_of(id, inst);
    DifficultyScore s;
    s.tweet_id = id;
    s.institution = inst;
    s.agreement = agreement_score(majority_labels(annos, mix_seed(config.seed, id)));

    auto cost = costs.find(id);
    if (cost == costs.end()) {
      report.excluded.push_back({id, "no annotation with complete durations"});
      continue;
    }
    s.cost = cost->second;

    if (auto c = c_values.find(id); c != c_values.end()) {
      s.certainty = c->second;
    } else if (c_mean) {
      s.certainty = *c_mean;
      s.certainty_imputed = true;
      ++report.imputed_certainty;
    } else {
      report.excluded.push_back({id, "no certainty and nothing to impute from"});
      continue;
    }
    s.ds = s.agreement + s.certainty + s.cost;
    report.scores.push_back(std::move(s));
  }

  if (report.imputed_certainty > 0) {
    report.warnings.push_back(fmt::format("{}: certainty imputed with the mean ({:.4f}) for {} tweet(s)",
                                          to_string(inst), *c_mean, report.imputed_certainty));
  }
  for (const auto& e : report.excluded) {
    report.warnings.push_back(fmt::format("{}: tweet '{}' excluded: {}", to_string(inst), e.tweet_id, e.reason));
  }

  if (!report.scores.empty()) {
    const auto clustering = assign_classes(report.scores);
    report.centroids = clustering.centroids;
  }
  return report;
}

}  // namespace annodiff
