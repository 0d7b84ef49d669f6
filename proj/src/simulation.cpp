#include "annodiff/simulation.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "annodiff/hier_knn.hpp"
#include "annodiff/random.hpp"
#include "annodiff/stats.hpp"

namespace annodiff {

std::string_view to_string(Phase p) noexcept { return p == Phase::Early ? "early" : "late"; }

std::optional<Phase> parse_phase(std::string_view s) noexcept {
  if (s == "early") return Phase::Early;
  if (s == "late") return Phase::Late;
  return std::nullopt;
}

const Stratum* StrataSet::find(std::string_view worker, Phase phase, DifficultyClass cls) const noexcept {
  for (const auto& s : strata) {
    if (s.worker_id == worker && s.phase == phase && s.cls == cls) return &s;
  }
  return nullptr;
}

const PhaseWindow* StrataSet::window(std::string_view worker, Phase phase) const noexcept {
  for (const auto& w : windows) {
    if (w.worker_id == worker && w.phase == phase) return &w;
  }
  return nullptr;
}

std::vector<std::string> StrataSet::worker_ids() const {
  std::set<std::string> ids;
  for (const auto& w : windows) ids.insert(w.worker_id);
  return {ids.begin(), ids.end()};
}

StrataSet build_strata(const Dataset& dataset, Institution inst, std::span<const DifficultyScore> scores) {
  std::map<std::string, DifficultyClass> classes;
  for (const auto& s : scores) {
    if (s.institution == inst) classes.emplace(s.tweet_id, s.cls);
  }

  StrataSet set;
  set.institution = inst;
  for (const Worker& w : dataset.workers()) {
    if (w.institution != inst) continue;
    if (w.annotations.size() < kMinWorkerTweets) {
      set.excluded_workers.push_back(w.id);
      set.warnings.push_back(fmt::format("worker '{}' excluded: {} tweets, need {}", w.id,
                                         w.annotations.size(), kMinWorkerTweets));
      continue;
    }
    for (Phase phase : {Phase::Early, Phase::Late}) {
      const int first = phase == Phase::Early ? 1 : kPhaseLength + 1;
      const int last = first + kPhaseLength - 1;
      PhaseWindow window{w.id, phase, {}};
      Stratum easy{w.id, phase, DifficultyClass::Easy, {}};
      Stratum difficult{w.id, phase, DifficultyClass::Difficult, {}};
      std::size_t unscored = 0;
      for (const Annotation& a : w.annotations) {
        if (a.order_index < first || a.order_index > last) continue;
        StratumTweet t{a.tweet_id, a.order_index, a.labels};
        window.tweets.push_back(t);
        auto it = classes.find(a.tweet_id);
        if (it == classes.end()) {
          ++unscored;
          continue;
        }
        (it->second == DifficultyClass::Easy ? easy : difficult).tweets.push_back(std::move(t));
      }
      if (unscored > 0) {
        set.warnings.push_back(fmt::format("worker '{}' {} phase: {} unscored tweet(s) kept for testing only",
                                           w.id, to_string(phase), unscored));
      }
      set.windows.push_back(std::move(window));
      set.strata.push_back(std::move(easy));
      set.strata.push_back(std::move(difficult));
    }
  }
  return set;
}

std::array<ClassCount, 2> class_counts(const StrataSet& strata) {
  std::array<ClassCount, 2> out{ClassCount{Phase::Early}, ClassCount{Phase::Late}};
  for (std::size_t p = 0; p < 2; ++p) {
    std::set<std::string> easy, difficult;
    for (const auto& s : strata.strata) {
      if (s.phase != out[p].phase) continue;
      auto& bucket = s.cls == DifficultyClass::Easy ? easy : difficult;
      for (const auto& t : s.tweets) bucket.insert(t.tweet_id);
    }
    out[p].easy = easy.size();
    out[p].difficult = difficult.size();
  }
  return out;
}

namespace {

std::vector<const StratumTweet*> select_training(const Stratum& stratum, std::size_t n,
                                                 TrainingSelection selection, std::uint64_t seed) {
  std::vector<const StratumTweet*> picked;
  if (selection == TrainingSelection::FirstN) {
    for (std::size_t i = 0; i < n; ++i) picked.push_back(&stratum.tweets[i]);
    return picked;
  }
  std::vector<std::size_t> idx(stratum.tweets.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SeededRng rng(seed);
  rng.shuffle(std::span(idx));
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i : idx) picked.push_back(&stratum.tweets[i]);
  return picked;
}

}  // namespace

ConfigResult run_config(const Dataset& dataset, const StrataSet& strata, SimilarityMetric metric,
                        Phase phase, std::size_t n, std::span<const std::size_t> k_grid,
                        std::uint64_t seed, TrainingSelection selection) {
  if (n < kMinTrainSize || n > kMaxTrainSize) {
    throw std::invalid_argument(fmt::format("training size {} outside [{}, {}]", n, kMinTrainSize, kMaxTrainSize));
  }
  if (k_grid.empty()) throw std::invalid_argument("empty k grid");
  if (std::find(k_grid.begin(), k_grid.end(), std::size_t{0}) != k_grid.end()) {
    throw std::invalid_argument("k grid contains 0");
  }

  const ConfigKey key{strata.institution, metric, phase, n};
  ConfigResult result{F1Curve{key, DifficultyClass::Easy, {}, 0, 0},
                      F1Curve{key, DifficultyClass::Difficult, {}, 0, 0}};

  for (DifficultyClass arm : {DifficultyClass::Easy, DifficultyClass::Difficult}) {
    F1Curve& curve = arm == DifficultyClass::Easy ? result.easy : result.difficult;
    std::vector<HierCounts> counts(k_grid.size());

    for (const auto& worker : strata.worker_ids()) {
      const Stratum* stratum = strata.find(worker, phase, arm);
      const PhaseWindow* window = strata.window(worker, phase);
      if (stratum == nullptr || window == nullptr || stratum->tweets.size() < n) {
        ++curve.workers_skipped;
        continue;
      }
      const std::uint64_t worker_seed = mix_seed(seed, worker);
      const auto training = select_training(*stratum, n, selection,
                                            mix_seed(worker_seed, to_string(arm)));

      std::vector<LabeledTweet> train;
      std::set<std::string> train_ids;
      for (const StratumTweet* t : training) {
        train.push_back({dataset.tokens(t->tweet_id), t->labels});
        train_ids.insert(t->tweet_id);
      }
      const auto model = HierarchicalKnn::train(train, metric, k_grid.front());

      bool tested = false;
      for (const auto& t : window->tweets) {
        if (train_ids.contains(t.tweet_id)) continue;
        const auto preds = model.predict_grid(dataset.tokens(t.tweet_id), k_grid, mix_seed(worker_seed, t.tweet_id));
        for (std::size_t i = 0; i < preds.size(); ++i) counts[i].add(t.labels, preds[i]);
        tested = true;
      }
      if (tested) {
        ++curve.workers_used;
      } else {
        ++curve.workers_skipped;
      }
    }

    if (curve.workers_used > 0) {
      for (std::size_t i = 0; i < k_grid.size(); ++i) curve.points[k_grid[i]] = counts[i].f1();
    }
  }
  return result;
}

char to_char(OutcomeCode c) noexcept {
  switch (c) {
    case OutcomeCode::T: return 'T';
    case OutcomeCode::E: return 'E';
    case OutcomeCode::D: return 'D';
  }
  return '?';
}

std::optional<OutcomeCode> parse_outcome(char c) noexcept {
  switch (c) {
    case 'T': return OutcomeCode::T;
    case 'E': return OutcomeCode::E;
    case 'D': return OutcomeCode::D;
    default: return std::nullopt;
  }
}

double mean_f1_delta(const F1Curve& easy, const F1Curve& difficult) {
  if (easy.points.empty() || difficult.points.empty()) throw std::invalid_argument("empty F1 curve");
  if (easy.points.size() != difficult.points.size()) throw std::invalid_argument("F1 curves on different k grids");
  double sum = 0.0;
  auto d = difficult.points.begin();
  for (const auto& [k, f1] : easy.points) {
    if (d->first != k) throw std::invalid_argument("F1 curves on different k grids");
    sum += f1 - d->second;
    ++d;
  }
  return sum / static_cast<double>(easy.points.size());
}

OutcomeCode encode_outcome(const F1Curve& easy, const F1Curve& difficult, double epsilon) {
  const double delta = mean_f1_delta(easy, difficult);
  if (delta > epsilon) return OutcomeCode::E;
  if (delta < -epsilon) return OutcomeCode::D;
  return OutcomeCode::T;
}

std::string ContingencyTable2x2::name() const {
  // Named as in the reporting convention: E first when present, else T.
  const char a = to_char(rows[0]), b = to_char(rows[1]);
  if (b == 'E') return fmt::format("E vs {}", a);
  return fmt::format("{} vs {}", a, b);
}

std::size_t PhaseCounts::at(Phase p, OutcomeCode c) const noexcept {
  return (p == Phase::Early ? early : late)[static_cast<std::size_t>(c)];
}

ContingencyTable2x2 make_table(const PhaseCounts& counts, OutcomeCode first, OutcomeCode second) noexcept {
  ContingencyTable2x2 t;
  t.rows = {first, second};
  for (std::size_t r = 0; r < 2; ++r) {
    t.cells[r] = {counts.at(Phase::Early, t.rows[r]), counts.at(Phase::Late, t.rows[r])};
  }
  return t;
}

OutcomeAggregate aggregate(std::span<const OutcomeRecord> outcomes) {
  OutcomeAggregate agg;
  for (const auto& o : outcomes) {
    if (!o.code) {
      ++agg.undefined;
      continue;
    }
    auto& row = o.config.phase == Phase::Early ? agg.counts.early : agg.counts.late;
    ++row[static_cast<std::size_t>(*o.code)];
  }
  agg.tables = {make_table(agg.counts, OutcomeCode::T, OutcomeCode::E),
                make_table(agg.counts, OutcomeCode::E, OutcomeCode::D),
                make_table(agg.counts, OutcomeCode::T, OutcomeCode::D)};
  return agg;
}

double test_proportions(const ContingencyTable2x2& table) {
  return stats::fisher_exact_two_tailed(table.cells[0][0], table.cells[0][1], table.cells[1][0],
                                        table.cells[1][1]);
}

SimulationResult run_simulation(const Dataset& dataset, const std::map<Institution, StrataSet>& strata,
                                const SimulationConfig& config) {
  SimulationResult result;
  for (Institution inst : config.institutions) {
    auto it = strata.find(inst);
    if (it == strata.end()) throw std::invalid_argument(fmt::format("no strata for {}", to_string(inst)));
    for (SimilarityMetric metric : config.metrics) {
      for (Phase phase : {Phase::Early, Phase::Late}) {
        for (std::size_t n : config.sizes) {
          const std::uint64_t seed = mix_seed(
              config.seed, fmt::format("{}/{}/{}/{}", to_string(inst), to_string(metric), to_string(phase), n));
          ConfigResult r = run_config(dataset, it->second, metric, phase, n, config.k_grid, seed, config.selection);

          OutcomeRecord rec{r.easy.config, std::nullopt, std::nullopt};
          if (r.easy.empty() || r.difficult.empty()) {
            result.warnings.push_back(fmt::format("{} {} {} n={}: comparison undefined (no qualifying worker for {})",
                                                  to_string(inst), to_string(metric), to_string(phase), n,
                                                  r.easy.empty() ? "PredictorE" : "PredictorD"));
          } else {
            rec.mean_delta = mean_f1_delta(r.easy, r.difficult);
            rec.code = encode_outcome(r.easy, r.difficult, config.epsilon);
          }
          result.outcomes.push_back(rec);
          result.curves.push_back(std::move(r));
        }
      }
    }
  }
  result.aggregate = aggregate(result.outcomes);
  for (std::size_t i = 0; i < result.aggregate.tables.size(); ++i) {
    result.p_values[i] = test_proportions(result.aggregate.tables[i]);
  }
  return result;
}

}  // namespace annodiff
