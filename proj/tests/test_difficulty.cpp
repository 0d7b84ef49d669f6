#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "annodiff/difficulty.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace annodiff;

namespace {

constexpr auto R = Label::Relevant, IR = Label::Irrelevant, F = Label::Factual, NF = Label::NonFactual,
               P = Label::Positive, N = Label::Negative;

Annotation anno(const std::string& w, const std::string& t, int order, LabelPath p, Durations d = {1.0, 1.0, 1.0}) {
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    if (!p.at(lvl)) d[lvl].reset();
  }
  return {w, t, order, p, d};
}

MajorityResult majority_of(std::vector<LabelPath> paths) { return majority_labels(paths, 3); }

}  // namespace

TEST_CASE("agreement: raw votes of the first worked example") {
  // level 3 has three voters here, so the literal formula gives 2/3 where the
  // printed arithmetic uses 2/2
  const auto a1 = agreement_score(majority_of({LabelPath::make(R, F), LabelPath::make(R, NF, N),
                                               LabelPath::make(R, NF, N), LabelPath::make(R, NF, P)}));
  CHECK(a1 == doctest::Approx(4.0 / 4 * 4 / 9 + 3.0 / 4 * 3 / 9 + 2.0 / 3 * 2 / 9));
  const auto a2 = agreement_score(majority_of({LabelPath::make(R, F), LabelPath::make(R, NF, N),
                                               LabelPath::make(R, NF, N), LabelPath::make(R, F)}));
  CHECK(a2 == doctest::Approx(4.0 / 4 * 4 / 9 + 2.0 / 4 * 2 / 9 + 2.0 / 2 * 2 / 9));
  CHECK(a2 == doctest::Approx(0.78).epsilon(0.005));
}

TEST_CASE("agreement from a constructed majority") {
  MajorityResult m;
  m.levels[0] = {R, 4, 4, false};
  m.levels[1] = {NF, 3, 4, false};
  m.levels[2] = {N, 2, 2, false};
  CHECK(agreement_score(m) == doctest::Approx(0.92).epsilon(0.005));
  m.levels[1] = {F, 2, 4, true};
  m.levels[2] = {N, 2, 2, false};
  CHECK(agreement_score(m) == doctest::Approx(0.78).epsilon(0.005));
  CHECK(agreement_score(majority_of({LabelPath::make(R, F)})) == 1.0);
}

TEST_CASE("label certainty") {
  const std::vector<std::size_t> two{2, 1}, zero{0, 3}, all{3, 0};
  CHECK(knn_label_certainty(two, 3, 1.0, 2)[0] == doctest::Approx(0.6));
  CHECK(knn_label_certainty(zero, 3, 1.0, 2)[0] == doctest::Approx(0.2));
  const auto row = knn_label_certainty(all, 3, 1.0, 2);
  CHECK(row[0] + row[1] == 1.0);
  CHECK_THROWS((void)knn_label_certainty(two, 4, 1.0, 2));
}

TEST_CASE("aggregated certainty: two-worker example") {
  const std::vector<CertaintyTable> tables{
      CertaintyTable{{{0.8, 0.2}, {0.4, 0.6}, {0.3, 0.7}}},
      CertaintyTable{{{0.7, 0.3}, {0.2, 0.8}, {0.5, 0.5}}},
  };
  CHECK(aggregate_certainty(tables) == doctest::Approx(0.68).epsilon(0.005));
  CHECK(aggregate_certainty(tables) == doctest::Approx((0.75 + 0.7 + 0.6) / 3));
  const std::vector<CertaintyTable> sure{CertaintyTable{{{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}}};
  CHECK(aggregate_certainty(sure) == 1.0);
  CHECK_THROWS((void)aggregate_certainty({}));
}

TEST_CASE("predictor certainty with k=1 on a single worker") {
  std::vector<Annotation> annos;
  std::map<std::string, std::string> texts;
  for (int i = 1; i <= 5; ++i) {
    const auto id = "t" + std::to_string(i);
    texts[id] = "word" + std::to_string(i) + " shared";
    annos.push_back(anno("w", id, i, LabelPath::make(R, NF, P)));
  }
  const Dataset ds({Worker{"w", Institution::MD, WorkerGroup::S, annos}}, texts);
  CertaintyConfig cfg;
  cfg.k = 1;
  const auto tables = certainty_tables(ds, Institution::MD, cfg);
  CHECK(tables.size() == 3);
  for (const auto& [id, t] : tables) {
    REQUIRE(t.size() == 1);
    CHECK(aggregate_certainty(t) == doctest::Approx(2.0 / 3.0));
    CHECK(predictor_certainty(id, ds, Institution::MD, cfg) == doctest::Approx(2.0 / 3.0));
  }
}

TEST_CASE("worker split") {
  std::vector<Annotation> annos;
  for (int i = 1; i <= 10; ++i) annos.push_back(anno("w", "t" + std::to_string(i), i, LabelPath::make(IR)));
  const Worker w{"w", Institution::SU, WorkerGroup::S, annos};
  const auto s = split_worker(w, 0.4, 17);
  CHECK(s.train.size() == 4);
  CHECK(s.test.size() == 6);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  const auto again = split_worker(w, 0.4, 17);
  CHECK(s.train == again.train);
  const Worker two{"v", Institution::SU, WorkerGroup::S, {annos[0], annos[1]}};
  CHECK(split_worker(two, 0.01, 1).train.size() == 1);
}

TEST_CASE("labeling cost") {
  CHECK(normalized_cost(2, 2, 10) == 1.0);
  CHECK(normalized_cost(10, 2, 10) == 0.0);
  CHECK(normalized_cost(4, 2, 10) == doctest::Approx(0.75));
  CHECK(normalized_cost(5, 5, 5) == 1.0);

  // per-tweet medians 2, 4 and 10 seconds
  const std::map<std::string, std::string> texts{{"a", "x"}, {"b", "y"}, {"c", "z"}};
  auto w = [](const std::string& id, double da, double db, double dc) {
    return Worker{id, Institution::MD, WorkerGroup::S,
                  {anno(id, "a", 1, LabelPath::make(IR), {da, {}, {}}), anno(id, "b", 2, LabelPath::make(IR), {db, {}, {}}),
                   anno(id, "c", 3, LabelPath::make(R, F), {dc / 2, dc / 2, {}})}};
  };
  const Dataset ds({w("w1", 1, 4, 9), w("w2", 2, 3, 10), w("w3", 3, 5, 12)}, texts);
  CHECK(median_cost("b", ds, Institution::MD) == doctest::Approx(4.0));
  CHECK(labeling_cost("a", ds, Institution::MD) == doctest::Approx(1.0));
  CHECK(labeling_cost("b", ds, Institution::MD) == doctest::Approx(0.75));
  CHECK(labeling_cost("c", ds, Institution::MD) == doctest::Approx(0.0));
  CHECK_FALSE(labeling_cost("a", ds, Institution::SU).has_value());
}

TEST_CASE("missing durations exclude a tweet from cost only") {
  const std::map<std::string, std::string> texts{{"a", "x y"}, {"b", "y z"}, {"c", "z q"}};
  const Worker w{"w", Institution::MD, WorkerGroup::S,
                 {anno("w", "a", 1, LabelPath::make(IR), {1.0, {}, {}}), anno("w", "b", 2, LabelPath::make(IR), {std::nullopt, {}, {}}),
                  anno("w", "c", 3, LabelPath::make(R, F), {5.0, 5.0, {}})}};
  const Dataset ds({w}, texts);
  CHECK_FALSE(median_cost("b", ds, Institution::MD).has_value());
  const auto rep = difficulty_scores(ds, Institution::MD, {});
  REQUIRE(rep.excluded.size() == 1);
  CHECK(rep.excluded[0].tweet_id == "b");
  CHECK(rep.scores.size() == 2);
}

TEST_CASE("class assignment") {
  std::vector<DifficultyScore> s(4);
  const double ds[4] = {0.3, 2.5, 0.4, 2.6};
  for (int i = 0; i < 4; ++i) s[i].ds = ds[i];
  (void)assign_classes(s);
  CHECK(s[0].cls == DifficultyClass::Difficult);
  CHECK(s[1].cls == DifficultyClass::Easy);
  CHECK(s[2].cls == DifficultyClass::Difficult);
  CHECK(s[3].cls == DifficultyClass::Easy);
  for (auto& x : s) x.ds = 1.5;
  CHECK_THROWS_AS((void)assign_classes(s), stats::DegenerateClustering);
}

TEST_CASE("class names") {
  CHECK(to_string(DifficultyClass::Easy) == "easy");
  CHECK(parse_difficulty_class("difficult") == DifficultyClass::Difficult);
}

TEST_CASE("property: certainty rows sum to one and stay positive") {
  SeededRng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const auto k = 1 + rng.uniform_index(15);
    const auto classes = 2 + rng.uniform_index(2);
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t j = 0; j < k; ++j) ++counts[rng.uniform_index(classes)];
    const auto row = knn_label_certainty(counts, k, 1.0, classes);
    double sum = 0.0;
    for (double v : row) {
      REQUIRE(v > 0.0);
      REQUIRE(v <= 1.0);
      sum += v;
    }
    REQUIRE(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("property: normalized cost boundaries and monotonicity") {
  SeededRng rng(32);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> costs(2 + rng.uniform_index(20));
    for (auto& c : costs) c = rng.uniform01() * 60.0;
    const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
    if (*lo == *hi) continue;
    REQUIRE(normalized_cost(*lo, *lo, *hi) == 1.0);
    REQUIRE(normalized_cost(*hi, *lo, *hi) == 0.0);
    auto sorted = costs;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 1; j < sorted.size(); ++j) {
      const double a = normalized_cost(sorted[j - 1], *lo, *hi), b = normalized_cost(sorted[j], *lo, *hi);
      REQUIRE(b <= a);
      REQUIRE(b >= 0.0);
      REQUIRE(a <= 1.0);
    }
  }
}

TEST_CASE("property: agreement matches the direct evaluator") {
  SeededRng rng(33);
  const auto paths = oracle::all_paths();
  for (int i = 0; i < 1000; ++i) {
    std::vector<LabelPath> v;
    const auto n = 1 + rng.uniform_index(7);
    for (std::size_t j = 0; j < n; ++j) v.push_back(paths[rng.uniform_index(paths.size())]);
    auto votes_of = [](const std::vector<LabelPath>& ps) {
      std::array<std::vector<std::optional<Label>>, kLevels> votes;
      for (const auto& p : ps) {
        for (std::size_t lvl = 0; lvl < kLevels; ++lvl) votes[lvl].push_back(p.at(lvl));
      }
      return votes;
    };
    const auto seed = rng.next();
    const auto m = majority_labels(v, seed);
    const double a = agreement_score(m);
    REQUIRE(a == doctest::Approx(oracle::agreement(votes_of(v))).epsilon(1e-12));
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 1.0 + 1e-12);

  }
}

TEST_CASE("property: replacing a minority vote never lowers agreement") {
  SeededRng rng(34);
  for (int i = 0; i < 1000; ++i) {
    std::array<std::vector<std::optional<Label>>, kLevels> votes;
    const auto n = 1 + rng.uniform_index(8);
    for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
      const auto labels = labels_at(lvl);
      for (std::size_t j = 0; j < n; ++j) {
        const auto r = rng.uniform_index(lvl == 0 ? 2 : 3);
        votes[lvl].push_back(r == 2 ? std::nullopt : std::optional<Label>(labels[r]));
      }
    }
    const double before = oracle::agreement(votes);
    const auto lvl = rng.uniform_index(kLevels);
    std::map<Label, int> counts;
    for (const auto& v : votes[lvl]) {
      if (v) ++counts[*v];
    }
    if (counts.size() != 2) continue;
    const auto labels = labels_at(lvl);
    const int c0 = counts[labels[0]], c1 = counts[labels[1]];
    if (c0 == c1) continue;
    const Label maj = c0 > c1 ? labels[0] : labels[1];
    for (auto& v : votes[lvl]) {
      if (v && *v != maj) {
        v = maj;
        break;
      }
    }
    REQUIRE(oracle::agreement(votes) >= before - 1e-12);

    // the library agrees with the oracle on the same configuration
    MajorityResult m;
    for (std::size_t l = 0; l < kLevels; ++l) {
      std::map<Label, std::size_t> cnt;
      std::size_t voters = 0;
      for (const auto& v : votes[l]) {
        if (v) {
          ++cnt[*v];
          ++voters;
        }
      }
      std::size_t best = 0, at_best = 0;
      std::optional<Label> label;
      for (const auto& [lab, c] : cnt) {
        if (c > best) {
          best = c;
          at_best = 1;
          label = lab;
        } else if (c == best) {
          ++at_best;
        }
      }
      m.levels[l] = {label, best, voters, at_best > 1};
    }
    REQUIRE(agreement_score(m) == doctest::Approx(oracle::agreement(votes)).epsilon(1e-12));
  }
}

TEST_CASE("difficulty scores on the synthetic fixture") {
  testing::SyntheticSpec spec;
  spec.workers_md = 5;
  spec.workers_su = 3;
  const auto data = testing::make_synthetic(spec);
  const auto ds = testing::to_dataset(data);
  DifficultyConfig cfg;
  cfg.seed = 99;
  cfg.certainty.seed = 100;
  const auto rep = difficulty_scores(ds, Institution::MD, cfg);
  REQUIRE(rep.scores.size() == 50);
  std::size_t matches = 0;
  for (const auto& s : rep.scores) {
    CHECK(s.agreement >= 0.0);
    CHECK(s.agreement <= 1.0);
    CHECK(s.certainty >= 0.0);
    CHECK(s.certainty <= 1.0);
    CHECK(s.cost >= 0.0);
    CHECK(s.cost <= 1.0);
    CHECK(s.ds == s.agreement + s.certainty + s.cost);
    CHECK(s.institution == Institution::MD);
    matches += (s.cls == DifficultyClass::Difficult) == data.planted_difficult.at(s.tweet_id);
  }
  CHECK(matches >= 45);
  CHECK(rep.centroids[0] < rep.centroids[1]);

  const auto again = difficulty_scores(ds, Institution::MD, cfg);
  REQUIRE(again.scores.size() == rep.scores.size());
  for (std::size_t i = 0; i < rep.scores.size(); ++i) {
    CHECK(again.scores[i].ds == rep.scores[i].ds);
    CHECK(again.scores[i].cls == rep.scores[i].cls);
  }
}

TEST_CASE("tweets nobody tested get the mean certainty") {
  testing::SyntheticSpec spec;
  spec.workers_md = 1;
  spec.workers_su = 0;
  spec.tweets = 20;
  const auto ds = testing::to_dataset(testing::make_synthetic(spec));
  const auto rep = difficulty_scores(ds, Institution::MD, {});
  CHECK(rep.imputed_certainty == 8);
  double mean = 0.0;
  std::size_t measured = 0;
  for (const auto& s : rep.scores) {
    if (!s.certainty_imputed) {
      mean += s.certainty;
      ++measured;
    }
  }
  mean /= static_cast<double>(measured);
  for (const auto& s : rep.scores) {
    if (s.certainty_imputed) CHECK(s.certainty == doctest::Approx(mean));
  }
  CHECK_FALSE(rep.warnings.empty());
}
