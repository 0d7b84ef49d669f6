#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "annodiff/dataset.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace annodiff;

namespace {

constexpr auto R = Label::Relevant, IR = Label::Irrelevant, F = Label::Factual, NF = Label::NonFactual,
               P = Label::Positive, N = Label::Negative;

Dataset parse(const std::string& anns, const std::string& tweets, IngestReport* rep = nullptr) {
  std::istringstream a(anns), t(tweets);
  return parse_dataset(a, t, rep);
}

const std::string kTweets = R"({"tweet_id":"t1","text":"Vote now"}
{"tweet_id":"t2","text":"lunch time"}
)";

std::string record(const std::string& worker, const std::string& tweet, int order, const std::string& labels,
                   const std::string& durations = R"({"l1":1.0})") {
  return R"({"worker_id":")" + worker + R"(","institution":"MD","group":"S","tweet_id":")" + tweet +
         R"(","order_index":)" + std::to_string(order) + R"(,"labels":)" + labels + R"(,"durations_s":)" +
         durations + "}\n";
}

}  // namespace

TEST_CASE("label path structure") {
  CHECK(LabelPath::make(IR).depth() == 1);
  CHECK(LabelPath::make(R, F).depth() == 2);
  CHECK(LabelPath::make(R, NF, N).depth() == 3);
  CHECK_THROWS_AS(LabelPath::make(R), std::invalid_argument);
  CHECK_THROWS_AS(LabelPath::make(IR, F), std::invalid_argument);
  CHECK_THROWS_AS(LabelPath::make(R, F, P), std::invalid_argument);
  CHECK_THROWS_AS(LabelPath::make(R, NF), std::invalid_argument);
  CHECK_THROWS_AS(LabelPath::make(F), std::invalid_argument);
  CHECK(LabelPath::make_pruned(IR, NF, P) == LabelPath::make(IR));
}

TEST_CASE("label parsing") {
  CHECK(parse_label("NonFactual") == NF);
  CHECK(parse_label("IR") == IR);
  CHECK_FALSE(parse_label("Neutral").has_value());
  for (int i = 0; i < 6; ++i) {
    const auto l = static_cast<Label>(i);
    CHECK(parse_label(to_string(l)) == l);
    CHECK(labels_at(level_of(l))[i % 2] == l);
  }
}

TEST_CASE("normalize prunes below Irrelevant") {
  RawAnnotation raw{"w", "t", 1, {IR, F, std::nullopt}, {1.0, 2.0, std::nullopt}};
  const auto a = normalize(raw);
  CHECK(a.labels == LabelPath::make(IR));
  CHECK_FALSE(a.durations[1].has_value());
  CHECK(a.total_duration() == doctest::Approx(1.0));
}

TEST_CASE("normalize rejects invalid records") {
  CHECK_THROWS((void)normalize({"w", "t", 1, {R, F, P}, {}}));
  CHECK_THROWS((void)normalize({"w", "t", 1, {R, F, std::nullopt}, {1.0, 1.0, 1.0}}));
  CHECK_THROWS((void)normalize({"w", "t", 0, {IR, std::nullopt, std::nullopt}, {}}));
  CHECK_THROWS((void)normalize({"w", "t", 1, {IR, std::nullopt, std::nullopt}, {-1.0, std::nullopt, std::nullopt}}));
}

TEST_CASE("missing durations make the total unknown") {
  const auto a = normalize({"w", "t", 1, {R, F, std::nullopt}, {1.0, std::nullopt, std::nullopt}});
  CHECK_FALSE(a.total_duration().has_value());
}

TEST_CASE("parse dataset: pruning and report") {
  IngestReport rep;
  const auto ds = parse(record("w1", "t1", 1, R"({"l1":"Irrelevant","l2":"Factual"})",
                               R"({"l1":1.5,"l2":2.0})") +
                            "\n" + record("w1", "t2", 2, R"({"l1":"R","l2":"NF","l3":"N"})",
                                          R"({"l1":1,"l2":1,"l3":1})"),
                        kTweets, &rep);
  REQUIRE(ds.workers().size() == 1);
  const auto& w = ds.workers()[0];
  CHECK(w.annotations[0].labels == LabelPath::make(IR));
  CHECK_FALSE(w.annotations[0].durations[1].has_value());
  CHECK(w.annotations[1].labels == LabelPath::make(R, NF, N));
  CHECK(rep.records == 2);
  CHECK(rep.pruned_records == 1);
  CHECK(ds.tokens("t1") == WordSequence({"vote", "now"}));
  CHECK(ds.tweet_ids(Institution::MD) == std::vector<std::string>{"t1", "t2"});
  CHECK(ds.tweet_ids(Institution::SU).empty());
  CHECK(ds.annotations_of("t2").size() == 1);
}

TEST_CASE("parse dataset: empty input") {
  const auto ds = parse("", "");
  CHECK(ds.workers().empty());
  CHECK(ds.texts().empty());
}

TEST_CASE("parse dataset: errors carry line numbers") {
  auto line_of = [](const std::string& anns, const std::string& tweets = kTweets) -> std::size_t {
    try {
      (void)parse(anns, tweets);
    } catch (const DatasetError& e) {
      return e.line();
    }
    return 0;
  };
  const auto ok = record("w1", "t1", 1, R"({"l1":"Irrelevant"})");
  CHECK(line_of(ok + record("w1", "t2", 2, R"({"l1":"Relevant","l2":"Factual","l3":"Positive"})")) == 2);
  CHECK(line_of(ok + ok) == 2);
  CHECK(line_of(ok + record("w1", "t2", 1, R"({"l1":"Irrelevant"})")) == 2);
  CHECK(line_of(ok + record("w1", "t9", 2, R"({"l1":"Irrelevant"})")) == 2);
  CHECK(line_of(ok + record("w1", "t2", 2, R"({"l1":"Sarcastic"})")) == 2);
  CHECK(line_of(ok + "\n{not json\n") == 3);
  CHECK(line_of("", "{\"tweet_id\":\"t1\"}\n") == 1);
  const auto su = R"({"worker_id":"w1","institution":"SU","group":"S","tweet_id":"t2","order_index":2,"labels":{"l1":"Irrelevant"}})";
  CHECK(line_of(ok + su + "\n") == 2);
}

TEST_CASE("parse dataset: error message cites source and line") {
  std::string msg;
  try {
    (void)parse(record("w1", "t1", 1, R"({"l1":"Bogus"})"), kTweets);
  } catch (const DatasetError& e) {
    msg = e.what();
  }
  CHECK(msg.find("annotations.jsonl:1:") == 0);
  CHECK(msg.find("Bogus") != std::string::npos);
}

TEST_CASE("majority labels: worked examples") {
  std::vector<LabelPath> ex1{LabelPath::make(R, F), LabelPath::make(R, NF, N), LabelPath::make(R, NF, N),
                             LabelPath::make(R, NF, P)};
  const auto m1 = majority_labels(ex1, 1);
  CHECK(m1.levels[0].label == R);
  CHECK(m1.levels[1].label == NF);
  CHECK(m1.levels[2].label == N);
  CHECK(m1.levels[0].majority_count == 4);
  CHECK(m1.levels[1].majority_count == 3);
  CHECK(m1.levels[2].majority_count == 2);
  CHECK(m1.levels[2].voters == 3);
  for (const auto& l : m1.levels) CHECK_FALSE(l.tie);

  std::vector<LabelPath> ex2{LabelPath::make(R, F), LabelPath::make(R, NF, N), LabelPath::make(R, NF, N),
                             LabelPath::make(R, F)};
  const auto m2 = majority_labels(ex2, 1);
  CHECK(m2.levels[1].tie);
  CHECK(m2.levels[1].majority_count == 2);
  CHECK((m2.levels[1].label == F || m2.levels[1].label == NF));

  const auto single = majority_labels(std::vector<LabelPath>{LabelPath::make(R, F)}, 9);
  CHECK(single.levels[0].label == R);
  CHECK(single.levels[1].label == F);
  CHECK_FALSE(single.levels[2].label.has_value());
  CHECK(single.levels[2].voters == 0);
}

TEST_CASE("majority tie-breaking depends on the seed only") {
  std::vector<LabelPath> tied{LabelPath::make(R, F), LabelPath::make(IR)};
  std::set<Label> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto a = majority_labels(tied, seed);
    CHECK(a.levels[0].tie);
    CHECK(a.levels[0].label == majority_labels(tied, seed).levels[0].label);
    seen.insert(*a.levels[0].label);
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("property: majority is permutation invariant") {
  SeededRng rng(11);
  const auto paths = oracle::all_paths();
  for (int i = 0; i < 1000; ++i) {
    std::vector<LabelPath> votes;
    const auto n = 1 + rng.uniform_index(7);
    for (std::size_t j = 0; j < n; ++j) votes.push_back(paths[rng.uniform_index(paths.size())]);
    const auto seed = rng.next();
    const auto before = majority_labels(votes, seed);
    rng.shuffle(std::span<LabelPath>(votes));
    const auto after = majority_labels(votes, seed);
    for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
      REQUIRE(before.levels[lvl].label == after.levels[lvl].label);
      REQUIRE(before.levels[lvl].majority_count == after.levels[lvl].majority_count);
      REQUIRE(before.levels[lvl].voters == after.levels[lvl].voters);
      REQUIRE(before.levels[lvl].tie == after.levels[lvl].tie);
      REQUIRE(before.levels[lvl].majority_count <= before.levels[lvl].voters);
    }
  }
}

TEST_CASE("property: normalization is idempotent") {
  SeededRng rng(12);
  for (int i = 0; i < 1000; ++i) {
    RawAnnotation raw{"w", "t", 1 + static_cast<int>(rng.uniform_index(50)), {}, {}};
    raw.labels[0] = rng.uniform_index(2) ? R : IR;
    if (raw.labels[0] == R || rng.uniform_index(2)) raw.labels[1] = rng.uniform_index(2) ? F : NF;
    if (raw.labels[1] == NF || (raw.labels[0] == IR && rng.uniform_index(2))) {
      raw.labels[1] = NF;
      raw.labels[2] = rng.uniform_index(2) ? P : N;
    }
    for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
      if (raw.labels[lvl] && rng.uniform_index(4)) raw.durations[lvl] = rng.uniform01() * 10;
    }
    const auto once = normalize(raw);
    const auto twice = normalize(to_raw(once));
    REQUIRE(once.labels == twice.labels);
    REQUIRE(once.durations == twice.durations);
  }
}

TEST_CASE("synthetic fixture parses with expected shape") {
  testing::SyntheticSpec spec;
  const auto data = testing::make_synthetic(spec);
  IngestReport rep;
  std::istringstream a(data.annotations_jsonl), t(data.tweets_jsonl);
  const auto ds = parse_dataset(a, t, &rep);
  CHECK(ds.workers().size() == 4);
  CHECK(rep.records == 200);
  CHECK(rep.warnings.empty());
  CHECK(ds.tweet_ids(Institution::SU).size() == 50);
}
