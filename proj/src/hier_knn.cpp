#include "annodiff/hier_knn.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "annodiff/random.hpp"

namespace annodiff {

std::vector<double> similarities(const WordSequence& query, std::span<const LevelExample> examples,
                                 SimilarityMetric metric) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back(query.empty() && ex.words.empty() ? 0.0 : nsim(query, ex.words, metric));
  }
  return out;
}

namespace {

std::uint64_t words_hash(const WordSequence& w) {
  std::uint64_t h = fnv1a("");
  for (const auto& word : w.words()) {
    h = fnv1a(word, h);
    h = fnv1a("\x1f", h);
  }
  return h;
}

std::size_t label_slot(LevelLabel l) noexcept {
  return l ? static_cast<std::size_t>(*l) % 2 : 2;
}

}  // namespace

LevelPredictor::LevelPredictor(std::size_t level, std::vector<LevelExample> examples,
                               SimilarityMetric metric, std::size_t k)
    : level_(level), examples_(std::move(examples)), metric_(metric), k_(k) {
  if (level_ >= kLevels) throw std::invalid_argument("LevelPredictor: level out of range");
  content_hash_.reserve(examples_.size());
  for (const auto& ex : examples_) {
    if (ex.label && level_of(*ex.label) != level_) {
      throw std::invalid_argument("LevelPredictor: label from another level");
    }
    content_hash_.push_back(mix_seed(words_hash(ex.words), label_slot(ex.label)));
  }
}

LevelLabel LevelPredictor::slot_label(std::size_t slot) const noexcept {
  if (slot == 2) return std::nullopt;
  return labels_at(level_)[slot];
}

std::vector<std::size_t> LevelPredictor::rank(std::span<const double> sims, std::uint64_t seed) const {
  if (sims.size() != examples_.size()) throw std::invalid_argument("rank: similarity count mismatch");
  std::vector<std::uint64_t> priority(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) priority[i] = mix_seed(seed, content_hash_[i]);

  std::vector<std::size_t> order(examples_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    if (priority[a] != priority[b]) return priority[a] < priority[b];
    return a < b;
  });
  return order;
}

VoteCounts LevelPredictor::count_votes(std::span<const std::size_t> ranking, std::size_t k) const {
  VoteCounts counts{};
  const std::size_t take = std::min(k, ranking.size());
  for (std::size_t i = 0; i < take; ++i) ++counts[label_slot(examples_[ranking[i]].label)];
  return counts;
}

LevelLabel LevelPredictor::vote(std::span<const std::size_t> ranking, std::size_t k,
                                std::uint64_t seed) const {
  const VoteCounts counts = count_votes(ranking, k);
  const std::size_t best = *std::max_element(counts.begin(), counts.end());
  if (best == 0) return std::nullopt;
  std::vector<std::size_t> tied;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (counts[s] == best) tied.push_back(s);
  }
  if (tied.size() == 1) return slot_label(tied.front());
  SeededRng rng(seed);
  return slot_label(tied[rng.uniform_index(tied.size())]);
}

LevelLabel LevelPredictor::predict(const WordSequence& query, std::uint64_t seed) const {
  const auto sims = similarities(query, examples_, metric_);
  return vote(rank(sims, seed), k_, seed);
}

PredictedPath PredictedPath::coerce(std::array<LevelLabel, kLevels> raw) noexcept {
  if (raw[0] != Label::Relevant) raw[1].reset();
  if (raw[1] != Label::NonFactual) raw[2].reset();
  return PredictedPath{raw};
}

PredictedPath PredictedPath::from(const LabelPath& path) noexcept {
  return PredictedPath{{path.at(0), path.at(1), path.at(2)}};
}

HierarchicalKnn HierarchicalKnn::train(std::span<const LabeledTweet> tweets, SimilarityMetric metric,
                                       std::size_t k) {
  if (tweets.empty()) throw std::invalid_argument("HierarchicalKnn: empty training set");
  std::vector<LevelPredictor> levels;
  levels.reserve(kLevels);
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    std::vector<LevelExample> examples;
    examples.reserve(tweets.size());
    for (const auto& t : tweets) examples.push_back({t.words, t.labels.at(lvl)});
    levels.emplace_back(lvl, std::move(examples), metric, k);
  }
  return HierarchicalKnn(std::move(levels));
}

PredictedPath HierarchicalKnn::predict(const WordSequence& query, std::uint64_t seed) const {
  const std::size_t k = levels_[0].k();
  return predict_grid(query, std::span(&k, 1), seed).front();
}

std::vector<PredictedPath> HierarchicalKnn::predict_grid(const WordSequence& query,
                                                         std::span<const std::size_t> ks,
                                                         std::uint64_t seed) const {
  // All levels share the training words, so one similarity pass suffices.
  const auto sims = similarities(query, levels_[0].examples(), levels_[0].metric());
  std::array<std::vector<std::size_t>, kLevels> rankings;
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) rankings[lvl] = levels_[lvl].rank(sims, mix_seed(seed, lvl));

  std::vector<PredictedPath> out;
  out.reserve(ks.size());
  for (std::size_t k : ks) {
    std::array<LevelLabel, kLevels> raw;
    for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
      raw[lvl] = levels_[lvl].vote(rankings[lvl], k, mix_seed(seed, lvl));
    }
    out.push_back(PredictedPath::coerce(raw));
  }
  return out;
}

void HierCounts::add(const LabelPath& truth_path, const PredictedPath& pred) noexcept {
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    const auto t = truth_path.at(lvl);
    const auto& p = pred.levels[lvl];
    truth += t.has_value();
    predicted += p.has_value();
    overlap += t.has_value() && t == p;
  }
}

double HierCounts::precision() const noexcept {
  return predicted == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(predicted);
}

double HierCounts::recall() const noexcept {
  return truth == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(truth);
}

double HierCounts::f1() const noexcept {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double hierarchical_f1(std::span<const std::pair<LabelPath, PredictedPath>> pairs) {
  if (pairs.empty()) throw std::invalid_argument("hierarchical_f1: no pairs");
  HierCounts counts;
  for (const auto& [t, p] : pairs) counts.add(t, p);
  return counts.f1();
}

}  // namespace annodiff
