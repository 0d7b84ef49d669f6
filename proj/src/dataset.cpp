#include "annodiff/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "annodiff/random.hpp"

namespace annodiff {

using nlohmann::json;

std::string_view to_string(Institution i) noexcept { return i == Institution::MD ? "MD" : "SU"; }

std::string_view to_string(WorkerGroup g) noexcept {
  switch (g) {
    case WorkerGroup::S: return "S";
    case WorkerGroup::M: return "M";
    case WorkerGroup::L: return "L";
  }
  return "?";
}

std::optional<Institution> parse_institution(std::string_view s) noexcept {
  if (s == "MD") return Institution::MD;
  if (s == "SU") return Institution::SU;
  return std::nullopt;
}

std::optional<WorkerGroup> parse_group(std::string_view s) noexcept {
  if (s == "S") return WorkerGroup::S;
  if (s == "M") return WorkerGroup::M;
  if (s == "L") return WorkerGroup::L;
  return std::nullopt;
}

std::size_t group_size(WorkerGroup g) noexcept {
  switch (g) {
    case WorkerGroup::S: return 50;
    case WorkerGroup::M: return 150;
    case WorkerGroup::L: return 500;
  }
  return 0;
}

std::optional<double> Annotation::total_duration() const {
  double total = 0.0;
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    if (!labels.at(lvl)) continue;
    if (!durations[lvl]) return std::nullopt;
    total += *durations[lvl];
  }
  return total;
}

Annotation normalize(const RawAnnotation& raw) {
  if (!raw.labels[0]) throw std::invalid_argument("missing level-1 label");
  if (raw.order_index < 1) throw std::invalid_argument("order_index must be >= 1");

  auto labels = raw.labels;
  auto durations = raw.durations;
  if (labels[0] == Label::Irrelevant) {
    for (std::size_t lvl = 1; lvl < kLevels; ++lvl) {
      labels[lvl].reset();
      durations[lvl].reset();
    }
  }
  LabelPath path = LabelPath::make(*labels[0], labels[1], labels[2]);

  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    if (!durations[lvl]) continue;
    if (!path.at(lvl)) {
      throw std::invalid_argument(fmt::format("duration given for unlabelled level {}", lvl + 1));
    }
    if (!std::isfinite(*durations[lvl]) || *durations[lvl] < 0.0) {
      throw std::invalid_argument(fmt::format("invalid duration on level {}", lvl + 1));
    }
  }
  return Annotation{raw.worker_id, raw.tweet_id, raw.order_index, path, durations};
}

RawAnnotation to_raw(const Annotation& a) {
  RawAnnotation raw;
  raw.worker_id = a.worker_id;
  raw.tweet_id = a.tweet_id;
  raw.order_index = a.order_index;
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) raw.labels[lvl] = a.labels.at(lvl);
  raw.durations = a.durations;
  return raw;
}

Dataset::Dataset(std::vector<Worker> workers, std::map<std::string, std::string> texts,
                 const TokenizeOptions& opts)
    : workers_(std::move(workers)), texts_(std::move(texts)) {
  std::set<std::string> worker_ids;
  for (auto& w : workers_) {
    if (!worker_ids.insert(w.id).second) {
      throw std::invalid_argument(fmt::format("duplicate worker '{}'", w.id));
    }
    std::sort(w.annotations.begin(), w.annotations.end(),
              [](const Annotation& a, const Annotation& b) { return a.order_index < b.order_index; });
    std::set<std::string> seen;
    for (std::size_t i = 0; i < w.annotations.size(); ++i) {
      const auto& a = w.annotations[i];
      if (a.worker_id != w.id) {
        throw std::invalid_argument(fmt::format("annotation of '{}' filed under '{}'", a.worker_id, w.id));
      }
      if (i > 0 && w.annotations[i - 1].order_index == a.order_index) {
        throw std::invalid_argument(
            fmt::format("worker '{}': duplicate order_index {}", w.id, a.order_index));
      }
      if (!seen.insert(a.tweet_id).second) {
        throw std::invalid_argument(
            fmt::format("worker '{}' labelled tweet '{}' twice", w.id, a.tweet_id));
      }
      if (!texts_.contains(a.tweet_id)) {
        throw std::invalid_argument(fmt::format("unknown tweet '{}'", a.tweet_id));
      }
    }
  }
  std::sort(workers_.begin(), workers_.end(), [](const Worker& a, const Worker& b) { return a.id < b.id; });
  for (std::size_t wi = 0; wi < workers_.size(); ++wi) {
    for (std::size_t ai = 0; ai < workers_[wi].annotations.size(); ++ai) {
      by_tweet_[workers_[wi].annotations[ai].tweet_id].emplace_back(wi, ai);
    }
  }
  for (const auto& [id, text] : texts_) tokens_.emplace(id, tokenize(text, opts));
}

const WordSequence& Dataset::tokens(const std::string& tweet_id) const {
  auto it = tokens_.find(tweet_id);
  if (it == tokens_.end()) throw std::out_of_range("unknown tweet '" + tweet_id + "'");
  return it->second;
}

std::vector<const Annotation*> Dataset::annotations_of(const std::string& tweet_id,
                                                       std::optional<Institution> inst) const {
  std::vector<const Annotation*> out;
  auto it = by_tweet_.find(tweet_id);
  if (it == by_tweet_.end()) return out;
  for (auto [wi, ai] : it->second) {
    if (inst && workers_[wi].institution != *inst) continue;
    out.push_back(&workers_[wi].annotations[ai]);
  }
  return out;
}

std::vector<std::string> Dataset::tweet_ids(Institution inst) const {
  std::set<std::string> ids;
  for (const auto& w : workers_) {
    if (w.institution != inst) continue;
    for (const auto& a : w.annotations) ids.insert(a.tweet_id);
  }
  return {ids.begin(), ids.end()};
}

const Worker* Dataset::find_worker(std::string_view id) const noexcept {
  auto it = std::lower_bound(workers_.begin(), workers_.end(), id,
                             [](const Worker& w, std::string_view v) { return w.id < v; });
  return it != workers_.end() && it->id == id ? &*it : nullptr;
}

DatasetError::DatasetError(std::string source, std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, what)),
      source_(std::move(source)),
      line_(line) {}

namespace {

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw std::invalid_argument(fmt::format("missing field '{}'", key));
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw std::invalid_argument(fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    f(lineno, line);
  }
}

constexpr const char* kLevelKeys[kLevels] = {"l1", "l2", "l3"};

}  // namespace

Dataset parse_dataset(std::istream& annotations, std::istream& tweets, IngestReport* report,
                      const TokenizeOptions& opts, std::string_view annotations_name,
                      std::string_view tweets_name) {
  IngestReport local;
  IngestReport& rep = report ? *report : local;

  std::map<std::string, std::string> texts;
  for_each_line(tweets, [&](std::size_t lineno, const std::string& line) {
    try {
      const json rec = json::parse(line);
      if (!rec.is_object()) throw std::invalid_argument("record is not a JSON object");
      auto id = require_string(rec, "tweet_id");
      auto text = require_string(rec, "text");
      if (!texts.emplace(id, std::move(text)).second) {
        throw std::invalid_argument(fmt::format("duplicate tweet_id '{}'", id));
      }
    } catch (const json::exception& e) {
      throw DatasetError(std::string(tweets_name), lineno, e.what());
    } catch (const std::invalid_argument& e) {
      throw DatasetError(std::string(tweets_name), lineno, e.what());
    }
  });

  std::map<std::string, Worker> workers;
  std::map<std::string, std::set<int>> orders;
  std::set<std::pair<std::string, std::string>> pairs;

  for_each_line(annotations, [&](std::size_t lineno, const std::string& line) {
    try {
      const json rec = json::parse(line);
      if (!rec.is_object()) throw std::invalid_argument("record is not a JSON object");

      RawAnnotation raw;
      raw.worker_id = require_string(rec, "worker_id");
      raw.tweet_id = require_string(rec, "tweet_id");
      const json& order = require(rec, "order_index");
      if (!order.is_number_integer()) throw std::invalid_argument("field 'order_index' must be an integer");
      raw.order_index = order.get<int>();

      const auto inst_name = require_string(rec, "institution");
      const auto inst = parse_institution(inst_name);
      if (!inst) throw std::invalid_argument(fmt::format("unknown institution '{}'", inst_name));
      const auto group_name = require_string(rec, "group");
      const auto group = parse_group(group_name);
      if (!group) throw std::invalid_argument(fmt::format("unknown group '{}'", group_name));

      const json& labels = require(rec, "labels");
      if (!labels.is_object()) throw std::invalid_argument("field 'labels' must be an object");
      for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
        auto it = labels.find(kLevelKeys[lvl]);
        if (it == labels.end() || it->is_null()) continue;
        if (!it->is_string()) throw std::invalid_argument(fmt::format("label '{}' must be a string", kLevelKeys[lvl]));
        const auto name = it->get<std::string>();
        const auto label = parse_label(name);
        if (!label) throw std::invalid_argument(fmt::format("unknown label '{}'", name));
        raw.labels[lvl] = label;
      }

      if (auto dit = rec.find("durations_s"); dit != rec.end() && !dit->is_null()) {
        if (!dit->is_object()) throw std::invalid_argument("field 'durations_s' must be an object");
        for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
          auto it = dit->find(kLevelKeys[lvl]);
          if (it == dit->end() || it->is_null()) continue;
          if (!it->is_number()) throw std::invalid_argument(fmt::format("duration '{}' must be a number", kLevelKeys[lvl]));
          raw.durations[lvl] = it->get<double>();
        }
      }

      const bool pruned = raw.labels[0] == Label::Irrelevant && (raw.labels[1] || raw.labels[2]);
      Annotation anno = normalize(raw);

      if (!texts.contains(anno.tweet_id)) {
        throw std::invalid_argument(fmt::format("tweet '{}' not found in {}", anno.tweet_id, tweets_name));
      }
      if (!pairs.emplace(anno.worker_id, anno.tweet_id).second) {
        throw std::invalid_argument(
            fmt::format("duplicate annotation of tweet '{}' by worker '{}'", anno.tweet_id, anno.worker_id));
      }
      if (!orders[anno.worker_id].insert(anno.order_index).second) {
        throw std::invalid_argument(
            fmt::format("duplicate order_index {} for worker '{}'", anno.order_index, anno.worker_id));
      }

      auto [wit, fresh] = workers.try_emplace(anno.worker_id);
      Worker& w = wit->second;
      if (fresh) {
        w.id = anno.worker_id;
        w.institution = *inst;
        w.group = *group;
      } else if (w.institution != *inst || w.group != *group) {
        throw std::invalid_argument(
            fmt::format("worker '{}' changes institution or group", anno.worker_id));
      }

      ++rep.records;
      rep.pruned_records += pruned;
      rep.missing_duration_records += !anno.total_duration().has_value();
      w.annotations.push_back(std::move(anno));
    } catch (const json::exception& e) {
      throw DatasetError(std::string(annotations_name), lineno, e.what());
    } catch (const std::invalid_argument& e) {
      throw DatasetError(std::string(annotations_name), lineno, e.what());
    }
  });

  std::vector<Worker> list;
  list.reserve(workers.size());
  for (auto& [id, w] : workers) {
    const std::size_t expected = group_size(w.group);
    if (w.annotations.size() != expected) {
      rep.warnings.push_back(fmt::format("worker '{}' (group {}) labelled {} tweets, expected {}", id,
                                         to_string(w.group), w.annotations.size(), expected));
    }
    list.push_back(std::move(w));
  }
  return Dataset(std::move(list), std::move(texts), opts);
}

Dataset load_dataset(const std::filesystem::path& annotations, const std::filesystem::path& tweets,
                     IngestReport* report, const TokenizeOptions& opts) {
  std::ifstream ain(annotations);
  if (!ain) throw DatasetError(annotations.string(), 0, "cannot open file");
  std::ifstream tin(tweets);
  if (!tin) throw DatasetError(tweets.string(), 0, "cannot open file");
  return parse_dataset(ain, tin, report, opts, annotations.string(), tweets.string());
}

MajorityResult majority_labels(std::span<const LabelPath> paths, std::uint64_t seed) {
  MajorityResult result;
  for (std::size_t lvl = 0; lvl < kLevels; ++lvl) {
    const auto candidates = labels_at(lvl);
    std::array<std::size_t, 2> counts{};
    for (const auto& p : paths) {
      if (auto l = p.at(lvl)) ++counts[*l == candidates[0] ? 0 : 1];
    }
    LevelMajority& m = result.levels[lvl];
    m.voters = counts[0] + counts[1];
    if (m.voters == 0) continue;
    m.majority_count = std::max(counts[0], counts[1]);
    m.tie = counts[0] == counts[1];
    if (m.tie) {
      SeededRng rng(mix_seed(seed, lvl));
      m.label = candidates[rng.uniform_index(2)];
    } else {
      m.label = counts[0] > counts[1] ? candidates[0] : candidates[1];
    }
  }
  return result;
}

MajorityResult majority_labels(std::span<const Annotation* const> annos, std::uint64_t seed) {
  std::vector<LabelPath> paths;
  paths.reserve(annos.size());
  for (const Annotation* a : annos) {
    if (a->tweet_id != annos.front()->tweet_id) {
      throw std::invalid_argument("majority_labels: annotations of different tweets");
    }
    paths.push_back(a->labels);
  }
  return majority_labels(paths, seed);
}

}  // namespace annodiff
