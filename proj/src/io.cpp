#include "annodiff/io.hpp"

#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "annodiff/random.hpp"

namespace annodiff::io {

using nlohmann::json;
using nlohmann::ordered_json;

DifficultyConfig RunConfig::difficulty() const {
  DifficultyConfig d;
  d.certainty.split_ratio = split_ratio;
  d.certainty.metric = certainty_metric;
  d.certainty.k = k_certainty;
  d.certainty.smoothing = smoothing;
  d.certainty.seed = mix_seed(seed, std::string_view("certainty"));
  d.seed = mix_seed(seed, std::string_view("majority"));
  return d;
}

SimulationConfig RunConfig::simulation() const {
  SimulationConfig s;
  s.institutions = institutions;
  s.metrics = metrics;
  s.sizes = sizes;
  s.k_grid = k_grid;
  s.epsilon = epsilon;
  s.seed = mix_seed(seed, std::string_view("simulation"));
  s.selection = selection;
  return s;
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["dataset"] = c.dataset_path;
  j["tweets"] = c.tweets_path;
  auto& insts = j["institutions"] = ordered_json::array();
  for (auto i : c.institutions) insts.push_back(std::string(to_string(i)));
  auto& metrics = j["metrics"] = ordered_json::array();
  for (auto m : c.metrics) metrics.push_back(std::string(to_string(m)));
  j["certainty_metric"] = std::string(to_string(c.certainty_metric));
  j["smoothing"] = c.smoothing;
  j["k_certainty"] = c.k_certainty;
  j["k_grid"] = c.k_grid;
  j["sizes"] = c.sizes;
  j["epsilon"] = c.epsilon;
  j["split"] = c.split_ratio;
  j["seed"] = c.seed;
  j["selection"] = c.selection == TrainingSelection::FirstN ? "first" : "sampled";
  j["alpha"] = c.alpha;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  try {
    c.dataset_path = j.at("dataset").get<std::string>();
    c.tweets_path = j.at("tweets").get<std::string>();
    c.institutions.clear();
    for (const auto& s : j.at("institutions")) {
      auto i = parse_institution(s.get<std::string>());
      if (!i) throw FormatError("unknown institution in config");
      c.institutions.push_back(*i);
    }
    c.metrics.clear();
    for (const auto& s : j.at("metrics")) {
      auto m = parse_metric(s.get<std::string>());
      if (!m) throw FormatError("unknown metric in config");
      c.metrics.push_back(*m);
    }
    auto cm = parse_metric(j.at("certainty_metric").get<std::string>());
    if (!cm) throw FormatError("unknown certainty metric in config");
    c.certainty_metric = *cm;
    c.smoothing = j.at("smoothing").get<double>();
    c.k_certainty = j.at("k_certainty").get<std::size_t>();
    c.k_grid = j.at("k_grid").get<std::vector<std::size_t>>();
    c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    c.epsilon = j.at("epsilon").get<double>();
    c.split_ratio = j.at("split").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.selection = j.at("selection").get<std::string>() == "sampled" ? TrainingSelection::Sampled
                                                                     : TrainingSelection::FirstN;
    c.alpha = j.at("alpha").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad config record: ") + e.what());
  }
  return c;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

namespace {

void write_config_line(std::ostream& os, const RunConfig& config) {
  os << "# config: " << to_json(config).dump() << '\n';
}

// Data rows of a CSV: comment lines and the header are skipped.
std::vector<std::vector<std::string>> data_rows(std::istream& is, std::size_t columns, const char* what) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != columns) {
      throw FormatError(fmt::format("{} line {}: expected {} fields, got {}", what, lineno, columns, fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(fmt::format("{}: not a number: '{}'", what, s));
  }
}

}  // namespace

void write_scores_csv(std::ostream& os, const RunConfig& config, const std::vector<DifficultyReport>& reports) {
  write_config_line(os, config);
  os << "institution,tweet_id,A,C,L,ds,class,c_imputed\n";
  for (const auto& r : reports) {
    for (const auto& s : r.scores) {
      os << fmt::format("{},{},{:.10f},{:.10f},{:.10f},{:.10f},{},{}\n", to_string(s.institution),
                        csv_field(s.tweet_id), s.agreement, s.certainty, s.cost, s.ds, to_string(s.cls),
                        s.certainty_imputed ? 1 : 0);
    }
  }
}

std::vector<DifficultyScore> read_scores_csv(std::istream& is) {
  std::vector<DifficultyScore> out;
  for (const auto& f : data_rows(is, 8, "scores.csv")) {
    DifficultyScore s;
    auto inst = parse_institution(f[0]);
    auto cls = parse_difficulty_class(f[6]);
    if (!inst || !cls) throw FormatError("scores.csv: bad institution or class");
    s.institution = *inst;
    s.tweet_id = f[1];
    s.agreement = parse_double(f[2], "scores.csv A");
    s.certainty = parse_double(f[3], "scores.csv C");
    s.cost = parse_double(f[4], "scores.csv L");
    s.ds = parse_double(f[5], "scores.csv ds");
    s.cls = *cls;
    s.certainty_imputed = f[7] == "1";
    out.push_back(std::move(s));
  }
  return out;
}

void write_outcomes_csv(std::ostream& os, const RunConfig& config, const std::vector<OutcomeRecord>& outcomes) {
  write_config_line(os, config);
  os << "institution,metric,phase,n,code,mean_delta\n";
  for (const auto& o : outcomes) {
    os << fmt::format("{},{},{},{},{},{}\n", to_string(o.config.institution), to_string(o.config.metric),
                      to_string(o.config.phase), o.config.n, o.code ? to_char(*o.code) : 'U',
                      o.mean_delta ? fmt::format("{:.6f}", *o.mean_delta) : std::string());
  }
}

std::vector<OutcomeRecord> read_outcomes_csv(std::istream& is) {
  std::vector<OutcomeRecord> out;
  for (const auto& f : data_rows(is, 6, "outcomes.csv")) {
    OutcomeRecord o;
    auto inst = parse_institution(f[0]);
    auto metric = parse_metric(f[1]);
    auto phase = parse_phase(f[2]);
    if (!inst || !metric || !phase || f[4].size() != 1) throw FormatError("outcomes.csv: malformed row");
    o.config = {*inst, *metric, *phase, static_cast<std::size_t>(parse_double(f[3], "outcomes.csv n"))};
    if (f[4] != "U") {
      o.code = parse_outcome(f[4][0]);
      if (!o.code) throw FormatError("outcomes.csv: unknown code '" + f[4] + "'");
      o.mean_delta = parse_double(f[5], "outcomes.csv mean_delta");
    }
    out.push_back(o);
  }
  return out;
}

void write_curves_csv(std::ostream& os, const RunConfig& config, const std::vector<ConfigResult>& curves) {
  write_config_line(os, config);
  os << "institution,metric,phase,n,k,hf1_easy,hf1_difficult\n";
  for (const auto& r : curves) {
    std::set<std::size_t> ks;
    for (const auto& [k, v] : r.easy.points) ks.insert(k);
    for (const auto& [k, v] : r.difficult.points) ks.insert(k);
    auto cell = [](const F1Curve& c, std::size_t k) {
      auto it = c.points.find(k);
      return it == c.points.end() ? std::string() : fmt::format("{:.6f}", it->second);
    };
    const auto& key = r.easy.config;
    for (std::size_t k : ks) {
      os << fmt::format("{},{},{},{},{},{},{}\n", to_string(key.institution), to_string(key.metric),
                        to_string(key.phase), key.n, k, cell(r.easy, k), cell(r.difficult, k));
    }
  }
}

ordered_json stats_json(const RunConfig& config, const SimulationResult& result,
                        const std::vector<InstitutionClassCounts>& classes) {
  ordered_json j;
  j["config"] = to_json(config);
  const auto& counts = result.aggregate.counts;
  for (Phase p : {Phase::Early, Phase::Late}) {
    auto& c = j["counts"][std::string(to_string(p))];
    for (OutcomeCode code : {OutcomeCode::T, OutcomeCode::E, OutcomeCode::D}) {
      c[std::string(1, to_char(code))] = counts.at(p, code);
    }
  }
  j["undefined"] = result.aggregate.undefined;
  auto& tables = j["tables"] = ordered_json::array();
  for (std::size_t i = 0; i < result.aggregate.tables.size(); ++i) {
    const auto& t = result.aggregate.tables[i];
    ordered_json tj;
    tj["name"] = t.name();
    tj["rows"] = {std::string(1, to_char(t.rows[0])), std::string(1, to_char(t.rows[1]))};
    tj["columns"] = {"early", "late"};
    tj["cells"] = {{t.cells[0][0], t.cells[0][1]}, {t.cells[1][0], t.cells[1][1]}};
    tj["p_value"] = result.p_values[i];
    tables.push_back(std::move(tj));
  }
  auto& cc = j["class_counts"] = ordered_json::array();
  for (const auto& ic : classes) {
    for (const auto& c : ic.counts) {
      cc.push_back({{"institution", std::string(to_string(ic.institution))},
                    {"phase", std::string(to_string(c.phase))},
                    {"easy", c.easy},
                    {"difficult", c.difficult}});
    }
  }
  return j;
}

std::optional<json> read_csv_config(std::istream& is) {
  std::string line;
  constexpr std::string_view prefix = "# config: ";
  while (std::getline(is, line)) {
    if (line.starts_with(prefix)) {
      try {
        return json::parse(line.substr(prefix.size()));
      } catch (const json::exception& e) {
        throw FormatError(std::string("bad config line: ") + e.what());
      }
    }
    if (!line.empty() && line.front() != '#') break;
  }
  return std::nullopt;
}

}  // namespace annodiff::io
