#include "annodiff/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "annodiff/dataset.hpp"
#include "annodiff/difficulty.hpp"
#include "annodiff/io.hpp"
#include "annodiff/simulation.hpp"
#include "annodiff/stats.hpp"

namespace annodiff::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  io::RunConfig config;
  std::string institution = "all";
  std::vector<std::string> metrics{"edit", "subsequence", "substring"};
  std::string certainty_metric = "substring";
  std::string selection = "first";
  std::string out_dir = "out";
};

void add_dataset_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.config.dataset_path, "annotations.jsonl")->required();
  cmd->add_option("--tweets", o.config.tweets_path, "tweets.jsonl")->required();
}

void add_scoring_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--institution", o.institution, "MD, SU or all")->capture_default_str();
  cmd->add_option("--certainty-metric", o.certainty_metric, "similarity used for predictor certainty")
      ->capture_default_str();
  cmd->add_option("--smoothing", o.config.smoothing, "certainty smoothing s")->capture_default_str();
  cmd->add_option("--k-certainty", o.config.k_certainty, "neighbours for certainty kNN")->capture_default_str();
  cmd->add_option("--split", o.config.split_ratio, "per-worker training share for certainty")
      ->capture_default_str();
  cmd->add_option("--seed", o.config.seed, "master seed")->envname("ANNODIFF_SEED")->capture_default_str();
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
}

void add_simulation_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--metrics", o.metrics, "comma-separated: edit,subsequence,substring")->delimiter(',');
  cmd->add_option("--k-grid", o.config.k_grid, "comma-separated neighbour counts")->delimiter(',');
  cmd->add_option("--sizes", o.config.sizes, "comma-separated training sizes (2-10)")->delimiter(',');
  cmd->add_option("--epsilon", o.config.epsilon, "dominance tolerance")->capture_default_str();
  cmd->add_option("--selection", o.selection, "first or sampled")->capture_default_str();
  cmd->add_option("--alpha", o.config.alpha, "significance level")->capture_default_str();
}

void resolve(Options& o) {
  auto& c = o.config;
  if (o.institution == "all") {
    c.institutions = {Institution::MD, Institution::SU};
  } else if (auto i = parse_institution(o.institution)) {
    c.institutions = {*i};
  } else {
    throw InputError(fmt::format("unknown institution '{}'", o.institution));
  }
  c.metrics.clear();
  for (const auto& name : o.metrics) {
    auto m = parse_metric(name);
    if (!m) throw InputError(fmt::format("unknown metric '{}'", name));
    c.metrics.push_back(*m);
  }
  auto cm = parse_metric(o.certainty_metric);
  if (!cm) throw InputError(fmt::format("unknown metric '{}'", o.certainty_metric));
  c.certainty_metric = *cm;
  if (o.selection != "first" && o.selection != "sampled") {
    throw InputError(fmt::format("unknown selection '{}'", o.selection));
  }
  c.selection = o.selection == "sampled" ? TrainingSelection::Sampled : TrainingSelection::FirstN;
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw InputError("--split must lie in (0, 1)");
  if (c.smoothing < 0.0) throw InputError("--smoothing must be non-negative");
  if (c.k_certainty == 0) throw InputError("--k-certainty must be positive");
  if (c.metrics.empty()) throw InputError("--metrics is empty");
  if (c.k_grid.empty()) throw InputError("--k-grid is empty");
  for (auto k : c.k_grid) {
    if (k == 0) throw InputError("--k-grid values must be positive");
  }
  for (auto n : c.sizes) {
    if (n < kMinTrainSize || n > kMaxTrainSize) throw InputError(fmt::format("training size {} outside 2-10", n));
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
}

Dataset load(const io::RunConfig& c, IngestReport* report = nullptr) {
  return load_dataset(c.dataset_path, c.tweets_path, report);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InputError(fmt::format("cannot write {}", path.string()));
  return os;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  IngestReport report;
  const Dataset ds = load(o.config, &report);

  std::map<Institution, std::array<std::size_t, 3>> table;
  for (const auto& w : ds.workers()) ++table[w.institution][static_cast<std::size_t>(w.group)];

  out << fmt::format("{} workers, {} tweets, {} annotations\n", ds.workers().size(), ds.texts().size(),
                     report.records);
  out << fmt::format("{:<6}{:>5}{:>5}{:>5}{:>7}\n", "Group", "S", "M", "L", "Total");
  for (Institution inst : {Institution::MD, Institution::SU}) {
    const auto& row = table[inst];
    out << fmt::format("{:<6}{:>5}{:>5}{:>5}{:>7}\n", to_string(inst), row[0], row[1], row[2],
                       row[0] + row[1] + row[2]);
  }
  out << fmt::format("Irrelevant records with pruned labels: {}\n", report.pruned_records);
  out << fmt::format("Records with missing durations: {}\n", report.missing_duration_records);
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  return kExitOk;
}

std::string percent_cell(std::size_t v, std::size_t total) {
  if (total == 0) return fmt::format("{}", v);
  return fmt::format("{} ({:.1f}%)", v, 100.0 * static_cast<double>(v) / static_cast<double>(total));
}

void print_class_table(std::ostream& out, const std::vector<io::InstitutionClassCounts>& classes) {
  out << "Easy/difficult tweets per stratum\n";
  for (std::size_t p = 0; p < 2; ++p) {
    out << fmt::format("{} phase\n", p == 0 ? "Early" : "Late");
    out << fmt::format("  {:<10}", "");
    for (const auto& ic : classes) out << fmt::format("{:>14}", to_string(ic.institution));
    out << '\n';
    for (DifficultyClass cls : {DifficultyClass::Easy, DifficultyClass::Difficult}) {
      out << fmt::format("  {:<10}", cls == DifficultyClass::Easy ? "Easy" : "Difficult");
      for (const auto& ic : classes) {
        const auto& c = ic.counts[p];
        out << fmt::format("{:>14}", percent_cell(cls == DifficultyClass::Easy ? c.easy : c.difficult,
                                                  c.easy + c.difficult));
      }
      out << '\n';
    }
  }
}

struct Scored {
  Dataset dataset;
  std::vector<DifficultyReport> reports;
  std::map<Institution, StrataSet> strata;
  std::vector<io::InstitutionClassCounts> classes;
};

Scored score_all(const Options& o, std::ostream& err) {
  Scored s{load(o.config), {}, {}, {}};
  for (Institution inst : o.config.institutions) {
    DifficultyReport r;
    try {
      r = difficulty_scores(s.dataset, inst, o.config.difficulty());
    } catch (const stats::DegenerateClustering&) {
      throw InputError(fmt::format("{}: degenerate clustering (all difficulty scores identical)", to_string(inst)));
    }
    for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    StrataSet strata = build_strata(s.dataset, inst, r.scores);
    for (const auto& w : strata.warnings) err << "warning: " << w << '\n';
    s.classes.push_back({inst, class_counts(strata)});
    s.strata.emplace(inst, std::move(strata));
    s.reports.push_back(std::move(r));
  }
  return s;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream& err) {
  const Scored s = score_all(o, err);
  fs::create_directories(o.out_dir);
  auto os = open_output(fs::path(o.out_dir) / "scores.csv");
  io::write_scores_csv(os, o.config, s.reports);
  for (const auto& r : s.reports) {
    std::size_t easy = 0;
    for (const auto& sc : r.scores) easy += sc.cls == DifficultyClass::Easy;
    out << fmt::format("{}: {} tweets scored, {} easy, {} difficult, {} excluded, {} with imputed certainty\n",
                       to_string(r.institution), r.scores.size(), easy, r.scores.size() - easy,
                       r.excluded.size(), r.imputed_certainty);
  }
  print_class_table(out, s.classes);
  return kExitOk;
}

std::string p_text(double p) {
  return p < 0.0001 ? std::string("p<0.0001") : fmt::format("p={:.4f}", p);
}

void print_tables(std::ostream& out, const json& stats, double alpha) {
  bool any = false;
  for (const auto& t : stats.at("tables")) {
    const auto& cells = t.at("cells");
    const auto rows = t.at("rows");
    const double p = t.at("p_value").get<double>();
    out << fmt::format("{}\n", t.at("name").get<std::string>());
    out << fmt::format("  {:<3}{:>7}{:>7}\n", "", "Early", "Late");
    for (std::size_t r = 0; r < 2; ++r) {
      out << fmt::format("  {:<3}{:>7}{:>7}\n", rows[r].get<std::string>(), cells[r][0].get<std::uint64_t>(),
                         cells[r][1].get<std::uint64_t>());
    }
    any = any || p < alpha;
  }
  out << '\n';
  for (const auto& t : stats.at("tables")) {
    const double p = t.at("p_value").get<double>();
    out << fmt::format("{}: {} ({})\n", t.at("name").get<std::string>(),
                       p < alpha ? "significant" : "not significant", p_text(p));
  }
  if (!any) out << fmt::format("no significant differences at alpha={}\n", alpha);
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const Scored s = score_all(o, err);
  const SimulationResult result = run_simulation(s.dataset, s.strata, o.config.simulation());
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  {
    auto os = open_output(dir / "scores.csv");
    io::write_scores_csv(os, o.config, s.reports);
  }
  {
    auto os = open_output(dir / "outcomes.csv");
    io::write_outcomes_csv(os, o.config, result.outcomes);
  }
  {
    auto os = open_output(dir / "curves.csv");
    io::write_curves_csv(os, o.config, result.curves);
  }
  const auto stats = io::stats_json(o.config, result, s.classes);
  {
    auto os = open_output(dir / "stats.json");
    os << stats.dump(2) << '\n';
  }

  out << fmt::format("{} comparisons, {} undefined\n", result.outcomes.size(), result.aggregate.undefined);
  print_tables(out, json::parse(stats.dump()), o.config.alpha);
  return kExitOk;
}

json read_json_file(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw InputError(fmt::format("cannot read {}", p.string()));
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: {}", p.string(), e.what()));
  }
}

int cmd_report(const std::string& dir_name, double alpha, std::ostream& out) {
  const fs::path dir(dir_name);
  const json stats = read_json_file(dir / "stats.json");

  std::ifstream ois(dir / "outcomes.csv");
  if (!ois) throw InputError(fmt::format("cannot read {}", (dir / "outcomes.csv").string()));
  const auto outcomes = io::read_outcomes_csv(ois);
  if (outcomes.empty()) throw InputError("outcomes.csv has no outcomes");

  out << "# Annotation difficulty report\n\n";
  if (auto it = stats.find("class_counts"); it != stats.end() && !it->empty()) {
    out << "## Easy and difficult tweets per stratum\n\n";
    out << "| Institution | Phase | Easy | Difficult |\n|---|---|---|---|\n";
    for (const auto& c : *it) {
      const auto easy = c.at("easy").get<std::size_t>(), diff = c.at("difficult").get<std::size_t>();
      out << fmt::format("| {} | {} | {} | {} |\n", c.at("institution").get<std::string>(),
                         c.at("phase").get<std::string>(), percent_cell(easy, easy + diff),
                         percent_cell(diff, easy + diff));
    }
    out << '\n';
  }

  out << "## Encoded outcomes\n\n";
  std::vector<std::size_t> sizes;
  for (const auto& o : outcomes) {
    if (std::find(sizes.begin(), sizes.end(), o.config.n) == sizes.end()) sizes.push_back(o.config.n);
  }
  std::sort(sizes.begin(), sizes.end());
  for (SimilarityMetric m : all_metrics()) {
    for (Institution inst : {Institution::MD, Institution::SU}) {
      std::map<std::pair<Phase, std::size_t>, char> cells;
      for (const auto& o : outcomes) {
        if (o.config.metric == m && o.config.institution == inst) {
          cells[{o.config.phase, o.config.n}] = o.code ? to_char(*o.code) : 'U';
        }
      }
      if (cells.empty()) continue;
      out << fmt::format("### {} / {}\n\n| |", to_string(m), to_string(inst));
      for (auto n : sizes) out << fmt::format(" {} |", n);
      out << "\n|---|";
      for (std::size_t i = 0; i < sizes.size(); ++i) out << "---|";
      out << '\n';
      for (Phase p : {Phase::Early, Phase::Late}) {
        out << fmt::format("| {} |", p == Phase::Early ? "Early" : "Late");
        for (auto n : sizes) {
          auto c = cells.find({p, n});
          out << fmt::format(" {} |", c == cells.end() ? '-' : c->second);
        }
        out << '\n';
      }
      out << '\n';
    }
  }

  out << "## Outcome proportions\n\n```\n";
  print_tables(out, stats, alpha);
  out << "```\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Annotation difficulty scoring and label-reliability simulation", "annodiff"};
  app.require_subcommand(1);

  Options ingest_opts, score_opts, sim_opts;
  auto* ingest = app.add_subcommand("ingest", "validate a dataset and summarize workers");
  add_dataset_options(ingest, ingest_opts);

  auto* score = app.add_subcommand("score", "compute difficulty scores (scores.csv)");
  add_dataset_options(score, score_opts);
  add_scoring_options(score, score_opts);

  auto* simulate = app.add_subcommand("simulate", "run the PredictorE/PredictorD grid");
  add_dataset_options(simulate, sim_opts);
  add_scoring_options(simulate, sim_opts);
  add_simulation_options(simulate, sim_opts);

  std::string report_dir = "out";
  double report_alpha = 0.05;
  auto* report = app.add_subcommand("report", "render a summary of simulation outputs");
  report->add_option("--out", report_dir, "directory holding stats.json and outcomes.csv")->capture_default_str();
  report->add_option("--alpha", report_alpha, "significance level")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(ingest_opts, out, err);
    if (score->parsed()) {
      resolve(score_opts);
      return cmd_score(score_opts, out, err);
    }
    if (simulate->parsed()) {
      resolve(sim_opts);
      return cmd_simulate(sim_opts, out, err);
    }
    if (report->parsed()) return cmd_report(report_dir, report_alpha, out);
  } catch (const DatasetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace annodiff::cli
