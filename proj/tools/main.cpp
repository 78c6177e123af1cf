#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdreach/adapt.hpp"
#include "qdreach/evolve.hpp"
#include "qdreach/experiments.hpp"
#include "qdreach/io.hpp"
#include "qdreach/svg.hpp"

namespace fs = std::filesystem;

namespace qdreach {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw contract_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed while writing " + path.string());
}

Repertoire load_repertoire(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw contract_error("cannot open " + path);
  return Repertoire::load(in);
}

struct DomainSetup {
  std::unique_ptr<Domain> domain;
  std::string canonical_json;
};

DomainSetup make_domain(const std::string& name, const RunOptions& opts, const GapConfig& gap) {
  if (name == "throw") {
    auto domain = std::make_unique<ThrowDomain>(opts.arm, opts.throw_cfg, gap);
    std::string canonical = domain_config_json(*domain);
    return {std::move(domain), std::move(canonical)};
  }
  if (name == "lever") {
    auto domain = std::make_unique<LeverDomain>(opts.arm, opts.lever_cfg, gap);
    std::string canonical = domain_config_json(*domain);
    return {std::move(domain), std::move(canonical)};
  }
  throw contract_error("unknown domain \"" + name + "\"");
}

void check_domain_match(const Repertoire& rep, const Domain& domain) {
  require(rep.genotype_dim() == domain.genotype_dim(),
          "repertoire/domain genotype dimension mismatch");
  require(rep.behavior_dim() == domain.behavior_dim(),
          "repertoire/domain behavior dimension mismatch");
  require(rep.control_dims() == domain.control_dims(),
          "repertoire/domain control dimension mismatch");
}

Vec parse_target(const std::string& text, const Repertoire& rep) {
  std::vector<double> vals;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw contract_error("bad --target component \"" + cell + "\"");
    }
  }
  const auto& dims = rep.control_dims();
  require(vals.size() == dims.size(), "target needs one value per control dimension");
  Vec target = Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto d = dims[i];
    require(target[static_cast<Eigen::Index>(i)] >= rep.bounds().lo[d] &&
                target[static_cast<Eigen::Index>(i)] <= rep.bounds().hi[d],
            "target outside the declared behavior bounds");
  }
  return target;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw contract_error("non-numeric cell \"" + cell + "\" in " + path);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Shared command-line state; subcommand handlers read what they declared.
struct Cli {
  std::string config_path;
  std::string gap_path;
  std::string out_dir = "out";
  std::string domain = "throw";
  std::uint64_t seed = 0;
  bool seed_given = false;

  std::string repertoire_path;
  int generations = -1;
  int population_size = -1;
  bool random_baseline = false;
  std::string target_text;
  int target_count = 100;
  int trials = 0;
  std::string report_csv;
  std::string curves_csv;

  RunOptions options() const {
    RunOptions opts;
    if (!config_path.empty()) opts = parse_run_options(read_file(config_path));
    if (seed_given) opts.qd.seed = seed;
    return opts;
  }

  GapConfig gap(const RunOptions& opts) const {
    GapConfig gap;
    if (!gap_path.empty()) gap = parse_gap_config(read_file(gap_path), opts.arm.joint_count);
    return gap;
  }
};

int cmd_evolve(const Cli& cli) {
  RunOptions opts = cli.options();
  if (cli.generations >= 0) opts.qd.generations = cli.generations;
  if (cli.population_size > 0) opts.qd.population_size = cli.population_size;
  opts.qd.check();
  const DomainSetup setup = make_domain(cli.domain, opts, cli.gap(opts));

  auto [repertoire, report] = cli.random_baseline ? run_random_baseline(opts.qd, *setup.domain)
                                                  : run_qd(opts.qd, *setup.domain);

  fs::create_directories(cli.out_dir);
  {
    std::ostringstream buf;
    repertoire.save(buf);
    write_file(fs::path(cli.out_dir) / "repertoire.jsonl", buf.str());
  }
  {
    std::ostringstream buf;
    write_report_csv(buf, report);
    write_file(fs::path(cli.out_dir) / "report.csv", buf.str());
  }
  write_file(fs::path(cli.out_dir) / "metadata.json",
             run_metadata_json(cli.random_baseline ? "evolve-random" : "evolve", opts.qd,
                               setup.domain->name(), config_hash_hex(setup.canonical_json),
                               report.wall_seconds));
  return 0;
}

int cmd_reach(const Cli& cli) {
  const auto start = std::chrono::steady_clock::now();
  RunOptions opts = cli.options();
  const Repertoire repertoire = load_repertoire(cli.repertoire_path);
  const DomainSetup setup = make_domain(cli.domain, opts, cli.gap(opts));
  check_domain_match(repertoire, *setup.domain);

  std::vector<Vec> targets;
  if (!cli.target_text.empty())
    targets.push_back(parse_target(cli.target_text, repertoire));
  else
    targets = sample_reach_targets(repertoire, cli.target_count, opts.qd.seed);

  std::vector<ReachTrial> trials;
  trials.reserve(targets.size());
  for (const Vec& target : targets)
    trials.push_back(run_reach_trial(repertoire, *setup.domain, target, opts.jacobian));

  fs::create_directories(cli.out_dir);
  {
    std::ostringstream buf;
    write_reach_csv(buf, trials);
    write_file(fs::path(cli.out_dir) / "reach_summary.csv", buf.str());
  }
  {
    std::ostringstream buf;
    for (const ReachTrial& t : trials) buf << trace_to_json(t.trace) << '\n';
    write_file(fs::path(cli.out_dir) / "reach_traces.jsonl", buf.str());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(fs::path(cli.out_dir) / "metadata.json",
             run_metadata_json("reach", opts.qd, setup.domain->name(),
                               config_hash_hex(setup.canonical_json), wall));
  return 0;
}

int cmd_gapsim(const Cli& cli) {
  const auto start = std::chrono::steady_clock::now();
  RunOptions opts = cli.options();
  const Repertoire repertoire = load_repertoire(cli.repertoire_path);
  const DomainSetup setup = make_domain(cli.domain, opts, cli.gap(opts));
  check_domain_match(repertoire, *setup.domain);

  const GapSimResult result =
      run_gapsim(repertoire, *setup.domain, cli.trials, opts.qd.seed, opts.jacobian);

  fs::create_directories(cli.out_dir);
  {
    std::ostringstream buf;
    write_gapsim_csv(buf, result);
    write_file(fs::path(cli.out_dir) / "gapsim.csv", buf.str());
  }
  {
    std::ostringstream buf;
    write_histogram_csv(buf, result.histogram());
    write_file(fs::path(cli.out_dir) / "gap_histogram.csv", buf.str());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(fs::path(cli.out_dir) / "metadata.json",
             run_metadata_json("gapsim", opts.qd, setup.domain->name(),
                               config_hash_hex(setup.canonical_json), wall));
  return 0;
}

int cmd_update(const Cli& cli) {
  const auto start = std::chrono::steady_clock::now();
  RunOptions opts = cli.options();
  const Repertoire repertoire = load_repertoire(cli.repertoire_path);
  const DomainSetup setup = make_domain(cli.domain, opts, cli.gap(opts));
  check_domain_match(repertoire, *setup.domain);

  const UpdateStudyResult result =
      run_update_study(repertoire, *setup.domain, cli.trials, opts.qd.seed, opts.jacobian);

  fs::create_directories(cli.out_dir);
  {
    std::ostringstream buf;
    write_update_csv(buf, result);
    write_file(fs::path(cli.out_dir) / "update_curves.csv", buf.str());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(fs::path(cli.out_dir) / "metadata.json",
             run_metadata_json("update", opts.qd, setup.domain->name(),
                               config_hash_hex(setup.canonical_json), wall));
  return 0;
}

int cmd_stats(const Cli& cli) {
  const Repertoire repertoire = load_repertoire(cli.repertoire_path);
  fs::create_directories(cli.out_dir);

  const auto& dims = repertoire.control_dims();
  SvgPlot coverage("Repertoire coverage (" + std::to_string(repertoire.size()) + " actions)",
                   dims.empty() ? "behavior[0]" : "behavior[" + std::to_string(dims[0]) + "]",
                   dims.size() < 2 ? "behavior[1]" : "behavior[" + std::to_string(dims[1]) + "]");
  std::vector<std::pair<double, double>> points;
  if (dims.size() >= 2) {
    points.reserve(static_cast<std::size_t>(repertoire.size()));
    for (const Individual& ind : repertoire.individuals()) {
      const Vec b = ind.compensated();
      points.emplace_back(b[dims[0]], b[dims[1]]);
    }
    coverage.set_x_range(repertoire.bounds().lo[dims[0]], repertoire.bounds().hi[dims[0]]);
    coverage.set_y_range(repertoire.bounds().lo[dims[1]], repertoire.bounds().hi[dims[1]]);
  }
  coverage.add_scatter("", "#1f77b4", std::move(points));
  write_file(fs::path(cli.out_dir) / "coverage.svg", coverage.render());

  if (!cli.report_csv.empty()) {
    const auto rows = read_numeric_csv(cli.report_csv);
    std::vector<std::pair<double, double>> size_curve;
    size_curve.reserve(rows.size());
    for (const auto& row : rows) {
      require(row.size() >= 2, "report rows need generation and archive_size");
      size_curve.emplace_back(row[0], row[1]);
    }
    SvgPlot progress("Archive growth", "generation", "archive size");
    progress.add_line("archive size", "#1f77b4", std::move(size_curve));
    write_file(fs::path(cli.out_dir) / "progress.svg", progress.render());
  }

  if (!cli.curves_csv.empty()) {
    const auto rows = read_numeric_csv(cli.curves_csv);
    std::vector<std::pair<double, double>> full_err, ao_err, full_fail, ao_fail;
    for (const auto& row : rows) {
      require(row.size() >= 5, "update curve rows need five columns");
      full_err.emplace_back(row[0], row[1]);
      full_fail.emplace_back(row[0], row[2]);
      ao_err.emplace_back(row[0], row[3]);
      ao_fail.emplace_back(row[0], row[4]);
    }
    SvgPlot errors("Repertoire error under sequential trials", "trial", "mean error");
    errors.add_line("full updates", "#1f77b4", std::move(full_err));
    errors.add_line("action only", "#d62728", std::move(ao_err));
    write_file(fs::path(cli.out_dir) / "update_errors.svg", errors.render());

    SvgPlot failing("Failing-action ratio under sequential trials", "trial", "failing ratio");
    failing.set_y_range(0.0, 1.0);
    failing.add_line("full updates", "#1f77b4", std::move(full_fail));
    failing.add_line("action only", "#d62728", std::move(ao_fail));
    write_file(fs::path(cli.out_dir) / "update_failing.svg", failing.render());
  }
  return 0;
}

}  // namespace
}  // namespace qdreach

int main(int argc, char** argv) {
  using namespace qdreach;

  CLI::App app{"Action repertoires: quality-diversity search plus Jacobian-based adaptation"};
  app.require_subcommand(1);

  Cli cli;
  app.add_option("--config", cli.config_path, "JSON configuration document")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", cli.seed, "run seed (overrides the config)");
  app.add_option("--out", cli.out_dir, "output directory (default: out)");
  app.add_option("--domain", cli.domain, "evaluation domain")
      ->check(CLI::IsMember({"throw", "lever"}));
  app.add_option("--gap", cli.gap_path, "reality-gap JSON document")->check(CLI::ExistingFile);

  auto* evolve = app.add_subcommand("evolve", "build a repertoire with the QD search");
  evolve->add_option("--generations", cli.generations, "override the configured generation count");
  evolve->add_option("--population-size", cli.population_size, "override the population size");
  evolve->add_flag("--random-baseline", cli.random_baseline,
                   "replace selection and variation with uniform random genotypes");

  auto* reach_cmd = app.add_subcommand("reach", "drive the arm to behavior-space goals");
  reach_cmd->add_option("--repertoire", cli.repertoire_path, "repertoire JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  reach_cmd->add_option("--target", cli.target_text, "one goal as comma-separated control dims");
  reach_cmd->add_option("--count", cli.target_count, "number of sampled goals (default 100)");

  auto* gapsim = app.add_subcommand("gapsim", "cross an injected reality gap per action");
  gapsim->add_option("--repertoire", cli.repertoire_path, "repertoire JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  gapsim->add_option("--trials", cli.trials, "actions sampled without replacement")
      ->default_val(1000);

  auto* update = app.add_subcommand("update", "sequential trials with repertoire updates");
  update->add_option("--repertoire", cli.repertoire_path, "repertoire JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  update->add_option("--trials", cli.trials, "sequential trial count")->default_val(50);

  auto* stats = app.add_subcommand("stats", "emit SVG plots for a repertoire and CSVs");
  stats->add_option("--repertoire", cli.repertoire_path, "repertoire JSONL file")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--report", cli.report_csv, "per-generation report CSV to plot")
      ->check(CLI::ExistingFile);
  stats->add_option("--curves", cli.curves_csv, "update-study curve CSV to plot")
      ->check(CLI::ExistingFile);

  for (auto* sub : {evolve, reach_cmd, gapsim, update, stats}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cli.seed_given = seed_opt->count() > 0;

  try {
    if (evolve->parsed()) return cmd_evolve(cli);
    if (reach_cmd->parsed()) return cmd_reach(cli);
    if (gapsim->parsed()) return cmd_gapsim(cli);
    if (update->parsed()) return cmd_update(cli);
    if (stats->parsed()) return cmd_stats(cli);
  } catch (const contract_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;  // no subcommand matched; require_subcommand should prevent this
}
