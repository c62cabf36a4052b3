// Command-line front end: experiment runner, score aggregation, variance
// homogeneity tests, and GP-fit diagnostics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hebo/bench.hpp"
#include "hebo/errors.hpp"
#include "hebo/stats.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hebo::ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

// group,value rows with an optional header line.
hebo::GroupedSamples read_grouped_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::map<std::string, std::vector<double>> by_group;
  std::vector<std::string> group_order;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw hebo::ParseError("stats csv: expected 'group,value' rows");
    const std::string group = line.substr(0, comma);
    const std::string value_str = line.substr(comma + 1);
    char* end = nullptr;
    const double value = std::strtod(value_str.c_str(), &end);
    if (end == value_str.c_str()) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw hebo::ParseError("stats csv: bad value '" + value_str + "'");
    }
    first = false;
    if (by_group.find(group) == by_group.end()) group_order.push_back(group);
    by_group[group].push_back(value);
  }
  hebo::GroupedSamples g;
  for (const auto& name : group_order) {
    const auto& v = by_group[name];
    g.groups.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return g;
}

int cmd_run(const std::string& plan_path, const std::string& out_dir, int threads, bool timing) {
  hebo::bench::Plan plan = hebo::bench::parse_plan(read_file(plan_path));
  if (threads > 0) plan.threads = threads;
  if (timing) plan.record_timing = true;
  const auto result = hebo::bench::run_experiment(plan);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "results.csv", hebo::bench::records_to_csv(result.records));
  write_file(fs::path(out_dir) / "summary.json", result.summary_json + "\n");
  std::cout << result.summary_json << std::endl;
  return 0;
}

int cmd_score(const std::string& in_dir, const std::string& baseline) {
  const auto records = hebo::bench::records_from_csv(read_file((fs::path(in_dir) / "results.csv").string()));
  std::cout << hebo::bench::summarize_records(records, baseline) << std::endl;
  return 0;
}

int cmd_stats(const std::string& test, const std::string& input, const std::string& alternative) {
  hebo::TestResult res;
  if (test == "levene" || test == "fligner") {
    const auto g = read_grouped_csv(input);
    res = (test == "levene") ? hebo::levene_test(g) : hebo::fligner_killeen_test(g);
  } else if (test == "ttest") {
    const auto g = read_grouped_csv(input);
    if (g.groups.size() != 2)
      throw hebo::ValidationError("ttest: input must contain exactly 2 groups");
    hebo::Alternative alt = hebo::Alternative::kTwoSided;
    if (alternative == "greater") alt = hebo::Alternative::kGreater;
    else if (alternative == "less") alt = hebo::Alternative::kLess;
    else if (alternative != "two_sided")
      throw hebo::ValidationError("ttest: alternative must be two_sided|greater|less");
    res = hebo::paired_t_test(g.groups[0], g.groups[1], alt);
  } else {
    throw hebo::ValidationError("unknown test '" + test + "'");
  }
  nlohmann::json j{{"statistic", res.statistic}, {"p_value", res.p_value}, {"dof", res.dof}};
  std::cout << j.dump() << std::endl;
  return 0;
}

int cmd_gpfit(const std::string& function, int seeds, const std::string& toggle, int n_train,
              int n_test) {
  const auto& bb = hebo::bench::find_function(function);
  hebo::bench::GpFitToggle t;
  if (toggle == "warp") t = hebo::bench::GpFitToggle::kInputWarp;
  else if (toggle == "output") t = hebo::bench::GpFitToggle::kOutputTransform;
  else throw hebo::ValidationError("gpfit: toggle must be warp|output");
  const auto cmp = hebo::bench::gp_fit_comparison(bb, seeds, t, n_train, n_test);
  std::cout << hebo::bench::gp_fit_comparison_to_json(cmp) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HEBO: heteroscedastic evolutionary Bayesian optimization toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment plan");
  std::string plan_path, out_dir = "results";
  int threads = 0;
  bool timing = false;
  run->add_option("--plan", plan_path, "Plan JSON file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0 = hardware)");
  run->add_flag("--timing", timing, "Record wall-clock times (makes the CSV nondeterministic)");

  auto* score = app.add_subcommand("score", "Summarize normalized scores from results");
  std::string in_dir, baseline = "random";
  score->add_option("--in", in_dir, "Directory containing results.csv")->required();
  score->add_option("--baseline", baseline, "Baseline solver label");

  auto* stats = app.add_subcommand("stats", "Variance homogeneity and paired t-tests");
  std::string test, input, alternative = "two_sided";
  stats->add_option("--test", test, "levene|fligner|ttest")->required();
  stats->add_option("--input", input, "CSV with group,value rows")->required();
  stats->add_option("--alternative", alternative, "ttest sidedness: two_sided|greater|less");

  auto* gpfit = app.add_subcommand("gpfit", "Held-out GP fit comparison for one component");
  std::string function, toggle;
  int seeds = 20, n_train = 48, n_test = 64;
  gpfit->add_option("--function", function, "Builtin black-box name")->required();
  gpfit->add_option("--seeds", seeds, "Number of repetitions");
  gpfit->add_option("--toggle", toggle, "warp|output")->required();
  gpfit->add_option("--train", n_train, "Training set size");
  gpfit->add_option("--test", n_test, "Held-out set size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(plan_path, out_dir, threads, timing);
    if (score->parsed()) return cmd_score(in_dir, baseline);
    if (stats->parsed()) return cmd_stats(test, input, alternative);
    if (gpfit->parsed()) return cmd_gpfit(function, seeds, toggle, n_train, n_test);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
