#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plankit/config.hpp"
#include "plankit/errors.hpp"
#include "plankit/gradcheck.hpp"
#include "plankit/render.hpp"
#include "plankit/scene_io.hpp"
#include "plankit/simulator.hpp"

extern char** environ;

namespace {

namespace fs = std::filesystem;
using namespace plankit;

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << content;
}

struct CommonOpts {
  std::string config_file;
  std::vector<std::string> sets;

  Config load() const {
    ConfigOverrides overrides;
    overrides.file_path = config_file;
    overrides.env_overrides = config_overrides_from_env(environ);
    for (const std::string& kv : sets) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw ParseError("--set expects key=value, got '" + kv + "'");
      overrides.flag_overrides.emplace_back(kv.substr(0, eq),
                                            std::stod(kv.substr(eq + 1)));
    }
    return load_config(overrides);
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_file, "Config JSON file");
  cmd->add_option("--set", opts.sets, "Override a config key (key=value, repeatable)");
}

int cmd_simulate(const CommonOpts& common, const std::string& scenario_path,
                 const std::string& out_dir, const std::string& policy_name,
                 std::uint64_t seed) {
  const Config config = common.load();
  const Scenario scenario = load_scenario_file(scenario_path);
  const AgentPolicy policy = agent_policy_from_string(policy_name);
  const SimLog log = run_episode(scenario, make_pipeline_planner(config.planner), policy,
                                 seed, kEpisodeTicks, config.planner);
  const MetricReport report =
      evaluate_episode(log.to_trace(), scenario, config.planner.thresholds);

  const fs::path dir(out_dir);
  write_file(dir / "simlog.json", simlog_to_json(log));
  write_file(dir / "metrics.json", metric_report_to_json(report) + "\n");
  std::cout << "score " << report.aggregate << (log.failed ? " (failed)" : "") << "\n";
  return log.failed ? kExitDomainError : kExitOk;
}

int cmd_benchmark(const CommonOpts& common, const std::string& scenario_dir,
                  int generate_per_kind, const std::string& out_dir,
                  const std::string& policy_name, int workers, std::uint64_t seed) {
  const Config config = common.load();
  std::vector<Scenario> scenarios;
  if (generate_per_kind > 0) {
    scenarios = generate_suite(generate_per_kind, config.generator, seed);
  } else if (!scenario_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(scenario_dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      Scenario s = load_scenario_file(file.string());
      if (s.id.empty()) s.id = file.stem().string();
      scenarios.push_back(std::move(s));
    }
  }
  if (scenarios.empty()) {
    std::cerr << "benchmark: no scenarios (use --scenarios DIR or --generate N)\n";
    return kExitUsageError;
  }

  const BenchmarkResult result = run_benchmark(
      scenarios, config.planner, agent_policy_from_string(policy_name), workers);

  const fs::path dir(out_dir);
  write_file(dir / "benchmark.csv", benchmark_csv(result));
  write_file(dir / "benchmark.json", benchmark_json(result));
  std::cout << "scenarios " << result.rows.size() << "  mean_score "
            << result.mean_score << "  failures " << result.failures << "  runtime_s "
            << result.runtime_seconds << "\n";
  return kExitOk;
}

int cmd_gradcheck(const CommonOpts& common, std::uint64_t seed,
                  const std::string& out_path) {
  const Config config = common.load();
  const GradcheckReport report = run_gradcheck(config, seed);
  const std::string json = gradcheck_report_to_json(report);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    write_file(out_path, json);
  }
  return report.all_pass ? kExitOk : kExitDomainError;
}

int cmd_augment_preview(const CommonOpts& common, const std::string& scenario_path,
                        const std::string& augmentor, std::uint64_t seed,
                        const std::string& out_prefix) {
  const Config config = common.load();
  const Scenario scenario = load_scenario_file(scenario_path);
  Rng rng(seed);
  std::optional<AugmentedSample> sample =
      run_augmentor(augmentor, scenario, rng, config.augment);
  if (!sample) {
    std::cerr << "augmentor '" << augmentor << "' is not applicable to this scenario\n";
    return kExitDomainError;
  }
  sample->seed = seed;
  write_file(out_prefix + ".json", save_scenario(sample->scenario));
  write_file(out_prefix + "_before.svg", render_scenario_svg(scenario));
  write_file(out_prefix + "_after.svg", render_scenario_svg(sample->scenario));
  std::cout << sample->augmentor << " polarity "
            << (sample->polarity == Polarity::kPositive ? "positive" : "negative")
            << " gt_valid " << (sample->gt_valid ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_gen_scenarios(const CommonOpts& common, const std::string& kind_name, int count,
                      std::uint64_t seed, const std::string& out_dir) {
  const Config config = common.load();
  const fs::path dir(out_dir);
  std::vector<ScenarioKind> kinds;
  if (kind_name == "all") {
    kinds = all_scenario_kinds();
  } else {
    kinds = {scenario_kind_from_string(kind_name)};
  }
  for (ScenarioKind kind : kinds)
    for (int i = 0; i < count; ++i) {
      const Scenario s = generate_scenario(kind, config.generator, seed + i);
      write_file(dir / (s.id + ".json"), save_scenario(s));
    }
  std::cout << "wrote " << kinds.size() * count << " scenarios to " << out_dir << "\n";
  return kExitOk;
}

int cmd_render(const CommonOpts& common, const std::string& scenario_path,
               const std::string& simlog_path, const std::string& out_path,
               bool with_plan, bool costmap_dump) {
  const Config config = common.load();
  if (!simlog_path.empty()) {
    std::ifstream in(simlog_path, std::ios::binary);
    if (!in) throw ParseError("cannot open simlog '" + simlog_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const SimLog log = simlog_from_json(ss.str());
    std::optional<Scenario> scenario;
    if (!scenario_path.empty()) scenario = load_scenario_file(scenario_path);
    write_file(out_path,
               render_simlog_svg(log, scenario ? &*scenario : nullptr));
    return kExitOk;
  }
  if (scenario_path.empty()) {
    std::cerr << "render: provide --scenario and/or --simlog\n";
    return kExitUsageError;
  }
  const Scenario scenario = load_scenario_file(scenario_path);

  if (costmap_dump) {
    GridSpec spec = config.grid;
    const AgentState& av = scenario.av.current();
    spec.origin = av.pose;
    const Esdf field = esdf(rasterize_nondrivable(scenario, spec), spec);
    write_file(out_path, esdf_to_pgm(field));
    return kExitOk;
  }

  if (with_plan) {
    const Planner planner(config.planner);
    const PlanResult plan = planner.plan(scenario);
    write_file(out_path, render_scenario_svg(scenario, &plan));
  } else {
    write_file(out_path, render_scenario_svg(scenario));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop motion planning sandbox: simulation, benchmarking, "
               "gradient checks, augmentation preview, rendering"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* simulate = app.add_subcommand("simulate", "Run one closed-loop episode");
  std::string scenario_path, out_dir = "out", policy = "non_reactive";
  std::uint64_t seed = 1;
  simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--policy", policy, "non_reactive | reactive");
  simulate->add_option("--seed", seed, "Episode seed");
  add_common(simulate, common);

  auto* benchmark = app.add_subcommand("benchmark", "Run a scenario suite");
  std::string bench_dir;
  int generate_per_kind = 0, workers = 1;
  benchmark->add_option("--scenarios", bench_dir, "Directory of scenario JSON files");
  benchmark->add_option("--generate", generate_per_kind,
                        "Generate N scenarios per kind instead");
  benchmark->add_option("--out", out_dir, "Output directory");
  benchmark->add_option("--policy", policy, "non_reactive | reactive");
  benchmark->add_option("--workers", workers, "Parallel episodes");
  benchmark->add_option("--seed", seed, "Base seed for generated suites");
  add_common(benchmark, common);

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference suite");
  std::string gradcheck_out;
  gradcheck->add_option("--seed", seed, "RNG seed");
  gradcheck->add_option("--out", gradcheck_out, "Report path (stdout otherwise)");
  add_common(gradcheck, common);

  auto* augment = app.add_subcommand("augment-preview", "Apply one augmentor");
  std::string augmentor, out_prefix = "augmented";
  augment->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  augment->add_option("--augmentor", augmentor, "Augmentor name")->required();
  augment->add_option("--seed", seed, "RNG seed");
  augment->add_option("--out", out_prefix, "Output prefix");
  add_common(augment, common);

  auto* gen = app.add_subcommand("gen-scenarios", "Write scenario JSON files");
  std::string kind = "all";
  int count = 1;
  gen->add_option("--kind", kind, "Scenario kind or 'all'");
  gen->add_option("--count", count, "Scenarios per kind");
  gen->add_option("--seed", seed, "Base seed");
  gen->add_option("--out", out_dir, "Output directory")->required();
  add_common(gen, common);

  auto* render = app.add_subcommand("render", "SVG snapshot of a scenario or episode");
  std::string simlog_path, render_out = "render.svg";
  bool with_plan = false, costmap_dump = false;
  render->add_option("--scenario", scenario_path, "Scenario JSON");
  render->add_option("--simlog", simlog_path, "SimLog JSON");
  render->add_option("--out", render_out, "Output SVG (or PGM with --costmap)");
  render->add_flag("--plan", with_plan, "Run the planner and draw the selection");
  render->add_flag("--costmap", costmap_dump, "Dump the drivable-area field as PGM");
  add_common(render, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (simulate->parsed())
      return cmd_simulate(common, scenario_path, out_dir, policy, seed);
    if (benchmark->parsed())
      return cmd_benchmark(common, bench_dir, generate_per_kind, out_dir, policy,
                           workers, seed);
    if (gradcheck->parsed()) return cmd_gradcheck(common, seed, gradcheck_out);
    if (augment->parsed())
      return cmd_augment_preview(common, scenario_path, augmentor, seed, out_prefix);
    if (gen->parsed()) return cmd_gen_scenarios(common, kind, count, seed, out_dir);
    if (render->parsed())
      return cmd_render(common, scenario_path, simlog_path, render_out, with_plan,
                        costmap_dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsageError;
}
