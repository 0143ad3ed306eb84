#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "solace/config.hpp"
#include "solace/report.hpp"

namespace fs = std::filesystem;
using namespace solace;

namespace {

enum Exit { kOk = 0, kConfig = 1, kEnvironment = 2, kRuntime = 3 };

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

// "1..30", "4", "1,3,5..7"
std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const uint64_t lo = std::stoull(part.substr(0, dots)), hi = std::stoull(part.substr(dots + 2));
        if (hi < lo) throw ConfigError("seed range " + part + " is empty");
        for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse seeds '" + text + "'");
    }
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_run(const fs::path& dir, const RunResult& r) {
  const std::string stem = r.scenario + "_" + std::to_string(r.seed);
  std::ostringstream csv, trace;
  write_run_csv(csv, r.frames);
  write_trace_csv(trace, r.trace);
  write_file(dir / (stem + ".csv"), csv.str());
  write_file(dir / (stem + "_trace.csv"), trace.str());
}

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  bool print_config = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "Scenario config file (JSON)")->required();
  cmd->add_option("--set", c.overrides, "Override a config value, key.path=value")->take_all();
  cmd->add_flag("--print-effective-config", c.print_config, "Print the resolved config and exit");
}

// Runs `body`, mapping failures to the documented exit codes.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ChartError& e) {
    std::cerr << "chart error: " << e.what() << '\n';
    return kConfig;
  } catch (const LoadError& e) {
    std::cerr << "environment error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const ValidationError& e) {
    std::cerr << "environment error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntime;
  }
}

Environment load_env_or_throw(const RunConfig& cfg) {
  try {
    return load_environment(cfg.environment);
  } catch (const LoadError&) {
    throw;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Earthquake evacuation simulator"};
  app.require_subcommand(1);

  Common run_opts;
  uint64_t run_seed = 0;
  std::string run_scenario, run_out = ".";
  auto* run = app.add_subcommand("run", "Run one scenario for one seed");
  add_common(run, run_opts);
  run->add_option("--seed", run_seed, "RNG seed (default: config seed)");
  run->add_option("--scenario", run_scenario, "Scenario name (default: first in config)");
  run->add_option("--out", run_out, "Output directory");

  Common batch_opts;
  std::string batch_scenarios, batch_seeds = "1..30", batch_out = ".";
  int batch_threads = 0;
  auto* batch = app.add_subcommand("batch", "Run scenarios x seeds and summarize");
  add_common(batch, batch_opts);
  batch->add_option("--scenarios", batch_scenarios, "Comma-separated scenario names (default: all)");
  batch->add_option("--seeds", batch_seeds, "Seeds, e.g. 1..30 or 1,2,7");
  batch->add_option("--out", batch_out, "Output directory");
  batch->add_option("--threads", batch_threads, "Worker threads (default: SOLACE_THREADS or all cores)");

  ChartSpec chart_spec;
  std::vector<std::string> chart_inputs;
  std::string chart_series = "all", chart_out;
  auto* chart = app.add_subcommand("chart", "Render arrival curves from run CSVs as SVG");
  chart->add_option("inputs", chart_inputs, "Run CSV files")->required();
  chart->add_option("--series", chart_series, "Comma-separated categories (adult,elderly,child,disabled,all)");
  chart->add_option("--out", chart_out, "Output SVG path")->required();
  chart->add_option("--title", chart_spec.title, "Chart title");

  Common validate_opts;
  auto* validate = app.add_subcommand("validate", "Check a config and its environment files");
  add_common(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  auto print_config = [](const RunConfig& cfg) { std::cout << config_to_json(cfg).dump(2) << '\n'; };

  if (*run) {
    return guarded([&] {
      RunConfig cfg = load_config(run_opts.config, run_opts.overrides);
      if (run->count("--seed")) cfg.seed = run_seed;
      for (auto& s : cfg.scenarios) s.seed = cfg.seed;
      if (run_opts.print_config) {
        print_config(cfg);
        return int{kOk};
      }
      const Scenario* sc = run_scenario.empty() ? &cfg.scenarios.front() : cfg.scenario(run_scenario);
      if (!sc) throw ConfigError("scenario '" + run_scenario + "' is not defined in the config");
      const Environment env = load_env_or_throw(cfg);
      const RunResult r = solace::run(*sc, env, cfg.model, cfg.sim);
      write_run(run_out, r);
      const auto& f = r.final_tallies;
      std::cerr << sc->name << " seed " << cfg.seed << ": all-arrived " << f.fraction(Category::All) << ", trapped "
                << f.trapped << ", blocked edges " << r.blocked_edges.size() << '\n';
      return int{kOk};
    });
  }

  if (*batch) {
    return guarded([&] {
      RunConfig cfg = load_config(batch_opts.config, batch_opts.overrides);
      if (batch_opts.print_config) {
        print_config(cfg);
        return int{kOk};
      }
      std::vector<Scenario> chosen;
      if (batch_scenarios.empty()) {
        chosen = cfg.scenarios;
      } else {
        for (const auto& name : split(batch_scenarios, ',')) {
          const Scenario* s = cfg.scenario(name);
          if (!s) throw ConfigError("scenario '" + name + "' is not defined in the config");
          chosen.push_back(*s);
        }
      }
      const auto seeds = parse_seeds(batch_seeds);
      const Environment env = load_env_or_throw(cfg);
      const BatchResult result = batch_run(chosen, seeds, env, cfg.model, cfg.sim, batch_threads);
      for (const auto& r : result.runs) write_run(batch_out, r);
      std::ostringstream summary;
      write_summary_csv(summary, result.summary);
      write_file(fs::path(batch_out) / "summary.csv", summary.str());
      for (const auto& p : result.paired)
        std::cerr << p.first << " > " << p.second << " in " << p.first_greater << "/" << p.n
                  << " paired seeds (mean difference " << p.mean_difference << ")\n";
      return int{kOk};
    });
  }

  if (*chart) {
    return guarded([&] {
      for (const auto& in : chart_inputs) chart_spec.inputs.emplace_back(in);
      chart_spec.series = split(chart_series, ',');
      chart_spec.output = chart_out;
      write_file(chart_spec.output, render_chart(chart_spec));
      return int{kOk};
    });
  }

  if (*validate) {
    return guarded([&] {
      RunConfig cfg = load_config(validate_opts.config, validate_opts.overrides);
      if (validate_opts.print_config) print_config(cfg);
      const Environment env = load_env_or_throw(cfg);
      std::cout << "ok: " << env.buildings.size() << " buildings, " << env.roads.nodes.size() << " road nodes, "
                << env.roads.edges.size() << " road edges, " << env.safe_areas.size() << " safe areas, "
                << env.soil_zones.size() << " soil zones\n";
      return int{kOk};
    });
  }
  return kOk;
}
