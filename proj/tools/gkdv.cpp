// gkdv: run experiments from configuration files.
//
//   gkdv simulate|radius|energy|probe|continuation --config FILE [--out DIR]
//   gkdv sweep --config A.toml --config B.toml ... [--out DIR] [--workers N]
//
// The single-experiment subcommands fix the experiment kind. `sweep` runs
// every config as its own experiment, each in DIR/<config stem>.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gkdv/harness/config.hpp"
#include "gkdv/harness/run.hpp"

extern char** environ;

namespace {

namespace fs = std::filesystem;
using namespace gkdv::harness;

std::map<std::string, std::string> gkdv_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || entry.rfind(kEnvPrefix, 0) != 0) continue;
    env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return env;
}

struct Job {
  fs::path config_path;
  ExperimentConfig config;
  fs::path out;
};

struct Options {
  std::vector<std::string> configs;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string format;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

/// Parses every config before anything runs; returns false (after printing
/// all problems) if any of them is invalid.
bool prepare(const Options& opt, const std::string& forced_kind, std::vector<Job>& jobs) {
  const auto env = gkdv_environment();
  std::map<std::string, std::string> overrides;
  if (!forced_kind.empty()) overrides["experiment"] = forced_kind;
  if (opt.seed_set) {
    overrides["initial.seed"] = std::to_string(opt.seed);
    overrides["probe.seed"] = std::to_string(opt.seed);
  }
  if (!opt.format.empty()) overrides["format"] = opt.format;

  bool ok = true;
  std::map<std::string, int> stems;
  for (const auto& path : opt.configs) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
      std::cerr << path << ": cannot read config\n";
      ok = false;
      continue;
    }
    std::stringstream text;
    text << f.rdbuf();
    try {
      Job job{path, parse_config(text.str(), env, overrides), {}};
      if (forced_kind.empty()) {
        std::string stem = fs::path(path).stem().string();
        if (const int n = stems[stem]++; n > 0) stem += "_" + std::to_string(n);
        job.out = fs::path(opt.out.empty() ? "out" : opt.out) / stem;
      } else {
        job.out = opt.out.empty() ? fs::path(job.config.output_dir) : fs::path(opt.out);
      }
      jobs.push_back(std::move(job));
    } catch (const gkdv::ValidationError& e) {
      std::cerr << path << ": invalid configuration\n";
      for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
      ok = false;
    }
  }
  return ok;
}

void report(const Job& job, const RunResult& r) {
  std::ostringstream line;
  line << job.config_path.string() << " -> " << job.out.string() << ": " << status_name(r.exit_code);
  if (!r.message.empty()) line << " (" << r.message << ")";
  line << "\n";
  for (const auto& a : r.artifacts) line << "  " << (job.out / a).string() << "\n";
  (r.exit_code == kExitOk ? std::cout : std::cerr) << line.str();
}

int execute(const Options& opt, const std::string& forced_kind) {
  std::vector<Job> jobs;
  if (!prepare(opt, forced_kind, jobs)) return kExitValidation;

  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run_experiment(jobs[i].config, jobs[i].out);
  };
  const std::size_t n_threads = std::min<std::size_t>(std::max(1u, opt.workers), jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    report(jobs[i], results[i]);
    if (code == kExitOk) code = results[i].exit_code;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gKdV pseudospectral simulator and analyticity lab"};
  app.set_version_flag("--version", std::string(GKDV_VERSION));
  app.require_subcommand(1);

  Options opt;
  std::string chosen;
  for (const char* kind : {"simulate", "radius", "energy", "probe", "continuation", "sweep"}) {
    const bool batch = std::string(kind) == "sweep";
    auto* sub = app.add_subcommand(kind, batch ? "run several configs with a worker pool" : std::string("run a ") + kind + " experiment");
    auto* cfg = sub->add_option("--config", opt.configs, "configuration file")->required()->check(CLI::ExistingFile);
    if (!batch) cfg->expected(1);
    sub->add_option("--out", opt.out, batch ? "parent directory of the per-config outputs" : "output directory");
    sub->add_option("--seed", opt.seed, "seed for the initial data and probe ensembles")
        ->each([&](const std::string&) { opt.seed_set = true; });
    sub->add_option("--format", opt.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", opt.workers, "concurrent experiments")->check(CLI::PositiveNumber);
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    return execute(opt, chosen == "sweep" ? std::string() : chosen);
  } catch (const std::exception& e) {
    std::cerr << "gkdv: " << e.what() << "\n";
    return kExitFailure;
  }
}
