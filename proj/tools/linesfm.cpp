// linesfm: batch experiments, stability certificate table and plot data.

#include <linesfm/errors.hpp>
#include <linesfm/experiment.hpp>
#include <linesfm/stability.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

namespace fs = std::filesystem;
using namespace linesfm;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_run(const fs::path& spec_path, const fs::path& out_dir, unsigned workers,
            std::uint64_t seed_offset) {
  ExperimentSpec spec;
  try {
    spec = load_experiment(spec_path);
  } catch (const ConfigError& e) {
    std::cerr << "linesfm run: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const std::string& w : spec.warnings()) std::cerr << "warning: " << w << '\n';

  try {
    fs::create_directories(out_dir);
    BatchOptions opts;
    opts.workers = workers;
    opts.seed_offset = seed_offset;
    opts.run_dir = out_dir / "runs";
    const auto rows = run_batch(spec, opts);

    const fs::path summary = out_dir / (spec.name + "_summary.jsonl");
    std::ofstream out(summary);
    if (!out) throw std::runtime_error("cannot write '" + summary.string() + "'");
    write_summary_jsonl(out, rows);
    std::cerr << "wrote " << rows.size() << " summary rows to " << summary.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "linesfm run: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

int cmd_certificate(const OperatingEnvelope& base, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) {
    std::cerr << "linesfm certificate: need 1 <= n-min <= n-max\n";
    return kExitConfig;
  }
  std::vector<StabilityCertificate> rows;
  for (int n = n_min; n <= n_max; ++n) {
    OperatingEnvelope env = base;
    env.horizon = n;
    try {
      rows.push_back(certificate(env));
    } catch (const std::invalid_argument& e) {
      std::cerr << "linesfm certificate: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  std::cout << "N,delta,mu_max\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("%d,%.6f,%.6f\n", n_min + static_cast<int>(i), rows[i].delta, rows[i].mu_max);
  }
  return 0;
}

int cmd_plotdata(const fs::path& summary_path, const std::string& metric_name) {
  const auto metric = plot_metric_from_string(metric_name);
  if (!metric) {
    std::cerr << "linesfm plotdata: unknown metric '" << metric_name
              << "' (convergence_time, direction_error, depth_error)\n";
    return kExitConfig;
  }
  std::ifstream in(summary_path);
  if (!in) {
    std::cerr << "linesfm plotdata: cannot open '" << summary_path.string() << "'\n";
    return kExitConfig;
  }
  try {
    write_plot_csv(std::cout, aggregate(read_summary_jsonl(in), *metric));
  } catch (const ConfigError& e) {
    std::cerr << "linesfm plotdata: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line structure-from-motion observers: experiments and certificates"};
  app.require_subcommand(1);

  fs::path spec_path;
  fs::path out_dir = "out";
  unsigned workers = 0;
  std::uint64_t seed_offset = 0;
  auto* run = app.add_subcommand("run", "Run a batch experiment from a spec file");
  run->add_option("--spec", spec_path, "Experiment spec file")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads (0 = number of processors)")
      ->capture_default_str();
  run->add_option("--seed-offset", seed_offset, "Added to every run seed")
      ->capture_default_str();

  OperatingEnvelope env;
  int n_min = 2;
  int n_max = 7;
  auto* cert = app.add_subcommand("certificate", "Print the delta / mu_max table");
  cert->add_option("--max-nu", env.max_nu, "Bound on |nu| [m/s]")->capture_default_str();
  cert->add_option("--max-omega", env.max_omega, "Bound on |w| [rad/s]")->capture_default_str();
  cert->add_option("--max-chi", env.max_chi, "Bound on |chi| [1/m]")->capture_default_str();
  cert->add_option("--dt", env.dt, "Sampling period [s]")->capture_default_str();
  cert->add_option("--n-min", n_min, "Smallest horizon")->capture_default_str();
  cert->add_option("--n-max", n_max, "Largest horizon")->capture_default_str();

  fs::path summary_path;
  std::string metric;
  auto* plot = app.add_subcommand("plotdata", "Aggregate a summary file into tidy CSV");
  plot->add_option("--summary", summary_path, "Summary JSONL file")->required();
  plot->add_option("--metric", metric, "convergence_time | direction_error | depth_error")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) return cmd_run(spec_path, out_dir, workers, seed_offset);
  if (*cert) return cmd_certificate(env, n_min, n_max);
  return cmd_plotdata(summary_path, metric);
}
