#pragma once

#include <linesfm/sim.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace linesfm {

/// Batch description read from a flat `key = value` file. See docs/formats.md.
struct ExperimentSpec {
  std::string name = "experiment";
  int runs = 1;
  /// Fields other than seed, noise_std and trajectory are shared by every run.
  ScenarioConfig scenario;
  std::vector<double> noise_levels{0.0};
  std::vector<Trajectory> trajectories{Trajectory::Excitation};
  std::vector<ObserverConfig> observers;
  /// Write one CSV per run under <out>/runs/.
  bool write_runs = true;

  /// Throws ConfigError on an inconsistent spec.
  void validate() const;
  /// Human-readable warnings, e.g. MHO weights above the certified bound.
  [[nodiscard]] std::vector<std::string> warnings() const;
};

/// Throws ConfigError with the offending line number.
ExperimentSpec parse_experiment(std::istream& in);
/// Throws ConfigError if the file cannot be opened or parsed.
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// One observer on one run.
struct SummaryRow {
  std::uint64_t seed = 0;
  std::string observer;
  ObserverConfig config;
  Trajectory trajectory = Trajectory::Excitation;
  double noise_std = 0.0;
  std::optional<double> convergence_time;
  double eps_d = 0.0;
  double eps_l = 0.0;
  std::optional<std::string> failure;
  int solver_calls = 0;
  int solver_nonconverged = 0;
  int cost_above_prediction = 0;
  int fallbacks = 0;
};

struct BatchOptions {
  unsigned workers = 0;  ///< 0 selects the hardware concurrency
  std::uint64_t seed_offset = 0;
  /// When set, per-run CSVs are written here (if the spec asks for them).
  std::optional<std::filesystem::path> run_dir;
};

/// Seed of run i is spec.scenario.seed + seed_offset + i, identical across the noise and
/// trajectory sweeps. Rows come back ordered by (trajectory, noise, run, observer) no matter
/// how the workers interleave.
std::vector<SummaryRow> run_batch(const ExperimentSpec& spec, const BatchOptions& options = {});

/// File stem used for the per-run CSV of one run.
std::string run_file_stem(Trajectory trajectory, double noise_std, std::uint64_t seed);

void write_summary_jsonl(std::ostream& os, const std::vector<SummaryRow>& rows);
/// Throws ConfigError on malformed lines.
std::vector<SummaryRow> read_summary_jsonl(std::istream& in);

enum class PlotMetric { ConvergenceTime, DirectionError, DepthError };

/// "convergence_time", "direction_error" or "depth_error"; nullopt otherwise.
std::optional<PlotMetric> plot_metric_from_string(std::string_view name);

struct PlotRow {
  std::string observer;
  std::string trajectory;
  double noise_std = 0.0;
  int runs = 0;
  int valid = 0;  ///< finite values (converged runs for convergence_time)
  std::optional<double> median;
  std::optional<double> mean;
};

/// Groups by (observer, trajectory, noise_std) in order of first appearance.
std::vector<PlotRow> aggregate(const std::vector<SummaryRow>& rows, PlotMetric metric);
void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows);

/// Median of the values, averaging the two middle ones for even counts. nullopt when empty.
std::optional<double> median(std::vector<double> values);

}  // namespace linesfm
