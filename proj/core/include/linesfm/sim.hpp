#pragma once

#include <linesfm/line_geometry.hpp>
#include <linesfm/simplex.hpp>
#include <linesfm/types.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace linesfm {

/// Portable deterministic generator: splitmix64 seeding into xoshiro256**.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on the unit sphere.
  Vec3 unit_vector();

 private:
  std::uint64_t s_[4];
};

enum class Trajectory {
  Excitation,
  AlternatingNullNu,               ///< nu = 0 on odd seconds, w = 0 throughout
  AlternatingNullNuWithOmega,      ///< nu = 0 on odd seconds, w != 0
  AlternatingInPlaneNu,            ///< nu . m = 0 on odd seconds, w = 0 throughout
  AlternatingInPlaneNuWithOmega,   ///< nu . m = 0 on odd seconds, w != 0
};

std::string_view to_string(Trajectory t);
/// Accepts the names produced by to_string. Throws ConfigError otherwise.
Trajectory trajectory_from_string(std::string_view name);

struct ScenarioConfig {
  std::uint64_t seed = 0;
  double duration = 10.0;
  double dt = 1.0 / 30.0;
  double cube_side = 5.0;
  double noise_std = 0.0;  ///< std of each Euler angle of the moment perturbation [rad]
  Trajectory trajectory = Trajectory::Excitation;
  double velocity_cap = 0.5;
  /// Lines closer than this are resampled so the bounded camera motion never reaches them.
  double min_depth = 0.5;
  /// Per-component bound (and norm bound) of the random initial chi estimate.
  double init_chi_bound = 0.2;
  SimplexConfig simplex;

  void validate() const;
  [[nodiscard]] int steps() const;
};

class NoiseModel {
 public:
  NoiseModel(double std, std::uint64_t seed);

  /// Rotation from three Euler angles, each uniform on [-std sqrt(3), std sqrt(3)].
  Mat3 sample_rotation();
  [[nodiscard]] double std() const { return std_; }

 private:
  double std_;
  Rng rng_;
};

/// Point uniform in an axis-aligned cube centered at (0, 0, cube_side / 2 + 1), direction
/// uniform on the sphere. Resamples degenerate or too-close lines, at most 100 times.
PluckerLine sample_line(Rng& rng, double cube_side, double min_depth = 0.0);
PluckerLine sample_line(std::uint64_t seed, double cube_side, double min_depth = 0.0);

/// R m with R from `noise`; returns m unchanged when std is zero.
Vec3 perturb_moment(const Vec3& m, NoiseModel& noise);

/// Smooth multi-frequency camera motion with |nu| <= cap and |w| <= cap.
CameraTwist excitation_twist(double t, double cap);

/// True on the odd seconds of the alternating scenarios.
bool non_observable_phase(double t, Trajectory trajectory);

/// Twist for any trajectory; `moment` is the current true moment, used to project nu into
/// the interpretation plane.
CameraTwist scenario_twist(double t, Trajectory trajectory, const Vec3& moment, double cap);

/// Alternating scenarios only. Throws std::invalid_argument for Excitation.
CameraTwist alternating_twist(double t, Trajectory trajectory, const PluckerLine& line,
                              double cap);

/// arccos(d_hat . d), no sign folding.
double direction_error(const PluckerLine& est, const PluckerLine& truth);
/// |l_hat - l|.
double depth_error(const PluckerLine& est, const PluckerLine& truth);

/// Time of the first sample after which the error stays below `threshold` until the end;
/// nullopt if the last sample is not below it (or is NaN).
std::optional<double> detect_convergence(std::span<const double> error_norms, double dt,
                                         double threshold = 0.01);

enum class ObserverKind { MloMP, MloSphere, MhoMP, MhoSphere };

struct ObserverConfig {
  ObserverKind kind = ObserverKind::MloMP;
  double alpha = 1000.0;  ///< MLO gain
  int horizon = 7;        ///< MHO window size N
  double mu = 0.014;      ///< MHO prediction weight

  [[nodiscard]] std::string label() const;
  [[nodiscard]] bool is_mho() const {
    return kind == ObserverKind::MhoMP || kind == ObserverKind::MhoSphere;
  }
  [[nodiscard]] bool is_sphere() const {
    return kind == ObserverKind::MloSphere || kind == ObserverKind::MhoSphere;
  }
};

/// Parses e.g. "mlo_mp alpha=1000" or "mho_mp N=7 mu=0.014". Throws ConfigError.
ObserverConfig parse_observer(std::string_view text);

struct ObserverTrace {
  ObserverConfig config;
  std::vector<PluckerLine> estimate;  ///< NaN-filled after a failure
  std::vector<double> error_norm;     ///< state-space error in the observer's coordinates
  std::vector<double> eps_d;
  std::vector<double> eps_l;
  std::optional<double> convergence_time;
  double eps_d_summary = 0.0;  ///< mean over the second half of the run
  double eps_l_summary = 0.0;
  std::optional<std::string> failure;
  int failure_step = -1;

  int solver_calls = 0;
  int solver_nonconverged = 0;
  int cost_above_prediction = 0;
  int fallbacks = 0;
};

struct RunRecord {
  ScenarioConfig config;
  std::vector<double> time;
  std::vector<PluckerLine> truth;
  std::vector<MPLine> truth_mp;
  std::vector<Vec3> measured;
  std::vector<CameraTwist> input;  ///< input applied from step k to k + 1
  std::vector<bool> non_observable;
  Vec3 init_chi = Vec3::Zero();
  std::vector<ObserverTrace> observers;
};

/// Simulates the plant with Euler steps, injects noise, and steps every observer in lockstep.
RunRecord run_scenario(const ScenarioConfig& config, std::span<const ObserverConfig> observers);

/// Writes one row per step; see docs/formats.md.
void write_run_csv(std::ostream& os, const RunRecord& record);

}  // namespace linesfm
