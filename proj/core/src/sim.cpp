#include <linesfm/sim.hpp>

#include <linesfm/errors.hpp>
#include <linesfm/line_dynamics.hpp>
#include <linesfm/mho.hpp>
#include <linesfm/mlo.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace linesfm {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent random streams of one scenario.
enum Stream : std::uint64_t { kLineStream = 1, kInitStream = 2, kNoiseStream = 3 };

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0xd1b54a32d192ed03ULL);
  for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Vec3 Rng::unit_vector() {
  const double z = uniform(-1.0, 1.0);
  const double az = uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(az), r * std::sin(az), z};
}

std::string_view to_string(Trajectory t) {
  switch (t) {
    case Trajectory::Excitation: return "excitation";
    case Trajectory::AlternatingNullNu: return "alt_null_nu";
    case Trajectory::AlternatingNullNuWithOmega: return "alt_null_nu_omega";
    case Trajectory::AlternatingInPlaneNu: return "alt_inplane_nu";
    case Trajectory::AlternatingInPlaneNuWithOmega: return "alt_inplane_nu_omega";
  }
  return "unknown";
}

Trajectory trajectory_from_string(std::string_view name) {
  for (Trajectory t : {Trajectory::Excitation, Trajectory::AlternatingNullNu,
                       Trajectory::AlternatingNullNuWithOmega, Trajectory::AlternatingInPlaneNu,
                       Trajectory::AlternatingInPlaneNuWithOmega}) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown trajectory '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0 && dt > 0.0)) throw ConfigError("duration and dt must be positive");
  if (!(cube_side > 0.0)) throw ConfigError("cube_side must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
  if (!(velocity_cap > 0.0)) throw ConfigError("velocity_cap must be positive");
  if (!(min_depth >= 0.0)) throw ConfigError("min_depth must be non-negative");
  if (!(init_chi_bound > 0.0)) throw ConfigError("init_chi_bound must be positive");
}

int ScenarioConfig::steps() const { return static_cast<int>(std::lround(duration / dt)); }

NoiseModel::NoiseModel(double std, std::uint64_t seed) : std_(std), rng_(seed, kNoiseStream) {
  if (!(std >= 0.0)) throw std::invalid_argument("noise std must be non-negative");
}

Mat3 NoiseModel::sample_rotation() {
  const double half_width = std_ * std::sqrt(3.0);
  const double a = rng_.uniform(-half_width, half_width);
  const double b = rng_.uniform(-half_width, half_width);
  const double c = rng_.uniform(-half_width, half_width);
  return (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
          Eigen::AngleAxisd(c, Vec3::UnitX()))
      .toRotationMatrix();
}

PluckerLine sample_line(Rng& rng, double cube_side, double min_depth) {
  if (!(cube_side > 0.0)) throw std::invalid_argument("cube_side must be positive");
  const Vec3 center(0.0, 0.0, 0.5 * cube_side + 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Vec3 p = center + Vec3(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                 rng.uniform(-0.5, 0.5)) * cube_side;
    const Vec3 d = rng.unit_vector();
    try {
      PluckerLine line = plucker_from_point_direction(p, d);
      if (line.depth >= min_depth) return line;
    } catch (const DegenerateLine&) {
    }
  }
  throw std::runtime_error("sample_line: no admissible line after 100 attempts");
}

PluckerLine sample_line(std::uint64_t seed, double cube_side, double min_depth) {
  Rng rng(seed, kLineStream);
  return sample_line(rng, cube_side, min_depth);
}

Vec3 perturb_moment(const Vec3& m, NoiseModel& noise) {
  if (noise.std() == 0.0) return m;
  return noise.sample_rotation() * m;
}

CameraTwist excitation_twist(double t, double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("excitation_twist: cap must be positive");
  // Full-speed translation whose direction sweeps the sphere; bounded, zero-mean rotation.
  const double azimuth = 1.3 * t + 0.4;
  const double elevation = 1.1 * std::sin(0.8 * t + 0.9);
  CameraTwist u;
  u.nu = cap * Vec3(std::cos(azimuth) * std::cos(elevation),
                    std::sin(azimuth) * std::cos(elevation), std::sin(elevation));
  const double s = cap / std::sqrt(3.0);
  u.omega = s * Vec3(std::sin(1.1 * t + 2.3), std::sin(1.7 * t + 0.7), std::sin(0.9 * t + 5.2));
  return u;
}

bool non_observable_phase(double t, Trajectory trajectory) {
  if (trajectory == Trajectory::Excitation) return false;
  const auto second = static_cast<long>(std::floor(t + 1e-9));
  return second % 2 == 1;
}

CameraTwist scenario_twist(double t, Trajectory trajectory, const Vec3& moment, double cap) {
  CameraTwist u = excitation_twist(t, cap);
  if (trajectory == Trajectory::Excitation) return u;

  const bool rotating = trajectory == Trajectory::AlternatingNullNuWithOmega ||
                        trajectory == Trajectory::AlternatingInPlaneNuWithOmega;
  if (!rotating) u.omega.setZero();
  if (non_observable_phase(t, trajectory)) {
    const bool null_nu = trajectory == Trajectory::AlternatingNullNu ||
                         trajectory == Trajectory::AlternatingNullNuWithOmega;
    if (null_nu) {
      u.nu.setZero();
    } else {
      const Vec3 m = moment.normalized();
      u.nu -= u.nu.dot(m) * m;
    }
  }
  return u;
}

CameraTwist alternating_twist(double t, Trajectory trajectory, const PluckerLine& line,
                              double cap) {
  if (trajectory == Trajectory::Excitation) {
    throw std::invalid_argument("alternating_twist: not an alternating scenario");
  }
  return scenario_twist(t, trajectory, line.moment, cap);
}

double direction_error(const PluckerLine& est, const PluckerLine& truth) {
  return std::acos(std::clamp(est.direction.dot(truth.direction), -1.0, 1.0));
}

double depth_error(const PluckerLine& est, const PluckerLine& truth) {
  return std::abs(est.depth - truth.depth);
}

std::optional<double> detect_convergence(std::span<const double> error_norms, double dt,
                                         double threshold) {
  if (error_norms.empty()) return std::nullopt;
  std::size_t first_below = error_norms.size();
  for (std::size_t i = error_norms.size(); i-- > 0;) {
    if (!(error_norms[i] < threshold)) break;
    first_below = i;
  }
  if (first_below == error_norms.size()) return std::nullopt;
  return static_cast<double>(first_below) * dt;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string ObserverConfig::label() const {
  switch (kind) {
    case ObserverKind::MloMP: return "mlo_mp_a" + format_number(alpha);
    case ObserverKind::MloSphere: return "mlo_sphere_a" + format_number(alpha);
    case ObserverKind::MhoMP:
      return "mho_mp_N" + std::to_string(horizon) + "_mu" + format_number(mu);
    case ObserverKind::MhoSphere:
      return "mho_sphere_N" + std::to_string(horizon) + "_mu" + format_number(mu);
  }
  return "unknown";
}

ObserverConfig parse_observer(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind;
  if (!(in >> kind)) throw ConfigError("empty observer description");

  ObserverConfig cfg;
  if (kind == "mlo_mp") cfg.kind = ObserverKind::MloMP;
  else if (kind == "mlo_sphere") cfg.kind = ObserverKind::MloSphere;
  else if (kind == "mho_mp") cfg.kind = ObserverKind::MhoMP;
  else if (kind == "mho_sphere") cfg.kind = ObserverKind::MhoSphere;
  else throw ConfigError("unknown observer kind '" + kind + "'");

  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "alpha") {
        cfg.alpha = std::stod(value, &used);
      } else if (key == "N") {
        cfg.horizon = std::stoi(value, &used);
      } else if (key == "mu") {
        cfg.mu = std::stod(value, &used);
      } else {
        throw ConfigError("unknown observer parameter '" + key + "'");
      }
      if (used != value.size()) throw ConfigError("trailing characters in '" + token + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad value in '" + token + "'");
    }
  }
  if (cfg.is_mho()) {
    if (cfg.horizon < 2) throw ConfigError("MHO horizon N must be at least 2");
    if (!(cfg.mu > 0.0)) throw ConfigError("MHO mu must be positive");
  } else if (!(cfg.alpha > 0.0)) {
    throw ConfigError("MLO alpha must be positive");
  }
  return cfg;
}

namespace {

const PluckerLine kNaNLine{Vec3::Constant(kNaN), Vec3::Constant(kNaN), kNaN};

using ObserverState = std::variant<MloStateMP, MloStateSphere, MhoMP, MhoSphere>;

struct SphereAngles {
  double theta;
  double phi;
};

SphereAngles measured_angles(const Vec3& m) {
  if (std::abs(m.z()) > 1.0 - kPoleTolerance) {
    throw SphericalSingularity("measured moment at a pole");
  }
  return {std::atan2(m.y(), m.x()), std::asin(std::clamp(m.z(), -1.0, 1.0))};
}

double sphere_error(const SphereLine& est, const SphereLine& truth) {
  Vec4 d = est.to_vector() - truth.to_vector();
  d[0] = wrap_angle(d[0]);
  return d.norm();
}

class ObserverRunner {
 public:
  ObserverRunner(const ObserverConfig& cfg, const Vec3& y0, const Vec3& chi0, double dt)
      : cfg_(cfg), dt_(dt), state_(make_state(cfg, y0, chi0, dt)) {}

  // Estimate at the initial time, before any update.
  void initial(const Vec3& y0, const SimplexConfig& simplex) {
    if (auto* mho = std::get_if<MhoMP>(&state_)) {
      current_ = mho->update(y0, {}, simplex).state_now;
    } else if (auto* mho_s = std::get_if<MhoSphere>(&state_)) {
      current_sphere_ = mho_s->update(y0, {}, simplex).state_now;
    }
  }

  // Advances from step k (measurement y_k, input u_k) to k + 1 (measurement y_next).
  void advance(const Vec3& y_k, const CameraTwist& u_k, const Vec3& y_next,
               const SimplexConfig& simplex, ObserverTrace& trace) {
    std::visit(
        [&](auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MloStateMP>) {
            s = mlo_mp_step(s, y_k, u_k, dt_);
          } else if constexpr (std::is_same_v<T, MloStateSphere>) {
            const SphereAngles a = measured_angles(y_k);
            s = mlo_sphere_step(s, a.theta, a.phi, u_k, dt_);
          } else {
            const auto est = s.update(y_next, u_k, simplex);
            if (est.optimized) {
              ++trace.solver_calls;
              if (!est.solver.converged) ++trace.solver_nonconverged;
              if (est.cost > est.prediction_cost) ++trace.cost_above_prediction;
              if (est.fallback) ++trace.fallbacks;
            }
            if constexpr (std::is_same_v<T, MhoMP>) {
              current_ = est.state_now;
            } else {
              current_sphere_ = est.state_now;
            }
          }
        },
        state_);
  }

  [[nodiscard]] MPLine mp_estimate() const {
    if (auto* s = std::get_if<MloStateMP>(&state_)) return s->estimate();
    return MPLine::from_vector(current_);
  }

  [[nodiscard]] SphereLine sphere_estimate() const {
    if (auto* s = std::get_if<MloStateSphere>(&state_)) return s->estimate();
    return SphereLine::from_vector(current_sphere_);
  }

 private:
  static ObserverState make_state(const ObserverConfig& cfg, const Vec3& y0, const Vec3& chi0,
                                  double dt) {
    const MPLine guess{y0, chi0};
    switch (cfg.kind) {
      case ObserverKind::MloMP: return MloStateMP{y0, chi0, cfg.alpha};
      case ObserverKind::MloSphere: {
        const SphereLine s = mp_to_sphere(guess);
        return MloStateSphere{s.theta, s.phi, s.eta1, s.eta2, cfg.alpha};
      }
      case ObserverKind::MhoMP: return MhoMP(guess.to_vector(), cfg.horizon, cfg.mu, dt);
      case ObserverKind::MhoSphere:
        return MhoSphere(mp_to_sphere(guess).to_vector(), cfg.horizon, cfg.mu, dt);
    }
    throw std::logic_error("unknown observer kind");
  }

  ObserverConfig cfg_;
  double dt_;
  ObserverState state_;
  Vec6 current_ = Vec6::Zero();
  Vec4 current_sphere_ = Vec4::Zero();
};

void record_estimate(const ObserverConfig& cfg, const ObserverRunner& runner,
                     const MPLine& truth_mp, const PluckerLine& truth, ObserverTrace& trace) {
  PluckerLine est;
  double err = 0.0;
  if (cfg.is_sphere()) {
    const SphereLine s = runner.sphere_estimate();
    err = sphere_error(s, mp_to_sphere(truth_mp));
    est = sphere_to_plucker(s);
  } else {
    const MPLine x = runner.mp_estimate();
    err = (x.to_vector() - truth_mp.to_vector()).norm();
    est = mp_to_plucker(x);
  }
  if (!std::isfinite(err)) throw std::runtime_error("estimate diverged");
  trace.estimate.push_back(est);
  trace.error_norm.push_back(err);
  trace.eps_d.push_back(direction_error(est, truth));
  trace.eps_l.push_back(depth_error(est, truth));
}

void record_failure(ObserverTrace& trace) {
  trace.estimate.push_back(kNaNLine);
  trace.error_norm.push_back(kNaN);
  trace.eps_d.push_back(kNaN);
  trace.eps_l.push_back(kNaN);
}

double second_half_mean(const std::vector<double>& v) {
  const std::size_t start = v.size() / 2;
  if (start >= v.size()) return kNaN;
  double sum = 0.0;
  for (std::size_t i = start; i < v.size(); ++i) sum += v[i];
  return sum / static_cast<double>(v.size() - start);
}

}  // namespace

RunRecord run_scenario(const ScenarioConfig& config, std::span<const ObserverConfig> observers) {
  config.validate();
  const int steps = config.steps();
  const double dt = config.dt;

  RunRecord rec;
  rec.config = config;

  const PluckerLine line0 = sample_line(config.seed, config.cube_side, config.min_depth);
  NoiseModel noise(config.noise_std, config.seed);
  MPLine truth = plucker_to_mp(line0);

  auto measure = [&](const MPLine& x) { return perturb_moment(x.moment, noise); };
  Vec3 y = measure(truth);

  // Random unmeasured substate in the interpretation-plane complement of the measured moment.
  Rng init_rng(config.seed, kInitStream);
  const double b = config.init_chi_bound;
  const Vec3 y0 = y.normalized();
  Vec3 chi0 = Vec3::Zero();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec3 c(init_rng.uniform(-b, b), init_rng.uniform(-b, b), init_rng.uniform(-b, b));
    c -= c.dot(y0) * y0;
    if (c.norm() <= b && c.norm() >= 1e-3) {
      chi0 = c;
      break;
    }
  }
  rec.init_chi = chi0;

  std::vector<ObserverRunner> runners;
  rec.observers.resize(observers.size());
  for (std::size_t i = 0; i < observers.size(); ++i) {
    rec.observers[i].config = observers[i];
    runners.emplace_back(observers[i], y0, chi0, dt);
  }

  auto record_step = [&](int k, const MPLine& x, const Vec3& y_k) {
    rec.time.push_back(k * dt);
    rec.truth_mp.push_back(x);
    rec.truth.push_back(mp_to_plucker(x));
    rec.measured.push_back(y_k);
    rec.non_observable.push_back(non_observable_phase(k * dt, config.trajectory));
  };

  auto observe = [&](std::size_t i, auto&& action) {
    ObserverTrace& trace = rec.observers[i];
    if (trace.failure) {
      record_failure(trace);
      return;
    }
    try {
      action();
      record_estimate(trace.config, runners[i], rec.truth_mp.back(), rec.truth.back(), trace);
    } catch (const std::exception& e) {
      trace.failure = e.what();
      trace.failure_step = static_cast<int>(rec.time.size()) - 1;
      record_failure(trace);
    }
  };

  record_step(0, truth, y);
  for (std::size_t i = 0; i < runners.size(); ++i) {
    observe(i, [&] { runners[i].initial(y0, config.simplex); });
  }

  for (int k = 0; k < steps; ++k) {
    const CameraTwist u =
        scenario_twist(k * dt, config.trajectory, truth.moment, config.velocity_cap);
    rec.input.push_back(u);
    const Vec3 y_k = y;
    truth = euler_step(truth, u, dt);
    y = measure(truth);
    record_step(k + 1, truth, y);
    for (std::size_t i = 0; i < runners.size(); ++i) {
      observe(i, [&] { runners[i].advance(y_k, u, y, config.simplex, rec.observers[i]); });
    }
  }
  // The input after the last sample is never applied; keep the vectors aligned.
  rec.input.push_back(
      scenario_twist(steps * dt, config.trajectory, truth.moment, config.velocity_cap));

  for (ObserverTrace& trace : rec.observers) {
    trace.convergence_time = detect_convergence(trace.error_norm, dt);
    trace.eps_d_summary = second_half_mean(trace.eps_d);
    trace.eps_l_summary = second_half_mean(trace.eps_l);
  }
  return rec;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << ',' << buf;
}

void put3(std::ostream& os, const Vec3& v) {
  put(os, v.x());
  put(os, v.y());
  put(os, v.z());
}

}  // namespace

void write_run_csv(std::ostream& os, const RunRecord& rec) {
  os << "step,t,non_observable,nu_x,nu_y,nu_z,omega_x,omega_y,omega_z,"
        "true_dx,true_dy,true_dz,true_mx,true_my,true_mz,true_l,meas_mx,meas_my,meas_mz";
  for (const ObserverTrace& tr : rec.observers) {
    const std::string p = tr.config.label();
    os << ',' << p << "_dx," << p << "_dy," << p << "_dz," << p << "_mx," << p << "_my," << p
       << "_mz," << p << "_l," << p << "_err," << p << "_eps_d," << p << "_eps_l";
  }
  os << '\n';
  for (std::size_t k = 0; k < rec.time.size(); ++k) {
    os << k;
    put(os, rec.time[k]);
    os << ',' << (rec.non_observable[k] ? 1 : 0);
    put3(os, rec.input[k].nu);
    put3(os, rec.input[k].omega);
    put3(os, rec.truth[k].direction);
    put3(os, rec.truth[k].moment);
    put(os, rec.truth[k].depth);
    put3(os, rec.measured[k]);
    for (const ObserverTrace& tr : rec.observers) {
      put3(os, tr.estimate[k].direction);
      put3(os, tr.estimate[k].moment);
      put(os, tr.estimate[k].depth);
      put(os, tr.error_norm[k]);
      put(os, tr.eps_d[k]);
      put(os, tr.eps_l[k]);
    }
    os << '\n';
  }
}

}  // namespace linesfm
