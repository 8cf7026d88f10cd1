#pragma once

#include <linesfm/errors.hpp>
#include <linesfm/line_dynamics.hpp>
#include <linesfm/line_geometry.hpp>
#include <linesfm/simplex.hpp>
#include <linesfm/types.hpp>

#include <Eigen/Core>

#include <cstddef>
#include <deque>
#include <stdexcept>

namespace linesfm {

/// Sliding memory of the last N+1 measured moments and the N inputs between them.
class MemoryWindow {
 public:
  explicit MemoryWindow(int horizon);

  /// Appends a measurement. `u_prev` is the input applied since the previous
  /// measurement and is ignored for the very first sample. The moment is renormalized.
  void push(const Vec3& y, const CameraTwist& u_prev);

  [[nodiscard]] int horizon() const { return horizon_; }
  [[nodiscard]] bool warm() const {
    return measurements_.size() == static_cast<std::size_t>(horizon_) + 1;
  }
  [[nodiscard]] std::size_t size() const { return measurements_.size(); }
  [[nodiscard]] const std::deque<Vec3>& measurements() const { return measurements_; }
  [[nodiscard]] const std::deque<CameraTwist>& inputs() const { return inputs_; }

  /// True when every stored input has exactly zero linear velocity.
  [[nodiscard]] bool translation_free() const;

 private:
  int horizon_;
  std::deque<Vec3> measurements_;
  std::deque<CameraTwist> inputs_;
};

/// Moment-point model: decision vector (m, chi), m measured.
struct MPModel {
  static constexpr int kDim = 6;
  static constexpr int kMeasuredDim = 3;
  using State = Eigen::Matrix<double, kDim, 1>;

  static State project(const State& x) { return project_mp(MPLine::from_vector(x)).to_vector(); }
  static State step(const State& x, const CameraTwist& u, double dt) {
    return euler_step(MPLine::from_vector(x), u, dt).to_vector();
  }
  static Vec3 measure(const State& x) { return x.head<3>(); }
  static State difference(const State& a, const State& b) { return a - b; }
};

/// Spherical model: decision vector (theta, phi, eta1, eta2); the moment m_S(theta, phi)
/// is compared to the measured moment.
struct SphereModel {
  static constexpr int kDim = 4;
  static constexpr int kMeasuredDim = 2;
  using State = Eigen::Matrix<double, kDim, 1>;

  static State project(const State& x) {
    State p = x;
    p[0] = wrap_angle(x[0]);
    return p;
  }
  static State step(const State& x, const CameraTwist& u, double dt) {
    return euler_step_sphere(SphereLine::from_vector(x), u, dt).to_vector();
  }
  static Vec3 measure(const State& x) { return sphere_basis(x[0], x[1]).m_s; }
  static State difference(const State& a, const State& b) {
    State d = a - b;
    d[0] = wrap_angle(d[0]);
    return d;
  }
};

/// Cost assigned to candidates whose propagation leaves the model's domain.
inline constexpr double kInfeasibleCost = 1e12;

/// mu |candidate - prediction|^2 + sum_i |y_i - h(x_i)|^2 with x_i propagated from the
/// (projected) candidate through the stored inputs. Requires a warm window.
template <class Model>
double horizon_cost(const typename Model::State& candidate, const MemoryWindow& window,
                    const typename Model::State& prediction, double mu, double dt) {
  if (!window.warm()) {
    throw std::logic_error("horizon_cost: window is not warm");
  }
  double cost = mu * Model::difference(candidate, prediction).squaredNorm();
  try {
    typename Model::State x = Model::project(candidate);
    const auto& ys = window.measurements();
    const auto& us = window.inputs();
    cost += (ys[0] - Model::measure(x)).squaredNorm();
    for (std::size_t i = 0; i < us.size(); ++i) {
      x = Model::step(x, us[i], dt);
      cost += (ys[i + 1] - Model::measure(x)).squaredNorm();
    }
  } catch (const LineError&) {
    return kInfeasibleCost;
  }
  return cost;
}

/// M-P instance of the horizon cost.
double mho_cost(const MPLine& candidate, const MemoryWindow& window, const MPLine& prediction,
                double mu, double dt);

template <class Model>
struct MhoEstimate {
  typename Model::State state_at_window_start;
  typename Model::State state_now;
  double cost = 0.0;
  double prediction_cost = 0.0;
  OptResult solver;
  /// The solver did not converge and could not beat the prediction; the prediction was kept.
  bool fallback = false;
  /// The window carried no translation, so only the measured block was optimized.
  bool reduced = false;
  /// False during warm-up, when the estimate is pure open-loop propagation.
  bool optimized = false;
};

/// Moving horizon observer. The stored prediction always refers to the window's first
/// sample; after each solve it advances by one step from the minimizer.
template <class Model>
class MovingHorizonObserver {
 public:
  using State = typename Model::State;

  MovingHorizonObserver(const State& initial_guess, int horizon, double mu, double dt)
      : window_(horizon), prediction_(Model::project(initial_guess)), mu_(mu), dt_(dt) {
    if (horizon < 2) throw std::invalid_argument("MHO horizon must be at least 2");
    if (!(mu > 0.0)) throw std::invalid_argument("MHO mu must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("MHO dt must be positive");
  }

  void push(const Vec3& y, const CameraTwist& u_prev) { window_.push(y, u_prev); }

  /// Solves the horizon problem on a warm window, or propagates the prediction through
  /// the stored inputs while the window is still filling.
  MhoEstimate<Model> step(const SimplexConfig& config) {
    MhoEstimate<Model> est;
    if (!window_.warm()) {
      est.state_at_window_start = prediction_;
      est.state_now = propagate(prediction_);
      return est;
    }
    est.optimized = true;
    est.prediction_cost = horizon_cost<Model>(prediction_, window_, prediction_, mu_, dt_);

    State start;
    if (window_.translation_free()) {
      // The unmeasured block does not reach the outputs; its optimum is the prediction.
      est.reduced = true;
      constexpr int k = Model::kMeasuredDim;
      const Eigen::VectorXd x0 = prediction_.template head<k>();
      est.solver = minimize(
          [&](const Eigen::VectorXd& v) {
            State c = prediction_;
            c.template head<k>() = v;
            return horizon_cost<Model>(c, window_, prediction_, mu_, dt_);
          },
          x0, config);
      start = prediction_;
      start.template head<k>() = est.solver.x_min;
    } else {
      const Eigen::VectorXd x0 = prediction_;
      est.solver = minimize(
          [&](const Eigen::VectorXd& v) {
            return horizon_cost<Model>(State(v), window_, prediction_, mu_, dt_);
          },
          x0, config);
      start = est.solver.x_min;
    }
    est.cost = est.solver.f_min;

    if (!est.solver.converged && est.cost > est.prediction_cost) {
      est.fallback = true;
      start = prediction_;
      est.cost = est.prediction_cost;
    }
    start = Model::project(start);
    est.state_at_window_start = start;
    est.state_now = propagate(start);
    prediction_ = Model::project(Model::step(start, window_.inputs().front(), dt_));
    return est;
  }

  /// push() followed by step().
  MhoEstimate<Model> update(const Vec3& y, const CameraTwist& u_prev,
                            const SimplexConfig& config) {
    push(y, u_prev);
    return step(config);
  }

  [[nodiscard]] const MemoryWindow& window() const { return window_; }
  [[nodiscard]] const State& prediction() const { return prediction_; }
  [[nodiscard]] double mu() const { return mu_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] int horizon() const { return window_.horizon(); }

 private:
  State propagate(State x) const {
    for (const CameraTwist& u : window_.inputs()) x = Model::step(x, u, dt_);
    return x;
  }

  MemoryWindow window_;
  State prediction_;
  double mu_;
  double dt_;
};

using MhoMP = MovingHorizonObserver<MPModel>;
using MhoSphere = MovingHorizonObserver<SphereModel>;

}  // namespace linesfm
