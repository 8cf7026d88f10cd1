#pragma once

#include <Eigen/Core>

#include <functional>

namespace linesfm {

enum class SimplexTermination {
  Both,    ///< stop once the simplex is small in x AND in f
  Either,  ///< stop as soon as one of the two tolerances is met
};

struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Iteration budget; a negative value means 200 * n.
  int max_iters = -1;
  double x_tol = 1e-8;
  double f_tol = 1e-8;
  /// Either stops at iteration 0 whenever the initial simplex is flat in f, which happens
  /// for the weakly observable block of short horizons.
  SimplexTermination termination = SimplexTermination::Both;
  /// Per-coordinate initial edge lengths. Empty selects max(0.05 |x0_i|, 0.00025).
  Eigen::VectorXd initial_step;

  /// Throws std::invalid_argument on non-positive coefficients or expansion <= 1 <= contraction.
  void validate() const;
};

struct OptResult {
  Eigen::VectorXd x_min;
  double f_min = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Nelder-Mead simplex minimization. Deterministic: ties in the vertex ordering keep
/// their previous order. Terminates when the simplex diameter (max-norm distance to the
/// best vertex) and the spread of function values drop below x_tol and f_tol (or either
/// one, see SimplexTermination);
/// `converged` is false only when the iteration budget ran out first.
/// Throws NonFiniteObjective if the objective returns NaN or infinity.
OptResult minimize(const Objective& objective, const Eigen::VectorXd& x0,
                   const SimplexConfig& config = {});

}  // namespace linesfm
