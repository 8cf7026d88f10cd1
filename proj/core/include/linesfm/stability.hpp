#pragma once

#include <linesfm/line_geometry.hpp>
#include <linesfm/types.hpp>

#include <Eigen/Core>

#include <span>
#include <vector>

namespace linesfm {

/// Bounds on the camera motion and line inverse depth over which the certificate holds.
struct OperatingEnvelope {
  double max_nu = 0.5;
  double max_omega = 0.5;
  double max_chi = 0.2;
  double dt = 1.0 / 30.0;
  int horizon = 7;

  /// Throws std::invalid_argument unless all bounds are positive and horizon >= 1.
  void validate() const;
};

struct StabilityCertificate {
  double c_g = 0.0;     ///< Lipschitz bound of the continuous vector field
  double c_f = 0.0;     ///< Lipschitz bound of its Euler discretization
  double c_F = 0.0;     ///< Lipschitz bound of the N-step observation map
  double delta = 0.0;   ///< 1 / c_F
  double mu_max = 0.0;  ///< delta / (8 c_f^2 - 1)
};

/// c_g = 2|w| + |nu| + 5|nu||chi| + 2|nu||chi|^2 at the envelope maxima.
double lipschitz_cg(const OperatingEnvelope& envelope);

/// c_f = 1 + c_g dt.
double lipschitz_cf(double c_g, double dt);

/// c_F = sum_{k=1}^{N} c_f^{k-1}.
double lipschitz_cF(double c_f, int horizon);

StabilityCertificate certificate(const OperatingEnvelope& envelope);

/// 8 c_f^2 mu / (mu + delta); the horizon cost has decreasing error bounds when this is < 1.
double gain_condition(double mu, double c_f, double delta);

/// [h(x), h(f(x, u_0)), ..., h(f^N(x))] using the unprojected Euler map. Returns N+1 moments.
std::vector<Vec3> observation_map(const Vec6& start, std::span<const CameraTwist> inputs,
                                  double dt);
std::vector<Vec3> observation_map(const MPLine& start, std::span<const CameraTwist> inputs,
                                  double dt);

struct ObservabilityRank {
  int rank = 0;
  Eigen::VectorXd singular_values;  ///< descending
};

/// Numerical rank (singular values above 1e-9 times the largest) of the central-difference
/// Jacobian of observation_map with respect to the 6-vector start state.
ObservabilityRank observability_rank(const MPLine& start, std::span<const CameraTwist> inputs,
                                     double dt, double fd_step = 1e-6);

/// Stacked Jacobian of observation_map, 3(N+1) x 6, by central differences.
Eigen::MatrixXd observation_jacobian(const Vec6& start, std::span<const CameraTwist> inputs,
                                     double dt, double fd_step = 1e-6);

}  // namespace linesfm
