#pragma once

#include <linesfm/line_dynamics.hpp>
#include <linesfm/line_geometry.hpp>
#include <linesfm/types.hpp>

#include <Eigen/Core>

namespace linesfm {

/// Memory-less observer state for the moment-point representation.
struct MloStateMP {
  Vec3 m_hat = Vec3::UnitY();
  Vec3 chi_hat = Vec3::Zero();
  double alpha = 1000.0;

  [[nodiscard]] MPLine estimate() const { return {m_hat, chi_hat}; }
};

/// Memory-less observer state for the spherical representation.
struct MloStateSphere {
  double theta_hat = 0.0;
  double phi_hat = 0.0;
  double eta1_hat = 0.0;
  double eta2_hat = 0.0;
  double alpha = 1000.0;

  [[nodiscard]] SphereLine estimate() const { return {theta_hat, phi_hat, eta1_hat, eta2_hat}; }
};

/// Influence of chi on the measured moment: -(nu . m) I3.
Mat3 omega_mp(const Vec3& measured_m, const CameraTwist& u);

/// Influence of (eta1, eta2) on (theta, phi): (nu . m_S) diag(1 / cos(phi), 1).
Eigen::Matrix2d omega_sphere(double theta, double phi, const CameraTwist& u);

/// H = V diag(2 sqrt(alpha) sigma_i) V^T from the SVD of omega. Symmetric PSD.
Eigen::MatrixXd gain_matrix(const Eigen::MatrixXd& omega, double alpha);

/// One Euler step of the M-P observer driven by the measured moment.
MloStateMP mlo_mp_step(const MloStateMP& state, const Vec3& measured_m, const CameraTwist& u,
                       double dt);

/// One Euler step of the spherical observer; the angles are measured.
/// Throws SphericalSingularity when the measured moment is at a pole.
MloStateSphere mlo_sphere_step(const MloStateSphere& state, double theta_meas, double phi_meas,
                               const CameraTwist& u, double dt);

}  // namespace linesfm
