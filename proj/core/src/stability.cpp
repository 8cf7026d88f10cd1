#include <linesfm/stability.hpp>

#include <linesfm/line_dynamics.hpp>

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace linesfm {

void OperatingEnvelope::validate() const {
  if (!(max_nu > 0.0 && max_omega > 0.0 && max_chi > 0.0 && dt > 0.0)) {
    throw std::invalid_argument("operating envelope bounds must be positive");
  }
  if (horizon < 1) {
    throw std::invalid_argument("operating envelope horizon must be at least 1");
  }
}

double lipschitz_cg(const OperatingEnvelope& e) {
  const double nu = e.max_nu, w = e.max_omega, chi = e.max_chi;
  return 2.0 * w + nu + 5.0 * nu * chi + 2.0 * nu * chi * chi;
}

double lipschitz_cf(double c_g, double dt) { return 1.0 + c_g * dt; }

double lipschitz_cF(double c_f, int horizon) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k <= horizon; ++k) {
    sum += term;
    term *= c_f;
  }
  return sum;
}

StabilityCertificate certificate(const OperatingEnvelope& envelope) {
  envelope.validate();
  StabilityCertificate c;
  c.c_g = lipschitz_cg(envelope);
  c.c_f = lipschitz_cf(c.c_g, envelope.dt);
  c.c_F = lipschitz_cF(c.c_f, envelope.horizon);
  c.delta = 1.0 / c.c_F;
  c.mu_max = c.delta / (8.0 * c.c_f * c.c_f - 1.0);
  return c;
}

double gain_condition(double mu, double c_f, double delta) {
  return 8.0 * c_f * c_f * mu / (mu + delta);
}

std::vector<Vec3> observation_map(const Vec6& start, std::span<const CameraTwist> inputs,
                                  double dt) {
  std::vector<Vec3> out;
  out.reserve(inputs.size() + 1);
  Vec6 x = start;
  out.emplace_back(x.head<3>());
  for (const CameraTwist& u : inputs) {
    x = euler_step_raw(x, u, dt);
    out.emplace_back(x.head<3>());
  }
  return out;
}

std::vector<Vec3> observation_map(const MPLine& start, std::span<const CameraTwist> inputs,
                                  double dt) {
  return observation_map(start.to_vector(), inputs, dt);
}

Eigen::MatrixXd observation_jacobian(const Vec6& start, std::span<const CameraTwist> inputs,
                                     double dt, double fd_step) {
  const auto rows = static_cast<Eigen::Index>(3 * (inputs.size() + 1));
  Eigen::MatrixXd jac(rows, 6);
  for (int j = 0; j < 6; ++j) {
    Vec6 xp = start, xm = start;
    xp[j] += fd_step;
    xm[j] -= fd_step;
    const auto fp = observation_map(xp, inputs, dt);
    const auto fm = observation_map(xm, inputs, dt);
    for (std::size_t i = 0; i < fp.size(); ++i) {
      jac.block<3, 1>(static_cast<Eigen::Index>(3 * i), j) = (fp[i] - fm[i]) / (2.0 * fd_step);
    }
  }
  return jac;
}

ObservabilityRank observability_rank(const MPLine& start, std::span<const CameraTwist> inputs,
                                     double dt, double fd_step) {
  const Eigen::MatrixXd jac = observation_jacobian(start.to_vector(), inputs, dt, fd_step);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  ObservabilityRank r;
  r.singular_values = svd.singularValues();
  const double tol = 1e-9 * (r.singular_values.size() ? r.singular_values[0] : 0.0);
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) {
    if (r.singular_values[i] > tol) ++r.rank;
  }
  return r;
}

}  // namespace linesfm
