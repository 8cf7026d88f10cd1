#include <linesfm/simplex.hpp>

#include <linesfm/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace linesfm {

void SimplexConfig::validate() const {
  if (!(reflection > 0.0 && expansion > 0.0 && contraction > 0.0 && shrink > 0.0)) {
    throw std::invalid_argument("simplex coefficients must be positive");
  }
  if (!(expansion > 1.0 && contraction < 1.0)) {
    throw std::invalid_argument("simplex requires expansion > 1 > contraction");
  }
  if (!(shrink < 1.0)) {
    throw std::invalid_argument("simplex shrink factor must be below 1");
  }
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(const Objective& f) : f_(f) {}

  double operator()(const Eigen::VectorXd& x) {
    ++count_;
    const double v = f_(x);
    if (!std::isfinite(v)) {
      throw NonFiniteObjective("objective returned a non-finite value");
    }
    return v;
  }

  [[nodiscard]] int count() const { return count_; }

 private:
  const Objective& f_;
  int count_ = 0;
};

}  // namespace

OptResult minimize(const Objective& objective, const Eigen::VectorXd& x0,
                   const SimplexConfig& config) {
  config.validate();
  const auto n = static_cast<int>(x0.size());
  const int max_iters = config.max_iters < 0 ? 200 * n : config.max_iters;
  Evaluator f(objective);

  OptResult result;
  result.x_min = x0;
  result.f_min = f(x0);
  if (max_iters == 0 || n == 0) {
    result.evaluations = f.count();
    result.converged = n == 0;
    return result;
  }

  // Vertices are columns; `order` lists them by ascending value, stable on ties.
  Eigen::MatrixXd simplex(n, n + 1);
  std::vector<double> values(n + 1);
  simplex.col(0) = x0;
  values[0] = result.f_min;
  for (int i = 0; i < n; ++i) {
    double step = 0.0;
    if (config.initial_step.size() == n) {
      step = config.initial_step[i];
    } else {
      step = std::max(0.05 * std::abs(x0[i]), 0.00025);
    }
    simplex.col(i + 1) = x0;
    simplex(i, i + 1) += step;
    values[i + 1] = f(simplex.col(i + 1));
  }

  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  auto sort_vertices = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
  };
  sort_vertices();

  Eigen::VectorXd centroid(n), xr(n), xe(n), xc(n);
  int iter = 0;
  bool converged = false;
  while (true) {
    const int best = order.front();
    const int worst = order.back();

    double spread = 0.0;
    double diameter = 0.0;
    for (int j = 1; j <= n; ++j) {
      const int v = order[j];
      spread = std::max(spread, std::abs(values[v] - values[best]));
      diameter = std::max(diameter, (simplex.col(v) - simplex.col(best)).cwiseAbs().maxCoeff());
    }
    const bool small_x = diameter <= config.x_tol;
    const bool small_f = spread <= config.f_tol;
    const bool done = config.termination == SimplexTermination::Both ? (small_x && small_f)
                                                                    : (small_x || small_f);
    if (done) {
      converged = true;
      break;
    }
    if (iter >= max_iters) {
      break;
    }
    ++iter;

    centroid.setZero();
    for (int j = 0; j < n; ++j) centroid += simplex.col(order[j]);
    centroid /= n;

    const int second_worst = order[n - 1];
    xr = centroid + config.reflection * (centroid - simplex.col(worst));
    const double fr = f(xr);

    bool do_shrink = false;
    if (fr < values[best]) {
      xe = centroid + config.expansion * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        simplex.col(worst) = xe;
        values[worst] = fe;
      } else {
        simplex.col(worst) = xr;
        values[worst] = fr;
      }
    } else if (fr < values[second_worst]) {
      simplex.col(worst) = xr;
      values[worst] = fr;
    } else if (fr < values[worst]) {
      xc = centroid + config.contraction * (xr - centroid);
      const double fc = f(xc);
      if (fc <= fr) {
        simplex.col(worst) = xc;
        values[worst] = fc;
      } else {
        do_shrink = true;
      }
    } else {
      xc = centroid + config.contraction * (simplex.col(worst) - centroid);
      const double fc = f(xc);
      if (fc < values[worst]) {
        simplex.col(worst) = xc;
        values[worst] = fc;
      } else {
        do_shrink = true;
      }
    }

    if (do_shrink) {
      const Eigen::VectorXd anchor = simplex.col(best);
      for (int j = 1; j <= n; ++j) {
        const int v = order[j];
        simplex.col(v) = anchor + config.shrink * (simplex.col(v) - anchor);
        values[v] = f(simplex.col(v));
      }
    }
    sort_vertices();
  }

  const int best = order.front();
  result.x_min = simplex.col(best);
  result.f_min = values[best];
  result.iterations = iter;
  result.evaluations = f.count();
  result.converged = converged;
  return result;
}

}  // namespace linesfm
