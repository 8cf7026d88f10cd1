#include <linesfm/mho.hpp>

namespace linesfm {

MemoryWindow::MemoryWindow(int horizon) : horizon_(horizon) {
  if (horizon < 1) {
    throw std::invalid_argument("MemoryWindow: horizon must be positive");
  }
}

void MemoryWindow::push(const Vec3& y, const CameraTwist& u_prev) {
  if (!measurements_.empty()) {
    inputs_.push_back(u_prev);
  }
  measurements_.push_back(y.normalized());
  if (measurements_.size() > static_cast<std::size_t>(horizon_) + 1) {
    measurements_.pop_front();
  }
  if (inputs_.size() > static_cast<std::size_t>(horizon_)) {
    inputs_.pop_front();
  }
}

bool MemoryWindow::translation_free() const {
  if (inputs_.empty()) return false;
  for (const CameraTwist& u : inputs_) {
    if ((u.nu.array() != 0.0).any()) return false;
  }
  return true;
}

double mho_cost(const MPLine& candidate, const MemoryWindow& window, const MPLine& prediction,
                double mu, double dt) {
  return horizon_cost<MPModel>(candidate.to_vector(), window, prediction.to_vector(), mu, dt);
}

}  // namespace linesfm
