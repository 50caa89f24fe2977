#include "pvs/sampler/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace pvs {

void NoiseSchedule::validate() const {
  if (steps < 1) throw std::invalid_argument("NoiseSchedule: steps must be >= 1");
  if (int(alpha.size()) != steps || int(alpha_bar.size()) != steps || int(sigma.size()) != steps)
    throw std::invalid_argument("NoiseSchedule: inconsistent array sizes");
  double product = 1.0;
  for (int t = 1; t <= steps; ++t) {
    if (!(alpha_at(t) > 0.0 && alpha_at(t) < 1.0))
      throw std::invalid_argument("NoiseSchedule: alpha outside (0, 1)");
    product *= alpha_at(t);
    if (std::abs(alpha_bar_at(t) - product) > 1e-12)
      throw std::invalid_argument("NoiseSchedule: alpha_bar is not the running product");
    if (t > 1 && !(alpha_bar_at(t) < alpha_bar_at(t - 1)))
      throw std::invalid_argument("NoiseSchedule: alpha_bar must strictly decrease");
  }
}

NoiseSchedule make_schedule(int steps, double beta_min, double beta_max) {
  if (steps < 1) throw std::invalid_argument("make_schedule: steps must be >= 1");
  if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0))
    throw std::invalid_argument("make_schedule: need 0 < beta_min <= beta_max < 1");

  NoiseSchedule s;
  s.steps = steps;
  s.alpha.resize(steps);
  s.alpha_bar.resize(steps);
  s.sigma.resize(steps);
  double product = 1.0;
  for (int t = 0; t < steps; ++t) {
    const double beta =
        steps == 1 ? beta_min : beta_min + (beta_max - beta_min) * double(t) / (steps - 1);
    s.alpha[t] = 1.0 - beta;
    product *= s.alpha[t];
    s.alpha_bar[t] = product;
    s.sigma[t] = std::sqrt(beta);
  }
  return s;
}

}  // namespace pvs
