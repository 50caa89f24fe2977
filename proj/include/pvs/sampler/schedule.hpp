#pragma once

#include <vector>

namespace pvs {

/// DDPM noise schedule with a linear variance ramp. alpha_bar is the running
/// product of the per-step gains and is strictly decreasing; index 0 is
/// reserved so that alpha_bar_at(0) == 1.
struct NoiseSchedule {
  int steps = 0;                  // T
  std::vector<double> alpha;      // alpha_t, t = 1..T at [t-1]
  std::vector<double> alpha_bar;  // cumulative products
  std::vector<double> sigma;      // per-step noise scale

  double alpha_at(int t) const { return alpha[t - 1]; }
  double sigma_at(int t) const { return sigma[t - 1]; }
  /// alpha_bar with the empty-product convention alpha_bar_at(0) == 1.
  double alpha_bar_at(int t) const { return t == 0 ? 1.0 : alpha_bar[t - 1]; }

  void validate() const;
};

/// Linear beta schedule on [beta_min, beta_max]:
/// alpha_t = 1 - beta(t), sigma_t = sqrt(beta(t)).
NoiseSchedule make_schedule(int steps, double beta_min = 1e-4, double beta_max = 0.02);

}  // namespace pvs
