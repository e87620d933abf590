/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "paddle/train/cycle.hpp"

#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "paddle/cmdp/types.hpp"

namespace paddle::train {

Eigen::VectorXd remove_drift(std::span<const double> x, int order) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
  if (order < 0 || n <= order + 1) return y.array() - y.mean();
  Eigen::MatrixXd basis(n, order + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = n > 1 ? 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0 : 0.0;
    double p = 1.0;
    for (int k = 0; k <= order; ++k) {
      basis(i, k) = p;
      p *= u;
    }
  }
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(y);
  return y - basis * coef;
}

CycleEstimate detect_cycle(std::span<const double> lift, double f_s, const CycleOptions& opts) {
  if (!(f_s > 2.0 * opts.f_max)) throw std::invalid_argument("sampling rate must exceed twice the upper band edge");
  if (static_cast<double>(lift.size()) < opts.min_duration * f_s) {
    throw std::invalid_argument("lift record shorter than the minimum duration");
  }
  for (double v : lift) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite lift sample");
  }
  const Eigen::VectorXd y = remove_drift(lift, opts.detrend_order);
  const auto n = static_cast<Eigen::Index>(lift.size());

  std::vector<double> in(y.data(), y.data() + n);
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  double scale = 0.0;
  for (double v : lift) scale = std::max(scale, std::abs(v));
  const double floor = std::max(opts.relative_floor * static_cast<double>(n) * scale, 1e-300);

  CycleEstimate best;
  double best_mag = -1.0;
  for (Eigen::Index k = 1; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * f_s / static_cast<double>(n);
    if (f < opts.f_min || f > opts.f_max) continue;
    const double mag = std::abs(spectrum[static_cast<std::size_t>(k)]);
    if (mag > best_mag) {
      best_mag = mag;
      best.bin = k;
      best.f_star = f;
    }
  }
  if (best_mag < floor) throw NoDominantFrequency();
  best.H = std::max(2, cmdp::even_cycle_length(static_cast<int>(std::floor(f_s / best.f_star))));
  return best;
}

int fallback_cycle_length(double f_s, double f_nominal) {
  return std::max(2, cmdp::even_cycle_length(static_cast<int>(std::floor(f_s / f_nominal))));
}

}  // namespace paddle::train
