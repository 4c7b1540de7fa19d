#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace omsim {

// Periodic Catmull-Rom interpolation on a uniform grid of samples covering
// one period (sample m at phase m*period/n). T needs +, -, scalar *.
template <class T>
T periodic_cubic(const std::vector<T>& samples, double period, double t) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(samples.size());
  if (n == 1) return samples[0];
  double s = std::fmod(t / period, 1.0);
  if (s < 0.0) s += 1.0;
  s *= static_cast<double>(n);
  std::ptrdiff_t i1 = static_cast<std::ptrdiff_t>(s);
  if (i1 >= n) i1 = n - 1;
  const double x = s - static_cast<double>(i1);
  auto wrap = [n](std::ptrdiff_t i) { return ((i % n) + n) % n; };
  const T& p0 = samples[wrap(i1 - 1)];
  const T& p1 = samples[wrap(i1)];
  const T& p2 = samples[wrap(i1 + 1)];
  const T& p3 = samples[wrap(i1 + 2)];
  const double x2 = x * x, x3 = x2 * x;
  return 0.5 * (2.0 * p1 + (-p0 + p2) * x +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * x2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * x3);
}

}  // namespace omsim
