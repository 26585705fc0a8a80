#pragma once

// Test-side field builders and quadrature oracles. Nothing here calls into
// the library's preset catalog, so library presets can be checked against it.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "starlab/fields.hpp"

namespace testsupport {

using starlab::AnalyticField;
using starlab::FieldKind;
using starlab::Jet;

inline constexpr double kPi = std::numbers::pi;

// Adaptive Gauss-Kronrod on [a, b].
template <class F>
double quad(F f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}

inline double bessel_i(int nu, double x) { return boost::math::cyl_bessel_i(nu, x); }

// Euclidean metric on R^n.
inline AnalyticField flat_metric(int n) {
  return AnalyticField(n, FieldKind::Tensor, [n](std::span<const Jet>, double, std::span<Jet> out) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = Jet(i == j ? 1.0 : 0.0);
  });
}

// diag(1, 1, e^{2u(x)}) with u = amp * sin(x).
inline AnalyticField warped_metric(double amp) {
  return AnalyticField(3, FieldKind::Tensor, [amp](std::span<const Jet> x, double, std::span<Jet> out) {
    for (auto& o : out) o = Jet(0.0);
    out[0] = Jet(1.0);
    out[4] = Jet(1.0);
    out[8] = starlab::exp(Jet(2.0 * amp) * starlab::sin(x[0]));
  });
}

// delta_ij plus small seeded trig perturbations; SPD for eps below 1/(2n).
inline AnalyticField random_trig_metric(int n, unsigned seed, double eps = 0.15) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-2, 2);
  const int terms = 2;
  const int pairs = n * (n + 1) / 2;
  std::vector<double> coef(static_cast<std::size_t>(pairs * terms)), phase(coef.size());
  std::vector<std::array<int, 5>> wave(coef.size());
  for (std::size_t c = 0; c < coef.size(); ++c) {
    coef[c] = eps * u(rng);
    phase[c] = kPi * u(rng);
    for (int a = 0; a < 5; ++a) wave[c][a] = a < n ? k(rng) : 0;
  }
  return AnalyticField(n, FieldKind::Tensor, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    int pi = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++pi) {
        Jet s(i == j ? 1.0 : 0.0);
        for (int t = 0; t < terms; ++t) {
          const std::size_t c = static_cast<std::size_t>(pi * terms + t);
          Jet arg(phase[c]);
          for (int a = 0; a < n; ++a)
            if (wave[c][a] != 0) arg += Jet(static_cast<double>(wave[c][a])) * x[a];
          s += Jet(coef[c]) * starlab::sin(arg);
        }
        out[i * n + j] = s;
        out[j * n + i] = s;
      }
  });
}

// Band-limited random scalar: sum_t c_t sin(k_t . x + p_t).
inline AnalyticField random_trig_scalar(int n, unsigned seed, int terms = 4, double amp = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-3, 3);
  std::vector<double> coef(static_cast<std::size_t>(terms)), phase(coef.size());
  std::vector<std::array<int, 5>> wave(coef.size());
  for (int t = 0; t < terms; ++t) {
    coef[t] = amp * u(rng);
    phase[t] = kPi * u(rng);
    for (int a = 0; a < 5; ++a) wave[t][a] = a < n ? k(rng) : 0;
  }
  return AnalyticField(n, FieldKind::Scalar, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    Jet s(0.0);
    for (int t = 0; t < terms; ++t) {
      Jet arg(phase[t]);
      for (int a = 0; a < n; ++a)
        if (wave[t][a] != 0) arg += Jet(static_cast<double>(wave[t][a])) * x[a];
      s += Jet(coef[t]) * starlab::sin(arg);
    }
    out[0] = s;
  });
}

inline AnalyticField scalar_of_x(int n, std::function<Jet(const Jet&)> f) {
  return AnalyticField(n, FieldKind::Scalar,
                       [f](std::span<const Jet> x, double, std::span<Jet> out) { out[0] = f(x[0]); });
}

}  // namespace testsupport

namespace testsupport {

// Rotation by pi/2 in the coordinate (x0, x1) plane, constant in space.
inline AnalyticField rotation_phi(int n) {
  return AnalyticField(n, FieldKind::Tensor, [n](std::span<const Jet>, double, std::span<Jet> out) {
    for (auto& o : out) o = Jet(0.0);
    out[1 * n + 0] = Jet(1.0);   // phi d0 = d1
    out[0 * n + 1] = Jet(-1.0);  // phi d1 = -d0
  });
}

// Orthogonal complex structure on the (x, z) plane of diag(1, 1, e^{2u}).
inline AnalyticField warped_compatible_phi(double amp) {
  return AnalyticField(3, FieldKind::Tensor, [amp](std::span<const Jet> x, double, std::span<Jet> out) {
    for (auto& o : out) o = Jet(0.0);
    const Jet u = Jet(amp) * starlab::sin(x[0]);
    out[2 * 3 + 0] = starlab::exp(-u);
    out[0 * 3 + 2] = -starlab::exp(u);
  });
}

inline AnalyticField zero_tensor(int n) {
  return AnalyticField(n, FieldKind::Tensor, [](std::span<const Jet>, double, std::span<Jet> out) {
    for (auto& o : out) o = Jet(0.0);
  });
}

// Seeded generic (1,1) tensor with trig entries.
inline AnalyticField random_phi(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(n * n)), b(a.size());
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = 0.3 * u(rng);
  return AnalyticField(n, FieldKind::Tensor, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    for (int c = 0; c < n * n; ++c) out[c] = Jet(a[c]) + Jet(b[c]) * starlab::cos(x[c % n]);
  });
}

}  // namespace testsupport
