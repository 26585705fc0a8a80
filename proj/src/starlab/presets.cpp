#include "starlab/presets.hpp"

#include <array>
#include <numbers>
#include <random>

#include "starlab/errors.hpp"

namespace starlab::presets {

namespace {

void zero(std::span<Jet> out) {
  for (auto& o : out) o = Jet(0.0);
}

// Shared draw for the seeded trig families: coefficient, phase, integer wave vector.
struct TrigTerm {
  double coef;
  double phase;
  std::array<int, 5> wave;
};

std::vector<TrigTerm> draw_terms(std::mt19937_64& rng, int n, int count, double amp, int kmax) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> k(-kmax, kmax);
  std::vector<TrigTerm> terms(static_cast<std::size_t>(count));
  for (auto& t : terms) {
    t.coef = amp * u(rng);
    t.phase = std::numbers::pi * u(rng);
    t.wave.fill(0);
    for (int a = 0; a < n; ++a) t.wave[a] = k(rng);
  }
  return terms;
}

Jet trig_sum(const std::vector<TrigTerm>& terms, std::span<const Jet> x, std::size_t first, std::size_t count) {
  Jet s(0.0);
  for (std::size_t c = first; c < first + count; ++c) {
    const auto& t = terms[c];
    Jet arg(t.phase);
    for (std::size_t a = 0; a < x.size(); ++a)
      if (t.wave[a] != 0) arg += Jet(static_cast<double>(t.wave[a])) * x[a];
    s += Jet(t.coef) * sin(arg);
  }
  return s;
}

void check_dim(int n) {
  if (n < 2 || n > 5) fail(ErrorKind::InvalidArgument, "preset dimension must be in [2, 5]");
}

}  // namespace

AnalyticField flat_metric(int n) {
  check_dim(n);
  return AnalyticField(n, FieldKind::Tensor, [n](std::span<const Jet>, double, std::span<Jet> out) {
    zero(out);
    for (int i = 0; i < n; ++i) out[i * n + i] = Jet(1.0);
  });
}

AnalyticField warped_metric(int n, double amplitude, int wave) {
  check_dim(n);
  return AnalyticField(n, FieldKind::Tensor, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    zero(out);
    for (int i = 0; i + 1 < n; ++i) out[i * n + i] = Jet(1.0);
    out[n * n - 1] = exp(Jet(2.0 * amplitude) * sin(Jet(static_cast<double>(wave)) * x[0]));
  });
}

AnalyticField random_trig_metric(int n, unsigned seed, double eps) {
  check_dim(n);
  constexpr int kTerms = 2;
  std::mt19937_64 rng(seed);
  const auto terms = draw_terms(rng, n, n * (n + 1) / 2 * kTerms, eps, 2);
  return AnalyticField(n, FieldKind::Tensor, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    std::size_t pi = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++pi) {
        Jet s = trig_sum(terms, x, pi * kTerms, kTerms);
        if (i == j) s += Jet(1.0);
        out[i * n + j] = s;
        out[j * n + i] = s;
      }
  });
}

AnalyticField zero_tensor(int n) {
  return AnalyticField(n, FieldKind::Tensor, [](std::span<const Jet>, double, std::span<Jet> out) { zero(out); });
}

AnalyticField rotation_phi(int n) {
  check_dim(n);
  return AnalyticField(n, FieldKind::Tensor, [n](std::span<const Jet>, double, std::span<Jet> out) {
    zero(out);
    out[1 * n + 0] = Jet(1.0);
    out[0 * n + 1] = Jet(-1.0);
  });
}

AnalyticField compatible_rotation_phi(int n, double amplitude, int wave) {
  check_dim(n);
  const int z = n - 1;
  return AnalyticField(n, FieldKind::Tensor, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    zero(out);
    const Jet u = Jet(amplitude) * sin(Jet(static_cast<double>(wave)) * x[0]);
    out[z * n + 0] = exp(-u);  // phi d0 = e^{-u} dz, unit length
    out[0 * n + z] = -exp(u);  // phi dz = -e^{u} d0
  });
}

AnalyticField random_phi(int n, unsigned seed) {
  check_dim(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(n * n)), b(a.size());
  for (auto& v : a) v = u(rng);
  for (auto& v : b) v = 0.3 * u(rng);
  return AnalyticField(n, FieldKind::Tensor, [=](std::span<const Jet> x, double, std::span<Jet> out) {
    for (int c = 0; c < n * n; ++c) out[c] = Jet(a[c]) + Jet(b[c]) * cos(x[c % n]);
  });
}

AnalyticField constant_scalar(int n, double c) {
  return AnalyticField(
      n, FieldKind::Scalar, [c](std::span<const Jet>, double, std::span<Jet> out) { out[0] = Jet(c); },
      [](std::span<const Jet>, double, std::span<Jet> out) { out[0] = Jet(0.0); });
}

AnalyticField cos_scalar(int n, double a) {
  return AnalyticField(
      n, FieldKind::Scalar, [a](std::span<const Jet> x, double, std::span<Jet> out) { out[0] = Jet(a) * cos(x[0]); },
      [](std::span<const Jet>, double, std::span<Jet> out) { out[0] = Jet(0.0); });
}

AnalyticField cos_plus_t_sin_scalar(int n, double a) {
  return AnalyticField(
      n, FieldKind::Scalar,
      [a](std::span<const Jet> x, double t, std::span<Jet> out) { out[0] = Jet(a) * cos(x[0]) + Jet(t) * sin(x[1]); },
      [](std::span<const Jet> x, double, std::span<Jet> out) { out[0] = sin(x[1]); });
}

AnalyticField random_trig_scalar(int n, unsigned seed, int terms, double amp) {
  std::mt19937_64 rng(seed);
  const auto t = draw_terms(rng, n, terms, amp, 3);
  return AnalyticField(
      n, FieldKind::Scalar,
      [t](std::span<const Jet> x, double, std::span<Jet> out) { out[0] = trig_sum(t, x, 0, t.size()); },
      [](std::span<const Jet>, double, std::span<Jet> out) { out[0] = Jet(0.0); });
}

AnalyticField zero_vector(int n) {
  return AnalyticField(
      n, FieldKind::Vector, [](std::span<const Jet>, double, std::span<Jet> out) { zero(out); },
      [](std::span<const Jet>, double, std::span<Jet> out) { zero(out); });
}

AnalyticField constant_vector(std::vector<double> c) {
  const int n = static_cast<int>(c.size());
  return AnalyticField(
      n, FieldKind::Vector,
      [c](std::span<const Jet>, double, std::span<Jet> out) {
        for (std::size_t a = 0; a < c.size(); ++a) out[a] = Jet(c[a]);
      },
      [](std::span<const Jet>, double, std::span<Jet> out) { zero(out); });
}

AnalyticField linear_vector(int n, double c) {
  return AnalyticField(
      n, FieldKind::Vector,
      [c](std::span<const Jet> x, double, std::span<Jet> out) {
        for (std::size_t a = 0; a < out.size(); ++a) out[a] = Jet(c) * x[a];
      },
      [](std::span<const Jet>, double, std::span<Jet> out) { zero(out); });
}

AnalyticField wobble_vector(int n, double amp) {
  return AnalyticField(n, FieldKind::Vector, [=](std::span<const Jet> x, double t, std::span<Jet> out) {
    for (int a = 0; a < n; ++a) {
      const Jet& y = x[(a + 1) % n];
      out[a] = Jet(amp * (1.0 + 0.5 * t)) * sin(y + Jet(0.3 * a)) + Jet(0.1 * amp * t);
    }
  });
}

}  // namespace starlab::presets
