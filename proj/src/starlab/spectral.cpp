#include "starlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "starlab/errors.hpp"

namespace starlab {

namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// FFTW planning is not thread-safe; executing an existing plan on fresh
// fftw_malloc buffers is.
const Plans& plans_for(int dim, int n) {
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find({dim, n});
  if (it != cache.end()) return it->second;
  Plans p;
  std::vector<int> dims(static_cast<std::size_t>(dim), n);
  p.real_size = 1;
  for (int a = 0; a < dim; ++a) p.real_size *= static_cast<std::size_t>(n);
  p.complex_size = p.real_size / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
  auto* in = static_cast<double*>(fftw_malloc(sizeof(double) * p.real_size));
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * p.complex_size));
  p.forward = fftw_plan_dft_r2c(dim, dims.data(), in, out, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r(dim, dims.data(), out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(std::make_pair(dim, n), p).first->second;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : p(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {}
  ~RealBuffer() { fftw_free(p); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* p;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~ComplexBuffer() { fftw_free(p); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* p;
};

// Signed wavenumber index for position j on a full axis; Nyquist reported as +N/2.
int wave_index(int j, int n) { return j <= n / 2 ? j : j - n; }

}  // namespace

Spectrum fourier_transform(const GridField& f) {
  const auto& grid = f.grid();
  if (grid->domain().kind != DomainKind::Torus) fail(ErrorKind::Unsupported, "spectral ops need a torus");
  const Plans& plans = plans_for(grid->dim(), grid->n());
  RealBuffer in(plans.real_size);
  ComplexBuffer out(plans.complex_size);
  std::memcpy(in.p, f.samples().data(), sizeof(double) * plans.real_size);
  fftw_execute_dft_r2c(plans.forward, in.p, out.p);
  Spectrum s;
  s.grid = grid;
  s.coeffs.resize(plans.complex_size);
  for (std::size_t i = 0; i < plans.complex_size; ++i) s.coeffs[i] = {out.p[i][0], out.p[i][1]};
  return s;
}

GridField spectral_derivative(const Spectrum& spectrum, const Exponent& alpha) {
  const auto& grid = spectrum.grid;
  const int dim = grid->dim();
  const int n = grid->n();
  int total = 0;
  for (int a = 0; a < dim; ++a) total += alpha[a];
  if (total > kMaxJetOrder) fail(ErrorKind::Unsupported, "spectral derivative order above 4");

  const Plans& plans = plans_for(dim, n);
  ComplexBuffer work(plans.complex_size);
  const int half = n / 2 + 1;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  for (std::size_t i = 0; i < plans.complex_size; ++i) {
    std::size_t rem = i;
    idx[dim - 1] = static_cast<int>(rem % half);
    rem /= half;
    for (int a = dim - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % n);
      rem /= n;
    }
    std::complex<double> factor(1.0, 0.0);
    for (int a = 0; a < dim && factor != 0.0; ++a) {
      const int m = alpha[a];
      if (m == 0) continue;
      const int k = wave_index(idx[a], n);
      if (idx[a] == n / 2 && m % 2 == 1) {
        factor = 0.0;
        break;
      }
      const double kappa = k / grid->domain().radii[a];
      std::complex<double> ik(0.0, kappa);
      for (int r = 0; r < m; ++r) factor *= ik;
    }
    const auto v = spectrum.coeffs[i] * factor;
    work.p[i][0] = v.real();
    work.p[i][1] = v.imag();
  }
  RealBuffer out(plans.real_size);
  fftw_execute_dft_c2r(plans.backward, work.p, out.p);
  GridField result(grid, 0.0);
  const double scale = 1.0 / static_cast<double>(plans.real_size);
  for (std::size_t p = 0; p < plans.real_size; ++p) result[p] = out.p[p] * scale;
  return result;
}

GridField spectral_derivative(const GridField& f, const Exponent& alpha) {
  return spectral_derivative(fourier_transform(f), alpha);
}

std::vector<GridField> derivatives_upto(const GridField& f, int order) {
  const int dim = f.grid()->dim();
  const JetLayout& layout = jet_layout(dim, order);
  std::vector<GridField> out;
  out.reserve(static_cast<std::size_t>(layout.size));
  out.push_back(f);
  if (order == 0) return out;
  const Spectrum s = fourier_transform(f);
  for (int i = 1; i < layout.size; ++i) out.push_back(spectral_derivative(s, layout.exponents[i]));
  return out;
}

Jet grid_point_jet(std::span<const GridField> derivatives, int order, std::size_t p) {
  const int dim = derivatives[0].grid()->dim();
  const JetLayout& layout = jet_layout(dim, order);
  if (static_cast<int>(derivatives.size()) < layout.size)
    fail(ErrorKind::Unsupported, "not enough derivative fields for the requested jet order");
  Jet j = Jet::constant(dim, order, 0.0);
  for (int i = 0; i < layout.size; ++i) j.coeff(i) = derivatives[i][p] / layout.factorial[i];
  return j;
}

Jet eval_jet(const GridField& f, std::span<const double> point, int order) {
  const auto& grid = f.grid();
  const int dim = grid->dim();
  const int n = grid->n();
  if (static_cast<int>(point.size()) != dim) fail(ErrorKind::ShapeMismatch, "point dimension mismatch");
  if (order > kMaxJetOrder) fail(ErrorKind::Unsupported, "jet order above 4");
  const Spectrum s = fourier_transform(f);
  const JetLayout& layout = jet_layout(dim, order);
  const int half = n / 2 + 1;
  const double norm = 1.0 / static_cast<double>(grid->size());

  std::vector<double> acc(static_cast<std::size_t>(layout.size), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> kappa(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    std::size_t rem = i;
    idx[dim - 1] = static_cast<int>(rem % half);
    rem /= half;
    for (int a = dim - 2; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % n);
      rem /= n;
    }
    bool nyquist = false;
    double phase = 0.0;
    for (int a = 0; a < dim; ++a) {
      if (idx[a] == n / 2) nyquist = true;
      kappa[a] = wave_index(idx[a], n) / grid->domain().radii[a];
      phase += kappa[a] * point[a];
    }
    if (nyquist) continue;
    // Hermitian symmetry: interior last-axis modes stand for two conjugate terms.
    const double weight = (idx[dim - 1] == 0) ? 1.0 : 2.0;
    const std::complex<double> base = s.coeffs[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    for (int m = 0; m < layout.size; ++m) {
      std::complex<double> factor(1.0, 0.0);
      for (int a = 0; a < dim; ++a)
        for (int r = 0; r < layout.exponents[m][a]; ++r) factor *= std::complex<double>(0.0, kappa[a]);
      acc[m] += weight * (base * factor).real();
    }
  }
  Jet j = Jet::constant(dim, order, 0.0);
  for (int m = 0; m < layout.size; ++m) j.coeff(m) = acc[m] * norm / layout.factorial[m];
  return j;
}

GridScalarDerivatives scalar_derivatives(const GridField& f, bool with_hessian) {
  const int dim = f.grid()->dim();
  const Spectrum s = fourier_transform(f);
  GridScalarDerivatives d;
  for (int a = 0; a < dim; ++a) {
    Exponent e{};
    e[a] = 1;
    d.gradient.push_back(spectral_derivative(s, e));
  }
  if (with_hessian) {
    d.hessian.resize(static_cast<std::size_t>(dim * (dim + 1) / 2));
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b) {
        Exponent e{};
        ++e[a];
        ++e[b];
        d.hessian[GridMetric::sym(a, b, dim)] = spectral_derivative(s, e);
      }
  }
  return d;
}

}  // namespace starlab
