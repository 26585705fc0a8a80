#pragma once

#include <complex>
#include <span>
#include <vector>

#include "starlab/fields.hpp"
#include "starlab/jet.hpp"

namespace starlab {

// Unnormalized real-to-complex transform of a grid field (last axis halved).
struct Spectrum {
  GridPtr grid;
  std::vector<std::complex<double>> coeffs;
};

Spectrum fourier_transform(const GridField& f);

// d^alpha f. Odd-order derivatives drop the Nyquist mode on that axis.
GridField spectral_derivative(const Spectrum& spectrum, const Exponent& alpha);
GridField spectral_derivative(const GridField& f, const Exponent& alpha);

// All partial derivatives up to `order`, indexed like jet_layout(dim, order).
std::vector<GridField> derivatives_upto(const GridField& f, int order);

// Jet at grid point p assembled from derivatives_upto output.
Jet grid_point_jet(std::span<const GridField> derivatives, int order, std::size_t p);

// Spectral interpolation jet at an arbitrary point. Nyquist modes are
// dropped, so the result is exact for fields band-limited below N/2.
Jet eval_jet(const GridField& f, std::span<const double> point, int order);

// Coordinate gradient and Hessian fields of a scalar (n and n(n+1)/2 entries,
// the latter indexed by GridMetric::sym).
struct GridScalarDerivatives {
  std::vector<GridField> gradient;
  std::vector<GridField> hessian;
};
GridScalarDerivatives scalar_derivatives(const GridField& f, bool with_hessian = true);

}  // namespace starlab
