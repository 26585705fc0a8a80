#pragma once

#include <functional>
#include <vector>

#include "starlab/curvature.hpp"
#include "starlab/fields.hpp"

namespace starlab {

// Per-chunk scratch handed to grid visitors so nothing allocates per point.
struct PointScratch {
  StarJet<double> star;
  ScalarJet<double> scalar;
  std::vector<double> phi;
  std::vector<double> a, b, c;
};

struct GeometryVisit {
  std::size_t index;
  const MetricJet<double>& metric;
  const GeometryJet<double>& geometry;
  PointScratch& scratch;
};

// Spectral first and second derivatives of every metric component, then
// compute_geometry at each grid point in parallel chunks.
void visit_grid_geometry(const GridMetric& g, const std::function<void(GeometryVisit&)>& visit);

struct GridCurvatureOptions {
  bool star = true;
  bool identities = false;
};

struct GridCurvature {
  GridPtr grid;
  int dim = 0;
  GridMetric ginv;
  std::vector<GridField> christoffel;  // [k][i][j] flattened
  std::vector<GridField> gamma_trace;  // g^ij Gamma^k_ij
  GridField sqrt_det;
  GridField min_eig;
  GridField scalar;
  GridTensor ricci;

  // Present when phi was supplied.
  GridTensor s_star;
  GridTensor ric_star;
  GridField r_star;
  GridField trace_s_star;
  double s_star_asymmetry = 0.0;
  double ric_star_asymmetry = 0.0;

  IdentityResiduals identities;

  double gamma(int k, int i, int j, std::size_t p) const { return christoffel[(k * dim + i) * dim + j][p]; }
};

GridCurvature grid_curvature(const GridMetric& g, const GridTensor* phi, GridCurvatureOptions options = {});

// Scalar calculus on a grid, reusing the connection stored in `geo`.
struct GridScalarCalculus {
  std::vector<GridField> gradient;  // d_i f
  GridField norm2;                  // |grad f|^2
  GridField laplacian;              // Delta f
  GridTensor hessian;               // Hess f, full n x n
};

GridScalarCalculus grid_scalar_calculus(const GridCurvature& geo, const GridField& f, bool with_hessian = false);
GridField grid_laplacian(const GridCurvature& geo, const GridField& w);

// Integral of s dV using the volume form stored in `geo`.
double integrate(const GridCurvature& geo, const GridField& s);

// Value of the chosen *-scalar (r*, tr_g S*, or ordinary scalar curvature).
enum class StarScalarMode { RStar, TraceSStar, Scalar };
const GridField& star_scalar(const GridCurvature& geo, StarScalarMode mode);

GridMetric symmetric_part(const GridTensor& t);

}  // namespace starlab
