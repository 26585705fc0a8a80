#include "starlab/grid_geometry.hpp"

#include <mutex>

#include "starlab/parallel.hpp"
#include "starlab/smallmat.hpp"
#include "starlab/spectral.hpp"

namespace starlab {

void visit_grid_geometry(const GridMetric& g, const std::function<void(GeometryVisit&)>& visit) {
  const int n = g.dim;
  const int nc = static_cast<int>(g.comps.size());
  const int nh = n * (n + 1) / 2;
  const GridPtr& grid = g.grid;

  // first[k * nc + c], second[sym(k,l) * nc + c]
  std::vector<GridField> first(static_cast<std::size_t>(n * nc));
  std::vector<GridField> second(static_cast<std::size_t>(nh * nc));
  for (int c = 0; c < nc; ++c) {
    const Spectrum s = fourier_transform(g.comps[c]);
    for (int k = 0; k < n; ++k) {
      Exponent e{};
      e[k] = 1;
      first[k * nc + c] = spectral_derivative(s, e);
      for (int l = k; l < n; ++l) {
        Exponent e2{};
        ++e2[k];
        ++e2[l];
        second[GridMetric::sym(k, l, n) * nc + c] = spectral_derivative(s, e2);
      }
    }
  }

  // Raw pointers per (component, derivative) so the point loop is plain loads.
  std::vector<const double*> g0(static_cast<std::size_t>(n * n)), g1(static_cast<std::size_t>(n * n * n)),
      g2(static_cast<std::size_t>(n * n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int c = GridMetric::sym(i, j, n);
      g0[i * n + j] = g.comps[c].samples().data();
      for (int k = 0; k < n; ++k) {
        g1[(k * n + i) * n + j] = first[k * nc + c].samples().data();
        for (int l = 0; l < n; ++l)
          g2[((k * n + l) * n + i) * n + j] = second[GridMetric::sym(k, l, n) * nc + c].samples().data();
      }
    }

  parallel_chunks(grid->size(), [&](std::size_t begin, std::size_t end) {
    MetricJet<double> m;
    m.resize(n);
    GeometryJet<double> geo;
    PointScratch scratch;
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t q = 0; q < g0.size(); ++q) m.g[q] = g0[q][p];
      for (std::size_t q = 0; q < g1.size(); ++q) m.dg[q] = g1[q][p];
      for (std::size_t q = 0; q < g2.size(); ++q) m.ddg[q] = g2[q][p];
      compute_geometry(m, geo);
      GeometryVisit v{p, m, geo, scratch};
      visit(v);
    }
  });
}

namespace {

GridTensor make_tensor(const GridPtr& grid, int n) {
  GridTensor t;
  t.grid = grid;
  t.dim = n;
  t.comps.assign(static_cast<std::size_t>(n * n), GridField(grid, 0.0));
  return t;
}

}  // namespace

GridCurvature grid_curvature(const GridMetric& g, const GridTensor* phi, GridCurvatureOptions options) {
  const int n = g.dim;
  const GridPtr& grid = g.grid;
  GridCurvature out;
  out.grid = grid;
  out.dim = n;
  out.ginv = zero_like(g);
  out.christoffel.assign(static_cast<std::size_t>(n * n * n), GridField(grid, 0.0));
  out.gamma_trace.assign(static_cast<std::size_t>(n), GridField(grid, 0.0));
  out.sqrt_det = GridField(grid, 0.0);
  out.min_eig = GridField(grid, 0.0);
  out.scalar = GridField(grid, 0.0);
  out.ricci = make_tensor(grid, n);
  const bool star = options.star && phi != nullptr;
  if (star) {
    out.s_star = make_tensor(grid, n);
    out.ric_star = make_tensor(grid, n);
    out.r_star = GridField(grid, 0.0);
    out.trace_s_star = GridField(grid, 0.0);
  }

  std::mutex merge_mutex;
  double s_asym = 0.0, r_asym = 0.0;
  IdentityResiduals ids;

  // Pointwise maxima merged under a lock; max is order-independent.
  struct PointMax {
    double s_asym = 0.0, r_asym = 0.0;
    IdentityResiduals ids;
  };

  visit_grid_geometry(g, [&](GeometryVisit& v) {
    const std::size_t p = v.index;
    const auto& geo = v.geometry;
    PointMax local;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.ginv.comps[GridMetric::sym(i, j, n)][p] = geo.ginv[i * n + j];
    for (int k = 0; k < n; ++k) {
      double tr = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double gk = geo.christoffel[(k * n + i) * n + j];
          out.christoffel[(k * n + i) * n + j][p] = gk;
          tr += geo.ginv[i * n + j] * gk;
        }
      out.gamma_trace[k][p] = tr;
    }
    out.sqrt_det[p] = std::sqrt(geo.det);
    out.min_eig[p] = smallmat::min_eigenvalue(n, geo.g.data());
    out.scalar[p] = geo.scalar;
    for (int c = 0; c < n * n; ++c) out.ricci.comps[c][p] = geo.ricci[c];

    if (star) {
      auto& ph = v.scratch.phi;
      ph.resize(static_cast<std::size_t>(n * n));
      for (int c = 0; c < n * n; ++c) ph[c] = phi->comps[c][p];
      auto& st = v.scratch.star;
      compute_star<double>(geo, ph, st);
      for (int c = 0; c < n * n; ++c) {
        out.s_star.comps[c][p] = st.s_star[c];
        out.ric_star.comps[c][p] = st.ric_star_frame[c];
      }
      out.r_star[p] = st.r_star;
      out.trace_s_star[p] = st.trace_s_star;
      local.s_asym = asymmetry<double>(n, st.s_star);
      local.r_asym = asymmetry<double>(n, st.ric_star_frame);
    }
    if (options.identities) {
      local.ids = identity_residuals(geo);
      metric_compatibility<double>(geo, v.metric.dg, local.ids);
    }
    if (star || options.identities) {
      std::lock_guard<std::mutex> lock(merge_mutex);
      s_asym = std::max(s_asym, local.s_asym);
      r_asym = std::max(r_asym, local.r_asym);
      ids.merge(local.ids);
    }
  });
  out.s_star_asymmetry = s_asym;
  out.ric_star_asymmetry = r_asym;
  out.identities = ids;
  return out;
}

GridScalarCalculus grid_scalar_calculus(const GridCurvature& geo, const GridField& f, bool with_hessian) {
  const int n = geo.dim;
  const auto d = scalar_derivatives(f, true);
  GridScalarCalculus out;
  out.gradient = d.gradient;
  out.norm2 = GridField(geo.grid, 0.0);
  out.laplacian = GridField(geo.grid, 0.0);
  if (with_hessian) out.hessian = make_tensor(geo.grid, n);
  parallel_chunks(geo.grid->size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      double norm2 = 0.0, lap = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double gij = geo.ginv.at(i, j, p);
          norm2 += gij * d.gradient[i][p] * d.gradient[j][p];
          lap += gij * d.hessian[GridMetric::sym(i, j, n)][p];
        }
      for (int k = 0; k < n; ++k) lap -= geo.gamma_trace[k][p] * d.gradient[k][p];
      out.norm2[p] = norm2;
      out.laplacian[p] = lap;
      if (with_hessian)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double h = d.hessian[GridMetric::sym(i, j, n)][p];
            for (int k = 0; k < n; ++k) h -= geo.gamma(k, i, j, p) * d.gradient[k][p];
            out.hessian.comps[i * n + j][p] = h;
          }
    }
  });
  return out;
}

GridField grid_laplacian(const GridCurvature& geo, const GridField& w) {
  return grid_scalar_calculus(geo, w, false).laplacian;
}

double integrate(const GridCurvature& geo, const GridField& s) {
  if (s.size() != geo.grid->size()) fail(ErrorKind::ShapeMismatch, "integrand and geometry grids differ");
  std::vector<double> terms(s.size());
  for (std::size_t p = 0; p < terms.size(); ++p) terms[p] = s[p] * geo.sqrt_det[p];
  return pairwise_sum(terms) * geo.grid->cell_volume();
}

const GridField& star_scalar(const GridCurvature& geo, StarScalarMode mode) {
  switch (mode) {
    case StarScalarMode::RStar:
      if (geo.r_star.size() == 0) fail(ErrorKind::InvalidArgument, "r* requested without phi");
      return geo.r_star;
    case StarScalarMode::TraceSStar:
      if (geo.trace_s_star.size() == 0) fail(ErrorKind::InvalidArgument, "tr S* requested without phi");
      return geo.trace_s_star;
    case StarScalarMode::Scalar:
      return geo.scalar;
  }
  return geo.scalar;
}

GridMetric symmetric_part(const GridTensor& t) {
  const int n = t.dim;
  GridMetric m;
  m.grid = t.grid;
  m.dim = n;
  m.comps.resize(static_cast<std::size_t>(n * (n + 1) / 2));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      GridField c(t.grid, 0.0);
      for (std::size_t p = 0; p < c.size(); ++p) c[p] = 0.5 * (t.comps[i * n + j][p] + t.comps[j * n + i][p]);
      m.comps[GridMetric::sym(i, j, n)] = std::move(c);
    }
  return m;
}

}  // namespace starlab
