#include "starlab/curvature.hpp"

namespace starlab {

void IdentityResiduals::merge(const IdentityResiduals& o) {
  antisym_first_pair = std::max(antisym_first_pair, o.antisym_first_pair);
  antisym_second_pair = std::max(antisym_second_pair, o.antisym_second_pair);
  pair_symmetry = std::max(pair_symmetry, o.pair_symmetry);
  first_bianchi = std::max(first_bianchi, o.first_bianchi);
  ricci_trace = std::max(ricci_trace, o.ricci_trace);
  metric_compat = std::max(metric_compat, o.metric_compat);
  christoffel_symmetry = std::max(christoffel_symmetry, o.christoffel_symmetry);
  riemann_scale = std::max(riemann_scale, o.riemann_scale);
  scalar_scale = std::max(scalar_scale, o.scalar_scale);
  metric_scale = std::max(metric_scale, o.metric_scale);
}

MetricJet<Jet> metric_jet(const AnalyticField& metric, std::span<const double> x, double t, int order) {
  if (metric.kind() != FieldKind::Tensor) fail(ErrorKind::ShapeMismatch, "metric must be a tensor field");
  if (order < 2) fail(ErrorKind::InvalidArgument, "metric jets need order >= 2");
  const int n = metric.dim();
  const auto raw = metric.eval(x, order, t);
  MetricJet<Jet> m;
  m.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.g[i * n + j] = Jet(0.5) * (raw[i * n + j] + raw[j * n + i]);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.dg[(k * n + i) * n + j] = m.g[i * n + j].differentiate(k);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          m.ddg[((k * n + l) * n + i) * n + j] = m.dg[(k * n + i) * n + j].differentiate(l);
  return m;
}

namespace {

std::vector<double> values(const std::vector<Jet>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].value();
  return out;
}

}  // namespace

MetricJet<double> metric_values(const MetricJet<Jet>& m) {
  MetricJet<double> out;
  out.n = m.n;
  out.g = values(m.g);
  out.dg = values(m.dg);
  out.ddg = values(m.ddg);
  return out;
}

GeometryJet<double> geometry_values(const GeometryJet<Jet>& g) {
  GeometryJet<double> out;
  out.n = g.n;
  out.det = g.det.value();
  out.g = values(g.g);
  out.ginv = values(g.ginv);
  out.christoffel = values(g.christoffel);
  out.dchristoffel = values(g.dchristoffel);
  out.riemann_up = values(g.riemann_up);
  out.riemann = values(g.riemann);
  out.ricci = values(g.ricci);
  out.scalar = g.scalar.value();
  return out;
}

AnalyticPoint analytic_point(const AnalyticField& metric, const AnalyticField* phi, std::span<const double> x,
                             double t, int order) {
  AnalyticPoint p;
  p.metric = metric_jet(metric, x, t, order);
  compute_geometry(p.metric, p.geometry);
  if (phi != nullptr) {
    p.phi = phi->eval(x, order, t);
    compute_star<Jet>(p.geometry, p.phi, p.star);
  }
  return p;
}

std::vector<double> nabla_s_star(const AnalyticPoint& point) {
  const int n = point.geometry.n;
  if (point.star.s_star.empty()) fail(ErrorKind::InvalidArgument, "no phi supplied for S*");
  if (point.star.s_star[0].order() < 1) fail(ErrorKind::InvalidArgument, "S* jet order too low");
  std::vector<double> s(static_cast<std::size_t>(n * n));
  std::vector<double> ds(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet& e = point.star.s_star[i * n + j];
      s[i * n + j] = e.value();
      for (int k = 0; k < n; ++k) ds[(k * n + i) * n + j] = e.partial(k);
    }
  const auto geo = geometry_values(point.geometry);
  return covariant_derivative_02<double>(geo, s, ds);
}

std::vector<double> lie_derivative_metric(const AnalyticField& v, const AnalyticField& metric,
                                          std::span<const double> x, double t, bool covariant) {
  if (v.kind() != FieldKind::Vector) fail(ErrorKind::ShapeMismatch, "expected a vector field");
  const int n = metric.dim();
  const auto vj = v.eval(x, 1, t);
  std::vector<double> vv(static_cast<std::size_t>(n)), dv(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k) {
    vv[k] = vj[k].value();
    for (int i = 0; i < n; ++i) dv[i * n + k] = vj[k].partial(i);
  }
  const auto mj = metric_values(metric_jet(metric, x, t, 2));
  if (!covariant) return lie_derivative_coordinates<double>(n, mj.g, mj.dg, vv, dv);

  GeometryJet<double> geo;
  compute_geometry(mj, geo);
  // V_j = g_jk V^k and d_i V_j.
  std::vector<double> low(static_cast<std::size_t>(n), 0.0), dlow(static_cast<std::size_t>(n * n), 0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      low[j] += mj.g[j * n + k] * vv[k];
      for (int i = 0; i < n; ++i)
        dlow[i * n + j] += mj.dg[(i * n + j) * n + k] * vv[k] + mj.g[j * n + k] * dv[i * n + k];
    }
  const auto nab = covariant_derivative_01<double>(geo, low, dlow);
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = nab[i * n + j] + nab[j * n + i];
  return out;
}

double BochnerTerms::scale() const {
  return std::max({std::abs(half_laplacian_norm2), std::abs(hessian_norm2), std::abs(grad_laplacian_dot),
                   std::abs(ricci_term)});
}

BochnerTerms bochner_residual(const AnalyticField& f, const AnalyticField& metric, std::span<const double> x,
                              double t) {
  if (f.kind() != FieldKind::Scalar) fail(ErrorKind::ShapeMismatch, "expected a scalar field");
  const int n = metric.dim();
  const auto mj = metric_jet(metric, x, t, 3);
  GeometryJet<Jet> geo;
  compute_geometry(mj, geo);
  const auto gv = geometry_values(geo);

  const Jet fj = f.eval(x, 4, t)[0];
  std::vector<Jet> df(static_cast<std::size_t>(n)), ddf(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) df[i] = fj.differentiate(i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ddf[i * n + j] = df[i].differentiate(j);
  ScalarJet<Jet> sc;
  compute_scalar<Jet>(geo, df, ddf, sc);

  BochnerTerms b;
  std::vector<double> d1(static_cast<std::size_t>(n)), d2(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    d1[i] = sc.norm2.partial(i);
    for (int j = 0; j < n; ++j) d2[i * n + j] = sc.norm2.partial(i, j);
  }
  b.half_laplacian_norm2 = 0.5 * laplacian<double>(gv, d1, d2);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          b.hessian_norm2 += sc.hess[i * n + j].value() * sc.hess[k * n + l].value() * gv.ginv[i * n + k] *
                             gv.ginv[j * n + l];

  for (int i = 0; i < n; ++i) b.grad_laplacian_dot += sc.laplacian.partial(i) * sc.grad_up[i].value();

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b.ricci_term += gv.ricci[i * n + j] * sc.grad_up[i].value() * sc.grad_up[j].value();

  b.residual = b.half_laplacian_norm2 - b.hessian_norm2 - b.grad_laplacian_dot - b.ricci_term;
  return b;
}

}  // namespace starlab
