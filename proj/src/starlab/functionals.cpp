#include "starlab/functionals.hpp"

#include <cmath>
#include <cstdio>

#include "starlab/curvature.hpp"
#include "starlab/errors.hpp"
#include "starlab/parallel.hpp"
#include "starlab/richardson.hpp"
#include "starlab/smallmat.hpp"
#include "starlab/spectral.hpp"

namespace starlab {

// ---- Solitons --------------------------------------------------------------

std::vector<double> soliton_residual_at(const AnalyticField& g, const AnalyticField* phi, const SolitonData& data,
                                        std::span<const double> x, double t) {
  const int n = g.dim();
  if (data.variant == SolitonVariant::Star && phi == nullptr)
    fail(ErrorKind::InvalidArgument, "star soliton residual needs phi");
  const auto point = analytic_point(g, data.variant == SolitonVariant::Star ? phi : nullptr, x, t, 2);
  std::vector<double> out =
      data.V.valid() ? lie_derivative_metric(data.V, g, x, t) : std::vector<double>(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double gij = point.metric.g[i * n + j].value();
      if (data.variant == SolitonVariant::Ricci)
        out[i * n + j] += 2.0 * point.geometry.ricci[i * n + j].value() - data.lambda * gij;
      else
        out[i * n + j] += 2.0 * point.star.s_star[i * n + j].value() + 2.0 * data.lambda * gij;
    }
  return out;
}

SolitonResidual soliton_residual(const AnalyticField& g, const AnalyticField* phi, const SolitonData& data,
                                 const Domain& domain, int per_axis, double t) {
  const int n = g.dim();
  if (per_axis < 1) fail(ErrorKind::InvalidArgument, "need at least one point per axis");
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) count *= static_cast<std::size_t>(per_axis);
  SolitonResidual out;
  out.points.resize(count);
  for (std::size_t p = 0; p < count; ++p) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::size_t rest = p;
    for (int a = n - 1; a >= 0; --a) {
      const double i = static_cast<double>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      if (domain.kind == DomainKind::Torus)
        x[a] = i * domain.period(a) / per_axis;
      else
        x[a] = domain.lower[a] + (i + 0.5) * (domain.upper[a] - domain.lower[a]) / per_axis;
    }
    out.points[p] = std::move(x);
  }
  out.residual.resize(count);
  std::vector<double> norms(count);
  parallel_chunks(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      out.residual[p] = soliton_residual_at(g, phi, data, out.points[p], t);
      const auto gv = g.values(out.points[p], t);
      norms[p] = smallmat::operator_norm(n, gv.data(), out.residual[p].data());
    }
  });
  for (double v : norms) out.sup_norm = std::max(out.sup_norm, v);
  return out;
}

// ---- F-functional ------------------------------------------------------------

namespace {

GridMetric metric_inverse(const GridMetric& g) {
  const int n = g.dim;
  GridMetric inv = zero_like(g);
  parallel_chunks(g.grid->size(), [&](std::size_t begin, std::size_t end) {
    double m[25], mi[25];
    for (std::size_t p = begin; p < end; ++p) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = g.at(i, j, p);
      double det = 0.0;
      if (!smallmat::inverse_det(n, m, mi, det))
        fail(ErrorKind::NonPositiveDefinite, "metric is not positive definite at grid point " + std::to_string(p));
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) inv.comps[GridMetric::sym(i, j, n)][p] = mi[i * n + j];
    }
  });
  return inv;
}

double dot(const GridMetric& ginv, const std::vector<GridField>& a, const std::vector<GridField>& b, std::size_t p) {
  const int n = ginv.dim;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += ginv.at(i, j, p) * a[i][p] * b[j][p];
  return s;
}

// A_ab B_cd g^ac g^bd for full n x n arrays.
double contract(int n, const GridMetric& ginv, std::size_t p, const double* A, const double* B) {
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double up = 0.0;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) up += ginv.at(a, c, p) * ginv.at(b, d, p) * B[c * n + d];
      s += A[a * n + b] * up;
    }
  return s;
}

}  // namespace

double f_functional(const GridMetric& g, const GridField& f, double constant) {
  const GridMetric ginv = metric_inverse(g);
  const auto d = scalar_derivatives(f, false);
  GridField s(f.grid(), 0.0);
  for (std::size_t p = 0; p < s.size(); ++p)
    s[p] = (constant + dot(ginv, d.gradient, d.gradient, p)) * std::exp(-f[p]);
  return integrate_over_torus(s, g);
}

GridField sample_time_derivative(const AnalyticField& f, const GridPtr& grid, double t) {
  GridField out(grid, 0.0);
  std::vector<double> x(static_cast<std::size_t>(grid->dim()));
  for (std::size_t p = 0; p < grid->size(); ++p) {
    grid->point(p, x);
    out[p] = f.eval_time_derivative(x, 0, t)[0].value();
  }
  return out;
}

double dF_dt_formula(const GridMetric& g, const GridMetric& h, const GridField& f, const GridField& fdot,
                     FormulaMode mode, double constant) {
  const int n = g.dim;
  const auto curv = grid_curvature(g, nullptr, {false, false});
  const auto sf = grid_scalar_calculus(curv, f);
  const auto dfd = scalar_derivatives(fdot, false);
  std::vector<double> terms(f.size());
  for (std::size_t p = 0; p < terms.size(); ++p) {
    // h(grad f, grad f) and tr_g h
    double hff = 0.0, trh = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double ui = 0.0, uj = 0.0;
        for (int a = 0; a < n; ++a) {
          ui += curv.ginv.at(i, a, p) * sf.gradient[a][p];
          uj += curv.ginv.at(j, a, p) * sf.gradient[a][p];
        }
        hff += h.at(i, j, p) * ui * uj;
        trh += curv.ginv.at(i, j, p) * h.at(i, j, p);
      }
    const double tail = (constant + sf.norm2[p]) * (-fdot[p] + 0.5 * trh);
    double head;
    if (mode == FormulaMode::Chain)
      head = -hff + 2.0 * dot(curv.ginv, dfd.gradient, sf.gradient, p);
    else
      head = hff - 2.0 * fdot[p] * (sf.laplacian[p] - sf.norm2[p]);
    terms[p] = (head + tail) * std::exp(-f[p]);
  }
  return integrate(curv, GridField(f.grid(), std::move(terms)));
}

DFdtCheck dF_dt_check(const GridMetric& g_t0, const GridTensor& phi, const AnalyticField& f, double t0,
                      const FdParams& fd, double constant) {
  const GridPtr& grid = g_t0.grid;
  const StarRate k1 = star_ricci_rate(g_t0, phi);
  const GridField f0 = sample_scalar(f, grid, t0);
  const GridField fdot = sample_time_derivative(f, grid, t0);
  DFdtCheck out;
  out.chain = dF_dt_formula(g_t0, k1.rate, f0, fdot, FormulaMode::Chain, constant);
  out.paper = dF_dt_formula(g_t0, k1.rate, f0, fdot, FormulaMode::Paper, constant);
  const auto est = richardson_time_derivative(
      [&](double t) {
        const double s = t - t0;
        const GridMetric g = s == 0.0 ? g_t0 : rk4_metric_step(g_t0, phi, s, k1);
        return f_functional(g, sample_scalar(f, grid, t), constant);
      },
      t0, fd.h0, fd.levels);
  out.fd = est.value;
  out.fd_error = est.error_estimate;
  return out;
}

// ---- Entropy -----------------------------------------------------------------

GridField grad_norm2(const FlowGeometry& geo, const GridField& f) {
  const auto d = scalar_derivatives(f, false);
  GridField out(f.grid(), 0.0);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = dot(geo.ginv, d.gradient, d.gradient, p);
  return out;
}

double integrate(const FlowGeometry& geo, const GridField& s) {
  if (s.size() != geo.sqrt_det.size()) fail(ErrorKind::ShapeMismatch, "integrand and geometry grids differ");
  std::vector<double> terms(s.size());
  for (std::size_t p = 0; p < terms.size(); ++p) terms[p] = s[p] * geo.sqrt_det[p];
  return pairwise_sum(terms) * s.grid()->cell_volume();
}

UVFields u_v_fields(const FlowGeometry& geo, const GridField& f, const EntropyContext& ctx) {
  if (!(ctx.tau > 0.0)) fail(ErrorKind::InvalidArgument, "tau must be positive");
  const int n = f.grid()->dim();
  UVFields out;
  out.u = u_field(f, ctx.tau, n, ctx.convention);
  const GridField lap = laplacian(geo, f);
  const GridField gn = grad_norm2(geo, f);
  out.v = GridField(f.grid(), 0.0);
  for (std::size_t p = 0; p < f.size(); ++p)
    out.v[p] = (ctx.tau * (2.0 * lap[p] - gn[p] + geo.star_scalar[p]) + f[p] - n) * out.u[p];
  out.normalization = integrate(geo, out.u);
  out.shift = std::log(out.normalization);
  return out;
}

UVFields u_v_fields(const GridMetric& g, const GridTensor& phi, const GridField& f, const EntropyContext& ctx) {
  return u_v_fields(flow_geometry(g, phi, ctx.star_scalar), f, ctx);
}

double omega_entropy(const FlowGeometry& geo, const GridField& f, const EntropyContext& ctx) {
  if (!(ctx.tau > 0.0)) fail(ErrorKind::InvalidArgument, "tau must be positive");
  const int n = f.grid()->dim();
  const GridField u = u_field(f, ctx.tau, n, ctx.convention);
  const double mass = integrate(geo, u);
  if (!(std::abs(mass - 1.0) <= 1e-8))
    {
    char buf[96];
    std::snprintf(buf, sizeof buf, "int u dV = %.12g (shift f by its log)", mass);
    fail(ErrorKind::NotNormalized, buf);
  }
  const GridField gn = grad_norm2(geo, f);
  GridField s(f.grid(), 0.0);
  for (std::size_t p = 0; p < s.size(); ++p)
    s[p] = (ctx.tau * (geo.star_scalar[p] + gn[p]) + f[p] - n) * u[p];
  return integrate(geo, s);
}

double omega_entropy(const GridMetric& g, const GridTensor& phi, const GridField& f, const EntropyContext& ctx) {
  return omega_entropy(flow_geometry(g, phi, ctx.star_scalar), f, ctx);
}

// ---- Heat operators ------------------------------------------------------------

const FlowGeometry& TrajectoryGeometry::at(std::size_t step) {
  if (step >= tr_.g.size()) fail(ErrorKind::WindowError, "step outside the trajectory");
  auto& slot = cache_[step];
  if (!slot) slot = std::make_unique<FlowGeometry>(flow_geometry(tr_.g[step], phi_, tr_.star_scalar));
  return *slot;
}

FdParams trajectory_fd(const Trajectory& tr) { return {4.0 * tr.dt, 3}; }

GridField conjugate_heat_apply(const SpaceTimeScalar& w, TrajectoryGeometry& geo, double t0, HeatOperator which,
                               const FdParams& fd) {
  const Trajectory& tr = geo.trajectory();
  const std::size_t k0 = tr.index_of(t0);
  const auto offsets = richardson_offsets(fd.levels);
  for (double o : offsets) tr.index_of(t0 + o * fd.h0);
  const auto dw = richardson_time_derivative(
      [&](double t) {
        const GridField s = w(tr.index_of(t));
        return std::vector<double>(s.samples().begin(), s.samples().end());
      },
      t0, fd.h0, fd.levels);
  const GridField w0 = w(k0);
  const FlowGeometry& g0 = geo.at(k0);
  const GridField lap = laplacian(g0, w0);
  GridField out(w0.grid(), 0.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (which == HeatOperator::Box)
      out[p] = dw[p] - lap[p];
    else
      out[p] = -dw[p] - lap[p] + g0.star_scalar[p] * w0[p];
  }
  return out;
}

TransportCheck transport_check(TrajectoryGeometry& geo, double t0, const FdParams& fd) {
  const Trajectory& tr = geo.trajectory();
  const std::size_t k0 = tr.index_of(t0);
  const int n = tr.dim;
  auto ctx_at = [&](std::size_t k) { return EntropyContext{tr.tau(tr.t[k]), tr.convention, tr.star_scalar}; };
  TransportCheck out;
  out.tau = tr.tau(t0);

  for (double o : richardson_offsets(fd.levels)) tr.index_of(t0 + o * fd.h0);
  const auto est = richardson_time_derivative(
      [&](double t) {
        const std::size_t k = tr.index_of(t);
        return omega_entropy(geo.at(k), tr.f[k], ctx_at(k));
      },
      t0, fd.h0, fd.levels);
  out.domega_fd = est.value;
  out.domega_fd_error = est.error_estimate;

  const SpaceTimeScalar v = [&](std::size_t k) { return u_v_fields(geo.at(k), tr.f[k], ctx_at(k)).v; };
  const GridField bv = conjugate_heat_apply(v, geo, t0, HeatOperator::BoxStar, fd);
  out.minus_int_box_star_v = -integrate(geo.at(k0), bv);

  // Displayed formula for box* v at t0.
  {
    const GridField& f = tr.f[k0];
    const auto curv = grid_curvature(tr.g[k0], &geo.phi());
    const auto sf = grid_scalar_calculus(curv, f, true);
    const GridField& rs = star_scalar(curv, tr.star_scalar);
    const auto uv = u_v_fields(geo.at(k0), f, ctx_at(k0));
    const auto dgn = scalar_derivatives(sf.norm2, false);
    const auto dlap = scalar_derivatives(sf.laplacian, false);
    const double tau = out.tau;
    std::vector<double> expanded(f.size()), asym(f.size());
    std::vector<double> S(static_cast<std::size_t>(n * n)), A(S.size()), H(S.size());
    for (std::size_t p = 0; p < f.size(); ++p) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          S[i * n + j] = curv.s_star.at(i, j, p);
          A[i * n + j] = 0.5 * (curv.s_star.at(i, j, p) - curv.s_star.at(j, i, p));
          H[i * n + j] = sf.hessian.at(i, j, p);
        }
      const double sh = contract(n, curv.ginv, p, S.data(), H.data());
      const double ah = contract(n, curv.ginv, p, A.data(), H.data());
      const double hh = contract(n, curv.ginv, p, H.data(), H.data());
      const double bracket = 4.0 * sh - 2.0 * dot(curv.ginv, dgn.gradient, sf.gradient, p) +
                             4.0 * dot(curv.ginv, dlap.gradient, sf.gradient, p) + 2.0 * hh;
      const double u = uv.u[p];
      expanded[p] = 2.0 * u * (sf.laplacian[p] - sf.norm2[p] + rs[p]) - u * n / (2.0 * tau) - uv.v[p] - u * tau * bracket;
      asym[p] = u * tau * 4.0 * ah;
    }
    out.minus_int_expanded = -integrate(curv, GridField(f.grid(), std::move(expanded)));
    out.expanded_asym_contribution = integrate(curv, GridField(f.grid(), std::move(asym)));
  }

  auto sup = [](const GridField& a) { return a.max_abs(); };
  const SpaceTimeScalar un = [&](std::size_t k) {
    return u_field(tr.f[k], tr.tau(tr.t[k]), n, UConvention::Normalized);
  };
  const SpaceTimeScalar ul = [&](std::size_t k) { return u_field(tr.f[k], tr.tau(tr.t[k]), n, UConvention::Literal); };
  out.box_star_u_normalized = sup(conjugate_heat_apply(un, geo, t0, HeatOperator::BoxStar, fd));
  GridField bl = conjugate_heat_apply(ul, geo, t0, HeatOperator::BoxStar, fd);
  out.box_star_u_literal = sup(bl);
  const GridField u0 = ul(k0);
  out.literal_u_sup = sup(u0);
  bl.axpy(-n / (2.0 * out.tau), u0);
  out.literal_excess = sup(bl);
  return out;
}

}  // namespace starlab
