#include "starlab/flow.hpp"

#include <cmath>
#include <numbers>

#include "starlab/errors.hpp"
#include "starlab/parallel.hpp"
#include "starlab/richardson.hpp"
#include "starlab/smallmat.hpp"
#include "starlab/spectral.hpp"

namespace starlab {

namespace {

bool all_finite(const GridMetric& g) {
  for (const auto& c : g.comps)
    for (double v : c.samples())
      if (!std::isfinite(v)) return false;
  return true;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

GridMetric combine(const GridMetric& g, double a, const GridMetric& k) {
  GridMetric out = g;
  out.axpy(a, k);
  return out;
}

}  // namespace

StarRate star_ricci_rate(const GridMetric& g, const GridTensor& phi, FlowGeometry* geometry, StarScalarMode mode) {
  const int n = g.dim;
  const GridPtr& grid = g.grid;
  if (phi.dim != n || phi.grid->size() != grid->size()) fail(ErrorKind::ShapeMismatch, "phi does not match metric");
  StarRate out;
  out.rate = zero_like(g);
  std::vector<double> asym(grid->size()), norm(grid->size());
  if (geometry != nullptr) {
    geometry->ginv = zero_like(g);
    geometry->gamma_trace.assign(static_cast<std::size_t>(n), GridField(grid, 0.0));
    geometry->sqrt_det = GridField(grid, 0.0);
    geometry->star_scalar = GridField(grid, 0.0);
    geometry->trace_s_star = GridField(grid, 0.0);
  }
  const bool frame = geometry != nullptr && mode == StarScalarMode::RStar;

  visit_grid_geometry(g, [&](GeometryVisit& v) {
    const std::size_t p = v.index;
    const auto& geo = v.geometry;
    auto& ph = v.scratch.phi;
    ph.resize(static_cast<std::size_t>(n * n));
    for (int c = 0; c < n * n; ++c) ph[c] = phi.comps[c][p];
    auto& st = v.scratch.star;
    compute_star<double>(geo, ph, st, frame);
    asym[p] = asymmetry<double>(n, st.s_star);
    auto& sym = v.scratch.a;
    sym.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sym[i * n + j] = 0.5 * (st.s_star[i * n + j] + st.s_star[j * n + i]);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out.rate.comps[GridMetric::sym(i, j, n)][p] = -2.0 * sym[i * n + j];
    // |S|_g^2 = S_ab S_cd g^ac g^bd
    double s2 = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double up = 0.0;
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) up += geo.ginv[a * n + c] * geo.ginv[b * n + d] * sym[c * n + d];
        s2 += up * sym[a * n + b];
      }
    norm[p] = std::sqrt(std::max(0.0, s2));
    if (geometry != nullptr) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) geometry->ginv.comps[GridMetric::sym(i, j, n)][p] = geo.ginv[i * n + j];
      for (int k = 0; k < n; ++k) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) tr += geo.ginv[i * n + j] * geo.christoffel[(k * n + i) * n + j];
        geometry->gamma_trace[k][p] = tr;
      }
      geometry->sqrt_det[p] = std::sqrt(geo.det);
      geometry->trace_s_star[p] = st.trace_s_star;
      switch (mode) {
        case StarScalarMode::RStar: geometry->star_scalar[p] = st.r_star; break;
        case StarScalarMode::TraceSStar: geometry->star_scalar[p] = st.trace_s_star; break;
        case StarScalarMode::Scalar: geometry->star_scalar[p] = geo.scalar; break;
      }
    }
  });
  out.asymmetry = max_of(asym);
  out.max_norm = max_of(norm);
  return out;
}

FlowGeometry flow_geometry(const GridMetric& g, const GridTensor& phi, StarScalarMode mode) {
  FlowGeometry geo;
  star_ricci_rate(g, phi, &geo, mode);
  return geo;
}

double min_eigenvalue(const GridMetric& g) {
  const int n = g.dim;
  std::vector<double> lo(g.grid->size());
  parallel_chunks(lo.size(), [&](std::size_t begin, std::size_t end) {
    double m[25];
    for (std::size_t p = begin; p < end; ++p) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = g.at(i, j, p);
      lo[p] = smallmat::min_eigenvalue(n, m);
    }
  });
  double m = lo.empty() ? 0.0 : lo[0];
  for (double v : lo) m = std::min(m, v);
  return m;
}

GridMetric rk4_metric_step(const GridMetric& g, const GridTensor& phi, double dt, const StarRate& k1,
                           double* asymmetry) {
  if (!all_finite(k1.rate)) fail(ErrorKind::StepRejected, "non-finite rate at stage 1");
  StarRate k2 = star_ricci_rate(combine(g, 0.5 * dt, k1.rate), phi);
  if (!all_finite(k2.rate)) fail(ErrorKind::StepRejected, "non-finite rate at stage 2");
  StarRate k3 = star_ricci_rate(combine(g, 0.5 * dt, k2.rate), phi);
  if (!all_finite(k3.rate)) fail(ErrorKind::StepRejected, "non-finite rate at stage 3");
  StarRate k4 = star_ricci_rate(combine(g, dt, k3.rate), phi);
  if (!all_finite(k4.rate)) fail(ErrorKind::StepRejected, "non-finite rate at stage 4");
  GridMetric next = g;
  for (std::size_t c = 0; c < g.comps.size(); ++c)
    for (std::size_t p = 0; p < g.grid->size(); ++p)
      next.comps[c][p] = g.comps[c][p] + dt / 6.0 *
                                             (k1.rate.comps[c][p] + 2.0 * k2.rate.comps[c][p] +
                                              2.0 * k3.rate.comps[c][p] + k4.rate.comps[c][p]);
  if (!all_finite(next)) fail(ErrorKind::StepRejected, "non-finite metric after step");
  if (asymmetry != nullptr) *asymmetry = std::max({k1.asymmetry, k2.asymmetry, k3.asymmetry, k4.asymmetry});
  return next;
}

GridMetric rk4_metric_step(const GridMetric& g, const GridTensor& phi, double dt) {
  return rk4_metric_step(g, phi, dt, star_ricci_rate(g, phi));
}

FlowState flow_step_star_ricci(const FlowState& state, const GridTensor& phi, double dt, const FlowOptions& options,
                               StepLog* log, StarRate* first_stage) {
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "flow step needs dt > 0");
  const GridMetric& g = state.g;
  StarRate k1 = star_ricci_rate(g, phi);
  double h = g.grid->spacing(0);
  for (int a = 1; a < g.dim; ++a) h = std::min(h, g.grid->spacing(a));
  if (k1.max_norm > 0.0 && dt > options.guard_factor * h * h / k1.max_norm)
    fail(ErrorKind::StepRejected, "dt " + std::to_string(dt) + " exceeds the stability guard " +
                                      std::to_string(options.guard_factor * h * h / k1.max_norm));
  FlowState next;
  next.t = state.t + dt;
  next.tau = state.tau - dt;
  double asym = 0.0;
  next.g = rk4_metric_step(g, phi, dt, k1, &asym);
  const double lo = min_eigenvalue(next.g);
  if (!(lo >= options.pd_threshold))
    fail(ErrorKind::PositivityLost, "smallest metric eigenvalue " + std::to_string(lo) + " at t = " +
                                        std::to_string(next.t));
  if (log != nullptr) {
    log->asymmetry = asym;
    log->min_eig = lo;
    log->max_s_norm = k1.max_norm;
  }
  if (first_stage != nullptr) *first_stage = std::move(k1);
  return next;
}

// ---- Coupled system ---------------------------------------------------------

std::size_t Trajectory::index_of(double time) const {
  if (t.empty()) fail(ErrorKind::WindowError, "empty trajectory");
  const double k = std::round(time / dt);
  if (k < 0 || k > static_cast<double>(steps()))
    fail(ErrorKind::WindowError, "time " + std::to_string(time) + " outside the trajectory");
  if (std::abs(k * dt - time) > 1e-6 * dt)
    fail(ErrorKind::WindowError, "time " + std::to_string(time) + " is not a stored step time");
  return static_cast<std::size_t>(k);
}

GridField u_field(const GridField& f, double tau, int dim, UConvention convention) {
  if (!(tau > 0.0)) fail(ErrorKind::InvalidArgument, "tau must be positive");
  const double pre =
      convention == UConvention::Normalized ? std::pow(4.0 * std::numbers::pi * tau, -0.5 * dim) : 1.0;
  GridField u(f.grid(), 0.0);
  for (std::size_t p = 0; p < u.size(); ++p) u[p] = pre * std::exp(-f[p]);
  return u;
}

GridField laplacian(const FlowGeometry& geo, const GridField& w) {
  const GridPtr& grid = w.grid();
  const int n = grid->dim();
  const auto d = scalar_derivatives(w, true);
  GridField out(grid, 0.0);
  for (std::size_t p = 0; p < grid->size(); ++p) {
    double lap = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lap += geo.ginv.at(i, j, p) * d.hessian[GridMetric::sym(i, j, n)][p];
    for (int k = 0; k < n; ++k) lap -= geo.gamma_trace[k][p] * d.gradient[k][p];
    out[p] = lap;
  }
  return out;
}

GridField f_equation_rhs(const FlowGeometry& geo, const GridField& f, double tau) {
  if (!(tau > 0.0)) fail(ErrorKind::InvalidArgument, "tau underflow in the f-equation");
  const GridPtr& grid = f.grid();
  const int n = grid->dim();
  const auto d = scalar_derivatives(f, true);
  GridField out(grid, 0.0);
  const double c = 0.5 * n / tau;
  for (std::size_t p = 0; p < grid->size(); ++p) {
    double lap = 0.0, norm2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double gij = geo.ginv.at(i, j, p);
        lap += gij * d.hessian[GridMetric::sym(i, j, n)][p];
        norm2 += gij * d.gradient[i][p] * d.gradient[j][p];
      }
    for (int k = 0; k < n; ++k) lap -= geo.gamma_trace[k][p] * d.gradient[k][p];
    out[p] = -lap + norm2 - geo.star_scalar[p] + c;
  }
  return out;
}

namespace {

double mass(const FlowGeometry& geo, const GridField& f, double tau, int dim, UConvention convention) {
  const GridField u = u_field(f, tau, dim, convention);
  std::vector<double> terms(u.size());
  for (std::size_t p = 0; p < u.size(); ++p) terms[p] = u[p] * geo.sqrt_det[p];
  return pairwise_sum(terms) * f.grid()->cell_volume();
}

GridField f_plus(const GridField& f, double a, const GridField& k) {
  GridField out = f;
  out.axpy(a, k);
  return out;
}

}  // namespace

Trajectory integrate_coupled_system(const GridMetric& g0, const GridTensor& phi, const GridField& fT,
                                    const CoupledOptions& options) {
  const double dt = options.dt;
  const double T = options.horizon;
  if (!(dt > 0.0) || !(T > 0.0)) fail(ErrorKind::InvalidArgument, "coupled system needs dt > 0 and T > 0");
  if (!(T < options.tau0)) fail(ErrorKind::InvalidArgument, "horizon must stay below tau0 (tau underflow)");
  const double mf = std::round(T / dt);
  if (std::abs(mf * dt - T) > 1e-9 * T) fail(ErrorKind::InvalidArgument, "horizon must be a multiple of dt");
  const std::size_t M = static_cast<std::size_t>(mf);
  const int n = g0.dim;

  Trajectory tr;
  tr.dim = n;
  tr.dt = dt;
  tr.tau0 = options.tau0;
  tr.convention = options.convention;
  tr.star_scalar = options.star_scalar;
  tr.t.resize(M + 1);
  for (std::size_t k = 0; k <= M; ++k) tr.t[k] = static_cast<double>(k) * dt;
  tr.g.reserve(M + 1);
  tr.gdot.reserve(M + 1);
  tr.min_eig.assign(M + 1, 0.0);
  tr.asymmetry.assign(M + 1, 0.0);
  std::vector<FlowGeometry> geos(M + 1);

  // Forward metric pass.
  FlowState s;
  s.t = 0.0;
  s.tau = options.tau0;
  s.g = g0;
  tr.min_eig[0] = min_eigenvalue(g0);
  for (std::size_t k = 0; k <= M; ++k) {
    StarRate rate = star_ricci_rate(s.g, phi, &geos[k], options.star_scalar);
    tr.asymmetry[k] = rate.asymmetry;
    tr.g.push_back(s.g);
    tr.gdot.push_back(std::move(rate.rate));
    if (k == M) break;
    StepLog log;
    s = flow_step_star_ricci(s, phi, dt, options.flow, &log);
    s.t = tr.t[k + 1];
    tr.min_eig[k + 1] = log.min_eig;
  }

  // Backward f pass.
  tr.f.assign(M + 1, GridField());
  GridField f = fT;
  const double tauT = tr.tau(T);
  if (options.convention == UConvention::Normalized) {
    tr.f_shift = std::log(mass(geos[M], fT, tauT, n, UConvention::Normalized));
    for (std::size_t p = 0; p < f.size(); ++p) f[p] += tr.f_shift;
  }
  tr.f[M] = f;
  for (std::size_t k = M; k > 0; --k) {
    const double t1 = tr.t[k];
    GridMetric gmid = tr.g[k - 1];
    for (std::size_t c = 0; c < gmid.comps.size(); ++c)
      for (std::size_t p = 0; p < gmid.grid->size(); ++p)
        gmid.comps[c][p] = 0.5 * (tr.g[k - 1].comps[c][p] + tr.g[k].comps[c][p]) +
                           dt / 8.0 * (tr.gdot[k - 1].comps[c][p] - tr.gdot[k].comps[c][p]);
    const FlowGeometry mid = flow_geometry(gmid, phi, options.star_scalar);
    const GridField k1 = f_equation_rhs(geos[k], f, tr.tau(t1));
    const GridField k2 = f_equation_rhs(mid, f_plus(f, -0.5 * dt, k1), tr.tau(t1 - 0.5 * dt));
    const GridField k3 = f_equation_rhs(mid, f_plus(f, -0.5 * dt, k2), tr.tau(t1 - 0.5 * dt));
    const GridField k4 = f_equation_rhs(geos[k - 1], f_plus(f, -dt, k3), tr.tau(tr.t[k - 1]));
    for (std::size_t p = 0; p < f.size(); ++p) f[p] -= dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
    for (double v : f.samples())
      if (!std::isfinite(v)) fail(ErrorKind::StepRejected, "non-finite f in the backward pass");
    tr.f[k - 1] = f;
  }

  tr.mass.resize(M + 1);
  for (std::size_t k = 0; k <= M; ++k) tr.mass[k] = mass(geos[k], tr.f[k], tr.tau(tr.t[k]), n, options.convention);
  return tr;
}

// ---- Flow maps ----------------------------------------------------------------

FlowMap integrate_flow_map(const AnalyticField& X, std::span<const double> x0, double t, int steps,
                           const Domain* domain) {
  if (X.kind() != FieldKind::Vector) fail(ErrorKind::ShapeMismatch, "flow map needs a vector field");
  if (steps < 1) fail(ErrorKind::InvalidArgument, "flow map needs at least one step");
  const int n = X.dim();
  const std::size_t sz = static_cast<std::size_t>(n + n * n);
  std::vector<double> y(sz, 0.0);
  for (int a = 0; a < n; ++a) {
    y[a] = x0[a];
    y[n + a * n + a] = 1.0;
  }
  auto rhs = [&](const std::vector<double>& state, double s) {
    std::span<const double> xs(state.data(), static_cast<std::size_t>(n));
    if (domain != nullptr && !domain->contains(xs))
      fail(ErrorKind::OutsideDomain, "flow trajectory left " + domain->describe());
    const auto v = X.eval(xs, 1, s);
    std::vector<double> d(sz, 0.0);
    for (int a = 0; a < n; ++a) {
      d[a] = v[a].value();
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int b = 0; b < n; ++b) acc += v[a].partial(b) * state[n + b * n + i];
        d[n + a * n + i] = acc;
      }
    }
    for (double q : d)
      if (!std::isfinite(q)) fail(ErrorKind::StepRejected, "non-finite flow map");
    return d;
  };
  const double h = t / steps;
  std::vector<double> tmp(sz);
  for (int k = 0; k < steps; ++k) {
    const double s = k * h;
    const auto k1 = rhs(y, s);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(tmp, s + 0.5 * h);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(tmp, s + 0.5 * h);
    for (std::size_t i = 0; i < sz; ++i) tmp[i] = y[i] + h * k3[i];
    const auto k4 = rhs(tmp, s + h);
    for (std::size_t i = 0; i < sz; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  FlowMap m;
  m.x.assign(y.begin(), y.begin() + n);
  m.J.assign(y.begin() + n, y.end());
  if (domain != nullptr && !domain->contains(m.x)) fail(ErrorKind::OutsideDomain, "flow map left " + domain->describe());
  return m;
}

std::vector<double> pull_back(const FlowMap& map, std::span<const double> tensor_at_image, int dim) {
  const int n = dim;
  std::vector<double> out(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += map.J[a * n + i] * tensor_at_image[a * n + b] * map.J[b * n + j];
      out[i * n + j] = s;
    }
  return out;
}

Pullback pullback_by_flow(const AnalyticField& X, const AnalyticField& g, std::span<const double> x0, double t,
                          double g_time, const Domain* domain, int steps) {
  Pullback pb;
  pb.map = integrate_flow_map(X, x0, t, steps, domain);
  const auto gv = g.values(pb.map.x, g_time);
  pb.metric = pull_back(pb.map, gv, g.dim());
  return pb;
}

SelfSimilarFamily self_similar_family(const AnalyticField& g0, const AnalyticField& Y, double lambda) {
  SelfSimilarFamily fam;
  fam.sigma = [lambda](double t) { return 1.0 - 2.0 * lambda * t; };
  fam.dsigma = [lambda](double) { return -2.0 * lambda; };
  const auto yev = Y.evaluator();
  fam.X = AnalyticField(Y.dim(), FieldKind::Vector, [yev, lambda](std::span<const Jet> x, double s, std::span<Jet> out) {
    const double sigma = 1.0 - 2.0 * lambda * s;
    if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "self-similar solution expired (sigma <= 0)");
    yev(x, s, out);
    for (auto& o : out) o = o * Jet(1.0 / sigma);
  });
  fam.g = g0;
  return fam;
}

std::vector<double> family_metric(const SelfSimilarFamily& fam, std::span<const double> x, double t,
                                  const Domain* domain) {
  const double sigma = fam.sigma(t);
  if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "self-similar solution expired (sigma <= 0)");
  const auto pb = pullback_by_flow(fam.X, fam.g, x, t, t, domain, fam.steps);
  auto out = pb.metric;
  for (auto& v : out) v *= sigma;
  return out;
}

std::vector<double> family_rhs(const SelfSimilarFamily& fam, std::span<const double> x, double t,
                               const Domain* domain) {
  const int n = fam.g.dim();
  const double sigma = fam.sigma(t);
  if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "self-similar solution expired (sigma <= 0)");
  const FlowMap map = integrate_flow_map(fam.X, x, t, fam.steps, domain);
  const auto gv = fam.g.values(map.x, t);
  const auto gdot_j = fam.g.eval_time_derivative(map.x, 0, t);
  std::vector<double> gdot(static_cast<std::size_t>(n * n));
  for (int c = 0; c < n * n; ++c) gdot[c] = gdot_j[c].value();
  const auto lie = lie_derivative_metric(fam.X, fam.g, map.x, t);
  const auto a = pull_back(map, gv, n);
  const auto b = pull_back(map, gdot, n);
  const auto c = pull_back(map, lie, n);
  std::vector<double> out(static_cast<std::size_t>(n * n));
  const double ds = fam.dsigma(t);
  for (int i = 0; i < n * n; ++i) out[i] = ds * a[i] + sigma * b[i] + sigma * c[i];
  return out;
}

SelfSimilarValue self_similar_metric(const AnalyticField& g0, const AnalyticField& Y, double lambda,
                                     std::span<const double> x, double t, const Domain* domain) {
  const auto fam = self_similar_family(g0, Y, lambda);
  return {family_metric(fam, x, t, domain), family_rhs(fam, x, t, domain)};
}

AnalyticField family_metric_field(const SelfSimilarFamily& fam, double t) {
  const int n = fam.g.dim();
  const double sigma = fam.sigma(t);
  if (!(sigma > 0.0)) fail(ErrorKind::InvalidArgument, "self-similar solution expired (sigma <= 0)");
  return AnalyticField(n, FieldKind::Tensor, [fam, t, sigma, n](std::span<const Jet> x, double, std::span<Jet> out) {
    const int order = x[0].is_constant() ? 0 : x[0].order();
    if (order > 3) fail(ErrorKind::Unsupported, "self-similar metric field supports jet order <= 3");
    std::vector<double> x0(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      x0[a] = x[a].value();
      for (int b = 0; b < n && order > 0; ++b)
        if (x[a].partial(b) != (a == b ? 1.0 : 0.0))
          fail(ErrorKind::Unsupported, "self-similar metric field needs coordinate jets");
    }
    std::vector<Jet> y = coordinate_jets(x0, order + 1);
    std::vector<Jet> tmp(y.size()), k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
    const auto& X = fam.X.evaluator();
    const double h = t / fam.steps;
    for (int k = 0; k < fam.steps; ++k) {
      const double s = k * h;
      X(y, s, k1);
      for (int a = 0; a < n; ++a) tmp[a] = y[a] + Jet(0.5 * h) * k1[a];
      X(tmp, s + 0.5 * h, k2);
      for (int a = 0; a < n; ++a) tmp[a] = y[a] + Jet(0.5 * h) * k2[a];
      X(tmp, s + 0.5 * h, k3);
      for (int a = 0; a < n; ++a) tmp[a] = y[a] + Jet(h) * k3[a];
      X(tmp, s + h, k4);
      for (int a = 0; a < n; ++a) y[a] += Jet(h / 6.0) * (k1[a] + Jet(2.0) * k2[a] + Jet(2.0) * k3[a] + k4[a]);
    }
    std::vector<Jet> J(static_cast<std::size_t>(n * n)), gy(J.size());
    for (int a = 0; a < n; ++a)
      for (int i = 0; i < n; ++i) J[a * n + i] = y[a].differentiate(i);
    fam.g.evaluator()(y, t, gy);
    for (auto& v : gy) v = v.truncate(order);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet s(0.0);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += J[a * n + i] * J[b * n + j] * gy[a * n + b];
        out[i * n + j] = Jet(sigma) * s;
        out[j * n + i] = out[i * n + j];
      }
  });
}

// ---- Connection variation ------------------------------------------------------

namespace {

// Gamma^k_ij from values and first derivatives (dg[k][i][j] = d_k g_ij).
std::vector<double> christoffel(int n, const std::vector<double>& g, const std::vector<double>& dg) {
  std::vector<double> inv(static_cast<std::size_t>(n * n));
  double det = 0.0;
  if (!smallmat::inverse_det(n, g.data(), inv.data(), det))
    fail(ErrorKind::NonPositiveDefinite, "perturbed metric is not positive definite");
  std::vector<double> out(static_cast<std::size_t>(n * n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          s += inv[k * n + m] * 0.5 * (dg[(i * n + j) * n + m] + dg[(j * n + i) * n + m] - dg[(m * n + i) * n + j]);
        out[(k * n + i) * n + j] = s;
      }
  return out;
}

}  // namespace

ConnectionVariation connection_variation_check(const AnalyticField& g, std::span<const Jet> h,
                                               std::span<const double> X, std::span<const double> Y,
                                               std::span<const double> Z, std::span<const double> x, double t) {
  const int n = g.dim();
  const std::size_t n2 = static_cast<std::size_t>(n * n);
  if (h.size() != n2) fail(ErrorKind::ShapeMismatch, "h needs n*n components");
  for (const auto& c : h)
    if (!c.is_constant() && c.order() < 1) fail(ErrorKind::InvalidArgument, "h jets need order >= 1");
  const MetricJet<double> m = metric_values(metric_jet(g, x, t, 2));
  GeometryJet<double> geo;
  compute_geometry(m, geo);

  std::vector<double> hv(n2), dh(n2 * n);
  double gnorm = 0.0, hnorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Jet& a = h[i * n + j];
      const Jet& b = h[j * n + i];
      hv[i * n + j] = 0.5 * (a.value() + b.value());
      hnorm = std::max(hnorm, std::abs(hv[i * n + j]));
      gnorm = std::max(gnorm, std::abs(m.g[i * n + j]));
      for (int k = 0; k < n; ++k) {
        const double d = a.is_constant() ? 0.0 : 0.5 * (a.partial(k) + b.partial(k));
        dh[(k * n + i) * n + j] = d;
        hnorm = std::max(hnorm, std::abs(d));
        gnorm = std::max(gnorm, std::abs(m.dg[(k * n + i) * n + j]));
      }
    }

  ConnectionVariation out;
  auto contract_gamma = [&](const std::vector<double>& gam) {
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += m.g[k * n + l] * Z[l] * X[i] * Y[j] * gam[(k * n + i) * n + j];
    return s;
  };
  if (hnorm > 0.0) {
    const double eps = 1e-5 * gnorm / hnorm;
    const auto fd = richardson_time_derivative(
        [&](double e) {
          std::vector<double> ge(n2), dge(n2 * n);
          for (std::size_t i = 0; i < n2; ++i) ge[i] = m.g[i] + e * hv[i];
          for (std::size_t i = 0; i < n2 * n; ++i) dge[i] = m.dg[i] + e * dh[i];
          return contract_gamma(christoffel(n, ge, dge));
        },
        0.0, eps, 2);
    out.fd_value = fd.value;
    out.fd_error = fd.error_estimate;
  }

  const auto nh = covariant_derivative_02<double>(geo, hv, dh);
  auto nabla = [&](std::span<const double> A, std::span<const double> B, std::span<const double> C) {
    double s = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += A[k] * B[i] * C[j] * nh[(k * n + i) * n + j];
    return s;
  };
  out.standard_value = 0.5 * (nabla(X, Y, Z) + nabla(Y, X, Z) - nabla(Z, X, Y));

  // S = -h/2; nabla_A B = A^i Gamma^k_ij B^j for constant-coefficient fields.
  auto connection = [&](std::span<const double> A, std::span<const double> B) {
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[k] += A[i] * geo.christoffel[(k * n + i) * n + j] * B[j];
    return r;
  };
  auto S = [&](std::span<const double> A, std::span<const double> B) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += -0.5 * hv[i * n + j] * A[i] * B[j];
    return s;
  };
  const auto nxz = connection(X, Z);
  const auto nxy = connection(X, Y);
  out.paper_rhs = nabla(X, Y, Z) + 2.0 * S(Y, nxz) + 2.0 * S(nxy, Z);
  out.scale = std::max(std::abs(out.fd_value), std::abs(out.standard_value));
  return out;
}

ConnectionVariation connection_variation_check(const AnalyticField& g, const AnalyticField& h,
                                               std::span<const double> X, std::span<const double> Y,
                                               std::span<const double> Z, std::span<const double> x, double t) {
  const auto hj = h.eval(x, 1, t);
  return connection_variation_check(g, hj, X, Y, Z, x, t);
}

ConnectionVariation connection_variation_star(const AnalyticField& g, const AnalyticField& phi,
                                              std::span<const double> X, std::span<const double> Y,
                                              std::span<const double> Z, std::span<const double> x, double t) {
  const int n = g.dim();
  const auto p = analytic_point(g, &phi, x, t, 3);
  std::vector<Jet> h(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h[i * n + j] = Jet(-1.0) * (p.star.s_star[i * n + j] + p.star.s_star[j * n + i]);
  return connection_variation_check(g, h, X, Y, Z, x, t);
}

}  // namespace starlab
