#include "lab/suites.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <random>

#include "starlab/curvature.hpp"
#include "starlab/errors.hpp"
#include "starlab/flow.hpp"
#include "starlab/functionals.hpp"
#include "starlab/grid_geometry.hpp"
#include "starlab/presets.hpp"
#include "starlab/richardson.hpp"

#ifndef STARLAB_VERSION
#define STARLAB_VERSION "0.0.0"
#endif

namespace starlab::lab {

const char* build_version() { return STARLAB_VERSION; }

namespace {

using json = nlohmann::ordered_json;

// Premise residuals below this count as an exact soliton.
constexpr double kPremiseExact = 1e-10;

std::string at_time(const std::string& id, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "@t=%.6g", t);
  return id + buf;
}

std::string indexed(const std::string& id, std::size_t k) { return id + "#" + std::to_string(k); }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Seeded sample points: anywhere on a torus, in the middle half of a box.
std::vector<std::vector<double>> sample_points(const Scenario& s, int count, unsigned salt) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(s.checks.seed) * 1000003u + salt);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = s.domain.dim;
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count), std::vector<double>(n));
  for (auto& x : pts)
    for (int a = 0; a < n; ++a) {
      if (s.is_torus()) {
        x[a] = s.domain.period(a) * u(rng);
      } else {
        const double w = s.domain.upper[a] - s.domain.lower[a];
        x[a] = s.domain.lower[a] + w * (0.25 + 0.5 * u(rng));
      }
    }
  return pts;
}

// Runs one check group; non-config errors become a failed row.
void guarded(Report& r, const std::string& id, const std::string& anchor, const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    r.error(id, anchor, e.what());
  } catch (const std::exception& e) {
    r.error(id, anchor, e.what());
  }
}

class Context {
 public:
  explicit Context(const Scenario& s) : s_(s) {}

  const Scenario& scenario() const { return s_; }

  const GridTensor& phi_grid() {
    if (!phi_) phi_ = std::make_unique<GridTensor>(sample_tensor(phi_field(s_), scenario_grid(s_)));
    return *phi_;
  }

  TrajectoryGeometry& trajectory() {
    if (failure_) std::rethrow_exception(failure_);
    if (!geo_) {
      try {
        const auto grid = scenario_grid(s_);
        const GridMetric g0 = sample_metric(metric_field(s_), grid);
        const GridField fT = sample_scalar(f_field(s_), grid, s_.flow.T);
        tr_ = std::make_unique<Trajectory>(integrate_coupled_system(g0, phi_grid(), fT, coupled_options(s_)));
        geo_ = std::make_unique<TrajectoryGeometry>(*tr_, phi_grid());
      } catch (...) {
        failure_ = std::current_exception();
        throw;
      }
    }
    return *geo_;
  }

  const TransportCheck& transport(double t0) {
    auto it = transport_.find(t0);
    if (it != transport_.end()) return it->second;
    auto& geo = trajectory();
    return transport_.emplace(t0, transport_check(geo, t0, trajectory_fd(geo.trajectory()))).first->second;
  }

 private:
  const Scenario& s_;
  std::unique_ptr<GridTensor> phi_;
  std::unique_ptr<Trajectory> tr_;
  std::unique_ptr<TrajectoryGeometry> geo_;
  std::map<double, TransportCheck> transport_;
  std::exception_ptr failure_;
};

// ---- identities ------------------------------------------------------------

void identity_rows(Report& r, const std::string& prefix, const IdentityResiduals& a, double tol) {
  const double R = a.riemann_scale;
  r.check_error(prefix + ".antisym_first_pair", a.antisym_first_pair, 0.0, a.antisym_first_pair, R, tol,
                "R_ijkl = -R_jikl");
  r.check_error(prefix + ".antisym_second_pair", a.antisym_second_pair, 0.0, a.antisym_second_pair, R, tol,
                "R_ijkl = -R_ijlk");
  r.check_error(prefix + ".pair_symmetry", a.pair_symmetry, 0.0, a.pair_symmetry, R, tol, "R_ijkl = R_klij");
  r.check_error(prefix + ".first_bianchi", a.first_bianchi, 0.0, a.first_bianchi, R, tol,
                "R_ijkl + R_iklj + R_iljk = 0");
  r.check_error(prefix + ".ricci_trace", a.ricci_trace, 0.0, a.ricci_trace, a.scalar_scale, tol,
                "g^jl Ric_jl = scalar curvature");
  r.check_error(prefix + ".metric_compatibility", a.metric_compat, 0.0, a.metric_compat, a.metric_scale, tol,
                "nabla g = 0");
  r.check_error(prefix + ".christoffel_symmetry", a.christoffel_symmetry, 0.0, a.christoffel_symmetry,
                a.metric_scale, tol, "Gamma^k_ij = Gamma^k_ji");
}

void suite_identities(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const auto g = metric_field(s);
  const auto phi = phi_field(s);
  guarded(r, "identities.analytic", "curvature identities at sample points", [&] {
    IdentityResiduals acc;
    double star_diff = 0.0, star_scale = 0.0, asym = 0.0, rstar_diff = 0.0, rstar_scale = 0.0;
    for (const auto& x : sample_points(s, s.checks.points, 11)) {
      const auto p = analytic_point(g, &phi, x, 0.0, 2);
      const auto geo = geometry_values(p.geometry);
      auto res = identity_residuals(geo);
      metric_compatibility<double>(geo, metric_values(p.metric).dg, res);
      acc.merge(res);
      const int n = s.domain.dim;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double a = p.star.s_star[i * n + j].value(), b = p.star.ric_star_frame[i * n + j].value();
          star_diff = std::max(star_diff, std::abs(a - b));
          star_scale = std::max({star_scale, std::abs(a), std::abs(b)});
          asym = std::max(asym, std::abs(a - p.star.s_star[j * n + i].value()));
        }
      rstar_diff = std::max(rstar_diff, std::abs(p.star.r_star.value() - p.star.trace_s_star.value()));
      rstar_scale = std::max(rstar_scale, std::abs(p.star.r_star.value()));
    }
    identity_rows(r, "identities.analytic", acc, s.tolerance("identities_analytic"));
    r.diagnostic_error("identities.star_trace_vs_frame", star_scale, star_scale, star_diff, star_scale,
                       "1/2 trace(Z -> R(X,phi Y) phi Z) vs sum_i R(X,e_i,phi e_i,phi Y)");
    r.diagnostic_error("identities.star_asymmetry", asym, 0.0, asym, star_scale, "S*(X,Y) - S*(Y,X)");
    r.diagnostic_error("identities.r_star_vs_trace", rstar_scale, rstar_scale, rstar_diff, rstar_scale,
                       "r* = sum_i Ric*(e_i,e_i) vs tr_g S*");
  });
  if (!s.is_torus()) return;
  guarded(r, "identities.grid", "curvature identities on the grid", [&] {
    GridCurvatureOptions opts;
    opts.identities = true;
    const auto curv = grid_curvature(sample_metric(g, scenario_grid(s)), &c.phi_grid(), opts);
    identity_rows(r, "identities.grid", curv.identities, s.tolerance("identities_grid"));
  });
}

// ---- self-similar solutions ----------------------------------------------------

AnalyticField drifting_metric(const AnalyticField& g0, double drift) {
  const auto ev = g0.evaluator();
  const int n = g0.dim();
  return AnalyticField(
      n, FieldKind::Tensor,
      [ev, drift, n](std::span<const Jet> x, double t, std::span<Jet> out) {
        ev(x, t, out);
        out[0] += Jet(drift * std::sin(t)) * cos(x[n - 1]);
      },
      [drift, n](std::span<const Jet> x, double t, std::span<Jet> out) {
        for (auto& o : out) o = Jet(0.0);
        out[0] = Jet(drift * std::cos(t)) * cos(x[n - 1]);
      });
}

SelfSimilarFamily build_family(const Scenario& s) {
  const auto g0 = metric_field(s);
  const auto Y = vector_field(s);
  const double lambda = s.vector.lambda;
  SelfSimilarFamily fam = self_similar_family(g0, Y, lambda);
  if (s.prop11.sigma == "general") {
    const int n = s.domain.dim;
    fam.sigma = [lambda](double t) { return 1.0 - 2.0 * lambda * t + 0.3 * std::sin(t) + 0.1 * t * t; };
    fam.dsigma = [lambda](double t) { return -2.0 * lambda + 0.3 * std::cos(t) + 0.2 * t; };
    const auto yev = Y.evaluator();
    const auto wob = presets::wobble_vector(n, 0.2).evaluator();
    const auto sigma = fam.sigma;
    fam.X = AnalyticField(n, FieldKind::Vector, [=](std::span<const Jet> x, double t, std::span<Jet> out) {
      yev(x, t, out);
      std::vector<Jet> w(static_cast<std::size_t>(n));
      wob(x, t, w);
      const Jet inv(1.0 / sigma(t));
      for (int a = 0; a < n; ++a) out[a] = out[a] * inv + w[a];
    });
  }
  if (s.prop11.g_drift != 0.0) fam.g = drifting_metric(g0, s.prop11.g_drift);
  fam.steps = s.prop11.steps;
  return fam;
}

void suite_prop11(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const int n = s.domain.dim;
  const auto g0 = metric_field(s);
  const auto phi = phi_field(s);
  const auto Y = vector_field(s);
  const double lambda = s.vector.lambda;
  const bool plain = s.prop11.sigma == "linear" && s.prop11.g_drift == 0.0;
  const Domain* domain = s.is_torus() ? nullptr : &s.domain;
  const char* premise_anchor = "-2 S*(g0) = L_Y g0 - 2 lambda g0";

  double premise = INFINITY;
  guarded(r, "prop11.premise", premise_anchor, [&] {
    const auto res = soliton_residual(g0, &phi, SolitonData{Y, -lambda, SolitonVariant::Star}, s.domain, 4);
    premise = res.sup_norm;
    r.diagnostic("prop11.premise", premise, 0.0, premise_anchor);
    const auto sol = soliton_residual(g0, &phi, SolitonData{Y, lambda, SolitonVariant::Star}, s.domain, 4);
    r.diagnostic("prop11.star_soliton", sol.sup_norm, 0.0, "L_V g + 2 S* + 2 lambda g = 0");
  });
  const bool exact = plain && premise < kPremiseExact;

  const auto fam = build_family(s);
  const auto pts = sample_points(s, std::min(s.checks.points, 8), 13);
  for (double t : s.prop11.times) {
    guarded(r, at_time("prop11.derivative", t), "d/dt gbar = sigma' psi*g + sigma psi*(dg/dt) + sigma psi*(L_X g)", [&] {
      double err = 0.0, ref = 0.0, lhs = 0.0, rhs_max = 0.0;
      double flow_err = 0.0, flow_ref = 0.0, flow_rhs = 0.0;
      double scale_err = 0.0, scale_ref = 0.0;
      for (const auto& x : pts) {
        const auto fd = richardson_time_derivative(
            [&](double tt) { return family_metric(fam, x, tt, domain); }, t, s.fd.h0, s.fd.levels);
        const auto rhs = family_rhs(fam, x, t, domain);
        err = std::max(err, max_diff(fd, rhs));
        ref = std::max(ref, max_abs(rhs));
        lhs = std::max(lhs, max_abs(fd));
        rhs_max = std::max(rhs_max, max_abs(rhs));

        const auto field = family_metric_field(fam, t);
        const auto p = analytic_point(field, &phi, x, 0.0, 2);
        std::vector<double> rate(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) rate[i * n + j] = -(p.star.s_star[i * n + j].value() + p.star.s_star[j * n + i].value());
        flow_err = std::max(flow_err, max_diff(fd, rate));
        flow_ref = std::max(flow_ref, max_abs(fd));
        flow_rhs = std::max(flow_rhs, max_abs(rate));

        if (vector_is_zero(s) && plain) {
          const auto gv = g0.values(x);
          std::vector<double> expect(gv.size());
          for (std::size_t q = 0; q < gv.size(); ++q) expect[q] = -2.0 * lambda * gv[q];
          scale_err = std::max(scale_err, max_diff(fd, expect));
          scale_ref = std::max(scale_ref, max_abs(expect));
        }
      }
      r.check_error(at_time("prop11.derivative", t), lhs, rhs_max, err, ref, s.tolerance("prop11_derivative"),
                    "d/dt gbar = sigma' psi*g + sigma psi*(dg/dt) + sigma psi*(L_X g)");
      const char* flow_anchor = "d/dt gbar = -2 S*(gbar)";
      if (exact)
        r.check_error(at_time("prop11.flow_equation", t), flow_ref, flow_rhs, flow_err,
                      std::max(flow_ref, flow_rhs), s.tolerance("prop11_flow"), flow_anchor);
      else
        r.diagnostic_error(at_time("prop11.flow_equation", t), flow_ref, flow_rhs, flow_err,
                           std::max(flow_ref, flow_rhs), flow_anchor);
      if (exact && lambda == 0.0) {
        r.check_error(at_time("prop11.steady_dt", t), lhs, 0.0, lhs, 0.0, s.tolerance("prop11_steady"),
                      "d/dt gbar = 0 for a steady soliton");
        r.check_error(at_time("prop11.steady_star", t), flow_rhs, 0.0, flow_rhs, 0.0, s.tolerance("prop11_steady"),
                      "-2 S*(gbar) = 0 for a steady soliton");
      }
      if (vector_is_zero(s) && plain)
        r.check_error(at_time("prop11.pure_scaling", t), lhs, scale_ref, scale_err, scale_ref,
                      s.tolerance("prop11_scaling"), "d/dt gbar = sigma' g0 = -2 lambda g0");
    });
  }
}

// ---- connection variation ------------------------------------------------------

void suite_prop12(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const int n = s.domain.dim;
  const auto g = metric_field(s);
  const auto phi = phi_field(s);
  const auto pts = sample_points(s, s.checks.points, 17);
  std::mt19937_64 rng(static_cast<std::uint64_t>(s.checks.seed) * 7919u + 3u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::vector<double> X(n), Y(n), Z(n);
    for (auto* v : {&X, &Y, &Z})
      for (auto& e : *v) e = u(rng);
    const char* std_anchor =
        "g(d/dt nabla_X Y, Z) = 1/2[(nabla_X h)(Y,Z) + (nabla_Y h)(X,Z) - (nabla_Z h)(X,Y)], h = -2 sym S*";
    guarded(r, indexed("prop12.levi_civita", k), std_anchor, [&] {
      const auto cv = connection_variation_star(g, phi, X, Y, Z, pts[k]);
      r.check(indexed("prop12.levi_civita", k), cv.fd_value, cv.standard_value, s.tolerance("prop12"), std_anchor,
              cv.scale);
      r.diagnostic(indexed("prop12.displayed_rhs", k), cv.fd_value, cv.paper_rhs,
                   "g(d/dt nabla_X Y, Z) = -2(nabla_X S*)(Y,Z) + 2S*(Y,nabla_X Z) + 2S*(nabla_X Y,Z)", cv.scale);
    });
  }
}

// ---- F-functional ----------------------------------------------------------------

void suite_thm21(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const char* chain_anchor =
      "dF/dt = int[-h(grad f,grad f) + 2g(grad fdot,grad f) + (c + |grad f|^2)(-fdot + 1/2 tr h)] e^{-f} dV";
  const char* displayed_anchor =
      "dF/dt = int[-2Ric*(grad f,grad f) - 2 fdot(Delta f - |grad f|^2) + (c + |grad f|^2)(-fdot + 1/2 tr h)] "
      "e^{-f} dV";
  guarded(r, "thm21.chain", chain_anchor, [&] {
    const auto grid = scenario_grid(s);
    GridMetric g = sample_metric(metric_field(s), grid);
    const double t0 = s.checks.t0;
    if (t0 > 0.0) {
      const int steps = static_cast<int>(std::ceil(t0 / s.flow.dt - 1e-9));
      FlowOptions opt{s.flow.pd_threshold, s.flow.guard_factor};
      FlowState st{0.0, s.flow.tau0, g};
      for (int k = 0; k < steps; ++k) st = flow_step_star_ricci(st, c.phi_grid(), t0 / steps, opt);
      g = st.g;
    }
    const auto chk = dF_dt_check(g, c.phi_grid(), f_field(s), t0, s.fd, s.functional.f_integrand_constant);
    const std::string& mode = s.functional.formula_mode;
    if (mode != "paper") r.check("thm21.chain", chk.chain, chk.fd, s.tolerance("thm21"), chain_anchor);
    if (mode != "chain") r.diagnostic("thm21.displayed", chk.paper, chk.fd, displayed_anchor);
    r.diagnostic("thm21.fd_error_estimate", chk.fd_error, 0.0, "Richardson tableau gap for dF/dt");
  });
}

// ---- transport identity ------------------------------------------------------------

bool flat_constant(const Scenario& s) { return s.metric.preset == "flat" && s.f.preset == "constant"; }

void suite_thm31(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const int n = s.domain.dim;
  const char* anchor = "d omega/dt = -int box* v dV, box* = -d/dt - Delta + R*";
  for (double t0 : s.checks.transport_t0) {
    guarded(r, at_time("thm31.transport", t0), anchor, [&] {
      const auto& tc = c.transport(t0);
      r.check(at_time("thm31.transport", t0), tc.domega_fd, tc.minus_int_box_star_v, s.tolerance("thm31"), anchor);
      if (flat_constant(s))
        r.check(at_time("thm31.closed_form", t0), tc.domega_fd, n / (2.0 * tc.tau), s.tolerance("thm31_closed_form"),
                "d omega/dt = n / (2 tau) for constant f on a flat torus");
      r.diagnostic(at_time("thm31.expanded", t0), tc.minus_int_expanded, tc.domega_fd,
                   "-int box* v with box* v expanded through 4<Ric*,Hess f> - 2g(grad|grad f|^2,grad f) + "
                   "4g(grad Delta f,grad f) + 2|Hess f|^2");
      r.diagnostic(at_time("thm31.expanded_asymmetric_part", t0), tc.expanded_asym_contribution, 0.0,
                   "contribution of the antisymmetric part of Ric* to 4<Ric*,Hess f>");
      r.diagnostic(at_time("thm31.domega_fd_error", t0), tc.domega_fd_error, 0.0, "Richardson tableau gap for d omega/dt");
      const char* u_anchor = "box* u = 0 for u = (4 pi tau)^{-n/2} e^{-f}";
      if (s.functional.u_convention == UConvention::Normalized)
        r.check(at_time("thm31.box_star_u_normalized", t0), tc.box_star_u_normalized, 0.0,
                s.tolerance("thm31_box_star_u"), u_anchor);
      else
        r.diagnostic(at_time("thm31.box_star_u_normalized", t0), tc.box_star_u_normalized, 0.0, u_anchor);
      r.diagnostic(at_time("thm31.box_star_u_literal", t0), tc.box_star_u_literal, n / (2.0 * tc.tau) * tc.literal_u_sup,
                   "box* u vs n/(2 tau) u for u = e^{-f}");
    });
  }
}

void suite_conservation(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const int n = s.domain.dim;
  guarded(r, "conservation.mass", "int u dV = 1 along the coupled system", [&] {
    const Trajectory& tr = c.trajectory().trajectory();
    double drift = 0.0, worst = 1.0, min_eig = INFINITY;
    for (std::size_t k = 0; k < tr.mass.size(); ++k) {
      if (std::abs(tr.mass[k] - 1.0) > drift) {
        drift = std::abs(tr.mass[k] - 1.0);
        worst = tr.mass[k];
      }
      min_eig = std::min(min_eig, tr.min_eig[k]);
    }
    if (s.functional.u_convention == UConvention::Normalized)
      r.check_error("conservation.mass", worst, 1.0, drift, 1.0, s.tolerance("conservation_mass"),
                    "int u dV = 1, u = (4 pi tau)^{-n/2} e^{-f}");
    else
      r.diagnostic_error("conservation.mass", worst, 1.0, drift, 1.0, "int u dV for u = e^{-f}");
    r.diagnostic("conservation.metric_change", tr.g.back().max_abs_difference(tr.g.front()), 0.0,
                 "max |g(T) - g(0)|");
    r.diagnostic("conservation.min_eigenvalue", min_eig, 0.0, "min over the run of the smallest eigenvalue of g");
    double asym = 0.0;
    for (double a : tr.asymmetry) asym = std::max(asym, a);
    r.diagnostic("conservation.star_asymmetry", asym, 0.0, "max |S*_pq - S*_qp| before symmetrization");
  });
  for (double t0 : s.checks.transport_t0) {
    const char* anchor = "box* u = n/(2 tau) u for u = e^{-f}";
    guarded(r, at_time("conservation.literal_box_star", t0), anchor, [&] {
      const auto& tc = c.transport(t0);
      const double expect = n / (2.0 * tc.tau) * tc.literal_u_sup;
      r.check_error(at_time("conservation.literal_box_star", t0), tc.literal_excess, 0.0, tc.literal_excess, 0.0,
                    s.tolerance("conservation_literal"), anchor);
      r.check(at_time("conservation.literal_violation", t0), tc.box_star_u_literal, expect,
              s.tolerance("conservation_literal"), "sup |box* u| = n/(2 tau) sup u != 0 for u = e^{-f}");
    });
  }
}

// ---- Bochner -------------------------------------------------------------------

void suite_bochner(Context& c, Report& r) {
  const Scenario& s = c.scenario();
  const int n = s.domain.dim;
  const char* anchor = "1/2 Delta|grad f|^2 = |Hess f|^2 + g(grad Delta f, grad f) + Ric(grad f, grad f)";
  std::mt19937_64 rng(static_cast<std::uint64_t>(s.checks.seed) * 104729u + 5u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto pts = sample_points(s, s.checks.bochner_scenarios, 19);
  for (int k = 0; k < s.checks.bochner_scenarios; ++k) {
    const unsigned seed = static_cast<unsigned>(rng() & 0xffffffu);
    AnalyticField g, f;
    if (k == 0) {
      g = metric_field(s);
      f = f_field(s);
    } else if (k % 2 == 1) {
      g = presets::random_trig_metric(n, seed, 0.3 / n);
      f = presets::random_trig_scalar(n, seed + 1, 4, 0.5);
    } else {
      g = presets::warped_metric(n, 0.2 + 0.8 * u(rng), 1 + static_cast<int>(seed % 2));
      f = presets::random_trig_scalar(n, seed + 1, 4, 0.5);
    }
    const std::string id = indexed("bochner.residual", static_cast<std::size_t>(k));
    guarded(r, id, anchor, [&] {
      const auto b = bochner_residual(f, g, pts[static_cast<std::size_t>(k)]);
      r.check_error(id, b.residual, 0.0, std::abs(b.residual), b.scale(), s.tolerance("bochner"), anchor);
    });
  }
}

json environment(const Scenario& s, const std::vector<std::string>& suites) {
  json env;
  env["build"] = build_version();
  env["domain"] = s.domain.describe();
  env["dim"] = s.domain.dim;
  env["N"] = s.is_torus() ? json(s.N) : json(nullptr);
  env["dt"] = s.flow.dt;
  env["T"] = s.flow.T;
  env["tau0"] = s.flow.tau0;
  env["h0"] = s.fd.h0;
  env["levels"] = s.fd.levels;
  env["u_convention"] = s.functional.u_convention == UConvention::Normalized ? "normalized" : "literal";
  env["star_scalar"] = s.functional.star_scalar == StarScalarMode::RStar        ? "r_star"
                       : s.functional.star_scalar == StarScalarMode::TraceSStar ? "trace_s_star"
                                                                                : "scalar";
  env["suites"] = suites;
  env["config"] = s.merged;
  return env;
}

}  // namespace

Report run_suite(const Scenario& s, const std::string& suite) {
  require_suite_supported(s, suite);
  static const std::map<std::string, void (*)(Context&, Report&)> table{
      {"identities", suite_identities}, {"prop11", suite_prop11},   {"prop12", suite_prop12},
      {"thm21", suite_thm21},           {"thm31", suite_thm31},     {"bochner", suite_bochner},
      {"conservation", suite_conservation},
  };
  std::vector<std::string> run;
  if (suite == "all") {
    for (const auto& name : suite_names()) {
      if (name == "all") continue;
      const bool torus_only = name == "thm21" || name == "thm31" || name == "conservation";
      if (torus_only && !s.is_torus()) continue;
      run.push_back(name);
    }
  } else {
    run.push_back(suite);
  }
  Report report(suite, s.id);
  Context ctx(s);
  for (const auto& name : run) table.at(name)(ctx, report);
  report.set_environment(environment(s, run));
  return report;
}

}  // namespace starlab::lab
