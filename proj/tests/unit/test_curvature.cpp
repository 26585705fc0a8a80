#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "../support.hpp"
#include "starlab/curvature.hpp"
#include "starlab/errors.hpp"
#include "starlab/grid_geometry.hpp"
#include "starlab/richardson.hpp"

using namespace starlab;
using namespace testsupport;

namespace {

int I4(int i, int j, int k, int l) { return ((i * 3 + j) * 3 + k) * 3 + l; }

GeometryJet<double> geometry_at(const AnalyticField& g, std::span<const double> x, int order = 2) {
  return geometry_values(analytic_point(g, nullptr, x, 0.0, order).geometry);
}

// Orthonormal frame from the eigen-decomposition of g (independent of Gram-Schmidt).
std::vector<double> eigen_frame(int n, const std::vector<double>& g) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g[i * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> e(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) e[a * n + c] = es.eigenvectors()(c, a) / std::sqrt(es.eigenvalues()(a));
  return e;
}

// R(X,Y,Z,W) = X^k Y^l Z^j W^i R_ijkl, looping every index.
double R4(const GeometryJet<double>& geo, const double* X, const double* Y, const double* Z, const double* W) {
  const int n = geo.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          s += X[k] * Y[l] * Z[j] * W[i] * geo.riemann[((i * n + j) * n + k) * n + l];
  return s;
}

std::vector<double> apply(int n, const std::vector<double>& phi, const double* v) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out[a] += phi[a * n + b] * v[b];
  return out;
}

}  // namespace

TEST_CASE("flat metric: everything vanishes") {
  const std::vector<double> x{0.3, 1.2, -0.4};
  const auto geo = geometry_at(flat_metric(3), x);
  for (double v : geo.christoffel) CHECK(v == 0.0);
  for (double v : geo.riemann) CHECK(v == 0.0);
  for (double v : geo.ricci) CHECK(v == 0.0);
  CHECK(geo.scalar == 0.0);
}

TEST_CASE("warped metric: closed-form connection and curvature") {
  const double amp = 1.0;
  for (double x0 : {0.0, 0.7, 2.1, 4.4}) {
    const std::vector<double> x{x0, 0.3, 1.9};
    const auto geo = geometry_at(warped_metric(amp), x);
    const double u = amp * std::sin(x0), up = amp * std::cos(x0), upp = -amp * std::sin(x0);
    CHECK(geo.christoffel[(2 * 3 + 0) * 3 + 2] == doctest::Approx(up).epsilon(1e-14));
    CHECK(geo.christoffel[(0 * 3 + 2) * 3 + 2] == doctest::Approx(-up * std::exp(2 * u)).epsilon(1e-14));
    CHECK(geo.riemann[I4(0, 2, 0, 2)] == doctest::Approx(-(upp + up * up) * std::exp(2 * u)).epsilon(1e-13));
    CHECK(geo.scalar == doctest::Approx(-2 * (upp + up * up)).epsilon(1e-13));
  }
}

TEST_CASE("Christoffel symbols against finite differences of the metric") {
  const auto g = random_trig_metric(3, 17);
  const std::vector<double> x{0.4, 2.2, 5.1};
  const auto geo = geometry_at(g, x);
  // d_k g_ij by Richardson along each axis, then the Koszul formula by hand.
  double dg[3][3][3];
  for (int k = 0; k < 3; ++k) {
    const auto d = richardson_time_derivative(
        [&](double s) {
          auto y = x;
          y[k] += s;
          return g.values(y);
        },
        0.0, 1e-2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dg[k][i][j] = d[i * 3 + j];
  }
  const auto gv = g.values(x);
  Eigen::Matrix3d G;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) G(i, j) = gv[i * 3 + j];
  const Eigen::Matrix3d Ginv = G.inverse();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m) s += 0.5 * Ginv(k, m) * (dg[i][j][m] + dg[j][i][m] - dg[m][i][j]);
        CHECK(std::abs(geo.christoffel[(k * 3 + i) * 3 + j] - s) < 1e-9);
      }
}

TEST_CASE("scaling law g -> c g") {
  const auto g = random_trig_metric(3, 5);
  const double c = 2.5;
  const AnalyticField cg(3, FieldKind::Tensor, [&](std::span<const Jet> x, double t, std::span<Jet> out) {
    g.evaluator()(x, t, out);
    for (auto& o : out) o = Jet(c) * o;
  });
  const std::vector<double> x{1.0, 0.5, 2.0};
  const auto a = geometry_at(g, x), b = geometry_at(cg, x);
  for (std::size_t i = 0; i < a.christoffel.size(); ++i)
    CHECK(b.christoffel[i] == doctest::Approx(a.christoffel[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < a.riemann.size(); ++i)
    CHECK(std::abs(b.riemann[i] - c * a.riemann[i]) < 1e-12 * std::max(1.0, std::abs(b.riemann[i])));
  CHECK(b.scalar == doctest::Approx(a.scalar / c).epsilon(1e-12));
}

TEST_CASE("curvature identities on random metrics, analytic backend") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto g = random_trig_metric(3 + seed % 3, seed);
    std::vector<double> x(static_cast<std::size_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) x[a] = 0.37 * (a + 1) * seed;
    const auto p = analytic_point(g, nullptr, x, 0.0, 2);
    const auto geo = geometry_values(p.geometry);
    auto r = identity_residuals(geo);
    metric_compatibility<double>(geo, metric_values(p.metric).dg, r);
    const double scale = std::max(1.0, r.riemann_scale);
    CHECK(r.antisym_first_pair / scale < 1e-9);
    CHECK(r.antisym_second_pair / scale < 1e-9);
    CHECK(r.pair_symmetry / scale < 1e-9);
    CHECK(r.first_bianchi / scale < 1e-9);
    CHECK(r.ricci_trace / std::max(1.0, r.scalar_scale) < 1e-9);
    CHECK(r.metric_compat / std::max(1.0, r.metric_scale) < 1e-12);
    CHECK(r.christoffel_symmetry == 0.0);
  }
}

TEST_CASE("non positive-definite metric is rejected by the kernel") {
  const AnalyticField bad(2, FieldKind::Tensor, [](std::span<const Jet> x, double, std::span<Jet> out) {
    out[0] = Jet(1.0);
    out[1] = out[2] = Jet(2.0) + Jet(0.0) * x[0];
    out[3] = Jet(1.0);
  });
  const std::vector<double> x{0.0, 0.0};
  try {
    analytic_point(bad, nullptr, x, 0.0, 2);
    FAIL("expected NonPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveDefinite);
  }
}

TEST_CASE("star curvature vanishes for phi = 0 and for flat metrics") {
  const std::vector<double> x{0.2, 0.9, 1.4};
  const auto z = zero_tensor(3);
  const auto a = analytic_point(warped_metric(1.0), &z, x, 0.0, 2);
  for (const auto& v : a.star.s_star) CHECK(v.value() == 0.0);
  for (const auto& v : a.star.ric_star_frame) CHECK(v.value() == 0.0);
  CHECK(a.star.r_star.value() == 0.0);
  const auto rp = random_phi(3, 4);
  const auto b = analytic_point(flat_metric(3), &rp, x, 0.0, 2);
  for (const auto& v : b.star.s_star) CHECK(v.value() == 0.0);
  for (const auto& v : b.star.ric_star_frame) CHECK(v.value() == 0.0);
}

TEST_CASE("S*, Ric* and r* against full-loop frame contractions") {
  // The oracle uses an eigenvector frame and loops R(X, Y, Z, W) over every index.
  for (unsigned seed = 1; seed <= 4; ++seed) {
    const auto g = random_trig_metric(3, seed + 30);
    const auto phi = random_phi(3, seed);
    const std::vector<double> x{0.3 * seed, 1.1, 2.0 - 0.2 * seed};
    const auto p = analytic_point(g, &phi, x, 0.0, 2);
    const auto geo = geometry_values(p.geometry);
    std::vector<double> ph(9);
    for (int c = 0; c < 9; ++c) ph[c] = p.phi[c].value();
    const auto e = eigen_frame(3, geo.g);
    double rstar = 0.0;
    for (int pi = 0; pi < 3; ++pi)
      for (int q = 0; q < 3; ++q) {
        double X[3] = {0, 0, 0}, Y[3] = {0, 0, 0};
        X[pi] = 1.0;
        Y[q] = 1.0;
        const auto phiY = apply(3, ph, Y);
        double s = 0.0, r = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double* ea = &e[a * 3];
          const auto phie = apply(3, ph, ea);
          s += R4(geo, X, phiY.data(), phie.data(), ea);
          r += R4(geo, X, ea, phie.data(), phiY.data());
        }
        CHECK(std::abs(p.star.s_star[pi * 3 + q].value() - 0.5 * s) < 1e-12 * std::max(1.0, std::abs(s)));
        CHECK(std::abs(p.star.ric_star_frame[pi * 3 + q].value() - r) < 1e-12 * std::max(1.0, std::abs(r)));
      }
    for (int a = 0; a < 3; ++a) {
      const double* ea = &e[a * 3];
      const auto phiea = apply(3, ph, ea);
      for (int c = 0; c < 3; ++c) {
        const double* ec = &e[c * 3];
        rstar += R4(geo, ea, ec, apply(3, ph, ec).data(), phiea.data());
      }
    }
    CHECK(p.star.r_star.value() == doctest::Approx(rstar).epsilon(1e-11));
  }
}

TEST_CASE("warped metric, coordinate (x,y) rotation: S* from direct contraction") {
  // Index loops straight from R_ijkl with the frame sum replaced by g^{ab}.
  const auto phi = rotation_phi(3);
  const std::vector<double> x{0.8, 0.1, 0.5};
  const auto p = analytic_point(warped_metric(1.0), &phi, x, 0.0, 2);
  const auto geo = geometry_values(p.geometry);
  std::vector<double> ph(9);
  for (int c = 0; c < 9; ++c) ph[c] = p.phi[c].value();
  for (int pi = 0; pi < 3; ++pi)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int l = 0; l < 3; ++l)
            for (int b = 0; b < 3; ++b)
              s += geo.ginv[b * 3 + i] * ph[j * 3 + b] * ph[l * 3 + q] * geo.riemann[I4(i, j, pi, l)];
      CHECK(std::abs(p.star.s_star[pi * 3 + q].value() - 0.5 * s) < 1e-13);
    }
}

TEST_CASE("warped metric, compatible (x,z) rotation: S* = Ric* = K g on the plane") {
  const double amp = 1.0;
  const auto phi = warped_compatible_phi(amp);
  for (double x0 : {0.3, 1.7, 3.9}) {
    const std::vector<double> x{x0, 0.2, 0.6};
    const auto p = analytic_point(warped_metric(amp), &phi, x, 0.0, 2);
    const double u = amp * std::sin(x0), up = amp * std::cos(x0), upp = -amp * std::sin(x0);
    const double K = -(upp + up * up);
    const double plane[9] = {1, 0, 0, 0, 0, 0, 0, 0, std::exp(2 * u)};
    for (int c = 0; c < 9; ++c) {
      CHECK(std::abs(p.star.s_star[c].value() - K * plane[c]) < 1e-12);
      CHECK(std::abs(p.star.ric_star_frame[c].value() - K * plane[c]) < 1e-12);
    }
    CHECK(p.star.r_star.value() == doctest::Approx(2 * K).epsilon(1e-12));
    CHECK(p.star.trace_s_star.value() == doctest::Approx(2 * K).epsilon(1e-12));
  }
}

TEST_CASE("nabla S* against finite differences of S* components") {
  const auto g = warped_metric(1.0);
  const auto phi = warped_compatible_phi(1.0);
  const std::vector<double> x{0.9, 0.4, 1.3};
  const auto p = analytic_point(g, &phi, x, 0.0, 3);
  const auto nab = nabla_s_star(p);
  const auto geo = geometry_values(p.geometry);
  std::vector<double> s(9);
  for (int c = 0; c < 9; ++c) s[c] = p.star.s_star[c].value();
  for (int k = 0; k < 3; ++k) {
    const auto ds = richardson_time_derivative(
        [&](double h) {
          auto y = x;
          y[k] += h;
          const auto q = analytic_point(g, &phi, y, 0.0, 2);
          std::vector<double> v(9);
          for (int c = 0; c < 9; ++c) v[c] = q.star.s_star[c].value();
          return v;
        },
        0.0, 1e-2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double oracle = ds[i * 3 + j];
        for (int m = 0; m < 3; ++m)
          oracle -= geo.christoffel[(m * 3 + k) * 3 + i] * s[m * 3 + j] +
                    geo.christoffel[(m * 3 + k) * 3 + j] * s[i * 3 + m];
        CHECK(std::abs(nab[(k * 3 + i) * 3 + j] - oracle) < 1e-8);
      }
  }
}

TEST_CASE("nabla g = 0 and flat covariant derivative is the coordinate partial") {
  const auto g = random_trig_metric(3, 9);
  const std::vector<double> x{1.2, 0.7, 3.1};
  const auto p = analytic_point(g, nullptr, x, 0.0, 2);
  const auto geo = geometry_values(p.geometry);
  const auto m = metric_values(p.metric);
  const auto ng = covariant_derivative_02<double>(geo, m.g, m.dg);
  for (double v : ng) CHECK(std::abs(v) < 1e-12);

  const auto f = geometry_at(flat_metric(3), x);
  const std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> dt(27);
  for (int i = 0; i < 27; ++i) dt[i] = 0.1 * i;
  const auto nt = covariant_derivative_02<double>(f, t, dt);
  for (int i = 0; i < 27; ++i) CHECK(nt[i] == dt[i]);
}

TEST_CASE("scalar calculus: flat closed forms and constants") {
  const double x0 = 0.6;
  const std::vector<double> x{x0, 0.0, 0.0};
  const auto geo = geometry_at(flat_metric(3), x);
  const auto fj = scalar_of_x(3, [](const Jet& s) { return cos(s); }).eval(x, 2)[0];
  std::vector<double> df(3), ddf(9);
  for (int i = 0; i < 3; ++i) {
    df[i] = fj.partial(i);
    for (int j = 0; j < 3; ++j) ddf[i * 3 + j] = fj.partial(i, j);
  }
  ScalarJet<double> sc;
  compute_scalar<double>(geo, df, ddf, sc);
  CHECK(sc.grad_up[0] == doctest::Approx(-std::sin(x0)));
  CHECK(sc.grad_up[1] == 0.0);
  CHECK(sc.norm2 == doctest::Approx(std::sin(x0) * std::sin(x0)));
  CHECK(sc.laplacian == doctest::Approx(-std::cos(x0)));

  std::vector<double> zero(3, 0.0), zero2(9, 0.0);
  compute_scalar<double>(geo, zero, zero2, sc);
  CHECK(sc.norm2 == 0.0);
  CHECK(sc.laplacian == 0.0);
}

TEST_CASE("Laplacian on the warped metric against divergence form") {
  // Delta f = e^{-u} d_x (e^{u} f'), flux differentiated by Richardson.
  const double amp = 0.8;
  const auto fp = [](double s) { return 2 * std::cos(2 * s) - 0.3 * std::sin(s); };
  const auto field = scalar_of_x(3, [](const Jet& s) { return sin(Jet(2.0) * s) + Jet(0.3) * cos(s); });
  for (double x0 : {0.2, 1.5, 4.0}) {
    const std::vector<double> x{x0, 0.3, 0.3};
    const auto geo = geometry_at(warped_metric(amp), x);
    const auto fj = field.eval(x, 2)[0];
    std::vector<double> df(3), ddf(9);
    for (int i = 0; i < 3; ++i) {
      df[i] = fj.partial(i);
      for (int j = 0; j < 3; ++j) ddf[i * 3 + j] = fj.partial(i, j);
    }
    ScalarJet<double> sc;
    compute_scalar<double>(geo, df, ddf, sc);
    const auto flux = richardson_time_derivative(
        [&](double s) { return std::exp(amp * std::sin(s)) * fp(s); }, x0, 1e-2);
    const double oracle = std::exp(-amp * std::sin(x0)) * flux.value;
    CHECK(std::abs(sc.laplacian - oracle) < 1e-10);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(sc.hess[i * 3 + j] == doctest::Approx(sc.hess[j * 3 + i]));
  }
}

TEST_CASE("Lie derivative of the metric") {
  const std::vector<double> x{0.5, 1.0, 2.0};
  const AnalyticField zero(3, FieldKind::Vector, [](std::span<const Jet>, double, std::span<Jet> out) {
    for (auto& o : out) o = Jet(0.0);
  });
  for (double v : lie_derivative_metric(zero, warped_metric(1.0), x)) CHECK(v == 0.0);

  const AnalyticField sx(3, FieldKind::Vector, [](std::span<const Jet> y, double, std::span<Jet> out) {
    out[0] = sin(y[0]);
    out[1] = out[2] = Jet(0.0);
  });
  const auto l = lie_derivative_metric(sx, flat_metric(3), x);
  CHECK(l[0] == doctest::Approx(2 * std::cos(x[0])));
  for (int c = 1; c < 9; ++c) CHECK(l[c] == 0.0);

  const AnalyticField dz(3, FieldKind::Vector, [](std::span<const Jet>, double, std::span<Jet> out) {
    out[0] = out[1] = Jet(0.0);
    out[2] = Jet(1.0);
  });
  for (double v : lie_derivative_metric(dz, warped_metric(1.0), x)) CHECK(v == 0.0);

  const AnalyticField gen(3, FieldKind::Vector, [](std::span<const Jet> y, double, std::span<Jet> out) {
    out[0] = sin(y[1]) * cos(y[2]);
    out[1] = Jet(0.4) * cos(y[0] + y[2]);
    out[2] = sin(y[0] - y[1]);
  });
  const auto g = random_trig_metric(3, 12);
  const auto a = lie_derivative_metric(gen, g, x, 0.0, false);
  const auto b = lie_derivative_metric(gen, g, x, 0.0, true);
  for (int c = 0; c < 9; ++c) {
    CHECK(std::abs(a[c] - b[c]) < 1e-12);
    CHECK(a[c] == doctest::Approx(a[(c % 3) * 3 + c / 3]));
  }
}

TEST_CASE("Bochner residual") {
  const std::vector<double> x{0.4, 1.0, 2.5};
  const auto f = scalar_of_x(3, [](const Jet& s) { return cos(s); });
  const auto flat = bochner_residual(f, flat_metric(3), x);
  CHECK(std::abs(flat.residual) < 1e-9);
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const auto b = bochner_residual(random_trig_scalar(3, seed), random_trig_metric(3, seed + 100), x);
    CHECK(std::abs(b.residual) < 1e-9 * std::max(1.0, b.scale()));
    CHECK(b.scale() > 0.0);
  }
}

TEST_CASE("grid curvature matches the analytic backend on the warped metric") {
  const auto grid = make_grid(Domain::torus(3), 32);
  const auto gm = sample_metric(warped_metric(1.0), grid);
  const auto phi_field = warped_compatible_phi(1.0);
  const auto phi = sample_tensor(phi_field, grid);
  GridCurvatureOptions opts;
  opts.identities = true;
  const auto geo = grid_curvature(gm, &phi, opts);
  const auto& r = geo.identities;
  const double scale = std::max(1.0, r.riemann_scale);
  CHECK(r.antisym_first_pair / scale < 1e-7);
  CHECK(r.antisym_second_pair / scale < 1e-7);
  CHECK(r.pair_symmetry / scale < 1e-7);
  CHECK(r.first_bianchi / scale < 1e-7);
  CHECK(r.ricci_trace / std::max(1.0, r.scalar_scale) < 1e-7);
  CHECK(r.metric_compat / std::max(1.0, r.metric_scale) < 1e-7);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid->size(); p += 97) {
    const auto x = grid->point(p);
    const auto a = analytic_point(warped_metric(1.0), &phi_field, x, 0.0, 2);
    worst = std::max(worst, std::abs(geo.scalar[p] - a.geometry.scalar.value()));
    worst = std::max(worst, std::abs(geo.r_star[p] - a.star.r_star.value()));
    for (int c = 0; c < 9; ++c) worst = std::max(worst, std::abs(geo.s_star.comps[c][p] - a.star.s_star[c].value()));
  }
  CHECK(worst < 1e-8);
  CHECK(geo.s_star_asymmetry < 1e-10);
}

TEST_CASE("grid scalar calculus matches analytic values") {
  const auto grid = make_grid(Domain::torus(3), 32);
  const auto gfield = random_trig_metric(3, 44, 0.1);
  const auto ffield = random_trig_scalar(3, 45, 3, 0.5);
  const auto geo = grid_curvature(sample_metric(gfield, grid), nullptr);
  const auto sc = grid_scalar_calculus(geo, sample_scalar(ffield, grid), true);
  for (std::size_t p = 0; p < grid->size(); p += 131) {
    const auto x = grid->point(p);
    const auto ag = geometry_values(analytic_point(gfield, nullptr, x, 0.0, 2).geometry);
    const Jet fj = ffield.eval(x, 2)[0];
    std::vector<double> df(3), ddf(9);
    for (int i = 0; i < 3; ++i) {
      df[i] = fj.partial(i);
      for (int j = 0; j < 3; ++j) ddf[i * 3 + j] = fj.partial(i, j);
    }
    ScalarJet<double> s;
    compute_scalar<double>(ag, df, ddf, s);
    CHECK(std::abs(sc.laplacian[p] - s.laplacian) < 1e-9);
    CHECK(std::abs(sc.norm2[p] - s.norm2) < 1e-9);
    for (int c = 0; c < 9; ++c) CHECK(std::abs(sc.hessian.comps[c][p] - s.hess[c]) < 1e-9);
  }
}
