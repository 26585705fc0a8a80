#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "starlab/errors.hpp"
#include "starlab/functionals.hpp"

using namespace starlab;
using namespace testsupport;

namespace {

GridPtr torus_grid(int n, int N) { return make_grid(Domain::torus(n), N); }

const double kVol3 = std::pow(2.0 * kPi, 3);

AnalyticField gaussian_field(double lambda) {
  return AnalyticField(3, FieldKind::Vector, [lambda](std::span<const Jet> x, double, std::span<Jet> out) {
    for (int a = 0; a < 3; ++a) out[a] = Jet(-lambda) * x[a];
  });
}

// f(x, t) = a cos x + t sin y, with its exact time derivative.
AnalyticField moving_f(double a) {
  return AnalyticField(
      3, FieldKind::Scalar,
      [a](std::span<const Jet> x, double t, std::span<Jet> out) { out[0] = Jet(a) * cos(x[0]) + Jet(t) * sin(x[1]); },
      [](std::span<const Jet> x, double, std::span<Jet> out) { out[0] = sin(x[1]); });
}

AnalyticField constant_plus_t(double c) {
  return AnalyticField(
      3, FieldKind::Scalar, [c](std::span<const Jet>, double t, std::span<Jet> out) { out[0] = Jet(c + t); },
      [](std::span<const Jet>, double, std::span<Jet> out) { out[0] = Jet(1.0); });
}

}  // namespace

TEST_CASE("soliton residual: flat closed forms") {
  const auto g = flat_metric(3);
  const auto phi = rotation_phi(3);
  const auto torus = Domain::torus(3);
  SolitonData d;
  d.lambda = 0.0;
  for (auto variant : {SolitonVariant::Ricci, SolitonVariant::Star}) {
    d.variant = variant;
    CHECK(soliton_residual(g, &phi, d, torus, 4).sup_norm == 0.0);
  }
  d.variant = SolitonVariant::Star;
  d.lambda = 0.3;
  const auto r = soliton_residual(g, &phi, d, torus, 4);
  CHECK(r.sup_norm == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(r.residual[5][0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(r.residual[5][1] == 0.0);
  d.variant = SolitonVariant::Ricci;
  CHECK(soliton_residual(g, &phi, d, torus, 4).residual[3][8] == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("soliton residual: Gaussian field on a box") {
  const auto box = Domain::box({-2, -1, -1}, {2, 1, 3});
  SolitonData d{gaussian_field(0.7), 0.7, SolitonVariant::Star};
  const auto phi = rotation_phi(3);
  const auto r = soliton_residual(flat_metric(3), &phi, d, box, 5);
  CHECK(r.points.size() == 125);
  CHECK(r.sup_norm < 1e-14);
  CHECK(r.points[0][0] == doctest::Approx(-1.6));
}

TEST_CASE("F-functional: constant f") {
  const auto grid = torus_grid(3, 8);
  const auto g = sample_metric(flat_metric(3), grid);
  for (double c : {0.0, 0.4, -1.3}) CHECK(f_functional(g, GridField(grid, c)) == doctest::Approx(-std::exp(-c) * kVol3).epsilon(1e-13));
}

TEST_CASE("F-functional: a cos x against quadrature and Bessel forms") {
  const auto grid = torus_grid(3, 32);
  const auto g = sample_metric(flat_metric(3), grid);
  for (double a : {1.0, 0.5, 1e-4}) {
    const auto f = sample_scalar(scalar_of_x(3, [a](const Jet& x) { return Jet(a) * cos(x); }), grid);
    const double oracle =
        4 * kPi * kPi * quad([a](double x) { return (-1 + a * a * std::sin(x) * std::sin(x)) * std::exp(-a * std::cos(x)); }, 0, 2 * kPi);
    const double bessel = kVol3 * (-bessel_i(0, a) + a * bessel_i(1, a));
    CHECK(oracle == doctest::Approx(bessel).epsilon(1e-12));
    CHECK(std::abs(f_functional(g, f) - oracle) < 1e-8 * std::abs(oracle));
  }
}

TEST_CASE("dF/dt: static data gives zero") {
  const auto grid = torus_grid(3, 8);
  const auto g = sample_metric(flat_metric(3), grid);
  const auto phi = sample_tensor(zero_tensor(3), grid);
  const auto f = scalar_of_x(3, [](const Jet& x) { return Jet(0.3) * cos(x); });
  const AnalyticField still(3, FieldKind::Scalar, f.evaluator(),
                            [](std::span<const Jet>, double, std::span<Jet> out) { out[0] = Jet(0.0); });
  const auto r = dF_dt_check(g, phi, still, 0.0);
  CHECK(r.chain == 0.0);
  CHECK(r.paper == 0.0);
  CHECK(std::abs(r.fd) < 1e-10);
}

TEST_CASE("dF/dt: flat, f = c + t") {
  const auto grid = torus_grid(3, 8);
  const auto g = sample_metric(flat_metric(3), grid);
  const auto phi = sample_tensor(zero_tensor(3), grid);
  const double c = 0.25;
  const auto r = dF_dt_check(g, phi, constant_plus_t(c), 0.0);
  const double expect = std::exp(-c) * kVol3;
  CHECK(r.chain == doctest::Approx(expect).epsilon(1e-13));
  CHECK(r.paper == doctest::Approx(expect).epsilon(1e-13));
  CHECK(r.fd == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("dF/dt: warped flow, chain rule against FD") {
  const auto grid = torus_grid(3, 16);
  const auto g = sample_metric(warped_metric(0.5), grid);
  const auto phi = sample_tensor(warped_compatible_phi(0.5), grid);
  const auto r = dF_dt_check(g, phi, moving_f(1.0), 0.0);
  MESSAGE("chain " << r.chain << " displayed " << r.paper << " fd " << r.fd << " (err " << r.fd_error << ")");
  CHECK(std::abs(r.chain - r.fd) < 1e-4 * std::abs(r.fd));
  CHECK(std::abs(r.paper - r.fd) > 1e-3 * std::abs(r.fd));
}

TEST_CASE("u and v: flat constant f") {
  const auto grid = torus_grid(3, 8);
  const auto g = sample_metric(flat_metric(3), grid);
  const auto phi = sample_tensor(zero_tensor(3), grid);
  const double c = 0.8, tau = 0.6;
  const auto lit = u_v_fields(g, phi, GridField(grid, c), {tau, UConvention::Literal});
  for (std::size_t p = 0; p < grid->size(); p += 37) {
    CHECK(lit.u[p] == doctest::Approx(std::exp(-c)).epsilon(1e-15));
    CHECK(lit.v[p] == doctest::Approx((c - 3) * std::exp(-c)).epsilon(1e-14));
  }
  const EntropyContext ctx{tau, UConvention::Normalized};
  const auto raw = u_v_fields(g, phi, GridField(grid, c), ctx);
  const auto fixed = u_v_fields(g, phi, GridField(grid, c + raw.shift), ctx);
  CHECK(fixed.normalization == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fixed.u[11] * kVol3 == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("u and v: warped recomposition") {
  const auto grid = torus_grid(3, 16);
  const auto g = sample_metric(warped_metric(0.7), grid);
  const auto phi = sample_tensor(warped_compatible_phi(0.7), grid);
  const auto f = sample_scalar(random_trig_scalar(3, 8), grid);
  const double tau = 0.9;
  const auto uv = u_v_fields(g, phi, f, {tau, UConvention::Literal, StarScalarMode::RStar});
  const auto curv = grid_curvature(g, &phi);
  const auto sc = grid_scalar_calculus(curv, f);
  double worst = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < grid->size(); ++p) {
    const double u = std::exp(-f[p]);
    const double v = (tau * (2 * sc.laplacian[p] - sc.norm2[p] + curv.r_star[p]) + f[p] - 3) * u;
    worst = std::max(worst, std::abs(v - uv.v[p]));
    scale = std::max(scale, std::abs(v));
  }
  CHECK(worst < 1e-12 * scale);
}

TEST_CASE("omega: flat constant f is c - n") {
  const auto grid = torus_grid(3, 8);
  const auto g = sample_metric(flat_metric(3), grid);
  const auto phi = sample_tensor(zero_tensor(3), grid);
  const EntropyContext ctx{0.7, UConvention::Normalized};
  const auto raw = u_v_fields(g, phi, GridField(grid, 0.0), ctx);
  const double c = raw.shift;
  CHECK(omega_entropy(g, phi, GridField(grid, c), ctx) == doctest::Approx(c - 3).epsilon(1e-13));
  try {
    omega_entropy(g, phi, GridField(grid, c + 1e-6), ctx);
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotNormalized);
  }
}

TEST_CASE("omega: flat a cos x against quadrature") {
  const auto grid = torus_grid(3, 32);
  const auto g = sample_metric(flat_metric(3), grid);
  const auto phi = sample_tensor(zero_tensor(3), grid);
  const double a = 1.0, tau = 0.8;
  const EntropyContext ctx{tau, UConvention::Normalized};
  GridField f = sample_scalar(scalar_of_x(3, [a](const Jet& x) { return Jet(a) * cos(x); }), grid);
  const double shift = u_v_fields(g, phi, f, ctx).shift;
  for (std::size_t p = 0; p < f.size(); ++p) f[p] += shift;
  // Weighted average of tau |f'|^2 + f - n under e^{-a cos x}.
  const double z = quad([a](double x) { return std::exp(-a * std::cos(x)); }, 0, 2 * kPi);
  const double num = quad(
      [&](double x) {
        return (tau * a * a * std::sin(x) * std::sin(x) + a * std::cos(x) + shift - 3) * std::exp(-a * std::cos(x));
      },
      0, 2 * kPi);
  const double oracle = num / z;
  CHECK(std::abs(omega_entropy(g, phi, f, ctx) - oracle) < 1e-8 * std::abs(oracle));
}

TEST_CASE("omega: invariant under scaling g and tau together") {
  const auto grid = torus_grid(3, 16);
  const auto g = sample_metric(warped_metric(0.5), grid);
  const auto phi = sample_tensor(warped_compatible_phi(0.5), grid);
  GridField f = sample_scalar(random_trig_scalar(3, 5, 3, 0.4), grid);
  const double tau = 0.7;
  auto omega_scaled = [&](double c) {
    GridMetric gc = zero_like(g);
    gc.axpy(c, g);
    const EntropyContext ctx{c * tau, UConvention::Normalized};
    GridField fc = f;
    const double s = u_v_fields(gc, phi, fc, ctx).shift;
    for (std::size_t p = 0; p < fc.size(); ++p) fc[p] += s;
    return omega_entropy(gc, phi, fc, ctx);
  };
  const double w1 = omega_scaled(1.0);
  for (double c : {0.5, 1.7, 2.0}) CHECK(std::abs(omega_scaled(c) - w1) < 1e-8 * std::max(1.0, std::abs(w1)));
}

TEST_CASE("heat operators on a static flat trajectory") {
  const auto grid = torus_grid(3, 8);
  const auto g0 = sample_metric(flat_metric(3), grid);
  const auto phi = sample_tensor(zero_tensor(3), grid);
  CoupledOptions opt;
  opt.dt = 0.01;
  opt.horizon = 0.2;
  const auto tr = integrate_coupled_system(g0, phi, GridField(grid, 0.0), opt);
  TrajectoryGeometry geo(tr, phi);
  const auto fd = trajectory_fd(tr);
  const double t0 = 0.1;

  const auto one = conjugate_heat_apply([&](std::size_t) { return GridField(grid, 1.0); }, geo, t0,
                                        HeatOperator::BoxStar, fd);
  CHECK(one.max_abs() == 0.0);

  const auto t = conjugate_heat_apply([&](std::size_t k) { return GridField(grid, tr.t[k]); }, geo, t0,
                                      HeatOperator::BoxStar, fd);
  for (double v : t.samples()) CHECK(v == doctest::Approx(-1.0).epsilon(1e-10));
  const auto tb = conjugate_heat_apply([&](std::size_t k) { return GridField(grid, tr.t[k]); }, geo, t0,
                                       HeatOperator::Box, fd);
  for (double v : tb.samples()) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

  const auto w = sample_scalar(scalar_of_x(3, [](const Jet& x) { return sin(Jet(2.0) * x); }), grid);
  const auto r = conjugate_heat_apply([&](std::size_t) { return w; }, geo, t0, HeatOperator::BoxStar, fd);
  for (std::size_t p = 0; p < w.size(); ++p) CHECK(r[p] == doctest::Approx(4.0 * w[p]).epsilon(1e-11));

  CHECK_THROWS_AS(conjugate_heat_apply([&](std::size_t) { return w; }, geo, 0.02, HeatOperator::BoxStar, fd), Error);
}

TEST_CASE("transport identity: flat constant scenario") {
  const int n = 3;
  const auto grid = torus_grid(n, 8);
  const auto g0 = sample_metric(flat_metric(n), grid);
  const auto phi = sample_tensor(zero_tensor(n), grid);
  CoupledOptions opt;
  opt.dt = 0.005;
  opt.horizon = 0.1;
  const auto tr = integrate_coupled_system(g0, phi, GridField(grid, 0.4), opt);
  TrajectoryGeometry geo(tr, phi);
  const auto r = transport_check(geo, 0.05, trajectory_fd(tr));
  const double expect = n / (2.0 * r.tau);
  CHECK(r.domega_fd == doctest::Approx(expect).epsilon(1e-8));
  CHECK(std::abs(r.minus_int_box_star_v - r.domega_fd) < 1e-6 * expect);
  CHECK(r.box_star_u_normalized < 1e-8);
  CHECK(r.literal_excess < 1e-8);
  CHECK(r.box_star_u_literal > 0.1 * expect * std::exp(-tr.f[10][0]));
  MESSAGE("expanded form " << r.minus_int_expanded << " vs " << r.domega_fd);
}

TEST_CASE("transport identity: warped trajectory") {
  const auto grid = torus_grid(3, 24);
  const auto g0 = sample_metric(warped_metric(0.5), grid);
  const auto phi = sample_tensor(warped_compatible_phi(0.5), grid);
  const auto fT = sample_scalar(random_trig_scalar(3, 4, 3, 0.3), grid);
  CoupledOptions opt;
  opt.dt = 1e-3;
  opt.horizon = 0.02;
  const auto tr = integrate_coupled_system(g0, phi, fT, opt);
  TrajectoryGeometry geo(tr, phi);
  const auto r = transport_check(geo, 0.01, trajectory_fd(tr));
  MESSAGE("domega " << r.domega_fd << " direct " << r.minus_int_box_star_v << " expanded " << r.minus_int_expanded
                    << " |box* u| " << r.box_star_u_normalized << " literal excess " << r.literal_excess);
  CHECK(std::abs(r.minus_int_box_star_v - r.domega_fd) < 1e-4 * std::abs(r.domega_fd));
}
