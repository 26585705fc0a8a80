#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "starlab/curvature.hpp"
#include "starlab/fields.hpp"
#include "starlab/grid_geometry.hpp"

namespace starlab {

// Grid-level quantities the scalar equations need at one metric.
struct FlowGeometry {
  GridMetric ginv;
  std::vector<GridField> gamma_trace;  // g^ij Gamma^k_ij
  GridField sqrt_det;
  GridField star_scalar;               // R* in the chosen mode
  GridField trace_s_star;
};

struct StarRate {
  GridMetric rate;         // -2 sym S*
  double asymmetry = 0.0;  // max |S*_pq - S*_qp| before symmetrization
  double max_norm = 0.0;   // max over points of |sym S*|_g
};

// -2 sym S*(g, phi) on the grid; optionally fills the scalar-equation geometry.
StarRate star_ricci_rate(const GridMetric& g, const GridTensor& phi, FlowGeometry* geometry = nullptr,
                         StarScalarMode mode = StarScalarMode::RStar);
FlowGeometry flow_geometry(const GridMetric& g, const GridTensor& phi, StarScalarMode mode);

struct FlowOptions {
  double pd_threshold = 1e-12;
  double guard_factor = 0.2;  // dt <= guard_factor * h^2 / max |S*|_g
};

struct FlowState {
  double t = 0.0;
  double tau = 1.0;
  GridMetric g;
};

struct StepLog {
  double asymmetry = 0.0;  // largest pre-symmetrization asymmetry over the four stages
  double min_eig = 0.0;    // smallest eigenvalue of the new metric
  double max_s_norm = 0.0;
};

// One classical RK4 step of dg/dt = -2 sym S* with phi frozen; tau decreases by dt.
// `first_stage`, when given, receives the rate at the incoming metric.
FlowState flow_step_star_ricci(const FlowState& state, const GridTensor& phi, double dt,
                               const FlowOptions& options = {}, StepLog* log = nullptr,
                               StarRate* first_stage = nullptr);

// Bare RK4 update of g with either sign of dt; no guard or positivity check.
GridMetric rk4_metric_step(const GridMetric& g, const GridTensor& phi, double dt);
GridMetric rk4_metric_step(const GridMetric& g, const GridTensor& phi, double dt, const StarRate& k1,
                           double* asymmetry = nullptr);

double min_eigenvalue(const GridMetric& g);

// Delta w = g^ij d_i d_j w - g^ij Gamma^k_ij d_k w.
GridField laplacian(const FlowGeometry& geo, const GridField& w);

// ---- Coupled (g, tau, f) system ------------------------------------------

enum class UConvention { Literal, Normalized };

struct CoupledOptions {
  double dt = 1e-3;
  double horizon = 0.1;
  double tau0 = 1.0;
  StarScalarMode star_scalar = StarScalarMode::RStar;
  UConvention convention = UConvention::Normalized;
  FlowOptions flow;
};

// Step-aligned trajectory: every quantity is stored at t_k = k dt.
struct Trajectory {
  int dim = 0;
  double dt = 0.0;
  double tau0 = 1.0;
  UConvention convention = UConvention::Normalized;
  StarScalarMode star_scalar = StarScalarMode::RStar;
  double f_shift = 0.0;  // constant added to fT so that the normalized mass is 1
  std::vector<double> t;
  std::vector<GridMetric> g;
  std::vector<GridMetric> gdot;
  std::vector<GridField> f;
  std::vector<double> min_eig;
  std::vector<double> asymmetry;
  std::vector<double> mass;  // int u dV under `convention`

  std::size_t steps() const { return t.empty() ? 0 : t.size() - 1; }
  double tau(double time) const { return tau0 - time; }
  // Index of a stored step time; WindowError when `time` is off the step grid or outside.
  std::size_t index_of(double time) const;
};

// u for the given convention: e^{-f}, or (4 pi tau)^{-n/2} e^{-f}.
GridField u_field(const GridField& f, double tau, int dim, UConvention convention);

// Forward RK4 for g on [0, T], then backward RK4 for
//   df/dt = -Delta f + |grad f|^2 - R* + n / (2 tau)
// from f(T) = fT, with g at half steps from cubic Hermite interpolation.
Trajectory integrate_coupled_system(const GridMetric& g0, const GridTensor& phi, const GridField& fT,
                                    const CoupledOptions& options);

// Right-hand side of the f-equation at one metric.
GridField f_equation_rhs(const FlowGeometry& geo, const GridField& f, double tau);

// ---- Flow maps and pullbacks (analytic fields) -----------------------------

struct FlowMap {
  std::vector<double> x;  // psi_t(x0)
  std::vector<double> J;  // d psi_t / d x0, row-major [a][i]
};

// RK4 on dx/ds = X(x, s) and dJ/ds = DX J from s = 0 to s = t with a fixed
// step count, so the result is a smooth function of t.
FlowMap integrate_flow_map(const AnalyticField& X, std::span<const double> x0, double t, int steps = 64,
                           const Domain* domain = nullptr);

struct Pullback {
  FlowMap map;
  std::vector<double> metric;  // (psi_t^* g)_ij at x0, g evaluated at time g_time
};

Pullback pullback_by_flow(const AnalyticField& X, const AnalyticField& g, std::span<const double> x0, double t,
                          double g_time = 0.0, const Domain* domain = nullptr, int steps = 64);

// Pull back a covariant 2-tensor given at psi_t(x0).
std::vector<double> pull_back(const FlowMap& map, std::span<const double> tensor_at_image, int dim);

// gbar(t) = sigma(t) psi_t^*(g(t)), psi_t the flow of X from 0.
struct SelfSimilarFamily {
  std::function<double(double)> sigma;
  std::function<double(double)> dsigma;
  AnalyticField X;
  AnalyticField g;  // may depend on t; dg/dt from its time derivative
  int steps = 64;
};

// sigma = 1 - 2 lambda t, X = Y / sigma, g = g0 static.
SelfSimilarFamily self_similar_family(const AnalyticField& g0, const AnalyticField& Y, double lambda);

std::vector<double> family_metric(const SelfSimilarFamily& fam, std::span<const double> x, double t,
                                  const Domain* domain = nullptr);
// sigma' psi^* g + sigma psi^*(dg/dt) + sigma psi^*(L_X g).
std::vector<double> family_rhs(const SelfSimilarFamily& fam, std::span<const double> x, double t,
                               const Domain* domain = nullptr);

// gbar(t) as an analytic field in x. The flow map is integrated on coordinate
// jets one order above the request, so it only accepts coordinate jets of
// order <= 3 (what AnalyticField::eval passes).
AnalyticField family_metric_field(const SelfSimilarFamily& fam, double t);

struct SelfSimilarValue {
  std::vector<double> metric;
  std::vector<double> rhs;
};
SelfSimilarValue self_similar_metric(const AnalyticField& g0, const AnalyticField& Y, double lambda,
                                     std::span<const double> x, double t, const Domain* domain = nullptr);

// ---- Connection variation --------------------------------------------------

struct ConnectionVariation {
  double fd_value = 0.0;        // d/de g(nabla^{g+eh}_X Y, Z)
  double fd_error = 0.0;
  double standard_value = 0.0;  // 1/2[(nabla_X h)(Y,Z) + (nabla_Y h)(X,Z) - (nabla_Z h)(X,Y)]
  double paper_rhs = 0.0;       // -2(nabla_X S)(Y,Z) + 2S(Y,nabla_X Z) + 2S(nabla_X Y,Z), S = -h/2
  double scale = 0.0;
};

// h given by its jets (order >= 1) at x. X, Y, Z have constant coefficients.
ConnectionVariation connection_variation_check(const AnalyticField& g, std::span<const Jet> h,
                                               std::span<const double> X, std::span<const double> Y,
                                               std::span<const double> Z, std::span<const double> x,
                                               double t = 0.0);
ConnectionVariation connection_variation_check(const AnalyticField& g, const AnalyticField& h,
                                               std::span<const double> X, std::span<const double> Y,
                                               std::span<const double> Z, std::span<const double> x,
                                               double t = 0.0);
// h = -2 sym S*(g, phi).
ConnectionVariation connection_variation_star(const AnalyticField& g, const AnalyticField& phi,
                                              std::span<const double> X, std::span<const double> Y,
                                              std::span<const double> Z, std::span<const double> x,
                                              double t = 0.0);

}  // namespace starlab
