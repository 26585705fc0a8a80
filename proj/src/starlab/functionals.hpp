#pragma once

#include <map>
#include <memory>
#include <vector>

#include "starlab/fields.hpp"
#include "starlab/flow.hpp"
#include "starlab/grid_geometry.hpp"

namespace starlab {

// ---- Solitons --------------------------------------------------------------

enum class SolitonVariant { Ricci, Star };

struct SolitonData {
  AnalyticField V;
  double lambda = 0.0;
  SolitonVariant variant = SolitonVariant::Star;
};

// ricci: L_V g + 2 Ric - lambda g;  star: L_V g + 2 S* + 2 lambda g.
std::vector<double> soliton_residual_at(const AnalyticField& g, const AnalyticField* phi, const SolitonData& data,
                                        std::span<const double> x, double t = 0.0);

struct SolitonResidual {
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> residual;
  double sup_norm = 0.0;  // max over points of the g-operator norm
};

// Evaluated on per_axis^n points: grid points of a torus, cell centres of a box.
SolitonResidual soliton_residual(const AnalyticField& g, const AnalyticField* phi, const SolitonData& data,
                                 const Domain& domain, int per_axis, double t = 0.0);

// ---- F-functional ------------------------------------------------------------

// int (c + |grad f|^2) e^{-f} dV, c = -1 by default.
double f_functional(const GridMetric& g, const GridField& f, double constant = -1.0);

struct FdParams {
  double h0 = 1e-3;
  int levels = 3;
};

struct DFdtCheck {
  double chain = 0.0;  // forced derivative
  double paper = 0.0;  // displayed right-hand side, taken verbatim
  double fd = 0.0;
  double fd_error = 0.0;
};

// Derivative of F along dg/dt = -2 sym S* from g(t0) and the family f(t).
// FD samples at t0 + s use one RK4 step of size s from g(t0).
DFdtCheck dF_dt_check(const GridMetric& g_t0, const GridTensor& phi, const AnalyticField& f, double t0,
                      const FdParams& fd = {}, double constant = -1.0);

enum class FormulaMode { Chain, Paper };
// Both sides with explicit h = dg/dt and fdot.
double dF_dt_formula(const GridMetric& g, const GridMetric& h, const GridField& f, const GridField& fdot,
                     FormulaMode mode, double constant = -1.0);

GridField sample_time_derivative(const AnalyticField& f, const GridPtr& grid, double t);

// ---- Entropy -----------------------------------------------------------------

struct EntropyContext {
  double tau = 1.0;
  UConvention convention = UConvention::Normalized;
  StarScalarMode star_scalar = StarScalarMode::RStar;
};

struct UVFields {
  GridField u;
  GridField v;            // [tau (2 Delta f - |grad f|^2 + R*) + f - n] u
  double normalization;   // int u dV
  double shift;           // add to f to make int u dV = 1
};

UVFields u_v_fields(const FlowGeometry& geo, const GridField& f, const EntropyContext& ctx);
UVFields u_v_fields(const GridMetric& g, const GridTensor& phi, const GridField& f, const EntropyContext& ctx);

// int [tau (R* + |grad f|^2) + f - n] u dV; NotNormalized unless |int u dV - 1| <= 1e-8.
double omega_entropy(const FlowGeometry& geo, const GridField& f, const EntropyContext& ctx);
double omega_entropy(const GridMetric& g, const GridTensor& phi, const GridField& f, const EntropyContext& ctx);

GridField grad_norm2(const FlowGeometry& geo, const GridField& f);
double integrate(const FlowGeometry& geo, const GridField& s);

// ---- Heat operators along a trajectory ----------------------------------------

// Lazily computed FlowGeometry per trajectory step.
class TrajectoryGeometry {
 public:
  TrajectoryGeometry(const Trajectory& tr, const GridTensor& phi) : tr_(tr), phi_(phi) {}
  const Trajectory& trajectory() const { return tr_; }
  const GridTensor& phi() const { return phi_; }
  const FlowGeometry& at(std::size_t step);

 private:
  const Trajectory& tr_;
  const GridTensor& phi_;
  std::map<std::size_t, std::unique_ptr<FlowGeometry>> cache_;
};

// A space-time scalar sampled at stored trajectory steps.
using SpaceTimeScalar = std::function<GridField(std::size_t step)>;

enum class HeatOperator { Box, BoxStar };

// Default FD window for trajectory derivatives: h0 = 4 dt, 3 levels, so every
// sample lands on a stored step.
FdParams trajectory_fd(const Trajectory& tr);

// box: dw/dt - Delta w;  box_star: -dw/dt - Delta w + R* w, at g(t0).
GridField conjugate_heat_apply(const SpaceTimeScalar& w, TrajectoryGeometry& geo, double t0, HeatOperator which,
                               const FdParams& fd);

struct TransportCheck {
  double tau = 0.0;
  double domega_fd = 0.0;
  double domega_fd_error = 0.0;
  double minus_int_box_star_v = 0.0;  // direct
  double minus_int_expanded = 0.0;    // expanded integrand
  double expanded_asym_contribution = 0.0;
  double box_star_u_normalized = 0.0;  // sup |box* u|, u = (4 pi tau)^{-n/2} e^{-f}
  double box_star_u_literal = 0.0;     // sup |box* u|, u = e^{-f}
  double literal_excess = 0.0;         // sup |box* u - n/(2 tau) u|, literal u
  double literal_u_sup = 0.0;
};

TransportCheck transport_check(TrajectoryGeometry& geo, double t0, const FdParams& fd);

}  // namespace starlab
