#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "starlab/jet.hpp"

namespace starlab {

enum class DomainKind { Torus, AnalyticBox };

struct Domain {
  DomainKind kind = DomainKind::Torus;
  int dim = 3;
  std::vector<double> radii;  // torus: coordinate x_a lives on [0, 2 pi r_a)
  std::vector<double> lower;  // analytic box bounds
  std::vector<double> upper;

  static Domain torus(int dim, std::vector<double> radii = {});
  static Domain box(std::vector<double> lower, std::vector<double> upper);

  bool contains(std::span<const double> x) const;
  double period(int axis) const;
  std::string describe() const;
};

// Uniform periodic grid with N points per axis (N even) on a torus domain.
class Grid {
 public:
  Grid(Domain domain, int n);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double spacing(int axis) const { return domain_.period(axis) / n_; }
  double cell_volume() const;
  void point(std::size_t index, std::span<double> x) const;
  std::vector<double> point(std::size_t index) const;

 private:
  Domain domain_;
  int n_;
  std::size_t size_;
};

using GridPtr = std::shared_ptr<const Grid>;
GridPtr make_grid(const Domain& domain, int n);

class GridField {
 public:
  GridField() = default;
  explicit GridField(GridPtr grid, double fill = 0.0);
  GridField(GridPtr grid, std::vector<double> samples);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  std::span<const double> samples() const { return v_; }
  std::span<double> samples() { return v_; }

  double max_abs() const;
  GridField& axpy(double a, const GridField& x);  // this += a x

 private:
  GridPtr grid_;
  std::vector<double> v_;
};

// Symmetric metric on a grid: n(n+1)/2 component fields.
struct GridMetric {
  GridPtr grid;
  int dim = 0;
  std::vector<GridField> comps;

  static int sym(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  }
  double at(int i, int j, std::size_t p) const { return comps[sym(i, j, dim)][p]; }
  GridMetric& axpy(double a, const GridMetric& x);
  double max_abs_difference(const GridMetric& other) const;
};

GridMetric zero_like(const GridMetric& g);

// Full n x n (1,1)- or (0,2)-tensor on a grid, row-major components.
struct GridTensor {
  GridPtr grid;
  int dim = 0;
  std::vector<GridField> comps;
  double at(int i, int j, std::size_t p) const { return comps[i * dim + j][p]; }
};

enum class FieldKind { Scalar, Vector, Tensor };

int component_count(FieldKind kind, int dim);

// Closed-form field on R^n (periodic when used on a torus). The evaluator is
// written once against Jet arithmetic; derivatives come from jet propagation.
class AnalyticField {
 public:
  using Evaluator = std::function<void(std::span<const Jet> x, double t, std::span<Jet> out)>;

  AnalyticField() = default;
  AnalyticField(int dim, FieldKind kind, Evaluator fn, Evaluator time_derivative = {});

  int dim() const { return dim_; }
  FieldKind kind() const { return kind_; }
  int components() const { return component_count(kind_, dim_); }
  bool valid() const { return static_cast<bool>(fn_); }
  bool has_time_derivative() const { return static_cast<bool>(dt_fn_); }

  std::vector<Jet> eval(std::span<const double> point, int order, double t = 0.0) const;
  std::vector<double> values(std::span<const double> point, double t = 0.0) const;
  // Exact when a time-derivative evaluator was supplied, Richardson otherwise.
  std::vector<Jet> eval_time_derivative(std::span<const double> point, int order, double t) const;

  const Evaluator& evaluator() const { return fn_; }

 private:
  int dim_ = 0;
  FieldKind kind_ = FieldKind::Scalar;
  Evaluator fn_;
  Evaluator dt_fn_;
};

// Jet of an analytic field with a domain check (OutsideDomain for box domains).
std::vector<Jet> eval_jet(const AnalyticField& field, const Domain& domain, std::span<const double> point,
                          int order, double t = 0.0);

std::vector<GridField> sample(const AnalyticField& field, const GridPtr& grid, double t = 0.0);
GridField sample_scalar(const AnalyticField& field, const GridPtr& grid, double t = 0.0);
GridMetric sample_metric(const AnalyticField& field, const GridPtr& grid, double t = 0.0);
GridTensor sample_tensor(const AnalyticField& field, const GridPtr& grid, double t = 0.0);

// Sum of s * sqrt(det g) * cell volume, pairwise-reduced in grid order.
// Snapshot text: one JSON header line (domain, N, field, t, order), then one
// sample per line in grid order (last axis fastest), printed with %.17g.
std::string snapshot_text(const GridField& f, const std::string& name, double t);

double integrate_over_torus(const GridField& s, const GridMetric& g);
std::vector<double> sqrt_det(const GridMetric& g);

}  // namespace starlab
