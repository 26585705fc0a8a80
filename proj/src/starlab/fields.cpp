#include "starlab/fields.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "starlab/errors.hpp"
#include "starlab/parallel.hpp"
#include "starlab/richardson.hpp"
#include "starlab/smallmat.hpp"

namespace starlab {

Domain Domain::torus(int dim, std::vector<double> radii) {
  if (dim < 2 || dim > kMaxJetDim) fail(ErrorKind::Config, "dimension must be in [2, 5]");
  if (radii.empty()) radii.assign(static_cast<std::size_t>(dim), 1.0);
  if (static_cast<int>(radii.size()) != dim) fail(ErrorKind::Config, "torus needs one radius per axis");
  for (double r : radii)
    if (!(r > 0.0)) fail(ErrorKind::Config, "torus radii must be positive");
  Domain d;
  d.kind = DomainKind::Torus;
  d.dim = dim;
  d.radii = std::move(radii);
  return d;
}

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
  const int dim = static_cast<int>(lower.size());
  if (dim < 2 || dim > kMaxJetDim) fail(ErrorKind::Config, "dimension must be in [2, 5]");
  if (upper.size() != lower.size()) fail(ErrorKind::Config, "box bounds differ in length");
  for (int a = 0; a < dim; ++a)
    if (!(upper[a] > lower[a])) fail(ErrorKind::Config, "box upper bound must exceed lower bound");
  Domain d;
  d.kind = DomainKind::AnalyticBox;
  d.dim = dim;
  d.lower = std::move(lower);
  d.upper = std::move(upper);
  return d;
}

bool Domain::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim) return false;
  if (kind == DomainKind::Torus) return true;
  for (int a = 0; a < dim; ++a)
    if (x[a] < lower[a] || x[a] > upper[a]) return false;
  return true;
}

double Domain::period(int axis) const {
  if (kind != DomainKind::Torus) fail(ErrorKind::Unsupported, "period requested on a non-torus domain");
  return 2.0 * std::numbers::pi * radii[axis];
}

std::string Domain::describe() const {
  std::ostringstream os;
  if (kind == DomainKind::Torus) {
    os << "torus(dim=" << dim << ", radii=[";
    for (int a = 0; a < dim; ++a) os << (a ? "," : "") << radii[a];
    os << "])";
  } else {
    os << "box(dim=" << dim << ")";
  }
  return os.str();
}

Grid::Grid(Domain domain, int n) : domain_(std::move(domain)), n_(n) {
  if (domain_.kind != DomainKind::Torus) fail(ErrorKind::Unsupported, "grid fields need a torus domain");
  if (n < 2 || n % 2 != 0) fail(ErrorKind::Config, "grid resolution N must be even and >= 2");
  size_ = 1;
  for (int a = 0; a < domain_.dim; ++a) size_ *= static_cast<std::size_t>(n);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

void Grid::point(std::size_t index, std::span<double> x) const {
  for (int a = dim() - 1; a >= 0; --a) {
    x[a] = static_cast<double>(index % n_) * spacing(a);
    index /= n_;
  }
}

std::vector<double> Grid::point(std::size_t index) const {
  std::vector<double> x(static_cast<std::size_t>(dim()));
  point(index, x);
  return x;
}

GridPtr make_grid(const Domain& domain, int n) { return std::make_shared<const Grid>(domain, n); }

GridField::GridField(GridPtr grid, double fill) : grid_(std::move(grid)), v_(grid_->size(), fill) {}

GridField::GridField(GridPtr grid, std::vector<double> samples) : grid_(std::move(grid)), v_(std::move(samples)) {
  if (v_.size() != grid_->size()) fail(ErrorKind::ShapeMismatch, "sample count does not match grid");
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

GridField& GridField::axpy(double a, const GridField& x) {
  if (x.size() != size()) fail(ErrorKind::ShapeMismatch, "grid field sizes differ");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * x.v_[i];
  return *this;
}

GridMetric& GridMetric::axpy(double a, const GridMetric& x) {
  for (std::size_t c = 0; c < comps.size(); ++c) comps[c].axpy(a, x.comps[c]);
  return *this;
}

double GridMetric::max_abs_difference(const GridMetric& other) const {
  double m = 0.0;
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (std::size_t p = 0; p < comps[c].size(); ++p)
      m = std::max(m, std::abs(comps[c][p] - other.comps[c][p]));
  return m;
}

GridMetric zero_like(const GridMetric& g) {
  GridMetric z;
  z.grid = g.grid;
  z.dim = g.dim;
  z.comps.assign(g.comps.size(), GridField(g.grid, 0.0));
  return z;
}

int component_count(FieldKind kind, int dim) {
  switch (kind) {
    case FieldKind::Scalar: return 1;
    case FieldKind::Vector: return dim;
    case FieldKind::Tensor: return dim * dim;
  }
  return 1;
}

AnalyticField::AnalyticField(int dim, FieldKind kind, Evaluator fn, Evaluator time_derivative)
    : dim_(dim), kind_(kind), fn_(std::move(fn)), dt_fn_(std::move(time_derivative)) {}

std::vector<Jet> AnalyticField::eval(std::span<const double> point, int order, double t) const {
  if (static_cast<int>(point.size()) != dim_) fail(ErrorKind::ShapeMismatch, "point dimension mismatch");
  const auto x = coordinate_jets(point, order);
  std::vector<Jet> out(static_cast<std::size_t>(components()));
  fn_(x, t, out);
  // Components that came back as plain constants are promoted to full jets.
  for (auto& j : out)
    if (j.is_constant()) j = Jet::constant(dim_, order, j.value());
  return out;
}

std::vector<double> AnalyticField::values(std::span<const double> point, double t) const {
  const auto jets = eval(point, 0, t);
  std::vector<double> out(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) out[i] = jets[i].value();
  return out;
}

std::vector<Jet> AnalyticField::eval_time_derivative(std::span<const double> point, int order, double t) const {
  if (dt_fn_) {
    const auto x = coordinate_jets(point, order);
    std::vector<Jet> out(static_cast<std::size_t>(components()));
    dt_fn_(x, t, out);
    for (auto& j : out)
      if (j.is_constant()) j = Jet::constant(dim_, order, j.value());
    return out;
  }
  const int size = jet_size(dim_, order);
  const auto flat = richardson_time_derivative(
      [&](double s) {
        const auto jets = eval(point, order, s);
        std::vector<double> v;
        v.reserve(jets.size() * static_cast<std::size_t>(size));
        for (const auto& j : jets)
          for (int i = 0; i < size; ++i) v.push_back(j.coeff(i));
        return v;
      },
      t, default_fd_step(t));
  std::vector<Jet> out(static_cast<std::size_t>(components()));
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = Jet::constant(dim_, order, 0.0);
    for (int i = 0; i < size; ++i) out[c].coeff(i) = flat[c * static_cast<std::size_t>(size) + i];
  }
  return out;
}

std::vector<Jet> eval_jet(const AnalyticField& field, const Domain& domain, std::span<const double> point, int order,
                          double t) {
  if (order > kMaxJetOrder) fail(ErrorKind::Unsupported, "jet order above 4");
  if (!domain.contains(point)) fail(ErrorKind::OutsideDomain, "point outside " + domain.describe());
  return field.eval(point, order, t);
}

std::vector<GridField> sample(const AnalyticField& field, const GridPtr& grid, double t) {
  if (field.dim() != grid->dim()) fail(ErrorKind::ShapeMismatch, "field and grid dimensions differ");
  const int nc = field.components();
  std::vector<GridField> out(static_cast<std::size_t>(nc), GridField(grid, 0.0));
  parallel_chunks(grid->size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(static_cast<std::size_t>(grid->dim()));
    for (std::size_t p = begin; p < end; ++p) {
      grid->point(p, x);
      const auto v = field.values(x, t);
      for (int c = 0; c < nc; ++c) out[c][p] = v[c];
    }
  });
  return out;
}

GridField sample_scalar(const AnalyticField& field, const GridPtr& grid, double t) {
  if (field.kind() != FieldKind::Scalar) fail(ErrorKind::ShapeMismatch, "expected a scalar field");
  return std::move(sample(field, grid, t)[0]);
}

GridMetric sample_metric(const AnalyticField& field, const GridPtr& grid, double t) {
  if (field.kind() != FieldKind::Tensor) fail(ErrorKind::ShapeMismatch, "expected a tensor field");
  auto full = sample(field, grid, t);
  const int n = grid->dim();
  GridMetric g;
  g.grid = grid;
  g.dim = n;
  g.comps.resize(static_cast<std::size_t>(n * (n + 1) / 2));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      GridField c(grid, 0.0);
      for (std::size_t p = 0; p < grid->size(); ++p) c[p] = 0.5 * (full[i * n + j][p] + full[j * n + i][p]);
      g.comps[GridMetric::sym(i, j, n)] = std::move(c);
    }
  return g;
}

GridTensor sample_tensor(const AnalyticField& field, const GridPtr& grid, double t) {
  if (field.kind() != FieldKind::Tensor) fail(ErrorKind::ShapeMismatch, "expected a tensor field");
  GridTensor out;
  out.grid = grid;
  out.dim = grid->dim();
  out.comps = sample(field, grid, t);
  return out;
}

std::vector<double> sqrt_det(const GridMetric& g) {
  const int n = g.dim;
  std::vector<double> out(g.grid->size());
  parallel_chunks(out.size(), [&](std::size_t begin, std::size_t end) {
    double m[25], inv[25];
    for (std::size_t p = begin; p < end; ++p) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = g.at(i, j, p);
      double det = 0.0;
      if (!smallmat::inverse_det(n, m, inv, det))
        fail(ErrorKind::NonPositiveDefinite, "metric not positive definite at grid point " + std::to_string(p));
      out[p] = std::sqrt(det);
    }
  });
  return out;
}

double integrate_over_torus(const GridField& s, const GridMetric& g) {
  if (s.size() != g.grid->size()) fail(ErrorKind::ShapeMismatch, "integrand and metric grids differ");
  const auto vol = sqrt_det(g);
  std::vector<double> terms(s.size());
  for (std::size_t p = 0; p < terms.size(); ++p) terms[p] = s[p] * vol[p];
  return pairwise_sum(terms) * g.grid->cell_volume();
}

std::string snapshot_text(const GridField& f, const std::string& name, double t) {
  const Grid& grid = *f.grid();
  char buf[64];
  std::string out = "{\"domain\":\"" + grid.domain().describe() + "\",\"N\":" + std::to_string(grid.n()) +
                    ",\"field\":\"" + name + "\",\"t\":";
  std::snprintf(buf, sizeof buf, "%.17g", t);
  out += buf;
  out += ",\"order\":\"last-axis-fastest\",\"samples\":" + std::to_string(f.size()) + "}\n";
  for (double v : f.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out += buf;
  }
  return out;
}

}  // namespace starlab
