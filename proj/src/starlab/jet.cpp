#include "starlab/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "starlab/errors.hpp"

namespace starlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::PositivityLost: return "PositivityLost";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::WindowError: return "WindowError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::RefusedOverwrite: return "RefusedOverwrite";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

void enumerate_degree(int dim, int remaining, int axis, Exponent& cur, std::vector<Exponent>& out) {
  if (axis == dim - 1) {
    cur[axis] = static_cast<std::uint8_t>(remaining);
    out.push_back(cur);
    cur[axis] = 0;
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[axis] = static_cast<std::uint8_t>(k);
    enumerate_degree(dim, remaining - k, axis + 1, cur, out);
  }
  cur[axis] = 0;
}

std::unique_ptr<JetLayout> build_layout(int dim, int order) {
  auto layout = std::make_unique<JetLayout>();
  layout->dim = dim;
  layout->order = order;
  for (int d = 0; d <= order; ++d) {
    Exponent cur{};
    std::vector<Exponent> level;
    enumerate_degree(dim, d, 0, cur, level);
    for (const auto& e : level) {
      layout->exponents.push_back(e);
      layout->degree.push_back(d);
    }
  }
  layout->size = static_cast<int>(layout->exponents.size());

  std::map<Exponent, int> index;
  for (int i = 0; i < layout->size; ++i) index[layout->exponents[i]] = i;

  layout->factorial.resize(layout->size);
  for (int i = 0; i < layout->size; ++i) {
    double f = 1.0;
    for (int a = 0; a < dim; ++a)
      for (int k = 2; k <= layout->exponents[i][a]; ++k) f *= k;
    layout->factorial[i] = f;
  }

  for (int i = 0; i < layout->size; ++i) {
    for (int j = 0; j < layout->size; ++j) {
      if (layout->degree[i] + layout->degree[j] > order) continue;
      Exponent sum{};
      for (int a = 0; a < dim; ++a) sum[a] = layout->exponents[i][a] + layout->exponents[j][a];
      layout->products.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                                  static_cast<std::uint16_t>(index.at(sum))});
    }
  }

  layout->raise.assign(static_cast<std::size_t>(layout->size) * kMaxJetDim, -1);
  for (int i = 0; i < layout->size; ++i) {
    if (layout->degree[i] >= order) continue;
    for (int a = 0; a < dim; ++a) {
      Exponent up = layout->exponents[i];
      ++up[a];
      layout->raise[static_cast<std::size_t>(i) * kMaxJetDim + a] = index.at(up);
    }
  }
  return layout;
}

struct LayoutTable {
  std::array<std::array<std::unique_ptr<JetLayout>, kMaxJetOrder + 1>, kMaxJetDim + 1> table;
  LayoutTable() {
    for (int d = 1; d <= kMaxJetDim; ++d)
      for (int k = 0; k <= kMaxJetOrder; ++k) table[d][k] = build_layout(d, k);
  }
};

const JetLayout& combined_layout(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim())
    fail(ErrorKind::ShapeMismatch, "jet dimensions differ: " + std::to_string(a.dim()) + " vs " +
                                       std::to_string(b.dim()));
  return jet_layout(a.dim(), std::min(a.order(), b.order()));
}

}  // namespace

int JetLayout::index_of(const Exponent& e) const {
  for (int i = 0; i < size; ++i)
    if (exponents[i] == e) return i;
  return -1;
}

const JetLayout& jet_layout(int dim, int order) {
  static const LayoutTable tables;
  if (dim < 1 || dim > kMaxJetDim) fail(ErrorKind::Unsupported, "jet dimension " + std::to_string(dim));
  if (order < 0 || order > kMaxJetOrder)
    fail(ErrorKind::Unsupported, "jet order " + std::to_string(order) + " (maximum is 4)");
  return *tables.table[dim][order];
}

int jet_size(int dim, int order) { return jet_layout(dim, order).size; }

void Jet::copy_from(const Jet& other) {
  const int n = other.size();
  for (int i = 0; i < n; ++i) c_[i] = other.c_[i];
}

Jet Jet::constant(int dim, int order, double v) {
  Jet j;
  j.layout_ = &jet_layout(dim, order);
  for (int i = 0; i < j.layout_->size; ++i) j.c_[i] = 0.0;
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(int dim, int order, int axis, double v) {
  Jet j = constant(dim, order, v);
  if (axis < 0 || axis >= dim) fail(ErrorKind::InvalidArgument, "variable axis out of range");
  if (order >= 1) j.c_[1 + axis] = 1.0;
  return j;
}

int Jet::dim() const { return layout_ ? layout_->dim : 0; }
int Jet::order() const { return layout_ ? layout_->order : kMaxJetOrder; }

double Jet::derivative(const Exponent& alpha) const {
  if (!layout_) {
    for (auto k : alpha)
      if (k != 0) return 0.0;
    return c_[0];
  }
  int total = 0;
  for (auto k : alpha) total += k;
  if (total > layout_->order)
    fail(ErrorKind::Unsupported, "derivative order exceeds jet order");
  const int i = layout_->index_of(alpha);
  return c_[i] * layout_->factorial[i];
}

double Jet::partial(int a) const {
  if (!layout_) return 0.0;
  if (layout_->order < 1) fail(ErrorKind::Unsupported, "jet order 0 has no first derivatives");
  return c_[1 + a];
}

double Jet::partial(int a, int b) const {
  Exponent e{};
  ++e[a];
  ++e[b];
  return derivative(e);
}

Jet Jet::differentiate(int axis) const {
  if (!layout_) return Jet(0.0);
  if (layout_->order < 1) fail(ErrorKind::Unsupported, "cannot differentiate an order-0 jet");
  const JetLayout& low = jet_layout(layout_->dim, layout_->order - 1);
  Jet out;
  out.layout_ = &low;
  for (int i = 0; i < low.size; ++i) {
    const int up = layout_->raise[static_cast<std::size_t>(i) * kMaxJetDim + axis];
    out.c_[i] = (low.exponents[i][axis] + 1) * c_[up];
  }
  return out;
}

Jet Jet::truncate(int order) const {
  if (!layout_ || order >= layout_->order) return *this;
  Jet out;
  out.layout_ = &jet_layout(layout_->dim, order);
  for (int i = 0; i < out.layout_->size; ++i) out.c_[i] = c_[i];
  return out;
}

Jet Jet::operator-() const {
  Jet out(*this);
  for (int i = 0; i < size(); ++i) out.c_[i] = -out.c_[i];
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.is_constant()) {
    c_[0] += o.c_[0];
    return *this;
  }
  if (is_constant()) {
    const double v = c_[0];
    *this = o;
    c_[0] += v;
    return *this;
  }
  const JetLayout& l = combined_layout(*this, o);
  layout_ = &l;
  for (int i = 0; i < l.size; ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) { return *this += -o; }

Jet operator*(const Jet& a, const Jet& b) {
  if (a.is_constant() || b.is_constant()) {
    const Jet& j = a.is_constant() ? b : a;
    const double s = a.is_constant() ? a.c_[0] : b.c_[0];
    Jet out(j);
    for (int i = 0; i < out.size(); ++i) out.c_[i] *= s;
    return out;
  }
  const JetLayout& l = combined_layout(a, b);
  Jet out;
  out.layout_ = &l;
  for (int i = 0; i < l.size; ++i) out.c_[i] = 0.0;
  for (const auto& p : l.products) out.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
  return out;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet operator/(const Jet& a, const Jet& b) {
  if (b.is_constant()) return a * Jet(1.0 / b.value());
  return a * reciprocal(b);
}

Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet Jet::compose(std::span<const double> taylor) const {
  if (!layout_) {
    return Jet(taylor[0]);
  }
  Jet tail(*this);
  tail.c_[0] = 0.0;
  const int k = std::min<int>(layout_->order, static_cast<int>(taylor.size()) - 1);
  Jet out = Jet::constant(layout_->dim, layout_->order, taylor[k]);
  for (int m = k - 1; m >= 0; --m) {
    out = out * tail;
    out.c_[0] += taylor[m];
  }
  return out;
}

namespace {

std::array<double, kMaxJetOrder + 1> power_series(double a0, double p) {
  // d^m/da^m a^p / m!
  std::array<double, kMaxJetOrder + 1> t{};
  double coef = 1.0;
  for (int m = 0; m <= kMaxJetOrder; ++m) {
    t[m] = coef * std::pow(a0, p - m);
    coef *= (p - m) / (m + 1);
  }
  return t;
}

}  // namespace

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  const std::array<double, 5> t{e, e, e / 2.0, e / 6.0, e / 24.0};
  return a.compose(t);
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) fail(ErrorKind::InvalidArgument, "log of a non-positive jet");
  const std::array<double, 5> t{std::log(x), 1.0 / x, -1.0 / (2.0 * x * x), 1.0 / (3.0 * x * x * x),
                                -1.0 / (4.0 * x * x * x * x)};
  return a.compose(t);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const std::array<double, 5> t{s, c, -s / 2.0, -c / 6.0, s / 24.0};
  return a.compose(t);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const std::array<double, 5> t{c, -s, -c / 2.0, s / 6.0, c / 24.0};
  return a.compose(t);
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) fail(ErrorKind::InvalidArgument, "sqrt of a non-positive jet");
  return a.compose(power_series(a.value(), 0.5));
}

Jet pow(const Jet& a, double p) {
  if (!(a.value() > 0.0)) fail(ErrorKind::InvalidArgument, "pow of a non-positive jet");
  return a.compose(power_series(a.value(), p));
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) fail(ErrorKind::InvalidArgument, "reciprocal of a zero jet");
  const double r = 1.0 / x;
  const std::array<double, 5> t{r, -r * r, r * r * r, -r * r * r * r, r * r * r * r * r};
  return a.compose(t);
}

std::vector<Jet> coordinate_jets(std::span<const double> point, int order) {
  const int dim = static_cast<int>(point.size());
  std::vector<Jet> x;
  x.reserve(point.size());
  for (int a = 0; a < dim; ++a) x.push_back(Jet::variable(dim, order, a, point[a]));
  return x;
}

}  // namespace starlab
