#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace starlab {

inline constexpr int kMaxJetDim = 5;
inline constexpr int kMaxJetOrder = 4;
// C(kMaxJetDim + kMaxJetOrder, kMaxJetDim)
inline constexpr int kMaxJetCoeffs = 126;

using Exponent = std::array<std::uint8_t, kMaxJetDim>;

// Monomial bookkeeping for truncated Taylor polynomials in `dim` variables up
// to total degree `order`. Monomials are graded by degree, so the layout of a
// lower order is a prefix of every higher-order layout.
struct JetLayout {
  struct Product {
    std::uint16_t lhs;
    std::uint16_t rhs;
    std::uint16_t out;
  };

  int dim = 0;
  int order = 0;
  int size = 0;
  std::vector<Exponent> exponents;
  std::vector<int> degree;
  std::vector<double> factorial;  // alpha! per monomial
  std::vector<Product> products;  // out += lhs * rhs with deg(lhs) + deg(rhs) <= order
  // raise[i * kMaxJetDim + a] = index of exponents[i] + e_a, or -1 past the order.
  std::vector<int> raise;

  int index_of(const Exponent& e) const;
};

const JetLayout& jet_layout(int dim, int order);

// Number of monomials of degree <= order in dim variables.
int jet_size(int dim, int order);

// Truncated multivariate Taylor polynomial about a base point: the value and
// all partial derivatives up to `order`. A default-constructed Jet is a plain
// constant that adapts to whatever jet it is combined with.
class Jet {
 public:
  Jet() : layout_(nullptr) { c_[0] = 0.0; }
  Jet(double v) : layout_(nullptr) { c_[0] = v; }  // NOLINT(google-explicit-constructor)

  Jet(const Jet& other) : layout_(other.layout_) { copy_from(other); }
  Jet& operator=(const Jet& other) {
    layout_ = other.layout_;
    copy_from(other);
    return *this;
  }

  static Jet constant(int dim, int order, double v);
  static Jet variable(int dim, int order, int axis, double v);

  bool is_constant() const { return layout_ == nullptr; }
  int dim() const;
  int order() const;
  int size() const { return layout_ ? layout_->size : 1; }
  const JetLayout* layout() const { return layout_; }

  double value() const { return c_[0]; }
  double coeff(int i) const { return c_[i]; }
  double& coeff(int i) { return c_[i]; }

  // Partial derivative d^alpha at the base point; alpha given per axis.
  double derivative(const Exponent& alpha) const;
  double partial(int a) const;
  double partial(int a, int b) const;

  // d/dx_axis as a jet one order lower.
  Jet differentiate(int axis) const;
  Jet truncate(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  // f(a) = sum_m f^(m)(a0)/m! (a - a0)^m, with taylor[m] = f^(m)(a0)/m!.
  Jet compose(std::span<const double> taylor) const;

 private:
  void copy_from(const Jet& other);

  const JetLayout* layout_;
  std::array<double, kMaxJetCoeffs> c_;
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet reciprocal(const Jet& a);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

// Coordinate jets x_a = point_a + delta_a.
std::vector<Jet> coordinate_jets(std::span<const double> point, int order);

}  // namespace starlab
