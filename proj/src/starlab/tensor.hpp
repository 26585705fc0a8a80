#pragma once

#include <span>
#include <vector>

namespace starlab::tensor {

inline constexpr double kDefaultPdThreshold = 1e-12;

// Symmetric positive-definite n x n metric at one point. Inputs are
// symmetrized on construction; the discarded asymmetry is kept for reporting.
class PointMetric {
 public:
  PointMetric(int dim, std::span<const double> components);
  static PointMetric identity(int dim);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return g_[i * dim_ + j]; }
  std::span<const double> components() const { return g_; }
  double asymmetry() const { return asymmetry_; }

  double min_eigenvalue() const;

 private:
  int dim_;
  std::vector<double> g_;
  double asymmetry_ = 0.0;
};

enum class Variance { Covariant, Contravariant };
enum class Direction { Raise, Lower };

// Dense tensor at one point, rank <= 3, row-major over slots.
class PointTensor {
 public:
  PointTensor(int dim, std::vector<Variance> slots);
  PointTensor(int dim, std::vector<Variance> slots, std::vector<double> data);
  static PointTensor covariant2(int dim, std::span<const double> data);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Variance>& slots() const { return slots_; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double& at(std::span<const int> idx);
  double at(std::span<const int> idx) const;
  double operator()(int i, int j) const { return data_[i * dim_ + j]; }
  double& operator()(int i, int j) { return data_[i * dim_ + j]; }

 private:
  std::size_t flat(std::span<const int> idx) const;

  int dim_;
  std::vector<Variance> slots_;
  std::vector<double> data_;
};

struct InverseDet {
  PointTensor inverse;  // contravariant (2,0)
  double det;
};

// Throws NonPositiveDefinite if the smallest eigenvalue is <= pd_threshold.
InverseDet metric_inverse_det(const PointMetric& g, double pd_threshold = kDefaultPdThreshold);

// <A,B> = A_ij B_kl g^ik g^jl for covariant rank-2 A, B.
double contract_tensors(const PointTensor& a, const PointTensor& b, const PointMetric& g);

// tr_g(A) = g^ij A_ij.
double metric_trace(const PointTensor& a, const PointMetric& g);

PointTensor raise_lower(const PointTensor& a, int slot, Direction direction, const PointMetric& g);

}  // namespace starlab::tensor
