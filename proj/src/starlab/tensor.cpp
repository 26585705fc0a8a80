#include "starlab/tensor.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "starlab/errors.hpp"

namespace starlab::tensor {

namespace {

using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

Eigen::MatrixXd as_matrix(const PointMetric& g) {
  const int n = g.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
  return m;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::ShapeMismatch, what);
}

}  // namespace

PointMetric::PointMetric(int dim, std::span<const double> components) : dim_(dim) {
  if (dim < 1) fail(ErrorKind::InvalidArgument, "metric dimension must be positive");
  require(components.size() == static_cast<std::size_t>(dim * dim),
          "metric needs " + std::to_string(dim * dim) + " components");
  g_.resize(components.size());
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double a = components[i * dim + j];
      const double b = components[j * dim + i];
      g_[i * dim + j] = 0.5 * (a + b);
      asymmetry_ = std::max(asymmetry_, std::abs(a - b));
    }
  }
}

PointMetric PointMetric::identity(int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim * dim), 0.0);
  for (int i = 0; i < dim; ++i) c[i * dim + i] = 1.0;
  return PointMetric(dim, c);
}

double PointMetric::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(as_matrix(*this), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PointTensor::PointTensor(int dim, std::vector<Variance> slots)
    : dim_(dim), slots_(std::move(slots)) {
  if (slots_.size() > 3) fail(ErrorKind::Unsupported, "tensor rank above 3");
  std::size_t n = 1;
  for (std::size_t s = 0; s < slots_.size(); ++s) n *= static_cast<std::size_t>(dim_);
  data_.assign(n, 0.0);
}

PointTensor::PointTensor(int dim, std::vector<Variance> slots, std::vector<double> data)
    : PointTensor(dim, std::move(slots)) {
  require(data.size() == data_.size(), "tensor component count does not match rank and dimension");
  data_ = std::move(data);
}

PointTensor PointTensor::covariant2(int dim, std::span<const double> data) {
  return PointTensor(dim, {Variance::Covariant, Variance::Covariant},
                     std::vector<double>(data.begin(), data.end()));
}

std::size_t PointTensor::flat(std::span<const int> idx) const {
  require(idx.size() == slots_.size(), "index count does not match tensor rank");
  std::size_t f = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_) fail(ErrorKind::InvalidArgument, "tensor index out of range");
    f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return f;
}

double& PointTensor::at(std::span<const int> idx) { return data_[flat(idx)]; }
double PointTensor::at(std::span<const int> idx) const { return data_[flat(idx)]; }

InverseDet metric_inverse_det(const PointMetric& g, double pd_threshold) {
  const int n = g.dim();
  const double lo = g.min_eigenvalue();
  if (!(lo > pd_threshold))
    fail(ErrorKind::NonPositiveDefinite,
         "smallest metric eigenvalue " + std::to_string(lo) + " is not above " + std::to_string(pd_threshold));

  // Extended precision keeps G * G^-1 close to the identity for ill-conditioned metrics.
  MatrixL m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
  Eigen::LLT<MatrixL> llt(m);
  MatrixL inv = llt.solve(MatrixL::Identity(n, n));
  inv = 0.5L * (inv + inv.transpose());
  long double det = 1.0L;
  const MatrixL& l = llt.matrixLLT();
  for (int i = 0; i < n; ++i) det *= l(i, i) * l(i, i);

  PointTensor out(n, {Variance::Contravariant, Variance::Contravariant});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = static_cast<double>(inv(i, j));
  return {std::move(out), static_cast<double>(det)};
}

double contract_tensors(const PointTensor& a, const PointTensor& b, const PointMetric& g) {
  const int n = g.dim();
  require(a.dim() == n && b.dim() == n && a.rank() == 2 && b.rank() == 2,
          "contract_tensors needs two rank-2 tensors of the metric dimension");
  const auto inv = metric_inverse_det(g).inverse;
  // A^{kl} = g^ik g^jl A_ij, then sum A^{kl} B_kl.
  std::vector<double> tmp(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += a(i, j) * inv(j, l);
      tmp[i * n + l] = s;
    }
  double total = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += inv(k, i) * tmp[i * n + l];
      total += s * b(k, l);
    }
  return total;
}

double metric_trace(const PointTensor& a, const PointMetric& g) {
  const int n = g.dim();
  require(a.dim() == n && a.rank() == 2, "metric_trace needs a rank-2 tensor of the metric dimension");
  const auto inv = metric_inverse_det(g).inverse;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += inv(i, j) * a(i, j);
  return s;
}

PointTensor raise_lower(const PointTensor& a, int slot, Direction direction, const PointMetric& g) {
  const int n = g.dim();
  require(a.dim() == n, "tensor and metric dimensions differ");
  if (slot < 0 || slot >= a.rank()) fail(ErrorKind::InvalidArgument, "invalid slot " + std::to_string(slot));
  const Variance want = direction == Direction::Raise ? Variance::Contravariant : Variance::Covariant;
  if (a.slots()[slot] == want)
    fail(ErrorKind::InvalidArgument, "slot " + std::to_string(slot) + " already has the requested variance");

  std::vector<double> m(static_cast<std::size_t>(n * n));
  if (direction == Direction::Raise) {
    const auto inv = metric_inverse_det(g).inverse;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[i * n + j] = inv(i, j);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m[i * n + j] = g(i, j);
  }

  auto slots = a.slots();
  slots[slot] = want;
  PointTensor out(n, slots);
  const int rank = a.rank();
  std::vector<int> idx(static_cast<std::size_t>(rank), 0);
  const std::size_t total = a.data().size();
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    for (int s = rank - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % n);
      rem /= n;
    }
    const int target = idx[slot];
    double s = 0.0;
    auto src = idx;
    for (int k = 0; k < n; ++k) {
      src[slot] = k;
      s += m[target * n + k] * a.at(src);
    }
    out.at(idx) = s;
  }
  return out;
}

}  // namespace starlab::tensor
