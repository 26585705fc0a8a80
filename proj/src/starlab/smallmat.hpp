#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace starlab::smallmat {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 5>;

// Row-major n x n input; returns false when not positive definite.
inline bool inverse_det(int n, const double* g, double* inv, double& det) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g[i * n + j];
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const Mat& l = llt.matrixLLT();
  det = 1.0;
  for (int i = 0; i < n; ++i) det *= l(i, i) * l(i, i);
  Mat id = Mat::Identity(n, n);
  Mat x = llt.solve(id);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i * n + j] = 0.5 * (x(i, j) + x(j, i));
  return true;
}

inline double min_eigenvalue(int n, const double* g) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g[i * n + j];
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// max |lambda| of g^{-1} a for symmetric a, via the Cholesky-whitened matrix.
inline double operator_norm(int n, const double* g, const double* a) {
  Mat gm(n, n), am(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      gm(i, j) = g[i * n + j];
      am(i, j) = 0.5 * (a[i * n + j] + a[j * n + i]);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(am, gm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace starlab::smallmat
