#pragma once

// Pointwise Levi-Civita geometry, written once for T = double (grid samples)
// and T = Jet (analytic fields, where derivatives of derived quantities come
// from jet differentiation).
//
// Conventions:
//   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
//   R(d_k, d_l) d_j = R^i_jkl d_i,  R_ijkl = g_im R^m_jkl
//   R(X,Y,Z,W) = g(R(X,Y)Z, W) = X^k Y^l Z^j W^i R_ijkl
//   Ric_jl = R^i_jil  (round spheres have positive scalar curvature)
//   phi[a*n + b] = phi^a_b, i.e. (phi X)^a = phi^a_b X^b

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "starlab/errors.hpp"
#include "starlab/fields.hpp"
#include "starlab/jet.hpp"

namespace starlab {

template <class T>
struct MetricJet {
  int n = 0;
  std::vector<T> g;    // [i][j]
  std::vector<T> dg;   // [k][i][j] = d_k g_ij
  std::vector<T> ddg;  // [k][l][i][j] = d_k d_l g_ij

  void resize(int dim) {
    n = dim;
    const std::size_t m = static_cast<std::size_t>(dim);
    g.resize(m * m);
    dg.resize(m * m * m);
    ddg.resize(m * m * m * m);
  }
};

template <class T>
struct GeometryJet {
  int n = 0;
  T det;
  std::vector<T> g, ginv;       // [i][j]
  std::vector<T> christoffel;   // [k][i][j] = Gamma^k_ij
  std::vector<T> dchristoffel;  // [l][k][i][j] = d_l Gamma^k_ij
  std::vector<T> riemann_up;    // [i][j][k][l] = R^i_jkl
  std::vector<T> riemann;       // [i][j][k][l] = R_ijkl
  std::vector<T> ricci;         // [j][l]
  T scalar;                     // g^ik g^jl R_ijkl

  // Scratch reused between calls.
  std::vector<T> first_kind, dfirst_kind, dginv, work;
};

template <class T>
struct StarJet {
  std::vector<T> s_star;          // S*_pq = 1/2 tr(Z -> R(d_p, phi d_q) phi Z)
  std::vector<T> ric_star_frame;  // Ric*_pq = sum_a R(d_p, e_a, phi e_a, phi d_q)
  std::vector<T> frame;           // [a][c] = e_a^c, Gram-Schmidt on d_0, d_1, ...
  T r_star;                       // sum_a Ric*(e_a, e_a)
  T trace_s_star;                 // g^pq S*_pq
  std::vector<T> work;
};

template <class T>
struct ScalarJet {
  std::vector<T> grad_up;  // g^ij d_j f
  T norm2;                 // |grad f|^2
  std::vector<T> hess;     // [i][j]
  T laplacian;
};

namespace detail {

inline std::size_t i2(int n, int a, int b) { return static_cast<std::size_t>(a * n + b); }
inline std::size_t i3(int n, int a, int b, int c) { return static_cast<std::size_t>((a * n + b) * n + c); }
inline std::size_t i4(int n, int a, int b, int c, int d) {
  return static_cast<std::size_t>(((a * n + b) * n + c) * n + d);
}

inline double abs_value(double x) { return std::abs(x); }
inline double abs_value(const Jet& x) { return std::abs(x.value()); }

// Gauss-Jordan with partial pivoting on values; returns det.
template <class T>
T invert(int n, const std::vector<T>& a, std::vector<T>& inv, std::vector<T>& work) {
  work = a;
  inv.assign(static_cast<std::size_t>(n * n), T(0.0));
  for (int i = 0; i < n; ++i) inv[i2(n, i, i)] = T(1.0);
  T det(1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (abs_value(work[i2(n, r, col)]) > abs_value(work[i2(n, pivot, col)])) pivot = r;
    if (!(abs_value(work[i2(n, pivot, col)]) > 0.0))
      fail(ErrorKind::NonPositiveDefinite, "singular metric");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(work[i2(n, col, c)], work[i2(n, pivot, c)]);
        std::swap(inv[i2(n, col, c)], inv[i2(n, pivot, c)]);
      }
      det = -det;
    }
    const T p = work[i2(n, col, col)];
    det = det * p;
    const T rp = T(1.0) / p;
    for (int c = 0; c < n; ++c) {
      work[i2(n, col, c)] = work[i2(n, col, c)] * rp;
      inv[i2(n, col, c)] = inv[i2(n, col, c)] * rp;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = work[i2(n, r, col)];
      if (abs_value(f) == 0.0 && !std::is_same_v<T, Jet>) continue;
      for (int c = 0; c < n; ++c) {
        work[i2(n, r, c)] -= f * work[i2(n, col, c)];
        inv[i2(n, r, c)] -= f * inv[i2(n, col, c)];
      }
    }
  }
  return det;
}

// Cholesky on values: throws NonPositiveDefinite when a pivot is not positive.
template <class T>
void require_positive_definite(int n, const std::vector<T>& g) {
  double l[25] = {};
  for (int j = 0; j < n; ++j) {
    double d = value_of(g[i2(n, j, j)]);
    for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0)) fail(ErrorKind::NonPositiveDefinite, "metric is not positive definite");
    l[j * n + j] = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = value_of(g[i2(n, i, j)]);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
}

}  // namespace detail

template <class T>
void compute_geometry(const MetricJet<T>& in, GeometryJet<T>& out) {
  using detail::i2;
  using detail::i3;
  using detail::i4;
  const int n = in.n;
  const std::size_t n2 = static_cast<std::size_t>(n * n);
  out.n = n;
  detail::require_positive_definite(n, in.g);
  out.g = in.g;
  out.det = detail::invert(n, in.g, out.ginv, out.work);

  // Gamma_{m,ij} = 1/2 (d_i g_jm + d_j g_im - d_m g_ij)
  out.first_kind.resize(n2 * n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.first_kind[i3(n, m, i, j)] =
            T(0.5) * (in.dg[i3(n, i, j, m)] + in.dg[i3(n, j, i, m)] - in.dg[i3(n, m, i, j)]);

  out.christoffel.resize(n2 * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        T s(0.0);
        for (int m = 0; m < n; ++m) s += out.ginv[i2(n, k, m)] * out.first_kind[i3(n, m, i, j)];
        out.christoffel[i3(n, k, i, j)] = s;
      }

  // d_l g^km = -g^ka d_l g_ab g^bm
  out.dginv.resize(n2 * n);
  out.work.resize(n2);
  for (int l = 0; l < n; ++l) {
    for (int a = 0; a < n; ++a)
      for (int m = 0; m < n; ++m) {
        T s(0.0);
        for (int b = 0; b < n; ++b) s += in.dg[i3(n, l, a, b)] * out.ginv[i2(n, b, m)];
        out.work[i2(n, a, m)] = s;
      }
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        T s(0.0);
        for (int a = 0; a < n; ++a) s += out.ginv[i2(n, k, a)] * out.work[i2(n, a, m)];
        out.dginv[i3(n, l, k, m)] = -s;
      }
  }

  // d_l Gamma_{m,ij}, then d_l Gamma^k_ij = d_l g^km Gamma_{m,ij} + g^km d_l Gamma_{m,ij}
  out.dfirst_kind.resize(n2 * n2);
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const T v = T(0.5) * (in.ddg[i4(n, l, i, j, m)] + in.ddg[i4(n, l, j, i, m)] - in.ddg[i4(n, l, m, i, j)]);
          out.dfirst_kind[i4(n, l, m, i, j)] = v;
          out.dfirst_kind[i4(n, l, m, j, i)] = v;
        }
  out.dchristoffel.resize(n2 * n2);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          T s(0.0);
          for (int m = 0; m < n; ++m)
            s += out.dginv[i3(n, l, k, m)] * out.first_kind[i3(n, m, i, j)] +
                 out.ginv[i2(n, k, m)] * out.dfirst_kind[i4(n, l, m, i, j)];
          out.dchristoffel[i4(n, l, k, i, j)] = s;
          out.dchristoffel[i4(n, l, k, j, i)] = s;
        }

  // R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj
  out.riemann_up.resize(n2 * n2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        out.riemann_up[i4(n, i, j, k, k)] = T(0.0);
        for (int l = k + 1; l < n; ++l) {
          T s = out.dchristoffel[i4(n, k, i, l, j)] - out.dchristoffel[i4(n, l, i, k, j)];
          for (int m = 0; m < n; ++m)
            s += out.christoffel[i3(n, i, k, m)] * out.christoffel[i3(n, m, l, j)] -
                 out.christoffel[i3(n, i, l, m)] * out.christoffel[i3(n, m, k, j)];
          out.riemann_up[i4(n, i, j, k, l)] = s;
          out.riemann_up[i4(n, i, j, l, k)] = -s;
        }
      }

  out.riemann.resize(n2 * n2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          T s(0.0);
          for (int m = 0; m < n; ++m) s += in.g[i2(n, i, m)] * out.riemann_up[i4(n, m, j, k, l)];
          out.riemann[i4(n, i, j, k, l)] = s;
        }

  out.ricci.resize(n2);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      T s(0.0);
      for (int i = 0; i < n; ++i) s += out.riemann_up[i4(n, i, j, i, l)];
      out.ricci[i2(n, j, l)] = s;
    }

  // Scalar by full contraction of the lowered tensor (independent of ricci).
  T scalar(0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      T inner(0.0);
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) inner += out.ginv[i2(n, j, l)] * out.riemann[i4(n, i, j, k, l)];
      scalar += out.ginv[i2(n, i, k)] * inner;
    }
  out.scalar = scalar;
}

// With with_frame = false only the trace form and its metric trace are filled.
template <class T>
void compute_star(const GeometryJet<T>& geo, std::span<const T> phi, StarJet<T>& out, bool with_frame = true) {
  using detail::i2;
  using detail::i3;
  using detail::i4;
  const int n = geo.n;
  const std::size_t n2 = static_cast<std::size_t>(n * n);
  if (phi.size() != n2) fail(ErrorKind::ShapeMismatch, "phi needs n*n components");

  // Trace form, pure index contraction: S*_pq = 1/2 R^i_jpl phi^l_q phi^j_i.
  out.work.resize(n2);
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < n; ++l) {
      T s(0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += geo.riemann_up[i4(n, i, j, p, l)] * phi[i2(n, j, i)];
      out.work[i2(n, p, l)] = s;
    }
  out.s_star.resize(n2);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      T s(0.0);
      for (int l = 0; l < n; ++l) s += out.work[i2(n, p, l)] * phi[i2(n, l, q)];
      out.s_star[i2(n, p, q)] = T(0.5) * s;
    }

  T tr(0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) tr += geo.ginv[i2(n, p, q)] * out.s_star[i2(n, p, q)];
  out.trace_s_star = tr;
  if (!with_frame) return;

  // g-orthonormal frame by Gram-Schmidt on the coordinate basis.
  out.frame.assign(n2, T(0.0));
  for (int a = 0; a < n; ++a) {
    std::vector<T> v(static_cast<std::size_t>(n), T(0.0));
    v[a] = T(1.0);
    for (int b = 0; b < a; ++b) {
      T proj(0.0);
      for (int c = 0; c < n; ++c) proj += geo.g[i2(n, a, c)] * out.frame[i2(n, b, c)];
      for (int c = 0; c < n; ++c) v[c] -= proj * out.frame[i2(n, b, c)];
    }
    T norm2(0.0);
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d) norm2 += v[c] * geo.g[i2(n, c, d)] * v[d];
    if (!(value_of(norm2) > 0.0)) fail(ErrorKind::NonPositiveDefinite, "Gram-Schmidt breakdown");
    using std::sqrt;
    const T inv_norm = T(1.0) / sqrt(norm2);
    for (int c = 0; c < n; ++c) out.frame[i2(n, a, c)] = v[c] * inv_norm;
  }

  // P^{lj} = sum_a e_a^l (phi e_a)^j
  std::vector<T> pmat(n2, T(0.0));
  for (int a = 0; a < n; ++a) {
    for (int j = 0; j < n; ++j) {
      T phie(0.0);
      for (int m = 0; m < n; ++m) phie += phi[i2(n, j, m)] * out.frame[i2(n, a, m)];
      for (int l = 0; l < n; ++l) pmat[i2(n, l, j)] += out.frame[i2(n, a, l)] * phie;
    }
  }
  // Ric*_pq = sum R_ijpl P^{lj} phi^i_q
  std::vector<T> cmat(n2, T(0.0));
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < n; ++p) {
      T s(0.0);
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) s += geo.riemann[i4(n, i, j, p, l)] * pmat[i2(n, l, j)];
      cmat[i2(n, i, p)] = s;
    }
  out.ric_star_frame.resize(n2);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      T s(0.0);
      for (int i = 0; i < n; ++i) s += cmat[i2(n, i, p)] * phi[i2(n, i, q)];
      out.ric_star_frame[i2(n, p, q)] = s;
    }

  T rstar(0.0);
  for (int a = 0; a < n; ++a)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        rstar += out.frame[i2(n, a, p)] * out.frame[i2(n, a, q)] * out.ric_star_frame[i2(n, p, q)];
  out.r_star = rstar;
}

// df: [i] = d_i f; ddf: [i][j] = d_i d_j f.
template <class T>
void compute_scalar(const GeometryJet<T>& geo, std::span<const T> df, std::span<const T> ddf, ScalarJet<T>& out) {
  using detail::i2;
  using detail::i3;
  const int n = geo.n;
  out.grad_up.assign(static_cast<std::size_t>(n), T(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.grad_up[i] += geo.ginv[i2(n, i, j)] * df[j];
  T norm2(0.0);
  for (int i = 0; i < n; ++i) norm2 += out.grad_up[i] * df[i];
  out.norm2 = norm2;
  out.hess.resize(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T s = ddf[i2(n, i, j)];
      for (int k = 0; k < n; ++k) s -= geo.christoffel[i3(n, k, i, j)] * df[k];
      out.hess[i2(n, i, j)] = s;
    }
  T lap(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lap += geo.ginv[i2(n, i, j)] * out.hess[i2(n, i, j)];
  out.laplacian = lap;
}

// Delta w = g^ij (d_ij w - Gamma^k_ij d_k w).
template <class T>
T laplacian(const GeometryJet<T>& geo, std::span<const T> dw, std::span<const T> ddw) {
  using detail::i2;
  using detail::i3;
  const int n = geo.n;
  T s(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T h = ddw[i2(n, i, j)];
      for (int k = 0; k < n; ++k) h -= geo.christoffel[i3(n, k, i, j)] * dw[k];
      s += geo.ginv[i2(n, i, j)] * h;
    }
  return s;
}

// (nabla_k T)_ij = d_k T_ij - Gamma^m_ki T_mj - Gamma^m_kj T_im; out[k][i][j].
template <class T>
std::vector<T> covariant_derivative_02(const GeometryJet<T>& geo, std::span<const T> t, std::span<const T> dt) {
  using detail::i2;
  using detail::i3;
  const int n = geo.n;
  std::vector<T> out(static_cast<std::size_t>(n * n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        T s = dt[i3(n, k, i, j)];
        for (int m = 0; m < n; ++m)
          s -= geo.christoffel[i3(n, m, k, i)] * t[i2(n, m, j)] + geo.christoffel[i3(n, m, k, j)] * t[i2(n, i, m)];
        out[i3(n, k, i, j)] = s;
      }
  return out;
}

// (nabla_k w)_i = d_k w_i - Gamma^m_ki w_m; out[k][i].
template <class T>
std::vector<T> covariant_derivative_01(const GeometryJet<T>& geo, std::span<const T> w, std::span<const T> dw) {
  using detail::i2;
  using detail::i3;
  const int n = geo.n;
  std::vector<T> out(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      T s = dw[i2(n, k, i)];
      for (int m = 0; m < n; ++m) s -= geo.christoffel[i3(n, m, k, i)] * w[m];
      out[i2(n, k, i)] = s;
    }
  return out;
}

// (L_V g)_ij = V^k d_k g_ij + g_kj d_i V^k + g_ik d_j V^k; dv[i][k] = d_i V^k.
template <class T>
std::vector<T> lie_derivative_coordinates(int n, std::span<const T> g, std::span<const T> dg, std::span<const T> v,
                                          std::span<const T> dv) {
  using detail::i2;
  using detail::i3;
  std::vector<T> out(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T s(0.0);
      for (int k = 0; k < n; ++k)
        s += v[k] * dg[i3(n, k, i, j)] + g[i2(n, k, j)] * dv[i2(n, i, k)] + g[i2(n, i, k)] * dv[i2(n, j, k)];
      out[i2(n, i, j)] = s;
    }
  return out;
}

// Max |A_pq - A_qp| over values.
template <class T>
double asymmetry(int n, std::span<const T> a) {
  double m = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      m = std::max(m, std::abs(value_of(a[p * n + q]) - value_of(a[q * n + p])));
  return m;
}

// Identity residuals at one point (values only).
struct IdentityResiduals {
  double antisym_first_pair = 0.0;   // R_ijkl + R_jikl
  double antisym_second_pair = 0.0;  // R_ijkl + R_ijlk
  double pair_symmetry = 0.0;        // R_ijkl - R_klij
  double first_bianchi = 0.0;        // R_ijkl + R_iklj + R_iljk
  double ricci_trace = 0.0;          // g^jl Ric_jl - scalar
  double metric_compat = 0.0;        // (nabla_k g)_ij
  double christoffel_symmetry = 0.0; // Gamma^k_ij - Gamma^k_ji
  double riemann_scale = 0.0;        // max |R_ijkl|
  double scalar_scale = 0.0;         // max(|scalar|, |tr Ric|)
  double metric_scale = 0.0;         // max |g_ij| * max |Gamma|

  void merge(const IdentityResiduals& o);
};

template <class T>
IdentityResiduals identity_residuals(const GeometryJet<T>& geo) {
  using detail::i2;
  using detail::i3;
  using detail::i4;
  const int n = geo.n;
  IdentityResiduals r;
  auto v = [](const T& x) { return value_of(x); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double a = v(geo.riemann[i4(n, i, j, k, l)]);
          r.riemann_scale = std::max(r.riemann_scale, std::abs(a));
          r.antisym_first_pair = std::max(r.antisym_first_pair, std::abs(a + v(geo.riemann[i4(n, j, i, k, l)])));
          r.antisym_second_pair = std::max(r.antisym_second_pair, std::abs(a + v(geo.riemann[i4(n, i, j, l, k)])));
          r.pair_symmetry = std::max(r.pair_symmetry, std::abs(a - v(geo.riemann[i4(n, k, l, i, j)])));
          r.first_bianchi = std::max(
              r.first_bianchi,
              std::abs(a + v(geo.riemann[i4(n, i, k, l, j)]) + v(geo.riemann[i4(n, i, l, j, k)])));
        }
  double tr = 0.0;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) tr += v(geo.ginv[i2(n, j, l)]) * v(geo.ricci[i2(n, j, l)]);
  r.ricci_trace = std::abs(tr - v(geo.scalar));
  r.scalar_scale = std::max(std::abs(tr), std::abs(v(geo.scalar)));
  return r;
}

// d_k g_ij - Gamma^m_ki g_mj - Gamma^m_kj g_im, maximised over indices.
template <class T>
void metric_compatibility(const GeometryJet<T>& geo, std::span<const T> dg, IdentityResiduals& r) {
  using detail::i2;
  using detail::i3;
  const int n = geo.n;
  double gmax = 0.0, gam = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = value_of(dg[i3(n, k, i, j)]);
        for (int m = 0; m < n; ++m)
          s -= value_of(geo.christoffel[i3(n, m, k, i)]) * value_of(geo.g[i2(n, m, j)]) +
               value_of(geo.christoffel[i3(n, m, k, j)]) * value_of(geo.g[i2(n, i, m)]);
        r.metric_compat = std::max(r.metric_compat, std::abs(s));
        r.christoffel_symmetry = std::max(
            r.christoffel_symmetry,
            std::abs(value_of(geo.christoffel[i3(n, k, i, j)]) - value_of(geo.christoffel[i3(n, k, j, i)])));
        gam = std::max(gam, std::abs(value_of(geo.christoffel[i3(n, k, i, j)])));
        gmax = std::max(gmax, std::abs(value_of(geo.g[i2(n, i, j)])));
      }
  double dgmax = 0.0;
  for (const auto& x : dg) dgmax = std::max(dgmax, std::abs(value_of(x)));
  r.metric_scale = std::max(r.metric_scale, std::max(dgmax, gmax * gam));
}

// ---- Analytic-backend helpers -------------------------------------------

// Metric jet of total order `order` (>= 2) at x; dg and ddg are one and two
// orders lower.
MetricJet<Jet> metric_jet(const AnalyticField& metric, std::span<const double> x, double t, int order);

// Value-level copy of a jet-valued quantity.
MetricJet<double> metric_values(const MetricJet<Jet>& m);
GeometryJet<double> geometry_values(const GeometryJet<Jet>& g);

// Everything derived at one point from analytic (g, phi) at jet order `order`.
struct AnalyticPoint {
  MetricJet<Jet> metric;
  GeometryJet<Jet> geometry;
  std::vector<Jet> phi;
  StarJet<Jet> star;
};
AnalyticPoint analytic_point(const AnalyticField& metric, const AnalyticField* phi, std::span<const double> x,
                             double t, int order);

// Covariant derivative of S* at a point; out[k][i][j] = (nabla_k S*)_ij.
// Needs metric order >= 3.
std::vector<double> nabla_s_star(const AnalyticPoint& point);

// (L_V g)_ij at x by the coordinate formula; `covariant` selects the
// nabla_i V_j + nabla_j V_i route instead.
std::vector<double> lie_derivative_metric(const AnalyticField& v, const AnalyticField& metric,
                                          std::span<const double> x, double t = 0.0, bool covariant = false);

struct BochnerTerms {
  double half_laplacian_norm2 = 0.0;  // 1/2 Delta |grad f|^2
  double hessian_norm2 = 0.0;         // |Hess f|^2
  double grad_laplacian_dot = 0.0;    // g(grad Delta f, grad f)
  double ricci_term = 0.0;            // Ric(grad f, grad f)
  double residual = 0.0;
  double scale() const;
};
BochnerTerms bochner_residual(const AnalyticField& f, const AnalyticField& metric, std::span<const double> x,
                              double t = 0.0);

}  // namespace starlab
