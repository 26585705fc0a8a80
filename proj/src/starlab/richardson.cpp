#include "starlab/richardson.hpp"

#include <cmath>

#include "starlab/errors.hpp"

namespace starlab {

double default_fd_step(double t0) { return 1e-3 * std::max(1.0, std::abs(t0)); }

std::vector<double> richardson_offsets(int levels) {
  std::vector<double> out;
  double h = 1.0;
  for (int k = 0; k < levels; ++k, h *= 0.5) {
    out.push_back(-h);
    out.push_back(h);
  }
  return out;
}

std::vector<double> richardson_time_derivative(const std::function<std::vector<double>(double)>& sampler,
                                               double t0, double h0, int levels,
                                               std::vector<double>* error_estimate) {
  if (levels < 1) fail(ErrorKind::InvalidArgument, "Richardson needs at least one level");
  if (!(h0 > 0.0)) fail(ErrorKind::InvalidArgument, "Richardson step must be positive");

  // table[k][j]: step h0/2^k, j extrapolations.
  std::vector<std::vector<std::vector<double>>> table(static_cast<std::size_t>(levels));
  double h = h0;
  for (int k = 0; k < levels; ++k, h *= 0.5) {
    const auto plus = sampler(t0 + h);
    const auto minus = sampler(t0 - h);
    if (plus.size() != minus.size()) fail(ErrorKind::ShapeMismatch, "sampler returned inconsistent sizes");
    std::vector<double> d(plus.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2.0 * h);
    table[k].push_back(std::move(d));
    double factor = 4.0;
    for (int j = 1; j <= k; ++j, factor *= 4.0) {
      const auto& fine = table[k][j - 1];
      const auto& coarse = table[k - 1][j - 1];
      std::vector<double> e(fine.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = fine[i] + (fine[i] - coarse[i]) / (factor - 1.0);
      table[k].push_back(std::move(e));
    }
  }
  const auto& best = table[levels - 1][levels - 1];
  if (error_estimate != nullptr) {
    error_estimate->assign(best.size(), 0.0);
    if (levels >= 2) {
      const auto& prev = table[levels - 1][levels - 2];
      for (std::size_t i = 0; i < best.size(); ++i) (*error_estimate)[i] = std::abs(best[i] - prev[i]);
    }
  }
  return best;
}

FdEstimate richardson_time_derivative(const std::function<double(double)>& sampler, double t0, double h0,
                                      int levels) {
  std::vector<double> err;
  const auto v = richardson_time_derivative(
      [&](double t) { return std::vector<double>{sampler(t)}; }, t0, h0, levels, &err);
  return {v[0], err[0]};
}

}  // namespace starlab
