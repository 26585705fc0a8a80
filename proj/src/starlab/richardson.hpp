#pragma once

#include <functional>
#include <vector>

namespace starlab {

struct FdEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
};

inline constexpr int kDefaultRichardsonLevels = 3;

// 1e-3 * max(1, |t0|)
double default_fd_step(double t0);

// Central differences at h0, h0/2, ..., h0/2^(levels-1), combined by
// Richardson extrapolation (even-power error expansion). `levels` counts step
// sizes, so levels = 2 is fourth order and levels = 3 is sixth order. The
// error estimate is the gap between the last two tableau diagonals.
FdEstimate richardson_time_derivative(const std::function<double(double)>& sampler, double t0, double h0,
                                      int levels = kDefaultRichardsonLevels);

// Same tableau applied componentwise to vector-valued samplers.
std::vector<double> richardson_time_derivative(const std::function<std::vector<double>(double)>& sampler,
                                               double t0, double h0, int levels = kDefaultRichardsonLevels,
                                               std::vector<double>* error_estimate = nullptr);

// Offsets (in units of h0) at which the samplers above are evaluated.
std::vector<double> richardson_offsets(int levels);

}  // namespace starlab
