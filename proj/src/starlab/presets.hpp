#pragma once

#include <vector>

#include "starlab/fields.hpp"

namespace starlab::presets {

// Metrics. The warped family is diag(1, ..., 1, e^{2u(x0)}), u = amp sin(wave x0).
AnalyticField flat_metric(int n);
AnalyticField warped_metric(int n, double amplitude, int wave = 1);
// delta_ij plus seeded trig perturbations of size eps per term; SPD for eps < 1/(2n).
AnalyticField random_trig_metric(int n, unsigned seed, double eps = 0.1);

// (1,1) tensors, phi[a*n + b] = phi^a_b.
AnalyticField zero_tensor(int n);
AnalyticField rotation_phi(int n);  // pi/2 rotation of the (x0, x1) plane
// g-orthogonal pi/2 rotation of the (x0, x_{n-1}) plane of the warped metric.
AnalyticField compatible_rotation_phi(int n, double amplitude, int wave = 1);
AnalyticField random_phi(int n, unsigned seed);

// Scalars.
AnalyticField constant_scalar(int n, double c);
AnalyticField cos_scalar(int n, double a);            // a cos x0
AnalyticField cos_plus_t_sin_scalar(int n, double a);  // a cos x0 + t sin x1, exact d/dt
AnalyticField random_trig_scalar(int n, unsigned seed, int terms = 4, double amp = 0.5);

// Vector fields.
AnalyticField zero_vector(int n);
AnalyticField constant_vector(std::vector<double> components);
AnalyticField linear_vector(int n, double c);  // c x
// Time-dependent smooth field used for the general self-similar check.
AnalyticField wobble_vector(int n, double amp);

}  // namespace starlab::presets
