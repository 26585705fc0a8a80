#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lab/suites.hpp"
#include "starlab/errors.hpp"
#include "starlab/functionals.hpp"

namespace starlab::lab {

std::string run_flow(const Scenario& s, const std::string& csv_path, const std::string& dump_dir, bool force) {
  if (!s.is_torus()) fail(ErrorKind::Config, "flow needs a torus domain");
  const auto grid = scenario_grid(s);
  const GridTensor phi = sample_tensor(phi_field(s), grid);
  const GridMetric g0 = sample_metric(metric_field(s), grid);
  const GridField fT = sample_scalar(f_field(s), grid, s.flow.T);
  const Trajectory tr = integrate_coupled_system(g0, phi, fT, coupled_options(s));

  std::string csv = "t,tau,min_eig_g,int_u_dV,metric_change\n";
  char line[256];
  const std::size_t last = tr.steps();
  const auto stride = static_cast<std::size_t>(std::max(1, s.checks.csv_stride));
  for (std::size_t k = 0; k <= last; ++k) {
    if (k % stride != 0 && k != last) continue;
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", tr.t[k], tr.tau(tr.t[k]), tr.min_eig[k],
                  tr.mass[k], tr.g[k].max_abs_difference(tr.g[0]));
    csv += line;
  }
  if (!csv_path.empty()) write_output(csv_path, csv, force);

  if (!dump_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dump_dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + dump_dir + ": " + ec.message());
    const int n = tr.dim;
    const auto every = static_cast<std::size_t>(s.checks.dump_stride);
    for (std::size_t k = 0; k <= last; ++k) {
      const bool keep = every == 0 ? (k == 0 || k == last) : (k % every == 0 || k == last);
      if (!keep) continue;
      char stem[32];
      std::snprintf(stem, sizeof stem, "_s%06zu.txt", k);
      const std::string dir = dump_dir + "/";
      write_output(dir + "f" + stem, snapshot_text(tr.f[k], "f", tr.t[k]), force);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const std::string name = "g" + std::to_string(i) + std::to_string(j);
          write_output(dir + name + stem, snapshot_text(tr.g[k].comps[GridMetric::sym(i, j, n)], name, tr.t[k]),
                       force);
        }
    }
  }
  return csv;
}

double evaluate_functional(const Scenario& s, const std::string& which) {
  if (!s.is_torus()) fail(ErrorKind::Config, "functionals need a torus domain");
  const auto grid = scenario_grid(s);
  const GridMetric g = sample_metric(metric_field(s), grid);
  GridField f = sample_scalar(f_field(s), grid);
  if (which == "F") return f_functional(g, f, s.functional.f_integrand_constant);
  if (which == "omega") {
    const GridTensor phi = sample_tensor(phi_field(s), grid);
    const EntropyContext ctx{s.flow.tau0, s.functional.u_convention, s.functional.star_scalar};
    const double shift = u_v_fields(g, phi, f, ctx).shift;
    for (std::size_t p = 0; p < f.size(); ++p) f[p] += shift;
    return omega_entropy(g, phi, f, ctx);
  }
  fail(ErrorKind::Config, "unknown functional '" + which + "' (expected F or omega)");
}

}  // namespace starlab::lab
