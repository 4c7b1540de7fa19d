#include "omsim/sweep.hpp"

#include <atomic>
#include <thread>

namespace omsim {

void SweepGrid::validate() const {
  auto check = [](const AxisSpec& a) {
    if (a.name != "omega_over_omega_m" && a.name != "epsilon" && a.name != "eta" &&
        a.name != "phi_over_pi") {
      throw InvalidParameterError("sweep: unknown axis \"" + a.name + "\"");
    }
    if (a.values.empty()) {
      throw InvalidParameterError("sweep: empty axis \"" + a.name + "\"");
    }
    for (std::size_t i = 1; i < a.values.size(); ++i) {
      if (!(a.values[i] > a.values[i - 1])) {
        throw InvalidParameterError("sweep: axis \"" + a.name +
                                    "\" values must be strictly increasing");
      }
    }
  };
  check(axis1);
  if (axis2) check(*axis2);
}

std::vector<double> SweepGrid::linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  }
  return v;
}

SweepGrid SweepGrid::two_d(const RunSettings& run) {
  SweepGrid g;
  g.axis1 = {"omega_over_omega_m",
             linspace(run.omega_min, run.omega_max, run.omega_points)};
  g.axis2 = AxisSpec{"epsilon", linspace(run.eps_min, run.eps_max, run.eps_points)};
  g.validate();
  return g;
}

SweepGrid SweepGrid::phase(const RunSettings& run) {
  SweepGrid g;
  g.axis1 = {"phi_over_pi", linspace(0.0, 2.0 * (run.phi_points - 1.0) / run.phi_points,
                                     run.phi_points)};
  g.validate();
  return g;
}

const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::ok: return "ok";
    case CellStatus::unstable: return "unstable";
    case CellStatus::non_converged: return "non-converged";
  }
  return "?";
}

void apply_axis(Config& cfg, const std::string& axis, double value) {
  if (axis == "omega_over_omega_m") {
    cfg.modulation.omega1 = value * cfg.system.omega_m;
    cfg.modulation.omega2 = value * cfg.system.omega_m;
  } else if (axis == "epsilon") {
    cfg.modulation.epsilon = value;
  } else if (axis == "eta") {
    cfg.modulation.eta = value;
  } else if (axis == "phi_over_pi") {
    cfg.modulation.phi = ModulationSpec::reduce_phase(value * constants::pi);
  } else {
    throw InvalidParameterError("sweep: unknown axis \"" + axis + "\"");
  }
}

SweepCell run_cell(const Config& cfg) {
  SweepCell cell;
  enum class Stage { classical, covariance, metrics } stage = Stage::classical;
  try {
    const DerivedParams dp = derive(cfg.system);
    CovarianceOptions copt;
    copt.lockstep_classical = cfg.run.lockstep_classical;

    const PeriodicOrbit orbit =
        find_periodic_orbit(dp, cfg.system, cfg.modulation, cfg.run.n_samples,
                            copt.settle);
    const StabilityReport rh =
        routh_hurwitz_stable(dp, cfg.system, cfg.modulation, orbit);
    cell.rh_margin = rh.worst_margin;
    if (!rh.stable) {
      cell.status = CellStatus::unstable;
      cell.sub_reason = "routh-hurwitz";
      return cell;
    }
    stage = Stage::covariance;
    const CovOrbit cov = steady_periodic_covariance(
        dp, cfg.system, cfg.modulation, cfg.run.n_samples, copt, &orbit);
    cell.settle_time = cov.settle_time;
    stage = Stage::metrics;
    cell.metrics = period_extrema(cov, cfg.run.discord_measurement);
    cell.status = CellStatus::ok;
  } catch (const InstabilityError&) {
    cell.status = CellStatus::unstable;
    // Frozen-time Routh-Hurwitz is necessary, not sufficient: divergence of
    // the covariance after the array passed is a parametric instability.
    cell.sub_reason = stage == Stage::classical ? "classical-divergence"
                                                : "parametric-divergence";
    cell.metrics.reset();
  } catch (const ConvergenceError&) {
    cell.status = CellStatus::non_converged;
    cell.sub_reason = "no-closure";
    cell.metrics.reset();
  } catch (const SingularSystemError&) {
    cell.status = CellStatus::non_converged;
    cell.sub_reason = "singular-solve";
    cell.metrics.reset();
  } catch (const UnphysicalInputError&) {
    cell.status = CellStatus::non_converged;
    cell.sub_reason = "unphysical-sample";
    cell.metrics.reset();
  }
  return cell;
}

std::vector<SweepCell> run_sweep(const Config& base, const SweepGrid& grid,
                                 int workers) {
  grid.validate();
  const int n1 = static_cast<int>(grid.axis1.values.size());
  const int n2 = grid.axis2 ? static_cast<int>(grid.axis2->values.size()) : 1;
  const int total = n1 * n2;
  std::vector<SweepCell> cells(total);

  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, total);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= total) return;
      const int i = idx / n2;
      const int j = idx % n2;
      Config cfg = base;
      apply_axis(cfg, grid.axis1.name, grid.axis1.values[i]);
      if (grid.axis2) apply_axis(cfg, grid.axis2->name, grid.axis2->values[j]);
      SweepCell cell = run_cell(cfg);
      cell.i = i;
      cell.j = j;
      cell.x = grid.axis1.values[i];
      cell.y = grid.axis2 ? grid.axis2->values[j] : 0.0;
      cells[idx] = std::move(cell);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace omsim
