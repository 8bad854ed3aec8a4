#include "legdamp/calibration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "legdamp/energy.hpp"
#include "legdamp/errors.hpp"
#include "parallel.hpp"

namespace legdamp {

std::string_view to_string(DampingMode mode) { return mode == DampingMode::viscous ? "viscous" : "coulomb"; }

DampingMode parse_damping_mode(std::string_view text) {
  if (text == "viscous") return DampingMode::viscous;
  if (text == "coulomb") return DampingMode::coulomb;
  throw ValidationError("mode", "expected 'viscous' or 'coulomb', got '" + std::string(text) + "'");
}

DamperSpec damper_for(DampingMode mode, double coefficient) {
  return mode == DampingMode::viscous ? DamperSpec::viscous(coefficient) : DamperSpec::coulomb(coefficient);
}

DampingTarget DampingTarget::with_default_bracket(double energy, DampingMode mode) {
  DampingTarget t;
  t.energy = energy;
  t.mode = mode;
  t.lower = 0.0;
  t.upper = mode == DampingMode::viscous ? 1000.0 : 200.0;
  return t;
}

std::array<double, 5> target_levels(const LegParams& params) {
  std::array<double, 5> levels{};
  const double base = params.mass * params.g * params.rest_length();
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = base * 0.1 * static_cast<double>(i + 1);
  return levels;
}

namespace {

double reference_dissipation(const LegParams& params, DampingMode mode, double coefficient, const DropConfig& cfg) {
  DropConfig ref = cfg;
  ref.h = cfg.h0;
  return simulate_drop(params, damper_for(mode, coefficient), ref).summary.dissipated_energy;
}

}  // namespace

CalibrationResult calibrate(const LegParams& params, const DampingTarget& target, const DropConfig& cfg) {
  if (!(target.tol > 0.0)) throw ValidationError("tol", "calibration tolerance must be > 0");
  if (!(target.energy >= 0.0) || !std::isfinite(target.energy)) {
    throw ValidationError("target", "target energy must be finite and >= 0");
  }
  if (target.energy == 0.0) return {0.0, 0.0, 0};
  if (!(target.lower >= 0.0 && target.upper > target.lower)) {
    throw ValidationError("bracket", "need 0 <= lower < upper");
  }

  double lo = target.lower, hi = target.upper;
  const double e_lo = reference_dissipation(params, target.mode, lo, cfg);
  const double e_hi = reference_dissipation(params, target.mode, hi, cfg);
  if (std::abs(e_lo - target.energy) <= target.tol) return {lo, e_lo, 0};
  if (std::abs(e_hi - target.energy) <= target.tol) return {hi, e_hi, 0};
  if ((e_lo - target.energy) * (e_hi - target.energy) > 0.0) {
    throw CalibrationError("calibrate: bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "] gives E_D0 in [" + std::to_string(e_lo) + ", " + std::to_string(e_hi) +
                           "] J, which does not straddle the target " + std::to_string(target.energy) + " J");
  }
  const bool increasing = e_hi > e_lo;

  constexpr int kMaxIterations = 200;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e_mid = reference_dissipation(params, target.mode, mid, cfg);
    if (std::abs(e_mid - target.energy) <= target.tol) return {mid, e_mid, it};
    if ((e_mid < target.energy) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw CalibrationError("calibrate: no convergence within 200 bisection iterations");
}

const SweepCell* SweepResult::find(int set, DampingMode mode, double delta_h) const {
  for (const auto& c : cells) {
    if (c.set == set && c.mode == mode && std::abs(c.delta_h - delta_h) < 1e-12) return &c;
  }
  return nullptr;
}

SweepResult run_table2(const LegParams& params, const DropConfig& cfg, const Table2Options& options) {
  params.validate();
  cfg.validate(params);
  if (!(options.delta_h >= 0.0) || cfg.h0 - options.delta_h < 0.0) {
    throw ValidationError("dh", "height perturbation must satisfy 0 <= dh <= h0");
  }
  for (int s : options.sets) {
    if (s < 1 || s > static_cast<int>(kReferenceSets.size())) {
      throw ValidationError("sets", "set index " + std::to_string(s) + " outside 1..5");
    }
  }

  struct Job {
    int set;
    DampingMode mode;
  };
  std::vector<Job> jobs;
  for (int s : options.sets) {
    jobs.push_back({s, DampingMode::viscous});
    jobs.push_back({s, DampingMode::coulomb});
  }

  std::vector<double> coefficients(jobs.size());
  const auto levels = target_levels(params);
  detail::parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    const ReferenceSet& published = kReferenceSets[static_cast<std::size_t>(job.set - 1)];
    if (!options.calibrate) {
      coefficients[i] = job.mode == DampingMode::viscous ? published.dv : published.dc;
      return;
    }
    const auto target = DampingTarget::with_default_bracket(levels[static_cast<std::size_t>(job.set - 1)], job.mode);
    coefficients[i] = calibrate(params, target, cfg).coefficient;
  });

  const std::array<double, 3> offsets{-options.delta_h, 0.0, options.delta_h};
  SweepResult result;
  result.cells.resize(jobs.size() * offsets.size());
  detail::parallel_for(result.cells.size(), options.threads, [&](std::size_t i) {
    const auto& job = jobs[i / offsets.size()];
    SweepCell& cell = result.cells[i];
    cell.set = job.set;
    cell.mode = job.mode;
    cell.coefficient = coefficients[i / offsets.size()];
    cell.delta_h = offsets[i % offsets.size()];
    cell.h = cfg.h0 + cell.delta_h;
    DropConfig run = cfg;
    run.h = cell.h;
    try {
      const auto summary = simulate_drop(params, damper_for(job.mode, cell.coefficient), run).summary;
      cell.dissipated = summary.dissipated_energy;
      cell.outcome = summary.outcome;
    } catch (const std::exception& e) {
      throw IntegrationError("table2 cell (set " + std::to_string(job.set) + ", " + std::string(to_string(job.mode)) +
                             ", h = " + std::to_string(cell.h) + " m): " + e.what());
    }
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const double e_ref = result.cells[j * offsets.size() + 1].dissipated;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      SweepCell& cell = result.cells[j * offsets.size() + k];
      cell.delta_dissipated = k == 1 ? 0.0 : delta_dissipation(cell.dissipated, e_ref);
      if (k == 1) {
        cell.ratio = cell.dissipated / (params.mass * params.g * cfg.h0);
      } else if (cell.delta_h != 0.0) {
        cell.ratio = cell.delta_dissipated / full_rejection(cell.delta_h, params);
      } else {
        cell.ratio = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return result;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw ValidationError("count", "need at least one point");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  // Pin the exact midpoint of a symmetric range to 0 so dE_D(0) is exactly zero.
  for (auto& v : out) {
    if (std::abs(v) < 1e-15 * std::max(std::abs(lo), std::abs(hi))) v = 0.0;
  }
  return out;
}

std::vector<DeltaCurvePoint> sweep_delta_h(const LegParams& params, const DamperSpec& spec, const DropConfig& cfg,
                                           const std::vector<double>& delta_hs, unsigned threads) {
  params.validate();
  spec.validate();
  cfg.validate(params);
  for (double dh : delta_hs) {
    if (!(cfg.h0 + dh >= 0.0)) throw ValidationError("dh", "h0 + dh must be >= 0 for every sweep point");
  }
  DropConfig ref = cfg;
  ref.h = cfg.h0;
  const double e_ref = simulate_drop(params, spec, ref).summary.dissipated_energy;

  std::vector<DeltaCurvePoint> curve(delta_hs.size());
  detail::parallel_for(delta_hs.size(), threads, [&](std::size_t i) {
    const double dh = delta_hs[i];
    curve[i].delta_h = dh;
    curve[i].full_rejection = full_rejection(dh, params);
    if (dh == 0.0) return;  // reference point: dE_D = 0 by definition
    DropConfig run = cfg;
    run.h = cfg.h0 + dh;
    curve[i].delta_dissipated = delta_dissipation(simulate_drop(params, spec, run).summary.dissipated_energy, e_ref);
  });
  return curve;
}

}  // namespace legdamp
