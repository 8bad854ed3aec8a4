#pragma once

// Damping-coefficient calibration against reference-height dissipation
// targets, and the height-perturbation sweeps built on it.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "legdamp/drop_simulator.hpp"
#include "legdamp/leg_model.hpp"

namespace legdamp {

enum class DampingMode { viscous, coulomb };

std::string_view to_string(DampingMode mode);
DampingMode parse_damping_mode(std::string_view text);

DamperSpec damper_for(DampingMode mode, double coefficient);

struct DampingTarget {
  double energy = 0.0;  // J, dissipation wanted at the reference height
  DampingMode mode = DampingMode::viscous;
  double lower = 0.0;   // bracket on the coefficient (N s/m or N)
  double upper = 0.0;
  double tol = 5e-4;    // J

  /// Target with the default bracket: [0, 1000] N s/m viscous, [0, 200] N Coulomb.
  static DampingTarget with_default_bracket(double energy, DampingMode mode);
};

struct CalibrationResult {
  double coefficient = 0.0;
  double achieved_energy = 0.0;
  int iterations = 0;
};

/// Reference-height dissipation levels m g f l0 for f = 0.1 ... 0.5.
std::array<double, 5> target_levels(const LegParams& params);

/// Bisection on the coefficient until |E_D(h0) - target| <= tol.
/// cfg.h is ignored: calibration always drops from cfg.h0.
/// Throws CalibrationError if the bracket does not straddle the target or
/// 200 iterations do not converge.
CalibrationResult calibrate(const LegParams& params, const DampingTarget& target, const DropConfig& cfg);

/// Published damping coefficients per set (index 1..5).
struct ReferenceSet {
  int index;
  double dv;  // N s/m
  double dc;  // N
};
inline constexpr std::array<ReferenceSet, 5> kReferenceSets{{
    {1, 29.5, 7.7},
    {2, 68.0, 17.3},
    {3, 119.4, 29.3},
    {4, 197.1, 46.1},
    {5, 349.4, 76.3},
}};

struct SweepCell {
  int set = 0;
  DampingMode mode = DampingMode::viscous;
  double coefficient = 0.0;
  double h = 0.0;
  double delta_h = 0.0;
  double dissipated = 0.0;        // E_D [J]
  double delta_dissipated = 0.0;  // E_D - E_D0 [J]
  double ratio = 0.0;             // dE_D / dE_T, or E_D0 / E_T0 at the reference cell; NaN if undefined
  Outcome outcome = Outcome::lifted_off;
};

struct SweepResult {
  std::vector<SweepCell> cells;

  const SweepCell* find(int set, DampingMode mode, double delta_h) const;
};

struct Table2Options {
  std::vector<int> sets{1, 2, 3, 4, 5};
  double delta_h = 0.025;
  bool calibrate = false;    // recalibrate to target_levels() instead of the published coefficients
  unsigned threads = 0;      // 0: hardware concurrency
};

/// Sets x {viscous, Coulomb} x {h0 - dh, h0, h0 + dh}.
/// A failing cell aborts with an IntegrationError naming the cell.
SweepResult run_table2(const LegParams& params, const DropConfig& cfg, const Table2Options& options = {});

struct DeltaCurvePoint {
  double delta_h = 0.0;
  double delta_dissipated = 0.0;  // J
  double full_rejection = 0.0;    // J
};

/// Evenly spaced points over [lo, hi] (count >= 2), or {lo} when count == 1.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// dE_D(dh) around cfg.h0 for a fixed damper. Throws ValidationError if h0 + dh < 0.
std::vector<DeltaCurvePoint> sweep_delta_h(const LegParams& params, const DamperSpec& spec, const DropConfig& cfg,
                                           const std::vector<double>& delta_hs, unsigned threads = 0);

}  // namespace legdamp
