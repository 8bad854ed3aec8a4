#pragma once

// Drop-bench recordings: CSV ingestion, moving-average smoothing, touch-down
// alignment, multi-trial envelopes, measured work loops and the isolated
// damper settling-slope fit.
//
// Channel CSV schema: optional '#' comment lines, then a header `t_s,<channel>`,
// then one `time,value` row per sample in SI units with a decimal point.
// Force channels use `F_N`, encoder channels `y_m`, velocity channels `v_mps`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "legdamp/drop_simulator.hpp"
#include "legdamp/energy.hpp"

namespace legdamp {

struct TimeSeries {
  std::string name;
  std::vector<double> t;
  std::vector<double> v;
  double nominal_rate = 0.0;  // Hz, estimated from the time span on ingestion

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }

  /// Throws AnalysisError unless sizes match, values are finite and times strictly increase.
  void validate() const;

  /// Linear interpolation; clamps to the end values outside the sampled range.
  double at(double time) const;
};

TimeSeries make_series(std::string name, std::vector<double> t, std::vector<double> v);

/// Parses a channel CSV. If `expected_channel` is non-empty the header must name it.
/// Throws ParseError carrying the 1-based line number of the first bad row.
TimeSeries read_channel(std::istream& in, std::string_view source, std::string_view expected_channel = {});
TimeSeries load_channel(const std::filesystem::path& path, std::string_view expected_channel = {});

/// Writes the channel CSV with max_digits10 precision. Each comment line is prefixed with "# ".
void write_channel(std::ostream& out, const TimeSeries& series, const std::vector<std::string>& comments = {});
void save_channel(const std::filesystem::path& path, const TimeSeries& series,
                  const std::vector<std::string>& comments = {});

/// Centered moving mean over an odd number of samples. Near the ends the window
/// shrinks symmetrically so it stays centered. Throws ValidationError for an even
/// span or a span longer than the series.
TimeSeries moving_average(const TimeSeries& series, std::size_t span);

struct AlignedTrial {
  TimeSeries force;    // force interpolated onto the encoder base, touch-down at t = 0
  TimeSeries encoder;  // hip height, touch-down at t = 0
  TimeSeries force_samples;  // the force record on its own clock, shifted the same way
  double touchdown_time = 0.0;  // in the original force clock
};

/// First upward crossing of `threshold` in the force channel, interpolated
/// between samples. Throws AnalysisError if there is none.
double find_touchdown(const TimeSeries& force, double threshold);

/// Shifts both channels so touch-down is t = 0 and resamples force onto the
/// encoder samples that lie inside the force record.
AlignedTrial align_trial(const TimeSeries& force, const TimeSeries& encoder, double threshold = 2.0);

struct Envelope {
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> half_width;  // multiplier * population std

  double lo(std::size_t i) const { return mean[i] - half_width[i]; }
  double hi(std::size_t i) const { return mean[i] + half_width[i]; }
};

/// Pointwise mean and multiplier x standard deviation (divide by N) on the first
/// trial's time base, restricted to the range every trial covers.
Envelope trial_envelope(const std::vector<TimeSeries>& trials, double multiplier = 1.0);

/// Work loop from touch-down (t = 0) to lift-off, where force falls back below
/// `threshold` after its peak. Leg length is the encoder hip height.
/// Throws AnalysisError if the stance window is empty or lift-off is never seen.
WorkLoop measured_workloop(const AlignedTrial& trial, double threshold = 2.0);

/// Work loop over the contact window instead: from the encoder's downward
/// crossing of the rest length l0 nearest touch-down to its next upward
/// crossing. Only force samples inside the window are smoothed (span samples,
/// shrinking at the window edges) and interpolated, so the force step at impact
/// is not blended with flight samples; the force at the window edges is
/// extrapolated linearly from the nearest two samples. Throws AnalysisError if
/// the encoder never crosses l0 or the window holds fewer than 2 force samples.
WorkLoop measured_workloop(const AlignedTrial& trial, double rest_length, std::size_t force_span);

struct DamperFit {
  double damping_rate = 0.0;    // N s/m, least-squares slope of F over v
  double intercept = 0.0;       // N, Coulomb-like offset
  double window_lo = 0.0;       // m/s
  double window_hi = 0.0;       // m/s
  double residual_rms = 0.0;    // N
  double dissipated_work = 0.0; // J, integral of F v dt over the whole record
  std::size_t points = 0;
};

/// Least-squares F = rate v + offset on the settling branch: samples after the
/// speed peak whose speed lies inside [window_lo, window_hi]. Velocity is
/// interpolated onto the force clock. Throws AnalysisError for < 10 points.
DamperFit fit_settling_slope(const TimeSeries& force, const TimeSeries& velocity, double window_lo,
                             double window_hi);

/// Cumulative trapezoidal integral of force over time, starting at 0 at the first sample.
TimeSeries impulse(const TimeSeries& force);

/// Restricts a series to lo <= t <= hi.
TimeSeries slice(const TimeSeries& series, double lo, double hi);

/// Central-difference derivative (one-sided at the ends).
TimeSeries differentiate(const TimeSeries& series, std::string name);

struct SensorRates {
  double encoder_hz = 8000.0;
  double force_hz = 1000.0;
};

struct SensorChannels {
  TimeSeries force;    // F_N
  TimeSeries encoder;  // y_m
};

/// Samples a simulated drop the way the bench records it: hip height at the
/// encoder rate and ground force at the force rate, from release until `tail`
/// seconds after the end of stance (ballistic after lift-off).
SensorChannels sensor_channels_from(const SimTrajectory& traj, const LegParams& params, SensorRates rates = {},
                                    double tail = 0.05);

struct AnalysisOptions {
  std::size_t encoder_span = 35;
  std::size_t force_span = 5;
  double threshold = 2.0;  // N
  /// Leg rest length [m]. When set, the loop spans the contact window on the
  /// encoder; otherwise it spans the force-threshold window.
  std::optional<double> rest_length;
};

struct MeasuredDrop {
  AlignedTrial aligned;
  WorkLoop loop;
  double energy = 0.0;  // J, loop area
};

/// Smooth the encoder, align on touch-down and build the stance work loop.
/// The returned aligned force is the smoothed record.
MeasuredDrop analyze_drop(const TimeSeries& force, const TimeSeries& encoder, const AnalysisOptions& options = {});

}  // namespace legdamp
