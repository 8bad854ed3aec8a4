#include "legdamp/exp_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include "legdamp/errors.hpp"
#include "legdamp/stats.hpp"

namespace legdamp {

namespace {

double estimate_rate(const std::vector<double>& t) {
  if (t.size() < 2 || t.back() <= t.front()) return 0.0;
  return static_cast<double>(t.size() - 1) / (t.back() - t.front());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Index i such that t[i] <= time < t[i+1], clamped to [0, n-2].
std::size_t bracket(const std::vector<double>& t, double time) {
  auto it = std::upper_bound(t.begin(), t.end(), time);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - t.begin()) - 1));
  return std::min(idx, t.size() - 2);
}

}  // namespace

void TimeSeries::validate() const {
  if (t.size() != v.size()) throw AnalysisError(name + ": time and value columns differ in length");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(v[i])) throw AnalysisError(name + ": non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1])) throw AnalysisError(name + ": timestamps not strictly increasing");
  }
}

double TimeSeries::at(double time) const {
  if (t.empty()) throw AnalysisError(name + ": empty series");
  if (t.size() == 1 || time <= t.front()) return v.front();
  if (time >= t.back()) return v.back();
  const std::size_t i = bracket(t, time);
  const double w = (time - t[i]) / (t[i + 1] - t[i]);
  return v[i] + w * (v[i + 1] - v[i]);
}

TimeSeries make_series(std::string name, std::vector<double> t, std::vector<double> v) {
  TimeSeries s{std::move(name), std::move(t), std::move(v), 0.0};
  s.validate();
  s.nominal_rate = estimate_rate(s.t);
  return s;
}

TimeSeries read_channel(std::istream& in, std::string_view source, std::string_view expected_channel) {
  const std::string src(source);
  TimeSeries out;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(src, lineno, "expected exactly two comma-separated fields");
    }
    const std::string_view first = trim(view.substr(0, comma));
    const std::string_view second = trim(view.substr(comma + 1));
    if (!have_header) {
      if (first != "t_s") throw ParseError(src, lineno, "header must start with 't_s'");
      if (second.empty()) throw ParseError(src, lineno, "header is missing the channel name");
      if (!expected_channel.empty() && second != expected_channel) {
        throw ParseError(src, lineno,
                         "expected channel '" + std::string(expected_channel) + "', found '" + std::string(second) + "'");
      }
      out.name = std::string(second);
      have_header = true;
      continue;
    }
    const auto t = parse_double(first);
    const auto v = parse_double(second);
    if (!t || !v) throw ParseError(src, lineno, "malformed number");
    if (!out.t.empty() && !(*t > out.t.back())) {
      throw ParseError(src, lineno, "timestamp " + std::string(first) + " is not strictly increasing");
    }
    out.t.push_back(*t);
    out.v.push_back(*v);
  }
  if (!have_header) throw ParseError(src, 0, "empty file (no header)");
  if (out.t.empty()) throw ParseError(src, 0, "no samples after the header");
  out.nominal_rate = estimate_rate(out.t);
  return out;
}

TimeSeries load_channel(const std::filesystem::path& path, std::string_view expected_channel) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_channel(in, path.string(), expected_channel);
}

void write_channel(std::ostream& out, const TimeSeries& series, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "t_s," << series.name << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < series.size(); ++i) out << series.t[i] << ',' << series.v[i] << '\n';
}

void save_channel(const std::filesystem::path& path, const TimeSeries& series, const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_channel(out, series, comments);
}

TimeSeries moving_average(const TimeSeries& series, std::size_t span) {
  if (span == 0 || span % 2 == 0) throw ValidationError("span", "moving-average span must be odd and >= 1");
  if (span > series.size()) {
    throw ValidationError("span", "span " + std::to_string(span) + " exceeds series length " +
                                      std::to_string(series.size()));
  }
  const std::size_t n = series.size();
  TimeSeries out = series;
  const std::size_t half = span / 2;
  for (std::size_t i = 0; i < n; ++i) {
    // Windows shrink symmetrically near the ends.
    const std::size_t w = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (std::size_t j = i - w; j <= i + w; ++j) sum += series.v[j];
    out.v[i] = sum / static_cast<double>(2 * w + 1);
  }
  return out;
}

double find_touchdown(const TimeSeries& force, double threshold) {
  for (std::size_t i = 1; i < force.size(); ++i) {
    if (force.v[i - 1] < threshold && force.v[i] >= threshold) {
      const double w = (threshold - force.v[i - 1]) / (force.v[i] - force.v[i - 1]);
      return force.t[i - 1] + w * (force.t[i] - force.t[i - 1]);
    }
  }
  throw AnalysisError("no upward crossing of the " + std::to_string(threshold) + " N touch-down threshold in '" +
                      force.name + "'");
}

AlignedTrial align_trial(const TimeSeries& force, const TimeSeries& encoder, double threshold) {
  force.validate();
  encoder.validate();
  if (force.size() < 2 || encoder.size() < 2) throw AnalysisError("align_trial: channels need at least 2 samples");
  const double td = find_touchdown(force, threshold);
  AlignedTrial out;
  out.touchdown_time = td;
  out.encoder.name = encoder.name;
  out.force.name = force.name;
  out.force_samples = force;
  for (double& t : out.force_samples.t) t -= td;
  for (std::size_t i = 0; i < encoder.size(); ++i) {
    const double t = encoder.t[i];
    if (t < force.t.front() || t > force.t.back()) continue;
    out.encoder.t.push_back(t - td);
    out.encoder.v.push_back(encoder.v[i]);
    out.force.t.push_back(t - td);
    out.force.v.push_back(force.at(t));
  }
  if (out.encoder.size() < 2) throw AnalysisError("align_trial: force and encoder records do not overlap");
  out.encoder.nominal_rate = out.force.nominal_rate = estimate_rate(out.encoder.t);
  return out;
}

Envelope trial_envelope(const std::vector<TimeSeries>& trials, double multiplier) {
  if (trials.size() < 2) throw AnalysisError("trial_envelope: need at least 2 trials");
  if (!(multiplier >= 0.0)) throw ValidationError("multiplier", "must be >= 0");
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& tr : trials) {
    tr.validate();
    if (tr.empty()) throw AnalysisError("trial_envelope: empty trial '" + tr.name + "'");
    lo = std::max(lo, tr.t.front());
    hi = std::min(hi, tr.t.back());
  }
  Envelope env;
  for (double t : trials.front().t) {
    if (t >= lo && t <= hi) env.t.push_back(t);
  }
  if (env.t.empty()) throw AnalysisError("trial_envelope: trials share no common time range");
  const double n = static_cast<double>(trials.size());
  for (double t : env.t) {
    double sum = 0.0, sq = 0.0;
    for (const auto& tr : trials) sum += tr.at(t);
    const double mean = sum / n;
    for (const auto& tr : trials) sq += (tr.at(t) - mean) * (tr.at(t) - mean);
    env.mean.push_back(mean);
    env.half_width.push_back(multiplier * std::sqrt(sq / n));
  }
  return env;
}

WorkLoop measured_workloop(const AlignedTrial& trial, double threshold) {
  const auto& f = trial.force;
  const auto& y = trial.encoder;
  // Stance starts at the aligned touch-down (t = 0) and ends when force drops
  // back below the threshold after its peak.
  std::size_t start = 0;
  while (start < f.size() && f.t[start] < 0.0) ++start;
  if (start >= f.size() || f.v[start] < threshold) {
    throw AnalysisError("measured_workloop: force never exceeds the threshold after touch-down (empty stance)");
  }
  std::size_t peak = start;
  std::size_t end = f.size();
  for (std::size_t i = start; i < f.size(); ++i) {
    if (f.v[i] > f.v[peak]) peak = i;
    if (f.v[i] < threshold) {
      end = i;
      break;
    }
  }
  if (end == f.size()) throw AnalysisError("measured_workloop: lift-off (force below threshold) never detected");

  WorkLoop loop;
  loop.points.push_back({y.at(0.0), threshold});
  for (std::size_t i = start; i < end; ++i) {
    if (f.t[i] > 0.0) loop.points.push_back({y.v[i], f.v[i]});
  }
  const double w = (threshold - f.v[end - 1]) / (f.v[end] - f.v[end - 1]);
  const double t_lo = f.t[end - 1] + w * (f.t[end] - f.t[end - 1]);
  loop.points.push_back({y.at(t_lo), threshold});
  if (loop.points.size() < 3) throw AnalysisError("measured_workloop: stance window holds fewer than 3 samples");
  return loop;
}

WorkLoop measured_workloop(const AlignedTrial& trial, double rest_length, std::size_t force_span) {
  if (!(rest_length > 0.0)) throw ValidationError("rest_length", "must be > 0");
  if (force_span == 0 || force_span % 2 == 0) throw ValidationError("span", "force span must be odd and >= 1");
  const auto& y = trial.encoder;
  const auto crossing = [&](std::size_t i) {
    const double w = (rest_length - y.v[i - 1]) / (y.v[i] - y.v[i - 1]);
    return y.t[i - 1] + w * (y.t[i] - y.t[i - 1]);
  };

  // Contact starts at the downward crossing closest to the force touch-down (t = 0).
  std::optional<std::size_t> in;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y.v[i - 1] > rest_length && y.v[i] <= rest_length) {
      if (!in || std::abs(crossing(i)) < std::abs(crossing(*in))) in = i;
    }
  }
  if (!in) throw AnalysisError("measured_workloop: encoder never falls below the rest length (no contact)");
  std::optional<std::size_t> out;
  for (std::size_t i = *in + 1; i < y.size() && !out; ++i) {
    if (y.v[i - 1] < rest_length && y.v[i] >= rest_length) out = i;
  }
  if (!out) throw AnalysisError("measured_workloop: lift-off (encoder back at the rest length) never detected");
  const double t_in = crossing(*in);
  const double t_out = crossing(*out);

  TimeSeries f;
  f.name = trial.force_samples.name;
  for (std::size_t i = 0; i < trial.force_samples.size(); ++i) {
    const double t = trial.force_samples.t[i];
    if (t > t_in && t < t_out) {
      f.t.push_back(t);
      f.v.push_back(trial.force_samples.v[i]);
    }
  }
  if (f.size() < 2) throw AnalysisError("measured_workloop: fewer than 2 force samples inside the contact window");
  std::size_t span = std::min(force_span, f.size());
  if (span % 2 == 0) --span;
  if (span > 1) f = moving_average(f, span);

  const auto force_at = [&](double t) {
    std::size_t i = 0;
    if (t >= f.t.back()) {
      i = f.size() - 2;
    } else if (t > f.t.front()) {
      i = bracket(f.t, t);
    }
    const double w = (t - f.t[i]) / (f.t[i + 1] - f.t[i]);
    return std::max(0.0, f.v[i] + w * (f.v[i + 1] - f.v[i]));
  };

  WorkLoop loop;
  loop.points.push_back({rest_length, force_at(t_in)});
  for (std::size_t i = *in; i < *out; ++i) loop.points.push_back({y.v[i], force_at(y.t[i])});
  loop.points.push_back({rest_length, force_at(t_out)});
  if (loop.points.size() < 3) throw AnalysisError("measured_workloop: contact window holds fewer than 3 samples");
  return loop;
}

DamperFit fit_settling_slope(const TimeSeries& force, const TimeSeries& velocity, double window_lo, double window_hi) {
  force.validate();
  velocity.validate();
  if (!(window_hi > window_lo)) throw ValidationError("window", "need window_lo < window_hi");
  if (force.size() < 2 || velocity.size() < 2) throw AnalysisError("fit_settling_slope: channels too short");

  std::vector<double> speed(force.size());
  for (std::size_t i = 0; i < force.size(); ++i) speed[i] = velocity.at(force.t[i]);
  const auto peak = static_cast<std::size_t>(
      std::max_element(speed.begin(), speed.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      speed.begin());

  std::vector<double> xs, ys;
  for (std::size_t i = peak; i < force.size(); ++i) {
    const double v = std::abs(speed[i]);
    if (v >= window_lo && v <= window_hi) {
      xs.push_back(v);
      ys.push_back(force.v[i]);
    }
  }
  if (xs.size() < 10) {
    throw AnalysisError("fit_settling_slope: only " + std::to_string(xs.size()) +
                        " samples in the settling window (need >= 10)");
  }
  const LinearFit lf = fit_line(xs, ys);

  DamperFit fit;
  fit.damping_rate = lf.slope;
  fit.intercept = lf.intercept;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.residual_rms = lf.residual_rms;
  fit.points = xs.size();
  for (std::size_t i = 1; i < force.size(); ++i) {
    const double p0 = force.v[i - 1] * std::abs(speed[i - 1]);
    const double p1 = force.v[i] * std::abs(speed[i]);
    fit.dissipated_work += 0.5 * (p0 + p1) * (force.t[i] - force.t[i - 1]);
  }
  return fit;
}

TimeSeries impulse(const TimeSeries& force) {
  TimeSeries out;
  out.name = "impulse_Ns";
  out.t = force.t;
  out.v.assign(force.size(), 0.0);
  for (std::size_t i = 1; i < force.size(); ++i) {
    out.v[i] = out.v[i - 1] + 0.5 * (force.v[i] + force.v[i - 1]) * (force.t[i] - force.t[i - 1]);
  }
  out.nominal_rate = force.nominal_rate;
  return out;
}

TimeSeries slice(const TimeSeries& series, double lo, double hi) {
  TimeSeries out;
  out.name = series.name;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.t[i] >= lo && series.t[i] <= hi) {
      out.t.push_back(series.t[i]);
      out.v.push_back(series.v[i]);
    }
  }
  out.nominal_rate = estimate_rate(out.t);
  return out;
}

TimeSeries differentiate(const TimeSeries& series, std::string name) {
  if (series.size() < 2) throw AnalysisError("differentiate: need at least 2 samples");
  TimeSeries out;
  out.name = std::move(name);
  out.t = series.t;
  out.v.resize(series.size());
  const std::size_t n = series.size();
  out.v[0] = (series.v[1] - series.v[0]) / (series.t[1] - series.t[0]);
  out.v[n - 1] = (series.v[n - 1] - series.v[n - 2]) / (series.t[n - 1] - series.t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out.v[i] = (series.v[i + 1] - series.v[i - 1]) / (series.t[i + 1] - series.t[i - 1]);
  }
  out.nominal_rate = series.nominal_rate;
  return out;
}

SensorChannels sensor_channels_from(const SimTrajectory& traj, const LegParams& params, SensorRates rates,
                                    double tail) {
  if (traj.samples.empty()) throw AnalysisError("sensor_channels_from: empty trajectory");
  if (!(rates.encoder_hz > 0.0 && rates.force_hz > 0.0)) throw ValidationError("rates", "sampling rates must be > 0");
  const auto stance = traj.stance();
  if (stance.empty()) throw AnalysisError("sensor_channels_from: trajectory has no stance segment");

  const auto& release = traj.samples.front();
  const auto& td = stance.front();
  const auto& last = stance.back();
  const bool lifted = traj.event_time(EventKind::lift_off).has_value();
  const double t_end = last.t + tail;

  std::vector<double> st(stance.size());
  for (std::size_t i = 0; i < stance.size(); ++i) st[i] = stance[i].t;

  auto height = [&](double t) {
    if (t < td.t) return release.y + release.ydot * (t - release.t) - 0.5 * params.g * (t - release.t) * (t - release.t);
    if (t > last.t) {
      if (!lifted) return last.y;
      const double dt = t - last.t;
      return last.y + last.ydot * dt - 0.5 * params.g * dt * dt;
    }
    if (stance.size() == 1) return td.y;
    const std::size_t i = bracket(st, t);
    const auto& a = stance[i];
    const auto& b = stance[i + 1];
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * a.y + (s3 - 2 * s2 + s) * h * a.ydot + (-2 * s3 + 3 * s2) * b.y +
           (s3 - s2) * h * b.ydot;
  };
  auto force = [&](double t) {
    if (t < td.t) return 0.0;
    if (t > last.t) return lifted ? 0.0 : last.leg_force;
    if (stance.size() == 1) return td.leg_force;
    const std::size_t i = bracket(st, t);
    const double w = (t - stance[i].t) / (stance[i + 1].t - stance[i].t);
    return stance[i].leg_force + w * (stance[i + 1].leg_force - stance[i].leg_force);
  };

  SensorChannels out;
  out.encoder.name = "y_m";
  out.force.name = "F_N";
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / rates.encoder_hz;
    if (t > t_end) break;
    out.encoder.t.push_back(t);
    out.encoder.v.push_back(height(t));
  }
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / rates.force_hz;
    if (t > t_end) break;
    out.force.t.push_back(t);
    out.force.v.push_back(force(t));
  }
  out.encoder.nominal_rate = rates.encoder_hz;
  out.force.nominal_rate = rates.force_hz;
  return out;
}

MeasuredDrop analyze_drop(const TimeSeries& force, const TimeSeries& encoder, const AnalysisOptions& options) {
  const TimeSeries f = options.force_span > 1 ? moving_average(force, options.force_span) : force;
  const TimeSeries y = options.encoder_span > 1 ? moving_average(encoder, options.encoder_span) : encoder;
  MeasuredDrop out;
  out.aligned = align_trial(f, y, options.threshold);
  if (options.rest_length) {
    // Smoothing happens inside the contact window, so start from the raw force.
    out.loop = measured_workloop(align_trial(force, y, options.threshold), *options.rest_length, options.force_span);
  } else {
    out.loop = measured_workloop(out.aligned, options.threshold);
  }
  out.energy = loop_area(out.loop);
  return out;
}

}  // namespace legdamp
