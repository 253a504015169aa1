#pragma once

// Pattern cuts from the sweeper grid, time-to-angle mapping, null measurement, receiver
// comparison and the bandwidth SNR ratio.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sarsweep/constants.hpp"
#include "sarsweep/receiver.hpp"
#include "sarsweep/waveform.hpp"

namespace sarsweep::analysis {

struct CutPoint {
  double time = 0.0;      // s
  double angle = 0.0;     // rad, meaningful when PatternCut::has_angle
  double power_db = 0.0;
};

struct PatternCut {
  double frequency = 0.0;      // Hz, centre of the bin the cut was taken from
  std::vector<CutPoint> points;
  double normalization_db = 0.0;  // offset added so the peak reads 0 dB
  double dwell = 0.0;          // s, stop window each point summarises
  bool has_angle = false;

  std::size_t size() const { return points.size(); }
};

struct NullReport {
  std::vector<double> positions;  // angle (rad) if the cut has angles, else time (s)
  std::vector<double> spacings;
  std::optional<double> mean_spacing;
  bool on_angle_axis = false;
};

struct ComparisonReport {
  double nsr_correlation = 0.0;
  double sed_correlation = 0.0;
  double nsr_rms_error_db = 0.0;
  double sed_rms_error_db = 0.0;
  std::optional<double> measured_snr_gain_db;  // empty when a residual variance vanishes
};

// Shift the cut so its maximum reads 0 dB; the applied offsets accumulate.
inline PatternCut normalize(PatternCut cut) {
  if (cut.points.empty()) return cut;
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& p : cut.points) peak = std::max(peak, p.power_db);
  for (auto& p : cut.points) p.power_db -= peak;
  cut.normalization_db -= peak;
  return cut;
}

inline std::size_t nearest_bin(const receiver::PowerGrid& grid, double frequency) {
  if (grid.cols() == 0) throw std::invalid_argument("extract_pattern: grid has no frequency axis");
  const double half = (grid.cols() > 1 ? grid.bin_width() : 0.0) / 2.0;
  const double lo = grid.frequencies.front() - half;
  const double hi = grid.frequencies.back() + half;
  if (!(frequency >= lo && frequency <= hi))
    throw std::invalid_argument("frequency " + std::to_string(frequency) + " Hz is outside the grid span [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "] Hz");
  const auto it = std::min_element(grid.frequencies.begin(), grid.frequencies.end(),
                                   [&](double a, double b) { return std::abs(a - frequency) < std::abs(b - frequency); });
  return static_cast<std::size_t>(it - grid.frequencies.begin());
}

// One grid column as a time series, peak-normalised. Point times are stop-window centres.
inline PatternCut extract_pattern(const receiver::PowerGrid& grid, double frequency) {
  grid.validate();
  const std::size_t c = nearest_bin(grid, frequency);
  PatternCut cut;
  cut.frequency = grid.frequencies[c];
  cut.dwell = grid.stop_duration;
  cut.points.reserve(grid.rows());
  for (std::size_t r = 0; r < grid.rows(); ++r) cut.points.push_back({grid.cell_time(r, c), 0.0, grid.at(r, c)});
  return normalize(std::move(cut));
}

// angle(t) = atan(v (t - t_cross) / R)
inline PatternCut time_to_angle(PatternCut cut, double ground_beam_speed, double range, double crossing_time) {
  if (!(range > 0.0)) throw std::invalid_argument("time_to_angle: range must be > 0");
  for (auto& p : cut.points) p.angle = std::atan(ground_beam_speed * (p.time - crossing_time) / range);
  cut.has_angle = true;
  return cut;
}

namespace detail {

// Vertex of the parabola through three points (non-uniform abscissae allowed).
inline double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d0 = (y1 - y0) / (x1 - x0);
  const double d1 = (y2 - y1) / (x2 - x1);
  const double a = (d1 - d0) / (x2 - x0);
  if (!(a > 0.0)) return x1;
  const double v = 0.5 * (x0 + x1) - d0 / (2.0 * a);
  return std::clamp(v, x0, x2);
}

}  // namespace detail

// Local minima at least prominence_db below the highest point on each side up to the
// neighbouring minimum. Positions are refined with a parabola through linear power, which is
// locally quadratic around a simple null.
inline NullReport find_nulls(const PatternCut& cut, double prominence_db = 6.0) {
  if (cut.size() < 3) throw std::invalid_argument("find_nulls: cut needs at least 3 points");
  const auto& pts = cut.points;
  const std::size_t n = pts.size();
  auto x = [&](std::size_t i) { return cut.has_angle ? pts[i].angle : pts[i].time; };

  // Candidate minima; a flat run counts once, at its middle.
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < n;) {
    std::size_t j = i;
    while (j + 1 < n && pts[j + 1].power_db == pts[i].power_db) ++j;
    if (j + 1 < n && pts[i - 1].power_db > pts[i].power_db && pts[j + 1].power_db > pts[j].power_db)
      minima.push_back((i + j) / 2);
    i = j + 1;
  }

  NullReport report;
  report.on_angle_axis = cut.has_angle;
  for (std::size_t m = 0; m < minima.size(); ++m) {
    const std::size_t i = minima[m];
    const std::size_t left_end = m == 0 ? 0 : minima[m - 1];
    const std::size_t right_end = m + 1 == minima.size() ? n - 1 : minima[m + 1];
    double left_peak = -std::numeric_limits<double>::infinity();
    double right_peak = left_peak;
    for (std::size_t k = left_end; k < i; ++k) left_peak = std::max(left_peak, pts[k].power_db);
    for (std::size_t k = i + 1; k <= right_end; ++k) right_peak = std::max(right_peak, pts[k].power_db);
    if (pts[i].power_db > std::min(left_peak, right_peak) - prominence_db) continue;
    const double refined = detail::parabola_vertex(x(i - 1), db_to_power(pts[i - 1].power_db), x(i),
                                                   db_to_power(pts[i].power_db), x(i + 1),
                                                   db_to_power(pts[i + 1].power_db));
    report.positions.push_back(refined);
  }
  std::sort(report.positions.begin(), report.positions.end());
  for (std::size_t i = 1; i < report.positions.size(); ++i)
    report.spacings.push_back(report.positions[i] - report.positions[i - 1]);
  if (!report.spacings.empty()) {
    double s = 0.0;
    for (double v : report.spacings) s += v;
    report.mean_spacing = s / static_cast<double>(report.spacings.size());
  }
  return report;
}

// SNR_NSR / SNR_SED = BPF / NBPF.
inline double snr_ratio(double bpf, double nbpf) {
  if (!(bpf > 0.0) || !(nbpf > 0.0)) throw std::invalid_argument("snr_ratio: bandwidths must be > 0");
  if (nbpf > bpf) throw std::invalid_argument("snr_ratio: nbpf must not exceed bpf");
  return bpf / nbpf;
}

enum class SedResample { block_average, peak, nearest };

struct CompareOptions {
  SedResample sed_resample = SedResample::block_average;
  double floor_db = -30.0;  // both estimate and truth are clamped here before the RMS error
};

namespace detail {

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 && sbb == 0.0) return 1.0;
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double variance(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / n;
}

// Linear interpolation of the truth curve at time t (clamped at the ends).
inline double interpolate(const PatternCut& truth, double t) {
  const auto& p = truth.points;
  if (t <= p.front().time) return p.front().power_db;
  if (t >= p.back().time) return p.back().power_db;
  const auto it = std::lower_bound(p.begin(), p.end(), t, [](const CutPoint& a, double v) { return a.time < v; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double f = (t - lo.time) / (hi.time - lo.time);
  return lo.power_db + f * (hi.power_db - lo.power_db);
}

inline std::vector<double> resample_sed(const receiver::SedSeries& sed, const PatternCut& base, SedResample mode) {
  std::vector<double> out;
  out.reserve(base.size());
  const double half = base.dwell / 2.0;
  for (const auto& pt : base.points) {
    const auto lo = std::lower_bound(sed.times.begin(), sed.times.end(), pt.time - half);
    const auto hi = std::lower_bound(sed.times.begin(), sed.times.end(), pt.time + half);
    if (mode == SedResample::nearest || lo == hi) {
      auto it = std::lower_bound(sed.times.begin(), sed.times.end(), pt.time);
      if (it == sed.times.end()) --it;
      if (it != sed.times.begin() && std::abs(*(it - 1) - pt.time) <= std::abs(*it - pt.time)) --it;
      out.push_back(sed.power_db[static_cast<std::size_t>(it - sed.times.begin())]);
      continue;
    }
    const auto b = static_cast<std::size_t>(lo - sed.times.begin());
    const auto e = static_cast<std::size_t>(hi - sed.times.begin());
    if (mode == SedResample::peak) {
      out.push_back(*std::max_element(sed.power_db.begin() + static_cast<std::ptrdiff_t>(b),
                                      sed.power_db.begin() + static_cast<std::ptrdiff_t>(e)));
    } else {
      double s = 0.0;
      for (std::size_t k = b; k < e; ++k) s += sed.power_db[k];
      out.push_back(s / static_cast<double>(e - b));
    }
  }
  return out;
}

}  // namespace detail

// Both estimates are brought onto the NSR cut's stop-window time base, peak-normalised and
// compared with the truth cut. Correlation is Pearson on linear power; the RMS error is on dB
// values clamped at floor_db; the measured SNR gain is the ratio of residual (estimate - truth,
// dB) variances, SED over NSR.
inline ComparisonReport compare_receivers(const PatternCut& nsr_cut, const receiver::SedSeries& sed_series,
                                          const PatternCut& truth, const CompareOptions& options = {}) {
  if (nsr_cut.size() < 2 || sed_series.size() == 0 || truth.size() == 0)
    throw std::invalid_argument("compare_receivers: empty input");
  const double t0 = nsr_cut.points.front().time - nsr_cut.dwell / 2.0;
  const double t1 = nsr_cut.points.back().time + nsr_cut.dwell / 2.0;
  if (sed_series.times.back() < t0 || sed_series.times.front() > t1 ||
      truth.points.back().time < t0 || truth.points.front().time > t1)
    throw std::invalid_argument("compare_receivers: time bases do not overlap");

  std::vector<double> truth_db, nsr_db;
  for (const auto& p : nsr_cut.points) {
    truth_db.push_back(detail::interpolate(truth, p.time));
    nsr_db.push_back(p.power_db);
  }
  std::vector<double> sed_db = detail::resample_sed(sed_series, nsr_cut, options.sed_resample);
  auto peak_normalize = [](std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    for (double& x : v) x -= m;
  };
  peak_normalize(truth_db);
  peak_normalize(nsr_db);
  peak_normalize(sed_db);

  auto linear = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), db_to_power);
    return out;
  };
  const auto truth_lin = linear(truth_db);
  auto rms = [&](const std::vector<double>& est) {
    double s = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      const double d = std::max(est[i], options.floor_db) - std::max(truth_db[i], options.floor_db);
      s += d * d;
    }
    return std::sqrt(s / static_cast<double>(est.size()));
  };
  auto residual_variance = [&](const std::vector<double>& est) {
    std::vector<double> r(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) r[i] = est[i] - truth_db[i];
    return detail::variance(r);
  };

  ComparisonReport rep;
  rep.nsr_correlation = detail::pearson(linear(nsr_db), truth_lin);
  rep.sed_correlation = detail::pearson(linear(sed_db), truth_lin);
  rep.nsr_rms_error_db = rms(nsr_db);
  rep.sed_rms_error_db = rms(sed_db);
  const double vn = residual_variance(nsr_db);
  const double vs = residual_variance(sed_db);
  if (vn > 1e-18 && vs > 1e-18) rep.measured_snr_gain_db = 10.0 * std::log10(vs / vn);
  return rep;
}

// Injected pattern power (gain squared, dB) at each cell time of one grid column, normalised.
inline PatternCut truth_cut(const receiver::PowerGrid& grid, double frequency, const PassScenario& scenario) {
  const std::size_t c = nearest_bin(grid, frequency);
  PatternCut cut;
  cut.frequency = grid.frequencies[c];
  cut.dwell = grid.stop_duration;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const double t = grid.cell_time(r, c);
    const double g = scenario.antenna_cut(scenario.angle_at(t), cut.frequency);
    cut.points.push_back({t, 0.0, power_to_db(g * g)});
  }
  return normalize(std::move(cut));
}

}  // namespace sarsweep::analysis
